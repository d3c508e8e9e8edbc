"""Command line entry point.

Subcommands:

* ``run <config.json>``      - disorder-averaged moments + decay fit
* ``oracle <config.json>``   - closed forms vs truncated-space brute force
* ``fit <moments.csv>``      - refit a decay rate from an existing table
* ``bound-const``            - evaluate the explicit quench bound constant

Outputs are UTF-8; CSV uses ',' separators and '.' decimal points. Exit
codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
On failure a one-line JSON error record is printed to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .config import OracleSpec, RunConfig, load_json, parse_config
from .correlations import (
    Eigenstate,
    Thermal,
    eigenstate_corr,
    evolve_correlations,
    product_block_corr,
    thermal_corr,
)
from .disorder import KField, sample_kfield
from .errors import (
    ConfigError,
    InsufficientData,
    NumericalFailure,
    OsclabError,
    SampleRejected,
)
from .experiments import bound_constant, fit_decay, run_disorder_average
from .fock_oracle import (
    build_truncated_H,
    find_eigenstate,
    oracle_corr_series,
    product_initial_density,
)
from .spectral import ExcitationVector, build_h, diagonalize


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run(cfg: RunConfig) -> int:
    if cfg.spec is None:
        raise ConfigError("run command needs a scenario and n_samples")
    if cfg.output_dir is None:
        raise ConfigError("run command needs output_dir")
    os.makedirs(cfg.output_dir, exist_ok=True)
    started = time.time()
    table = run_disorder_average(cfg.spec)
    table.to_csv(os.path.join(cfg.output_dir, "moments.csv"))

    fit_payload = None
    d_min, d_max = cfg.fit_bounds if cfg.fit_bounds else (None, None)
    try:
        fit = fit_decay(table, d_min=d_min, d_max=d_max)
        fit_payload = fit.to_dict()
        _write_json(os.path.join(cfg.output_dir, "fit.json"), fit_payload)
    except InsufficientData:
        pass  # too few distances: fit.json intentionally absent

    meta = {
        "config": cfg.raw,
        "version": __version__,
        "scenario_id": table.scenario_id,
        "n_samples": table.n_samples,
        "n_rejected": table.n_rejected,
        "rejections": table.metadata.get("rejections", {}),
        "workers": table.metadata.get("workers"),
        "distribution_conforming": cfg.disorder.conforming,
        "fit_written": fit_payload is not None,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_seconds": round(time.time() - started, 3),
    }
    _write_json(os.path.join(cfg.output_dir, "run_meta.json"), meta)
    return 0


def _oracle_case_entries(cfg: RunConfig, oracle: OracleSpec, case, case_no: int):
    disorder = cfg.disorder.conditioned(oracle.k_floor)
    entries = []
    for i in range(oracle.n_samples):
        kf = sample_kfield(disorder, cfg.box, i)
        sd = diagonalize(build_h(kf))
        space, h_trunc = build_truncated_H(kf, oracle.cutoff)
        evals, evecs = np.linalg.eigh(h_trunc)
        if case.kind == "eigenstate":
            exc = ExcitationVector.from_pairs(case.alpha, sd.n_modes)
            psi = find_eigenstate(evals, evecs, sd, exc)
            gots = oracle_corr_series(space, evals, evecs, psi, case.times)
            for t, got in zip(case.times, gots):
                ref = eigenstate_corr(sd, exc, t)
                entries.append((case_no, case.kind, i, t, _dev(ref, got)))
        elif case.kind == "thermal":
            ref = thermal_corr(sd, case.beta)
            got = oracle_corr_series(space, evals, evecs, Thermal(case.beta), [0.0])[0]
            entries.append((case_no, case.kind, i, 0.0, _dev(ref, got)))
        else:
            if cfg.decomposition is None:
                raise ConfigError("oracle quench case needs cuts")
            rho0 = product_initial_density(
                kf, cfg.decomposition, list(case.blocks), oracle.cutoff
            )
            block_corrs = []
            for bi, state in enumerate(case.blocks):
                idx = cfg.decomposition.parent_indices(bi)
                block_kf = KField(
                    box=cfg.decomposition.blocks[bi],
                    k=kf.k[idx],
                    coupling=kf.coupling,
                    sample_index=kf.sample_index,
                    k_max=kf.k_max,
                )
                sd_b = diagonalize(build_h(block_kf))
                if isinstance(state, Thermal):
                    block_corrs.append(thermal_corr(sd_b, state.beta))
                else:
                    block_corrs.append(
                        eigenstate_corr(sd_b, state.excitations(sd_b.n_modes), 0.0)
                    )
            corr0 = product_block_corr(cfg.decomposition, block_corrs)
            gots = oracle_corr_series(space, evals, evecs, rho0, case.times)
            for t, got in zip(case.times, gots):
                ref = evolve_correlations(sd, corr0, t)
                entries.append((case_no, case.kind, i, t, _dev(ref, got)))
    return entries


def _dev(ref, got) -> float:
    return float(np.abs(ref.data - got.data).max())


def _oracle(cfg: RunConfig) -> int:
    if cfg.oracle is None:
        raise ConfigError("oracle command needs an 'oracle' section")
    if cfg.output_dir is None:
        raise ConfigError("oracle command needs output_dir")
    os.makedirs(cfg.output_dir, exist_ok=True)
    entries = []
    for case_no, case in enumerate(cfg.oracle.cases):
        entries.extend(_oracle_case_entries(cfg, cfg.oracle, case, case_no))
    rows = [
        {
            "case": case_no,
            "kind": kind,
            "sample_index": i,
            "t": t,
            "max_abs_dev": dev,
            "pass": dev < cfg.oracle.tol,
        }
        for case_no, kind, i, t, dev in entries
    ]
    worst = max((r["max_abs_dev"] for r in rows), default=0.0)
    ok = all(r["pass"] for r in rows)
    report = {
        "tol": cfg.oracle.tol,
        "cutoff": cfg.oracle.cutoff,
        "k_floor": cfg.oracle.k_floor,
        "n_samples": cfg.oracle.n_samples,
        "entries": rows,
        "max_abs_dev": worst,
        "pass": ok,
    }
    _write_json(os.path.join(cfg.output_dir, "oracle_report.json"), report)
    return 0 if ok else 3


def _fit_cmd(args) -> int:
    from .experiments import MomentTable

    table = MomentTable.from_csv(args.csv)
    fit = fit_decay(table, d_min=args.dmin, d_max=args.dmax)
    print(json.dumps(fit.to_dict(), indent=2, sort_keys=True))
    return 0


def _bound_const_cmd(args) -> int:
    value = bound_constant(args.ctilde, args.cprime, args.eta, args.dim)
    print(repr(value))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osclab",
        description="Correlation decay laboratory for disordered oscillator lattices",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a disorder-averaging scenario")
    p_run.add_argument("config", help="path to JSON config")

    p_orc = sub.add_parser("oracle", help="compare closed forms with the brute-force oracle")
    p_orc.add_argument("config", help="path to JSON config with an 'oracle' section")

    p_fit = sub.add_parser("fit", help="fit a decay rate from a moments.csv")
    p_fit.add_argument("csv", help="path to moments.csv")
    p_fit.add_argument("--dmin", type=int, default=None)
    p_fit.add_argument("--dmax", type=int, default=None)

    p_bc = sub.add_parser("bound-const", help="explicit quench bound constant")
    p_bc.add_argument("--ctilde", type=float, required=True)
    p_bc.add_argument("--cprime", type=float, required=True)
    p_bc.add_argument("--eta", type=float, required=True)
    p_bc.add_argument("--dim", type=int, required=True)

    return parser


def _error_record(exc: BaseException) -> str:
    return json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(parse_config(load_json(args.config)))
        if args.command == "oracle":
            return _oracle(parse_config(load_json(args.config)))
        if args.command == "fit":
            return _fit_cmd(args)
        return _bound_const_cmd(args)
    except ConfigError as exc:
        print(_error_record(exc), file=sys.stderr)
        return 2
    except (NumericalFailure, SampleRejected, OsclabError) as exc:
        print(_error_record(exc), file=sys.stderr)
        return 3
    except OSError as exc:
        print(_error_record(exc), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
