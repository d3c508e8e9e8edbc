"""Strict JSON run-configuration schema.

One self-describing JSON document drives a run: numbers in decimal, seeds as
unsigned 64-bit decimal integers, unknown keys rejected everywhere. See
README for full examples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .correlations import Eigenstate, Thermal
from .disorder import DisorderConfig
from .errors import ConfigError
from .experiments import (
    EigencorrScenario,
    EigenstateScenario,
    QuenchScenario,
    RunSpec,
    ThermalScenario,
)
from .fock_oracle import K_FLOOR
from .lattice import Decomposition, LatticeBox, decompose, make_box


def load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return raw


def _check_keys(obj: dict, required: set, optional: set, ctx: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{ctx} must be an object")
    keys = set(obj)
    unknown = keys - required - optional
    if unknown:
        raise ConfigError(f"{ctx}: unknown keys {sorted(unknown)}")
    missing = required - keys
    if missing:
        raise ConfigError(f"{ctx}: missing keys {sorted(missing)}")


def _number(obj, key, ctx, kind=float):
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{ctx}.{key} must be a number")
    return kind(v)


def _parse_box(raw, ctx="box") -> LatticeBox:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{ctx} must be a nonempty list of [a, b] pairs")
    ivs = []
    for pair in raw:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError(f"{ctx} entries must be [a, b] pairs")
        ivs.append((int(pair[0]), int(pair[1])))
    return make_box(ivs)


def _parse_distribution(raw, coupling: float, seed: int) -> DisorderConfig:
    _check_keys(
        raw, {"kind"}, {"k_max", "p", "k_min", "k_value"}, "distribution"
    )
    kind = raw["kind"]
    kwargs = {"kind": kind, "coupling": coupling, "master_seed": seed}
    if "k_max" in raw:
        kwargs["k_max"] = _number(raw, "k_max", "distribution")
    if "p" in raw:
        kwargs["p"] = _number(raw, "p", "distribution")
    if "k_min" in raw:
        kwargs["k_min"] = _number(raw, "k_min", "distribution")
    if "k_value" in raw:
        kwargs["k_value"] = _number(raw, "k_value", "distribution")
    return DisorderConfig(**kwargs)


def _parse_time_grid(raw, ctx) -> tuple:
    if isinstance(raw, list):
        if not raw:
            raise ConfigError(f"{ctx}: time grid must be nonempty")
        return tuple(float(t) for t in raw)
    if isinstance(raw, dict):
        _check_keys(raw, {"start", "stop", "step"}, set(), ctx)
        start = _number(raw, "start", ctx)
        stop = _number(raw, "stop", ctx)
        step = _number(raw, "step", ctx)
        if step <= 0 or stop < start:
            raise ConfigError(f"{ctx}: need step > 0 and stop >= start")
        count = int((stop - start) / step + 1e-9) + 1
        return tuple(start + i * step for i in range(count))
    raise ConfigError(f"{ctx}: time grid must be a list or start/stop/step object")


def _parse_alpha(raw, ctx) -> tuple:
    if not isinstance(raw, list):
        raise ConfigError(f"{ctx}: alpha must be a list of [mode, count] pairs")
    pairs = []
    for p in raw:
        if not (isinstance(p, list) and len(p) == 2):
            raise ConfigError(f"{ctx}: alpha entries must be [mode, count] pairs")
        pairs.append((int(p[0]), int(p[1])))
    return tuple(pairs)


def _parse_block_state(raw, ctx):
    _check_keys(raw, {"kind"}, {"alpha", "beta"}, ctx)
    if raw["kind"] == "eigenstate":
        return Eigenstate(modes=_parse_alpha(raw.get("alpha", []), ctx))
    if raw["kind"] == "thermal":
        if "beta" not in raw:
            raise ConfigError(f"{ctx}: thermal block needs beta")
        return Thermal(beta=_number(raw, "beta", ctx))
    raise ConfigError(f"{ctx}: block kind must be 'eigenstate' or 'thermal'")


def _scenario_id(sc) -> str:
    if isinstance(sc, EigencorrScenario):
        return f"eigencorr(power={sc.power:g};s={sc.s:g})"
    if isinstance(sc, EigenstateScenario):
        modes = ";".join(f"{m}:{c}" for m, c in sc.modes) or "ground"
        return f"eigenstate({modes};{sc.time_mode};s={sc.s:g})"
    if isinstance(sc, ThermalScenario):
        return f"thermal(beta={sc.beta:g};s={sc.s:g})"
    blocks = ";".join(
        f"b{i}={'T' + format(b.beta, 'g') if isinstance(b, Thermal) else 'E' + ('|'.join(f'{m}:{c}' for m, c in b.modes) or '0')}"
        for i, b in enumerate(sc.blocks)
    )
    return f"quench({blocks};s={sc.s:g};nt={len(sc.time_grid)})"


def _parse_scenario(raw):
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("scenario must be an object with a 'kind'")
    kind = raw["kind"]
    if kind == "eigencorr":
        _check_keys(raw, {"kind", "s", "power"}, set(), "scenario")
    elif kind == "eigenstate":
        _check_keys(raw, {"kind", "s", "alpha"}, {"time_mode", "time_grid"}, "scenario")
    elif kind == "thermal":
        _check_keys(raw, {"kind", "s", "beta"}, set(), "scenario")
    elif kind == "quench":
        _check_keys(raw, {"kind", "s", "blocks", "time_grid"}, set(), "scenario")
    else:
        raise ConfigError(f"unknown scenario kind {kind!r}")
    s = _number(raw, "s", "scenario")
    if not 0.0 < s <= 1.0:
        raise ConfigError("s out of (0,1]")
    if kind == "eigencorr":
        return EigencorrScenario(power=_number(raw, "power", "scenario"), s=s)
    if kind == "eigenstate":
        modes = _parse_alpha(raw["alpha"], "scenario")
        time_mode = raw.get("time_mode", "envelope")
        grid = ()
        if "time_grid" in raw:
            grid = _parse_time_grid(raw["time_grid"], "scenario.time_grid")
        return EigenstateScenario(modes=modes, s=s, time_mode=time_mode, time_grid=grid)
    if kind == "thermal":
        return ThermalScenario(beta=_number(raw, "beta", "scenario"), s=s)
    blocks = tuple(
        _parse_block_state(b, f"scenario.blocks[{i}]")
        for i, b in enumerate(raw["blocks"])
    )
    grid = _parse_time_grid(raw["time_grid"], "scenario.time_grid")
    return QuenchScenario(blocks=blocks, s=s, time_grid=grid)


def _parse_pairs(raw):
    if raw == "all":
        return None
    if isinstance(raw, list):
        out = []
        for p in raw:
            if not (isinstance(p, list) and len(p) == 2):
                raise ConfigError("pairs entries must be [x_index, y_index]")
            out.append((int(p[0]), int(p[1])))
        return tuple(out)
    raise ConfigError("pairs must be 'all' or a list of index pairs")


@dataclass(frozen=True)
class OracleCase:
    kind: str  # eigenstate | thermal | quench
    times: tuple
    alpha: tuple = ()
    beta: float = 0.0
    blocks: tuple = ()


@dataclass(frozen=True)
class OracleSpec:
    cutoff: int
    tol: float
    k_floor: float
    n_samples: int
    cases: tuple


@dataclass(frozen=True)
class RunConfig:
    """Validated content of one JSON config document."""

    raw: dict
    box: LatticeBox
    disorder: DisorderConfig
    decomposition: Decomposition | None
    spec: RunSpec | None
    fit_bounds: tuple | None
    output_dir: str | None
    oracle: OracleSpec | None


def _parse_oracle(raw, box: LatticeBox) -> OracleSpec:
    _check_keys(
        raw, {"cutoff", "tol", "n_samples", "cases"}, {"k_floor"}, "oracle"
    )
    if box.n_sites > 3:
        raise ConfigError("oracle comparisons need a box of at most 3 sites")
    k_floor = _number(raw, "k_floor", "oracle") if "k_floor" in raw else K_FLOOR
    if k_floor < K_FLOOR:
        raise ConfigError(f"oracle k_floor must be >= {K_FLOOR}")
    cases = []
    for i, c in enumerate(raw["cases"]):
        ctx = f"oracle.cases[{i}]"
        _check_keys(c, {"kind"}, {"times", "alpha", "beta", "blocks"}, ctx)
        kind = c["kind"]
        times = _parse_time_grid(c.get("times", [0.0]), ctx)
        if kind == "eigenstate":
            cases.append(
                OracleCase(kind=kind, times=times, alpha=_parse_alpha(c.get("alpha", []), ctx))
            )
        elif kind == "thermal":
            if "beta" not in c:
                raise ConfigError(f"{ctx}: thermal case needs beta")
            if any(t != 0.0 for t in times):
                raise ConfigError(f"{ctx}: thermal comparisons are static (times [0])")
            cases.append(OracleCase(kind=kind, times=(0.0,), beta=_number(c, "beta", ctx)))
        elif kind == "quench":
            blocks = tuple(
                _parse_block_state(b, f"{ctx}.blocks[{j}]")
                for j, b in enumerate(c.get("blocks", []))
            )
            if not blocks:
                raise ConfigError(f"{ctx}: quench case needs blocks")
            cases.append(OracleCase(kind=kind, times=times, blocks=blocks))
        else:
            raise ConfigError(f"{ctx}: unknown case kind {kind!r}")
    cutoff = int(raw["cutoff"])
    tol = _number(raw, "tol", "oracle")
    n_samples = int(raw["n_samples"])
    if cutoff < 1 or n_samples < 1 or tol <= 0:
        raise ConfigError("oracle needs cutoff >= 1, n_samples >= 1, tol > 0")
    return OracleSpec(
        cutoff=cutoff,
        tol=tol,
        k_floor=float(k_floor),
        n_samples=n_samples,
        cases=tuple(cases),
    )


def parse_config(raw: dict) -> RunConfig:
    """Validate a JSON document for the run and oracle commands."""
    _check_keys(
        raw,
        {"box", "distribution", "lambda", "seed"},
        {"cuts", "n_samples", "scenario", "pairs", "fit", "workers", "output_dir", "oracle"},
        "config",
    )
    box = _parse_box(raw["box"])
    coupling = _number(raw, "lambda", "config")
    seed = raw["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    disorder = _parse_distribution(raw["distribution"], coupling, seed)

    decomposition = None
    if "cuts" in raw:
        cuts = raw["cuts"]
        if not isinstance(cuts, list) or len(cuts) != box.dim:
            raise ConfigError("cuts must list cut positions for every axis")
        decomposition = decompose(box, [[int(c) for c in axis] for axis in cuts])

    spec = None
    if "scenario" in raw:
        if "n_samples" not in raw:
            raise ConfigError("a scenario needs n_samples")
        scenario = _parse_scenario(raw["scenario"])
        pairs = _parse_pairs(raw["pairs"]) if "pairs" in raw else None
        workers = int(raw["workers"]) if "workers" in raw else None
        spec = RunSpec(
            box=box,
            disorder=disorder,
            scenario=scenario,
            n_samples=int(raw["n_samples"]),
            decomposition=decomposition,
            pairs=pairs,
            workers=workers,
            scenario_id=_scenario_id(scenario),
        )

    fit_bounds = None
    if "fit" in raw:
        _check_keys(raw["fit"], set(), {"d_min", "d_max"}, "fit")
        fit_bounds = (
            int(raw["fit"]["d_min"]) if "d_min" in raw["fit"] else None,
            int(raw["fit"]["d_max"]) if "d_max" in raw["fit"] else None,
        )

    oracle = _parse_oracle(raw["oracle"], box) if "oracle" in raw else None

    return RunConfig(
        raw=raw,
        box=box,
        disorder=disorder,
        decomposition=decomposition,
        spec=spec,
        fit_bounds=fit_bounds,
        output_dir=raw.get("output_dir"),
        oracle=oracle,
    )
