"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Oracle-equivalence criteria condition the spring distribution away
from zero and size the boson cutoff so the truncated basis actually reaches
the stated tolerance; conditioning floors and cutoffs are noted per test.
"""

import json
import time

import numpy as np
import pytest

from osclab.cli import main as cli_main
from osclab.correlations import (
    Eigenstate,
    Thermal,
    eigenstate_corr,
    evolve_correlations,
    product_block_corr,
    quench_propagator,
    single_site_corr,
    symplectic_form,
    thermal_corr,
)
from osclab.disorder import DisorderConfig, KField, sample_kfield
from osclab.experiments import (
    EigencorrScenario,
    EigenstateScenario,
    QuenchScenario,
    RunSpec,
    ThermalScenario,
    bound_constant,
    fit_decay,
    run_disorder_average,
    single_site_moment_bound_check,
)
from osclab.fock_oracle import (
    build_truncated_H,
    find_eigenstate,
    oracle_corr_series,
    product_initial_density,
)
from osclab.lattice import decompose, make_box
from osclab.spectral import ExcitationVector, build_h, diagonalize, spectrum_bounds

UNIFORM04 = dict(kind="uniform", k_max=4.0)
CHAIN100 = make_box([(0, 99)])
SEED5 = 20260808  # shared by criteria 5 and 8


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_oracle_eigenstates():
    started = time.time()
    cfg = DisorderConfig(master_seed=424242, k_min=0.5, **UNIFORM04)
    box = make_box([(0, 1)])
    times = [0.0, 0.3, 1.0]
    worst = 0.0
    for i in range(5):
        kf = sample_kfield(cfg, box, i)
        sd = diagonalize(build_h(kf))
        space, h = build_truncated_H(kf, 25)
        evals, evecs = np.linalg.eigh(h)
        for alpha in [(0, 0), (1, 0), (2, 1)]:
            exc = ExcitationVector(np.array(alpha))
            psi = find_eigenstate(evals, evecs, sd, exc)
            for t, got in zip(times, oracle_corr_series(space, evals, evecs, psi, times)):
                ref = eigenstate_corr(sd, exc, t)
                worst = max(worst, float(np.abs(got.data - ref.data).max()))
    elapsed = time.time() - started
    ok = worst <= 1e-6 and elapsed < 120.0
    _report(1, "oracle eigenstates", ok, f"max dev {worst:.2e} <= 1e-06; {elapsed:.1f}s < 120s")
    assert worst <= 1e-6
    assert elapsed < 120.0


def test_criterion_2_oracle_thermal():
    started = time.time()
    worst = 0.0
    # one site: k >= 0.5 conditioned, cutoff 80 covers beta = 0.5 at gamma = 0.5
    cfg1 = DisorderConfig(master_seed=777, k_min=0.5, **UNIFORM04)
    box1 = make_box([(0, 0)])
    for i in range(3):
        kf = sample_kfield(cfg1, box1, i)
        sd = diagonalize(build_h(kf))
        space, h = build_truncated_H(kf, 80)
        evals, evecs = np.linalg.eigh(h)
        for beta in (0.5, 1.0, 5.0):
            got = oracle_corr_series(space, evals, evecs, Thermal(beta), [0.0])[0]
            worst = max(worst, float(np.abs(got.data - thermal_corr(sd, beta).data).max()))
    # two sites: k >= 2.0 conditioned keeps the cutoff affordable at beta = 0.5
    cfg2 = DisorderConfig(master_seed=778, k_min=2.0, **UNIFORM04)
    box2 = make_box([(0, 1)])
    for i in range(2):
        kf = sample_kfield(cfg2, box2, i)
        sd = diagonalize(build_h(kf))
        space, h = build_truncated_H(kf, 40)
        evals, evecs = np.linalg.eigh(h)
        for beta in (0.5, 1.0, 5.0):
            got = oracle_corr_series(space, evals, evecs, Thermal(beta), [0.0])[0]
            worst = max(worst, float(np.abs(got.data - thermal_corr(sd, beta).data).max()))
    elapsed = time.time() - started
    ok = worst <= 1e-6 and elapsed < 120.0
    _report(2, "oracle thermal", ok, f"max dev {worst:.2e} <= 1e-06; {elapsed:.1f}s < 120s")
    assert worst <= 1e-6
    assert elapsed < 120.0


def test_criterion_3_oracle_quench():
    started = time.time()
    cfg = DisorderConfig(master_seed=779, k_min=1.0, **UNIFORM04)
    box = make_box([(0, 1)])
    dec = decompose(box, [[1]])
    times = [0.0, 0.3, 1.0]
    cutoff = 36
    mixtures = [
        (Eigenstate(), Eigenstate()),
        (Thermal(1.0), Eigenstate(modes=((0, 1),))),
        (Eigenstate(modes=((0, 2),)), Thermal(2.0)),
    ]
    worst = 0.0
    for blocks in mixtures:
        for i in range(3):
            kf = sample_kfield(cfg, box, i)
            sd = diagonalize(build_h(kf))
            space, h = build_truncated_H(kf, cutoff)
            evals, evecs = np.linalg.eigh(h)
            rho0 = product_initial_density(kf, dec, list(blocks), cutoff)
            corrs = []
            for bi, state in enumerate(blocks):
                idx = dec.parent_indices(bi)
                sd_b = diagonalize(
                    build_h(KField(box=dec.blocks[bi], k=kf.k[idx], coupling=kf.coupling))
                )
                if isinstance(state, Thermal):
                    corrs.append(thermal_corr(sd_b, state.beta))
                else:
                    corrs.append(eigenstate_corr(sd_b, state.excitations(1), 0.0))
            corr0 = product_block_corr(dec, corrs)
            for t, got in zip(times, oracle_corr_series(space, evals, evecs, rho0, times)):
                ref = evolve_correlations(sd, corr0, t)
                worst = max(worst, float(np.abs(got.data - ref.data).max()))
    elapsed = time.time() - started
    ok = worst <= 1e-6 and elapsed < 120.0
    _report(3, "oracle quench", ok, f"max dev {worst:.2e} <= 1e-06; {elapsed:.1f}s < 120s")
    assert worst <= 1e-6
    assert elapsed < 120.0


def test_criterion_4_exact_invariants():
    started = time.time()
    shapes = [
        [(0, 9)], [(0, 14)], [(0, 19)], [(0, 2), (0, 3)], [(0, 3), (0, 3)],
        [(0, 1), (0, 6)], [(0, 4), (0, 2)], [(0, 1), (0, 2), (0, 1)],
    ]
    defects = {
        "orth": 0.0, "bounds": 0.0, "v0": 0.0, "symplectic": 0.0,
        "group": 0.0, "ccr": 0.0, "thermal_ground": 0.0,
    }
    thermal_checked = 0
    for i in range(200):
        box = make_box(shapes[i % len(shapes)])
        cfg = DisorderConfig(master_seed=31337, **UNIFORM04)
        kf = sample_kfield(cfg, box, i)
        sd = diagonalize(build_h(kf))
        n = box.n_sites
        j = symplectic_form(n)

        defects["orth"] = max(
            defects["orth"], float(np.abs(sd.vectors.T @ sd.vectors - np.eye(n)).max())
        )
        lo, hi = spectrum_bounds(kf)
        defects["bounds"] = max(
            defects["bounds"],
            max(lo - sd.eigvals.min(), sd.eigvals.max() - hi, 0.0),
        )
        defects["v0"] = max(
            defects["v0"], float(np.abs(quench_propagator(sd, 0.0) - np.eye(2 * n)).max())
        )
        vt = quench_propagator(sd, 0.7)
        defects["symplectic"] = max(
            defects["symplectic"], float(np.abs(vt @ j @ vt.T - j).max())
        )
        va = quench_propagator(sd, 0.3)
        vb = quench_propagator(sd, 0.4)
        defects["group"] = max(defects["group"], float(np.abs(va @ vb - vt).max()))

        rng = np.random.default_rng([31337, i, 1])
        exc = ExcitationVector(rng.integers(0, 4, size=n))
        states = [
            eigenstate_corr(sd, exc, 0.0),
            thermal_corr(sd, 1.0),
            single_site_corr(float(kf.k[0]), int(rng.integers(0, 5))),
        ]
        dec = decompose(box, [[box.intervals[0][0] + 1]] + [[]] * (box.dim - 1))
        block_corrs = []
        for bi in range(dec.n_blocks):
            idx = dec.parent_indices(bi)
            sd_b = diagonalize(
                build_h(KField(box=dec.blocks[bi], k=kf.k[idx], coupling=kf.coupling))
            )
            block_corrs.append(thermal_corr(sd_b, 2.0))
        states.append(evolve_correlations(sd, product_block_corr(dec, block_corrs), 0.8))
        defects["ccr"] = max(defects["ccr"], max(c.ccr_defect() for c in states))

        if sd.min_freq >= 0.3:
            dev = np.abs(
                thermal_corr(sd, 50.0).data
                - eigenstate_corr(sd, ExcitationVector.zeros(n), 0.0).data
            ).max()
            defects["thermal_ground"] = max(defects["thermal_ground"], float(dev))
            thermal_checked += 1

    elapsed = time.time() - started
    checks = {
        "orth": defects["orth"] <= 1e-10,
        "bounds": defects["bounds"] <= 1e-10,
        "v0": defects["v0"] <= 1e-12,
        "symplectic": defects["symplectic"] <= 1e-10,
        "group": defects["group"] <= 1e-9,
        "ccr": defects["ccr"] <= 1e-10,
        "thermal_ground": defects["thermal_ground"] <= 1e-8,
    }
    ok = all(checks.values()) and thermal_checked >= 20 and elapsed < 60.0
    detail = "; ".join(f"{k}={v:.1e}" for k, v in defects.items())
    _report(4, "exact invariants", ok, f"{detail}; {thermal_checked} thermal checks; {elapsed:.1f}s < 60s")
    assert checks == {k: True for k in checks}
    assert thermal_checked >= 20
    assert elapsed < 60.0


def test_criterion_5_decay_shape():
    started = time.time()
    disorder = DisorderConfig(master_seed=SEED5, **UNIFORM04)
    ec_table = run_disorder_average(
        RunSpec(
            box=CHAIN100,
            disorder=disorder,
            scenario=EigencorrScenario(power=-0.5, s=0.5),
            n_samples=500,
            workers=1,
            scenario_id="eigencorr(power=-0.5;s=0.5)",
        )
    )
    ec_fit = fit_decay(ec_table, d_min=2, d_max=20)
    es_table = run_disorder_average(
        RunSpec(
            box=CHAIN100,
            disorder=disorder,
            scenario=EigenstateScenario(modes=((0, 3), (17, 2), (42, 1)), s=0.5),
            n_samples=500,
            workers=1,
        )
    )
    es_fit = fit_decay(es_table, d_min=2, d_max=20)
    elapsed = time.time() - started
    checks = {
        "eigencorr eta_hat > 0.1": ec_fit.eta_hat > 0.1,
        "eigencorr r2 >= 0.9": ec_fit.r2 >= 0.9,
        "eigenstate eta_hat > 0.05": es_fit.eta_hat > 0.05,
        "eigenstate r2 >= 0.85": es_fit.r2 >= 0.85,
        "runtime < 600s": elapsed < 600.0,
    }
    ok = all(checks.values())
    _report(
        5,
        "decay shape",
        ok,
        f"eigencorr eta_hat={ec_fit.eta_hat:.4f} r2={ec_fit.r2:.4f}; "
        f"eigenstate eta_hat={es_fit.eta_hat:.4f} r2={es_fit.r2:.4f}; {elapsed:.0f}s",
    )
    failed = [name for name, good in checks.items() if not good]
    assert not failed, f"failed clauses: {failed}"


def test_criterion_6_quench_uniformity(monkeypatch):
    monkeypatch.setenv("OSCLAB_THREADS", "8")
    started = time.time()
    box = CHAIN100
    dec = decompose(box, [[25, 50, 75]])
    disorder = DisorderConfig(master_seed=SEED5 + 6, **UNIFORM04)

    def run(t_max):
        grid = tuple(0.5 * i for i in range(int(t_max / 0.5) + 1))
        return run_disorder_average(
            RunSpec(
                box=box,
                disorder=disorder,
                scenario=QuenchScenario(blocks=(Thermal(1.0),) * 4, s=1.0 / 6.0, time_grid=grid),
                n_samples=500,
                decomposition=dec,
                workers=8,
            )
        )

    t50 = run(50.0)
    t100 = run(100.0)

    d50, m50, e50, _ = t50.distance_bins(0, 99)
    d100, m100, e100, _ = t100.distance_bins(0, 99)
    assert np.array_equal(d50, d100)
    tol = 2.0 * np.sqrt(e50**2 + e100**2) + 1e-12
    gaps = np.abs(m100 - m50)
    bins_ok = bool((gaps <= tol).all())
    # decay fit over the full distance range (criterion fixes no window; the
    # within-block thermal plateau makes short windows misleading)
    fit50 = fit_decay(t50)
    fit100 = fit_decay(t100)
    elapsed = time.time() - started
    checks = {
        "per-distance sup means agree within 2 stderr": bins_ok,
        "decay rate positive (T=50)": fit50.eta_hat > 0.0,
        "decay rate positive (T=100)": fit100.eta_hat > 0.0,
        "r2 >= 0.8 (T=50)": fit50.r2 >= 0.8,
        "r2 >= 0.8 (T=100)": fit100.r2 >= 0.8,
        "runtime < 900s": elapsed < 900.0,
    }
    ok = all(checks.values())
    _report(
        6,
        "quench uniformity",
        ok,
        f"max bin gap {gaps.max():.2e} (max allowed {tol[np.argmax(gaps)]:.2e}); "
        f"T=50 eta={fit50.eta_hat:.4f} r2={fit50.r2:.4f}; "
        f"T=100 eta={fit100.eta_hat:.4f} r2={fit100.r2:.4f}; {elapsed:.0f}s",
    )
    failed = [name for name, good in checks.items() if not good]
    assert not failed, f"failed clauses: {failed}"


def test_criterion_7_scalar_checks():
    started = time.time()
    # disorder-averaged inverse-quartic-root moment through the full pipeline
    table = run_disorder_average(
        RunSpec(
            box=make_box([(0, 0)]),
            disorder=DisorderConfig(master_seed=SEED5 + 7, **UNIFORM04),
            scenario=EigencorrScenario(power=-0.5, s=0.5),
            n_samples=100_000,
            workers=1,
        )
    )
    moment = float(table.moment_mean[0])
    moment_ok = abs(moment - 1.121195220338286) <= 0.01

    bc = bound_constant(1.0, 1.0, np.log(2.0), 1)
    bc_ok = bc == 16.0

    exact = single_site_moment_bound_check(
        DisorderConfig(kind="point", k_value=2.0, master_seed=1), n_max=5, n_samples=10
    )
    mc = single_site_moment_bound_check(
        DisorderConfig(master_seed=SEED5 + 8, **UNIFORM04), n_max=5, n_samples=20_000
    )
    ratio_ok = exact.passed and mc.passed

    elapsed = time.time() - started
    ok = moment_ok and bc_ok and ratio_ok and elapsed < 60.0
    _report(
        7,
        "closed-form scalars",
        ok,
        f"moment={moment:.5f} (target 1.12120 +- 0.01); bound_const={bc!r}; "
        f"ratio checks exact={exact.passed} mc={mc.passed}; {elapsed:.1f}s < 60s",
    )
    assert moment_ok
    assert bc_ok
    assert ratio_ok
    assert elapsed < 60.0


def test_criterion_8_determinism(tmp_path, monkeypatch):
    monkeypatch.setenv("OSCLAB_THREADS", "8")
    started = time.time()
    payloads = []
    for workers in (1, 8):
        out = tmp_path / f"w{workers}"
        cfg = {
            "box": [[0, 99]],
            "distribution": UNIFORM04,
            "lambda": 1.0,
            "seed": SEED5,
            "n_samples": 500,
            "scenario": {"kind": "eigencorr", "power": -0.5, "s": 0.5},
            "fit": {"d_min": 2, "d_max": 20},
            "workers": workers,
            "output_dir": str(out),
        }
        path = tmp_path / f"cfg{workers}.json"
        path.write_text(json.dumps(cfg), encoding="utf-8")
        assert cli_main(["run", str(path)]) == 0
        payloads.append(
            ((out / "moments.csv").read_bytes(), (out / "fit.json").read_bytes())
        )
    elapsed = time.time() - started
    identical = payloads[0] == payloads[1]
    _report(
        8,
        "worker-count determinism",
        identical,
        f"moments.csv and fit.json byte-identical at 1 vs 8 workers: {identical}; {elapsed:.0f}s",
    )
    assert identical
