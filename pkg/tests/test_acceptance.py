"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see every line; the
whole suite is deterministic (fixed seeds, derived per-replication
streams).
"""

import time

import numpy as np
import pytest

from pplab import bounds as bnd
from pplab import scenarios
from pplab.scenarios import ScenarioConfig


def _report(name: str, ok: bool, detail: str, elapsed: float, budget: float):
    status = "PASS" if ok else "FAIL"
    print(f"{name} {status} ({elapsed:.1f}s / budget {budget:.0f}s): {detail}")
    assert ok, f"{name}: {detail}"
    assert elapsed < budget, f"{name}: runtime {elapsed:.1f}s over budget {budget:.0f}s"


def test_a1_ot_exactness():
    from pplab.verify_ot import run_ot_verification

    start = time.perf_counter()
    rep = run_ot_verification(seed=0, instances=200)
    elapsed = time.perf_counter() - start
    ok = rep["passed"] and rep["max_cost_err"] < 1e-9 and rep["max_gap"] < 1e-8
    _report(
        "A1 ot-exactness",
        ok,
        f"max cost err {rep['max_cost_err']:.2e}, max duality gap {rep['max_gap']:.2e}",
        elapsed,
        10.0,
    )


def test_a2_mecke_identities():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="mecke-verify",
            d=2,
            t_grid=(50.0,),
            reps=10_000,
            seed=42,
            params={"n": 50},
        )
    )
    elapsed = time.perf_counter() - start
    worst = max(
        (r.distance / r.stderr if r.stderr > 0 else 0.0) for r in res.rows
    )
    _report(
        "A2 mecke-identities",
        res.passed,
        f"8 checks (k in {{1,2}}, two functions, both sources); worst gap {worst:.2f} pooled sigma",
        elapsed,
        60.0,
    )


def test_a3_gilbert_edge_counts():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="gilbert-edges",
            d=2,
            t_grid=(50.0, 100.0, 200.0, 400.0),
            reps=20_000,
            seed=42,
        )
    )
    elapsed = time.perf_counter() - start
    rows = res.rows
    bound_ok = all(r.distance + 3 * r.stderr <= r.bound for r in rows)
    slope = res.summary["slope"]
    detail = (
        "dW+3se vs bound: "
        + ", ".join(f"t={r.t:g}: {r.distance + 3 * r.stderr:.4f}<={r.bound:.4f}" for r in rows)
        + f"; slope {slope:.2f} <= -0.5"
    )
    _report("A3 gilbert-edge-counts", bound_ok and slope <= -0.5, detail, elapsed, 300.0)


def test_a4_edge_length_compound_poisson():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="gilbert-lengths",
            d=2,
            t_grid=(50.0, 100.0, 200.0),
            reps=20_000,
            seed=42,
            params={"b": 1.0, "tv_threshold": 0.1},
        )
    )
    elapsed = time.perf_counter() - start
    tvs = [r.distance for r in res.rows]
    ok = res.summary["decreasing"] and tvs[-1] < 0.1
    _report(
        "A4 edge-length-compound-poisson",
        ok,
        f"discretized TV {', '.join(f'{v:.4f}' for v in tvs)} (decreasing, last < 0.1); "
        "discretized TV lower-bounds the true TV",
        elapsed,
        300.0,
    )


def test_a5_stable_limit():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="distance-power",
            d=2,
            t_grid=(50.0, 100.0, 200.0),
            reps=10_000,
            seed=42,
            params={"tau": 4.0, "dk_threshold": 0.08, "threshold_t": 100.0},
        )
    )
    elapsed = time.perf_counter() - start
    dks = {r.t: r.distance for r in res.rows}
    ok = dks[100.0] < 0.08 and dks[50.0] > dks[200.0]
    _report(
        "A5 stable-limit",
        ok,
        f"dK(t=100)={dks[100.0]:.4f} < 0.08; dK 50->200: {dks[50.0]:.4f} -> {dks[200.0]:.4f}; "
        f"predicted rate exponent {res.rows[0].rate_pred}",
        elapsed,
        300.0,
    )


def test_a6_midpoint_process_kr():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="gilbert-midpoints",
            d=2,
            t_grid=(200.0,),
            reps=1000,
            seed=42,
            params={"a": 1.0, "n_configs": 300},
        )
    )
    elapsed = time.perf_counter() - start
    est = next(r for r in res.rows if r.distance_name == "kr-surrogate")
    floor = next(r for r in res.rows if r.distance_name == "kr-noise-floor")
    excess = est.distance - floor.distance
    ok = excess < 3 * est.stderr
    _report(
        "A6 midpoint-process-kr",
        ok,
        f"surrogate {est.distance:.4f} vs floor {floor.distance:.4f} "
        f"(excess {excess:+.4f} < 3 sigma = {3 * est.stderr:.4f})",
        elapsed,
        180.0,
    )


def test_a7_glauber_suite():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="glauber-verify",
            d=1,
            t_grid=(1.0,),
            reps=100_000,
            seed=42,
            params={"mass": 5.0, "commutation_reps": 100_000},
        )
    )
    elapsed = time.perf_counter() - start
    tv_row = next(r for r in res.rows if r.statistic == "count-law")
    erg_last = [r for r in res.rows if r.statistic == "ergodicity"][-1]
    commutation_ok = all(r.passed for r in res.rows if r.statistic.startswith("commutation"))
    ok = res.passed
    _report(
        "A7 glauber-suite",
        ok,
        f"two-simulator TV {tv_row.distance:.4f} < 0.02; commutation within 3 sigma: "
        f"{commutation_ok}; ergodicity TV at s=8: {erg_last.distance:.4f} < 0.03",
        elapsed,
        180.0,
    )


def test_a8_polytope_diameter():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="polytope",
            d=3,
            t_grid=(100.0, 400.0),
            reps=20_000,
            seed=42,
            params={
                "a": 1.0,
                "gap_threshold": 0.02,
                # the trend between the two gaps sits near the noise floor at
                # the base replication count; the extra replications are cheap
                "reps_by_t": {100.0: 400_000, 400.0: 100_000},
            },
        )
    )
    elapsed = time.perf_counter() - start
    gaps = {r.t: r.distance for r in res.rows}
    ok = gaps[400.0] < 0.02 and gaps[400.0] < gaps[100.0]
    _report(
        "A8 polytope-diameter",
        ok,
        f"|gap| at t=400: {gaps[400.0]:.5f} < 0.02; t=400 gap < t=100 gap "
        f"({gaps[400.0]:.5f} < {gaps[100.0]:.5f}); limit tail e^(-1/2)",
        elapsed,
        240.0,
    )


def test_a9_flats():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="flats",
            d=3,
            t_grid=(100.0,),
            reps=10_000,
            seed=42,
            params={"m": 1, "a": 1.0},
        )
    )
    elapsed = time.perf_counter() - start
    mean_row = next(r for r in res.rows if r.statistic == "flat-midpoint-count")
    const_row = next(r for r in res.rows if r.statistic == "flats-constant")
    ok = res.passed and abs(bnd.flats_constant(3, 1) - np.pi / 4) < 1e-12
    _report(
        "A9 flats",
        ok,
        f"mean |err| {mean_row.distance:.4f} < 3 sigma {3 * mean_row.stderr:.4f} "
        f"(constant pi/4); closed form vs Haar MC |err| {const_row.distance:.5f} "
        f"< {3 * const_row.stderr:.5f}",
        elapsed,
        240.0,
    )


def test_a10_closed_form_identities():
    from scipy.special import erfc

    from pplab.geometry import (
        Domain,
        haar_frame,
        integrated_subspace_determinant,
        steiner_volume,
        subspace_determinant,
        unit_ball_volume,
    )
    from pplab.laws import LevyLaw
    from pplab.rng import derive_rng

    start = time.perf_counter()
    checks = []
    # ball-volume recursion
    checks.append(
        all(
            abs(unit_ball_volume(d) - 2 * np.pi / d * unit_ball_volume(d - 2))
            <= 1e-12 * unit_ball_volume(d)
            for d in range(3, 40)
        )
    )
    # Steiner polynomial: the unit square and the collapsing ball case
    checks.append(
        all(
            abs(steiner_volume(Domain("cube", 2), r) - (np.pi * r**2 + 4 * r + 1)) < 1e-10
            for r in (0.0, 0.25, 1.0)
        )
    )
    checks.append(
        all(
            abs(steiner_volume(Domain("ball", d, radius=0.8), r) - unit_ball_volume(d) * (0.8 + r) ** d)
            < 1e-10
            for d in (2, 3, 4)
            for r in (0.0, 0.5)
        )
    )
    # subspace determinant against the cross-product oracle
    rng = derive_rng(4242)
    sub_ok = True
    for _ in range(200):
        u = rng.standard_normal(3)
        v = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        sub_ok &= abs(subspace_determinant([u], [v]) - np.linalg.norm(np.cross(u, v))) < 1e-10
    checks.append(sub_ok)
    # integrated determinant evaluations and the flats-constant identity
    checks.append(abs(integrated_subspace_determinant(3, 1) - np.pi / 4) < 1e-10)
    checks.append(abs(integrated_subspace_determinant(2, 1) - 2 / np.pi) < 1e-10)
    checks.append(integrated_subspace_determinant(5, 0) == 1.0)
    checks.append(
        all(
            abs(bnd.flats_constant(d, m) - bnd.flats_constant_via_grassmannian(d, m)) < 1e-10
            for d, m in ((3, 1), (5, 1), (5, 2), (7, 3))
        )
    )
    # Levy CDF against its density by numerical differentiation
    law = LevyLaw(scale=np.pi**3 / 8)
    xs = np.array([0.5, 2.0, 8.0, 30.0])
    h = 1e-6
    num = (law.cdf(xs + h) - law.cdf(xs - h)) / (2 * h)
    checks.append(float(np.max(np.abs(num - law.pdf(xs)) / law.pdf(xs))) < 1e-6)
    checks.append(abs(law.cdf(np.array([2.0]))[0] - erfc(np.sqrt(np.pi**3 / 32))) < 1e-12)
    elapsed = time.perf_counter() - start
    _report(
        "A10 closed-form-identities",
        all(checks),
        f"{len(checks)} identity groups (recursion, Steiner, determinants, Levy)",
        elapsed,
        5.0,
    )


def test_a11_mapping_theorem_kr():
    start = time.perf_counter()
    res = scenarios.run(
        ScenarioConfig(
            scenario="kr-estimate",
            d=2,
            t_grid=(3.0,),
            reps=1000,
            seed=42,
            params={"mode": "identity-mapping", "n_configs": 300},
        )
    )
    elapsed = time.perf_counter() - start
    est = next(r for r in res.rows if r.distance_name == "kr-surrogate")
    floor = next(r for r in res.rows if r.distance_name == "kr-noise-floor")
    excess = est.distance - floor.distance
    ok = excess < 3 * est.stderr
    _report(
        "A11 mapping-theorem-kr",
        ok,
        f"surrogate {est.distance:.4f} vs floor {floor.distance:.4f} "
        f"(excess {excess:+.4f} < 3 sigma = {3 * est.stderr:.4f})",
        elapsed,
        120.0,
    )
