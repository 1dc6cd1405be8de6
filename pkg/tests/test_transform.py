from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pplab.configuration import Configuration
from pplab.rng import derive_rng
from pplab.transform import (
    RescaleLaw,
    SymmetricKernel,
    distance_kernel,
    distance_power_kernel,
    edge_midpoint_process,
    identity_kernel,
    induce,
    max_pair_distance,
    midpoint_kernel,
    pair_count_within,
    pair_midpoints,
    pair_sum_inverse_power,
    pair_sum_power,
    rescale,
    signed_power_transform,
    u_statistic_count,
    u_statistic_sum,
)


def _random_config(rng, n, d=2):
    return Configuration.from_array(rng.uniform(size=(n, d)), space="test")


def test_induce_identity_is_input():
    cfg = _random_config(derive_rng(1), 9)
    out = induce(cfg, identity_kernel(target_space="test"))
    assert out == cfg


def test_induce_collinear_distances():
    cfg = Configuration.from_array(np.array([[0.0], [1.0], [2.0]]), space="line")
    out = induce(cfg, distance_kernel())
    assert out.atoms == {1.0: 2, 2.0: 1}


def test_induce_mass_equals_ordered_loop():
    rng = derive_rng(2)
    cfg = _random_config(rng, 10)
    pts = cfg.as_array()
    out = induce(cfg, distance_kernel(cutoff=0.4))
    ordered = 0
    for i in range(10):
        for j in range(10):
            if i != j and np.linalg.norm(pts[i] - pts[j]) <= 0.4:
                ordered += 1
    assert out.total() == ordered // 2


def test_induce_empty_when_k_exceeds_count():
    cfg = _random_config(derive_rng(3), 1)
    assert induce(cfg, distance_kernel()).total() == 0


def test_induce_respects_multiplicity():
    cfg = Configuration({(0.0, 0.0): 2, (1.0, 0.0): 1}, space="t")
    out = induce(cfg, distance_kernel())
    # three points, three pairs: two at distance 1, one at distance 0
    assert out.atoms == {0.0: 1, 1.0: 2}


def test_induce_permutation_invariant():
    rng = derive_rng(4)
    pts = rng.uniform(size=(8, 2))
    a = induce(Configuration.from_array(pts, space="t"), midpoint_kernel(0.5))
    b = induce(Configuration.from_array(pts[::-1], space="t"), midpoint_kernel(0.5))
    assert a == b


def test_kernel_arity_guard():
    with pytest.raises(ValueError):
        SymmetricKernel(k=5, fn=lambda pts: 0.0)


def test_u_statistic_count_examples():
    rng = derive_rng(5)
    cfg = _random_config(rng, 12)
    kern = distance_kernel(cutoff=0.3)
    assert u_statistic_count(cfg, kern) == induce(cfg, kern).total()
    assert u_statistic_count(Configuration(space="test"), kern) == 0
    pts = cfg.as_array()
    brute = sum(
        1
        for i, j in combinations(range(12), 2)
        if np.linalg.norm(pts[i] - pts[j]) <= 0.3
    )
    assert u_statistic_count(cfg, kern) == brute
    # interval restriction on the distance values
    in_band = u_statistic_count(cfg, distance_kernel(), target_set=(0.1, 0.3))
    brute_band = sum(
        1
        for i, j in combinations(range(12), 2)
        if 0.1 <= np.linalg.norm(pts[i] - pts[j]) <= 0.3
    )
    assert in_band == brute_band


def test_u_statistic_sum_examples():
    rng = derive_rng(6)
    cfg = _random_config(rng, 9)
    ones = SymmetricKernel(k=2, fn=lambda pts: 1.0)
    assert u_statistic_sum(cfg, ones) == comb(9, 2)
    pts = cfg.as_array()
    val = u_statistic_sum(cfg, distance_power_kernel(1.5))
    brute = sum(
        np.linalg.norm(pts[i] - pts[j]) ** -1.5 for i, j in combinations(range(9), 2)
    )
    assert val == pytest.approx(brute, rel=1e-12)


def test_edge_midpoints():
    cfg = Configuration.from_array(np.array([[0.0, 0.0], [0.4, 0.0], [3.0, 3.0]]), space="t")
    out = edge_midpoint_process(cfg, 0.5)
    assert out.atoms == {(0.2, 0.0): 1}
    assert edge_midpoint_process(cfg, 0.0).total() == 0


def test_midpoint_count_matches_pair_oracle():
    rng = derive_rng(7)
    pts = rng.uniform(size=(25, 2))
    cfg = Configuration.from_array(pts, space="t")
    out = edge_midpoint_process(cfg, 0.3)
    brute = sum(
        1 for i, j in combinations(range(25), 2) if np.linalg.norm(pts[i] - pts[j]) <= 0.3
    )
    assert out.total() == brute


def test_rescale():
    cfg = Configuration({2.0: 1}, space="R")
    assert rescale(cfg, RescaleLaw(gamma=1.0, t=3.0)).atoms == {6.0: 1}
    assert rescale(cfg, RescaleLaw(gamma=0.0, t=3.0)) == cfg
    vec = Configuration({(1.0, 2.0): 3}, space="R2")
    out = rescale(vec, RescaleLaw(gamma=2.0, t=2.0))
    assert out.atoms == {(4.0, 8.0): 3}
    assert out.total() == vec.total()


def test_signed_power_transform():
    cfg = Configuration({1.0: 1, -4.0: 2, 0.0: 5}, space="R")
    out = signed_power_transform(cfg, alpha=0.5, gamma=0.0, t=7.0)
    assert out.atoms == {1.0: 1, -0.5: 2}  # zero atoms dropped
    with pytest.raises(ValueError):
        signed_power_transform(cfg, alpha=1.5, gamma=0.0, t=1.0)


def test_signed_power_matches_direct_formula():
    rng = derive_rng(8)
    pts = rng.uniform(size=(6, 2))
    cfg = Configuration.from_array(pts, space="t")
    induced = induce(cfg, distance_power_kernel(2.0))
    out = signed_power_transform(induced, alpha=0.5, gamma=2.0, t=3.0)
    expected = sorted(
        3.0**2 * (np.linalg.norm(pts[i] - pts[j]) ** -2.0) ** -0.5
        for i, j in combinations(range(6), 2)
    )
    assert sorted(out.atoms) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 40), st.floats(0.01, 0.7), st.integers(0, 10_000))
def test_fast_pair_paths_match_induce(n, cutoff, seed):
    rng = derive_rng(seed)
    pts = rng.uniform(size=(n, 2))
    cfg = Configuration.from_array(pts, space="t")
    assert pair_count_within(pts, cutoff) == u_statistic_count(cfg, distance_kernel(cutoff))
    mids = pair_midpoints(pts, cutoff)
    assert len(mids) == pair_count_within(pts, cutoff)
    s_direct = pair_sum_power(pts, 1.0, cutoff)
    s_ref = u_statistic_sum(cfg, distance_kernel(cutoff))
    assert s_direct == pytest.approx(s_ref, rel=1e-9, abs=1e-12)


def test_inverse_power_and_diameter_paths():
    rng = derive_rng(9)
    pts = rng.uniform(size=(30, 2))
    cfg = Configuration.from_array(pts, space="t")
    assert pair_sum_inverse_power(pts, 4.0) == pytest.approx(
        u_statistic_sum(cfg, distance_power_kernel(4.0)), rel=1e-12
    )
    brute = max(
        np.linalg.norm(pts[i] - pts[j]) for i, j in combinations(range(30), 2)
    )
    assert max_pair_distance(pts) == pytest.approx(brute, rel=1e-14)
    assert max_pair_distance(pts[:1]) == 0.0


def test_tree_path_equals_dense_path():
    rng = derive_rng(10)
    pts = rng.uniform(size=(800, 2))
    dense = sum(
        1 for i, j in combinations(range(300), 2) if np.linalg.norm(pts[i] - pts[j]) <= 0.05
    )
    assert pair_count_within(pts[:300], 0.05) == dense
