import numpy as np
import pytest

from pplab.geometry import Domain
from pplab.sampling import (
    ConstantG,
    NeighborCountG,
    PairProximityG,
    SingletonNeighborG,
    mecke_check,
)

DOM = Domain("cube", 2)


def test_k1_constant_poisson():
    lhs, rhs, pooled = mecke_check(DOM, 10.0, 1, ConstantG(1), 4000, 21)
    assert rhs == pytest.approx(10.0, abs=1e-12)  # right side has no noise here
    assert abs(lhs - rhs) < 3 * pooled


def test_k2_constant_poisson_factorial_moment():
    lhs, rhs, pooled = mecke_check(DOM, 10.0, 2, ConstantG(2), 6000, 22)
    assert rhs == pytest.approx(100.0, abs=1e-12)
    assert abs(lhs - rhs) < 3 * pooled


def test_k1_constant_binomial_exact():
    lhs, rhs, pooled = mecke_check(DOM, 10.0, 1, ConstantG(1), 200, 23, mode="binomial", n=17)
    assert lhs == pytest.approx(17.0)
    assert rhs == pytest.approx(17.0)


def test_k2_proximity_poisson():
    lhs, rhs, pooled = mecke_check(DOM, 50.0, 2, PairProximityG(0.1), 4000, 24)
    assert pooled > 0
    assert abs(lhs - rhs) < 3 * pooled


def test_k2_proximity_binomial():
    lhs, rhs, pooled = mecke_check(
        DOM, 50.0, 2, PairProximityG(0.1), 4000, 25, mode="binomial", n=50
    )
    assert abs(lhs - rhs) < 3 * pooled


def test_config_dependent_functions():
    for k, g in ((1, SingletonNeighborG(0.15)), (2, NeighborCountG(0.15))):
        lhs, rhs, pooled = mecke_check(DOM, 20.0, k, g, 4000, 26 + k)
        assert abs(lhs - rhs) < 3 * pooled, (k, lhs, rhs, pooled)


def test_vectorized_sums_match_generic_loop():
    rng = np.random.default_rng(3)
    pts = rng.uniform(size=(14, 2))
    for g in (ConstantG(2), PairProximityG(0.3), NeighborCountG(0.3), SingletonNeighborG(0.3)):
        fast = g.config_sum(pts)
        slow = super(type(g), g).config_sum(pts)
        assert fast == pytest.approx(slow, abs=1e-9), type(g).__name__


def test_rejects_bad_arity_and_unbounded():
    with pytest.raises(ValueError):
        mecke_check(DOM, 5.0, 3, ConstantG(3), 10, 0)
    g = ConstantG(1)
    g.bound = float("inf")
    with pytest.raises(ValueError):
        mecke_check(DOM, 5.0, 1, g, 10, 0)
