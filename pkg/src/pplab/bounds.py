"""Numeric evaluation of the explicit approximation bounds and constants.

The pair-kernel integrals over the unit cube reduce, for d <= 2, to
closed-form ball/box intersection volumes integrated by adaptive
quadrature; higher dimensions fall back to nested Monte Carlo with a
reported standard error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, exp, factorial, log, perm, pi, sqrt

import numpy as np
from scipy import integrate

from .geometry import cube_shell_constant, unit_ball_volume
from .laws import CompoundPoissonLaw, LevyLaw, PoissonLaw, StableSeriesLaw, stable_series_window
from .rng import derive_rng

QUAD_ABS_TOL = 1e-12


# ---------------------------------------------------------------------------
# Ball/cube intersection integrals.
#
# a_unit(h...) below work in units of the ball radius; the d = 2 strip and
# corner contributions are rescaled one-dimensional and two-dimensional
# quadratures of smooth O(1) integrands, so no precision is lost for tiny
# cutoffs.
# ---------------------------------------------------------------------------


def _segment_area_unit(h: float) -> float:
    # area of {y in unit disc : y_1 <= -h}, 0 <= h <= 1
    if h >= 1.0:
        return 0.0
    return float(np.arccos(h) - h * np.sqrt(1.0 - h * h))


def _quadrant_excess_unit(a: float, b: float) -> float:
    # area of {y in unit disc : y_1 <= -a, y_2 <= -b}, needs a^2 + b^2 < 1
    if a * a + b * b >= 1.0:
        return 0.0

    def g(x):
        return 0.5 * (x * np.sqrt(1.0 - x * x) + np.arcsin(x)) - b * x

    hi = np.sqrt(1.0 - b * b)
    return float(g(hi) - g(a))


def disc_square_area_unit(h1: float, h2: float) -> float:
    """Area of the unit disc clipped by the quadrant {y_1 >= -h1, y_2 >= -h2}.

    h1, h2 are the center's distances to the two nearest (adjacent) sides,
    in units of the radius; h >= 1 means no clipping on that side.
    """
    area = pi
    if h1 < 1.0:
        area -= _segment_area_unit(h1)
    if h2 < 1.0:
        area -= _segment_area_unit(h2)
    area += _quadrant_excess_unit(h1, h2)
    return area


@lru_cache(maxsize=None)
def _edge_strip_constants_2d() -> tuple[float, float]:
    # integrals over h in [0,1] of phi(h) and phi(h)^2, phi = pi - segment
    c1, _ = integrate.quad(
        lambda h: pi - _segment_area_unit(h), 0.0, 1.0, epsabs=QUAD_ABS_TOL, epsrel=1e-12
    )
    c3, _ = integrate.quad(
        lambda h: (pi - _segment_area_unit(h)) ** 2, 0.0, 1.0, epsabs=QUAD_ABS_TOL, epsrel=1e-12
    )
    return c1, c3


@lru_cache(maxsize=None)
def _corner_constants_2d() -> tuple[float, float]:
    # integrals over the unit corner square of the clipped area and its square
    c2, _ = integrate.dblquad(
        lambda h1, h2: disc_square_area_unit(h1, h2),
        0.0,
        1.0,
        0.0,
        1.0,
        epsabs=1e-11,
        epsrel=1e-11,
    )
    c4, _ = integrate.dblquad(
        lambda h1, h2: disc_square_area_unit(h1, h2) ** 2,
        0.0,
        1.0,
        0.0,
        1.0,
        epsabs=1e-11,
        epsrel=1e-11,
    )
    return c2, c4


def cube_pair_integrals(d: int, cutoff: float) -> tuple[float, float]:
    """(I2, I3) for the unit cube: with A(x) = vol(cube intersect B(x, u)),
    I2 = integral of A over the cube and I3 = integral of A^2.

    Exact-to-quadrature for d in {1, 2}; requires cutoff <= 1/2 so that a
    ball can clip at most adjacent faces.
    """
    u = float(cutoff)
    if u < 0:
        raise ValueError("cutoff must be nonnegative")
    if u == 0.0:
        return 0.0, 0.0
    if u > 0.5:
        raise ValueError("quadrature path needs cutoff <= 1/2")
    if d == 1:
        return 2 * u - u * u, 4 * u * u - (10.0 / 3.0) * u**3
    if d == 2:
        c1, c3 = _edge_strip_constants_2d()
        c2, c4 = _corner_constants_2d()
        core = (1 - 2 * u) ** 2
        edge = 4 * (1 - 2 * u)
        i2 = core * pi * u**2 + edge * u**3 * c1 + 4 * u**4 * c2
        i3 = core * (pi * u**2) ** 2 + edge * u**5 * c3 + 4 * u**6 * c4
        return i2, i3
    raise ValueError("quadrature path implemented for d <= 2; use the Monte Carlo path")


@dataclass(frozen=True)
class RTermResult:
    value: float
    r_hat: float
    stderr: float | None = None
    method: str = "quadrature"


def r_term(
    d: int,
    t: float,
    cutoff: float,
    k: int = 2,
    method: str = "auto",
    rng_seed: int = 0,
    n_outer: int = 100_000,
    n_inner: int = 1_000,
) -> RTermResult:
    """Maximal squared-inner-integral term for a pair kernel on the unit cube
    whose admissible set is {|x - y| <= cutoff}.

    For k = 1 the term is zero by convention.  The quadrature path covers
    d <= 2; otherwise (or on request) a nested Monte Carlo estimate is
    returned with its standard error.  ``r_hat`` is the uniform bound
    t * kappa_d * cutoff^d on the inner integral; the term itself is
    always dominated by k! * mass * r_hat.
    """
    if k == 1:
        return RTermResult(value=0.0, r_hat=0.0, stderr=None, method="convention")
    if k != 2:
        raise ValueError("pair path supports k in {1, 2}")
    kd = unit_ball_volume(d)
    r_hat = t * kd * cutoff**d
    if method == "auto":
        method = "quadrature" if d <= 2 and cutoff <= 0.5 else "mc"
    if method == "quadrature":
        _, i3 = cube_pair_integrals(d, cutoff)
        return RTermResult(value=t**3 * i3, r_hat=r_hat, stderr=None, method="quadrature")
    value, se = _r_term_nested_mc(d, t, cutoff, rng_seed, n_outer, n_inner)
    return RTermResult(value=value, r_hat=r_hat, stderr=se, method="mc")


def _r_term_nested_mc(d, t, cutoff, rng_seed, n_outer, n_inner):
    rng = derive_rng(rng_seed, 31_337)
    kd = unit_ball_volume(d)
    ball_vol = kd * cutoff**d
    prods = np.empty(n_outer)
    chunk = max(1, 200_000 // max(1, 2 * n_inner * d))
    i = 0
    while i < n_outer:
        j = min(n_outer, i + chunk)
        nb = j - i
        x = rng.uniform(size=(nb, 1, d))
        # two independent inner estimates keep the product unbiased for A^2
        g = rng.standard_normal((nb, 2 * n_inner, d))
        g /= np.linalg.norm(g, axis=2, keepdims=True)
        radii = cutoff * rng.uniform(size=(nb, 2 * n_inner, 1)) ** (1.0 / d)
        y = x + g * radii
        inside = np.all((y >= 0.0) & (y <= 1.0), axis=2)
        a1 = ball_vol * inside[:, :n_inner].mean(axis=1)
        a2 = ball_vol * inside[:, n_inner:].mean(axis=1)
        prods[i:j] = a1 * a2
        i = j
    value = t**3 * float(prods.mean())
    se = t**3 * float(prods.std(ddof=1) / sqrt(n_outer))
    return value, se


# ---------------------------------------------------------------------------
# Moments of the edge-count statistic (sum over subsets of the tuple index
# set, each term a product of the pair integrals above).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentPair:
    """First and second moment of the induced process's total mass."""

    mean: float
    second_moment: float
    method: str = "quadrature"
    mean_se: float = 0.0
    second_se: float = 0.0

    def jensen_defect(self) -> float:
        return self.second_moment - self.mean**2


def gilbert_moments(
    d: int, t: float, cutoff: float, mode: str = "poisson", n: int | None = None
) -> MomentPair:
    """Closed-quadrature moments of the edge count on the unit cube."""
    i2, i3 = cube_pair_integrals(d, cutoff)
    if mode == "poisson":
        mean = 0.5 * t**2 * i2
        second = mean**2 + mean + t**3 * i3
    elif mode == "binomial":
        if n is None:
            raise ValueError("binomial mode needs n")
        mean = 0.5 * perm(n, 2) * i2
        second = 0.25 * perm(n, 4) * i2**2 + perm(n, 3) * i3 + 0.5 * perm(n, 2) * i2
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return MomentPair(mean=mean, second_moment=second, method="quadrature")


def gilbert_moments_mc(
    d: int,
    t: float,
    cutoff: float,
    reps: int,
    rng_seed: int,
    mode: str = "poisson",
    n: int | None = None,
) -> MomentPair:
    """Monte Carlo moments of the edge count, as an oracle for the
    quadrature path."""
    from .transform import pair_count_within

    counts = np.empty(reps)
    for i in range(reps):
        rng = derive_rng(rng_seed, i)
        npts = rng.poisson(t) if mode == "poisson" else n
        pts = rng.uniform(size=(npts, d))
        counts[i] = pair_count_within(pts, cutoff)
    mean = float(counts.mean())
    second = float((counts**2).mean())
    return MomentPair(
        mean=mean,
        second_moment=second,
        method="monte-carlo",
        mean_se=float(counts.std(ddof=1) / sqrt(reps)),
        second_se=float((counts**2).std(ddof=1) / sqrt(reps)),
    )


# ---------------------------------------------------------------------------
# Assembled bounds.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    dtv_term: float
    r_term: float
    moment_term: float | None
    binomial_term: float
    value: float
    form: str
    provenance: dict

    def __post_init__(self):
        terms = [self.dtv_term, self.r_term, self.binomial_term]
        if self.moment_term is not None:
            terms.append(self.moment_term)
        if any(v < 0 for v in terms):
            raise ValueError("bound terms must be nonnegative")


def assemble_bound_report(
    dtv: float,
    r: "RTermResult",
    k: int,
    mode: str = "poisson",
    mass_l: float = 0.0,
    n: int | None = None,
    moments: MomentPair | None = None,
    dtv_provenance: str = "analytic",
) -> BoundReport:
    """Bound value plus its per-term breakdown and provenance flags."""
    value = thm_main_bound(dtv, r.value, k, mode=mode, mass_l=mass_l, n=n, moments=moments)
    binom_term = 6**k * factorial(k) * mass_l**2 / n if mode == "binomial" and n else 0.0
    moment_term = None
    if moments is not None:
        m1, m2 = moments.mean, moments.second_moment
        moment_term = max(0.0, 2.0 * (m2 - m1 - m1**2))
    return BoundReport(
        dtv_term=dtv,
        r_term=2.0 ** (k + 1) / factorial(k) * r.value,
        moment_term=moment_term,
        binomial_term=binom_term,
        value=value,
        form="moment-form" if moments is not None else "r-form",
        provenance={
            "dtv": dtv_provenance,
            "r": r.method,
            "moments": moments.method if moments is not None else None,
        },
    )


def thm_main_bound(
    dtv: float,
    r: float,
    k: int,
    mode: str = "poisson",
    mass_l: float = 0.0,
    n: int | None = None,
    moments: MomentPair | None = None,
) -> float:
    """Transport-distance bound between the induced process and its target.

    The r-form is dtv + 2^(k+1)/k! * r (plus 6^k k! mass^2 / n for a
    binomial source); when moments are supplied the sharper second-moment
    form is used instead.  A binomial source with fewer points than the
    kernel arity induces the empty process, and the bound degenerates to
    the dtv term alone (which then equals the target's total mass).
    """
    if min(dtv, r, mass_l) < 0:
        raise ValueError("bound inputs must be nonnegative")
    if mode not in ("poisson", "binomial"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "binomial":
        if n is None:
            raise ValueError("binomial mode needs n")
        if n < k:
            return dtv
    if moments is not None:
        m1, m2 = moments.mean, moments.second_moment
        if mode == "poisson":
            return dtv + 2.0 * (m2 - m1 - m1**2)
        ratio = perm(n - k, k) / perm(n, k) if n >= 2 * k else 0.0
        return dtv + 2.0 * (m2 - m1 - ratio * m1**2) + 6**k * factorial(k) * m1**2 / n
    out = dtv + 2.0 ** (k + 1) / factorial(k) * r
    if mode == "binomial":
        out += 6**k * factorial(k) * mass_l**2 / n
    return out


def ustat_poisson_bound(
    moments: MomentPair,
    lam: float,
    k: int,
    mode: str = "poisson",
    t: float | None = None,
) -> float:
    """Wasserstein bound for approximating the tuple-count statistic by a
    Poisson variable with mean lam, from the statistic's first two moments."""
    m1, m2 = moments.mean, moments.second_moment
    base = abs(m1 - lam)
    if mode == "poisson":
        return base + 2.0 * (m2 - m1 - m1**2)
    if t is None:
        raise ValueError("binomial mode needs t")
    n = int(np.ceil(t))
    ratio = perm(n - k, k) / perm(n, k) if n >= 2 * k else 0.0
    return base + 2.0 * (m2 - m1 - ratio * m1**2) + 6**k * factorial(k) * m1**2 / t


def gilbert_intensity_error(d: int, t: float, a_tilde: float) -> float:
    """Uniform error bound between the pair-statistic intensity on the unit
    cube and its translation-invariant limit, for admissible distance sets
    inside [0, a_tilde].

    The cube's shell constant is instantiated explicitly from its parallel
    volume polynomial, so the bound is fully numeric (an upper bound, not
    an equality).
    """
    if a_tilde < 0:
        raise ValueError("a_tilde must be nonnegative")
    if a_tilde >= 1:
        raise ValueError("shell-bound regime needs a_tilde < 1")
    if t < 1:
        raise ValueError("needs t >= 1")
    kd = unit_ball_volume(d)
    ck = cube_shell_constant(d)
    return 2.0 * ck * kd * t**2 * (a_tilde ** (d + 1) + a_tilde ** (2 * d)) + 0.5 * kd * t * a_tilde**d


@dataclass(frozen=True)
class GilbertLimits:
    edge_count: PoissonLaw
    edge_length: CompoundPoissonLaw
    distance_power: StableSeriesLaw
    distance_power_levy: LevyLaw | None


def gilbert_limit_laws(d: int, lam: float, b: float, tau: float) -> GilbertLimits:
    """Fully parameterized limit laws for the pair statistics on a unit-volume
    convex body: Poisson edge counts, compound Poisson length-power sums,
    and the heavy-tail distance-power limit (with its closed-form 1/2-stable
    special case when tau = 2d)."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if tau <= d:
        raise ValueError(
            "tau must exceed d: smaller exponents leave the heavy-tail regime "
            "(tau < d/2 obeys a central limit theorem instead)"
        )
    kd = unit_ball_volume(d)
    mass = 0.5 * kd * lam

    def summands(rng, size):
        # |X|^b for X uniform in the centered ball of radius lam^(1/d)
        return (lam ** (1.0 / d) * rng.uniform(size=size) ** (1.0 / d)) ** b

    alpha = d / tau
    scale = (kd / 2.0) ** (tau / d)
    levy = None
    if abs(tau - 2 * d) < 1e-12:
        levy = LevyLaw(scale=pi * kd**2 / 8.0)
        median_lb = levy.median
    else:
        # the largest summand alone gives a rigorous lower bound on the median
        median_lb = scale * log(2.0) ** (-tau / d)
    window = stable_series_window(alpha, scale, median_lb)
    return GilbertLimits(
        edge_count=PoissonLaw(mass),
        edge_length=CompoundPoissonLaw(
            mass=mass,
            summand_sampler=summands,
            summand_mean=lam ** (b / d) * d / (d + b) if d + b > 0 else float("nan"),
        ),
        distance_power=StableSeriesLaw(alpha=alpha, window=window, scale=scale),
        distance_power_levy=levy,
    )


def flats_constant(d: int, m: int) -> float:
    """Intensity constant of the close-pair midpoint process of an isotropic
    flat process: half the binomial ratio times kappa_{d-m}^2 / kappa_d."""
    if not 1 <= m or not 2 * m < d:
        raise ValueError("need 1 <= m < d/2")
    return 0.5 * comb(d - m, m) / comb(d, m) * unit_ball_volume(d - m) ** 2 / unit_ball_volume(d)


def flats_constant_via_grassmannian(d: int, m: int) -> float:
    """Same constant assembled from the integrated subspace determinant;
    equals flats_constant identically."""
    from .geometry import integrated_subspace_determinant

    if not 1 <= m or not 2 * m < d:
        raise ValueError("need 1 <= m < d/2")
    kd2m = unit_ball_volume(d - 2 * m)
    return 0.5 * kd2m * integrated_subspace_determinant(d, m)


def flats_constant_mc(d: int, m: int, samples: int, rng_seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate (mean, stderr) of the constant via Haar frame pairs."""
    from .geometry import haar_frame, subspace_determinant

    rng = derive_rng(rng_seed, 4242)
    kd2m = unit_ball_volume(d - 2 * m)
    vals = np.empty(samples)
    for i in range(samples):
        vals[i] = subspace_determinant(haar_frame(rng, d, m), haar_frame(rng, d, m))
    vals *= 0.5 * kd2m
    return float(vals.mean()), float(vals.std(ddof=1) / sqrt(samples))


def polytope_law(d: int, t: float, a: float) -> tuple[float, float, float]:
    """Reversed-diameter intensity on [0, a] for points on the unit sphere.

    Returns (exact finite-t mass, limit mass, limit tail probability): the
    finite-t mass by adaptive quadrature of the one-dimensional reduction,
    the limit mass kappa_{d-1} 2^(d-2) a^((d-1)/2) / (d kappa_d), and
    exp(-limit mass) as the limiting no-point probability.
    """
    if d < 2:
        raise ValueError("needs d >= 2")
    if a < 0:
        raise ValueError("a must be nonnegative")
    if t < 1:
        raise ValueError("needs t >= 1")
    if a == 0.0:
        return 0.0, 0.0, 1.0
    eps = t ** (-4.0 / (d - 1))
    if 2.0 - a * eps <= 0:
        raise ValueError("parameter regime violated: need a * t^(-4/(d-1)) < 2")
    kd = unit_ball_volume(d)
    kdm1 = unit_ball_volume(d - 1)

    def integrand(u):
        inner = 4.0 * u - u * u * eps - eps * (2.0 * u - u * u * eps / 2.0) ** 2
        return max(inner, 0.0) ** ((d - 3) / 2.0) * (2.0 - u * eps)

    val, _ = integrate.quad(integrand, 0.0, a, epsabs=QUAD_ABS_TOL, epsrel=1e-11, limit=200)
    l_t = (d - 1) * kdm1 / (2.0 * d * kd) * val
    m_lim = kdm1 * 2.0 ** (d - 2) / (d * kd) * a ** ((d - 1) / 2.0)
    return l_t, m_lim, exp(-m_lim)


def polytope_limit_density(d: int, a: float) -> float:
    """Density of the limiting reversed-diameter intensity at a."""
    kd = unit_ball_volume(d)
    kdm1 = unit_ball_volume(d - 1)
    return (d - 1) / (d * kd) * kdm1 * 2.0 ** (d - 3) * a ** ((d - 3) / 2.0)
