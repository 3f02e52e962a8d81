"""Statistical tests for whether a rejected region is indistinguishable from chance.

A reject region is summarized by a tally (n, k): n rejected examples of which
k were classified correctly.  The region is *viable* when we cannot rule out
that the classifier performs at or below coin-flip accuracy on it.  The exact
test compares the binomial CDF at k against 1 - delta; the approximate tests
compare a one-sided lower confidence bound on k/n against one half.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "RegionTally",
    "ViabilityMethod",
    "CI_METHODS",
    "binom_cdf",
    "binom_cdf_sum",
    "binom_cdf_beta",
    "betainc_reg",
    "normal_quantile",
    "ci_lower_bound",
    "region_viable",
]


class ViabilityMethod(str, Enum):
    """Which statistical test decides region viability."""

    BCDF = "bcdf"
    CLOPPER_PEARSON = "clopper_pearson"
    WILSON_CC = "wilson_cc"
    WILSON_NOCC = "wilson_nocc"
    AGRESTI_COULL = "agresti_coull"


# Methods that go through a confidence-interval lower bound rather than the
# exact binomial CDF.
CI_METHODS = frozenset(ViabilityMethod) - {ViabilityMethod.BCDF}


@dataclass(frozen=True)
class RegionTally:
    """Counts for one reject region: n examples rejected, k of them correct."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"tally size must be non-negative, got n={self.n}")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")


# Below this n the p=1/2 CDF is computed with exact integer arithmetic, so the
# returned float is the correctly rounded value of the true dyadic rational.
# Keeps boundary comparisons (CDF exactly equal to 1 - delta) honest.
_EXACT_HALF_LIMIT = 64

# Summation is used up to this n; beyond it the incomplete-beta route is both
# faster and accurate.
_SUM_LIMIT = 10_000


def _check_tail_args(k: int, n: int, p: float) -> None:
    if not isinstance(k, int) or not isinstance(n, int):
        raise TypeError("k and n must be integers")
    if n < 0 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def binom_cdf_sum(k: int, n: int, p: float) -> float:
    """P(X <= k) for X ~ Binomial(n, p), by direct summation of the pmf.

    For p = 1/2 and small n the sum is carried out in integer arithmetic and
    is exact up to the final float rounding.  Otherwise terms are accumulated
    in log space.
    """
    _check_tail_args(k, n, p)
    if k == n:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0  # k < n here
    if p == 0.5 and n <= _EXACT_HALF_LIMIT:
        total = 0
        coef = 1  # C(n, 0)
        for i in range(k + 1):
            total += coef
            coef = coef * (n - i) // (i + 1)
        return total / (1 << n)
    log_p = math.log(p)
    log_q = math.log1p(-p)
    lg_n1 = math.lgamma(n + 1)
    log_terms = [
        lg_n1 - math.lgamma(i + 1) - math.lgamma(n - i + 1) + i * log_p + (n - i) * log_q
        for i in range(k + 1)
    ]
    peak = max(log_terms)
    acc = sum(math.exp(t - peak) for t in log_terms)
    return min(1.0, math.exp(peak + math.log(acc)))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise RuntimeError(f"incomplete beta continued fraction failed to converge (a={a}, b={b}, x={x})")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b) for a, b > 0."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the expansion that converges fastest for this x.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def binom_cdf_beta(k: int, n: int, p: float) -> float:
    """P(X <= k) for X ~ Binomial(n, p), via the regularized incomplete beta."""
    _check_tail_args(k, n, p)
    if k == n:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    return betainc_reg(n - k, k + 1.0, 1.0 - p)


def binom_cdf(k: int, n: int, p: float) -> float:
    """P(X <= k) for X ~ Binomial(n, p).

    Routes to direct summation for n up to 10^4 and to the incomplete-beta
    evaluation beyond that.
    """
    _check_tail_args(k, n, p)
    if n <= _SUM_LIMIT:
        return binom_cdf_sum(k, n, p)
    return binom_cdf_beta(k, n, p)


# Coefficients of the rational approximation to the inverse normal CDF
# (relative error below 1.2e-9 on its own; refined further below).
_ICDF_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ICDF_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ICDF_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ICDF_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)


def normal_quantile(q: float) -> float:
    """Quantile of the standard normal distribution, q in (0, 1)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile argument must lie in (0, 1), got {q}")
    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D
    q_low = 0.02425
    if q < q_low:
        u = math.sqrt(-2.0 * math.log(q))
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) / (
            (((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0
        )
    elif q <= 1.0 - q_low:
        u = q - 0.5
        r = u * u
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u / (
            ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
        )
    else:
        u = math.sqrt(-2.0 * math.log1p(-q))
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) / (
            (((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0
        )
    # Two Halley steps against erfc push the error to the last few ulps.
    for _ in range(2):
        err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - q
        u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
        x -= u / (1.0 + 0.5 * x * u)
    return x


def _betainc_inv(q: float, a: float, b: float) -> float:
    """Solve I_x(a, b) = q for x by bisection."""
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if betainc_reg(a, b, mid) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15:
            break
    return 0.5 * (lo + hi)


def ci_lower_bound(tally: RegionTally, delta: float, method: ViabilityMethod) -> float:
    """One-sided lower confidence bound on the region accuracy.

    The bound holds with confidence 1 - delta.  Only the CI-based methods are
    accepted here; the exact test does not produce a bound.

    Clopper-Pearson and Wilson-CC invert the strict upper tail: the bound is
    the smallest success probability p for which P(X >= k+1 | n, p) reaches
    delta.  For Clopper-Pearson that is the delta-quantile of Beta(k+1, n-k),
    and it makes the bound decision coincide with the exact tail test:
    bound <= 1/2 exactly when BinomCDF(k; n, 1/2) <= 1 - delta.  Wilson-CC is
    the continuity-corrected normal approximation to the same tail event.
    Wilson-NoCC and Agresti-Coull are the usual closed forms around the point
    estimate k/n and carry no such exactness.
    """
    method = ViabilityMethod(method)
    if method not in CI_METHODS:
        raise ValueError(f"{method.value} is not a confidence-interval method")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    n, k = tally.n, tally.k
    if n < 1:
        raise ValueError("confidence bound needs at least one observation")

    if method is ViabilityMethod.CLOPPER_PEARSON:
        if k == n:
            # P(X >= n+1) is 0 for every p, so no p < 1 attains the tail.
            return 1.0
        if k == 0:
            # Beta(1, n) quantile in closed form.
            return 1.0 - (1.0 - delta) ** (1.0 / n)
        return _betainc_inv(delta, k + 1.0, float(n - k))

    z = normal_quantile(1.0 - delta)
    p_hat = k / n

    if method is ViabilityMethod.WILSON_NOCC:
        denom = 1.0 + z * z / n
        center = p_hat + z * z / (2.0 * n)
        spread = z * math.sqrt(p_hat * (1.0 - p_hat) / n + z * z / (4.0 * n * n))
        return _clamp01((center - spread) / denom)

    if method is ViabilityMethod.WILSON_CC:
        if k == n:
            return 1.0
        p_tail = (k + 1.0) / n
        inner = z * z - 2.0 - 1.0 / n + 4.0 * p_tail * (n * (1.0 - p_tail) + 1.0)
        inner = max(inner, 0.0)
        lower = (2.0 * n * p_tail + z * z - 1.0 - z * math.sqrt(inner)) / (2.0 * (n + z * z))
        return _clamp01(lower)

    # Agresti-Coull
    n_tilde = n + z * z
    p_tilde = (k + z * z / 2.0) / n_tilde
    lower = p_tilde - z * math.sqrt(p_tilde * (1.0 - p_tilde) / n_tilde)
    return _clamp01(lower)


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def region_viable(tally: RegionTally, delta: float, method: ViabilityMethod) -> bool:
    """True when the region's tally is consistent with at-or-below-chance accuracy.

    An empty region is viable by convention.  For the exact test the condition
    is BinomCDF(k; n, 1/2) <= 1 - delta; for the CI methods it is that the
    one-sided lower bound on k/n does not exceed 1/2.
    """
    method = ViabilityMethod(method)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if tally.n == 0:
        return True
    if method is ViabilityMethod.BCDF:
        return binom_cdf(tally.k, tally.n, 0.5) <= 1.0 - delta
    return ci_lower_bound(tally, delta, method) <= 0.5
