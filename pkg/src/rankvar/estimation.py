"""Canonical estimators and their sample asymptotic variances.

The transformed-rank estimator averages products of quantile-transformed
copula samples; Kendall's tau is estimated from sign products over
independent (or consecutive, overlapping) pairs.  All estimators report
the unbiased (n-1 divisor) sample variance of their product sequence as
the plug-in estimate of the asymptotic variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .distributions import ConcordanceInducing
from .errors import ContractError
from .seeding import mix_seed

__all__ = [
    "EstimationResult",
    "estimate_kappa",
    "estimate_tau",
    "estimate_tau_overlap",
    "estimate_optimal_shift",
    "optimal_shift_and_se",
    "confidence_interval",
    "combine",
    "transformed_products",
    "sign_products",
    "variance_se",
]

_DEGENERATE_VAR = 1e-12


@dataclass(frozen=True)
class EstimationResult:
    estimate: float
    sigma2_hat: float
    n: int
    seed: int
    estimator_id: str
    variance_floored: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ContractError(f"need n >= 2, got {self.n}")
        if self.sigma2_hat < 0.0:
            raise ContractError(f"sigma2_hat must be >= 0, got {self.sigma2_hat}")


def _check_pairs(pairs, min_len: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ContractError(f"pairs must have shape (n, 2), got {arr.shape}")
    if arr.shape[0] < min_len:
        raise ContractError(f"need at least {min_len} pairs, got {arr.shape[0]}")
    if not ((arr > 0.0).all() and (arr < 1.0).all()):
        raise ContractError("all pairs must lie in the open square (0,1)^2")
    return arr


def transformed_products(dist: ConcordanceInducing, pairs) -> np.ndarray:
    """Quantile-transform both coordinates and multiply, including any
    location shift the law carries."""
    arr = _check_pairs(pairs, 1)
    return dist.quantile(arr[:, 0]) * dist.quantile(arr[:, 1])


def sign_products(pairs, other) -> np.ndarray:
    """Products of comparison signs between two equally long pair blocks.

    The sign is +1 when the first block's coordinate strictly exceeds the
    second's and -1 otherwise (ties count as -1).
    """
    a = _check_pairs(pairs, 1)
    b = _check_pairs(other, 1)
    if a.shape[0] != b.shape[0]:
        raise ContractError(
            f"pair blocks differ in length: {a.shape[0]} vs {b.shape[0]}")
    gu = np.where(a[:, 0] > b[:, 0], 1.0, -1.0)
    gv = np.where(a[:, 1] > b[:, 1], 1.0, -1.0)
    return gu * gv


def estimate_kappa(dist: ConcordanceInducing, pairs,
                   seed: int = 0) -> EstimationResult:
    """Mean of transformed products, less shift^2 for a shifted law.

    With a location shift mu the products (X0+mu)(Y0+mu) have expectation
    kappa + mu^2, so subtracting mu^2 keeps the estimand fixed while the
    reported sigma2_hat tracks the shifted products' variance.
    """
    arr = _check_pairs(pairs, 2)
    products = transformed_products(dist, arr)
    estimate = float(products.mean()) - dist.shift ** 2
    return EstimationResult(
        estimate=estimate,
        sigma2_hat=float(products.var(ddof=1)),
        n=arr.shape[0],
        seed=seed,
        estimator_id="kappa",
    )


def estimate_tau(pairs, pairs_independent_copy,
                 seed: int = 0) -> EstimationResult:
    """Kendall's tau from two independent equally long sample blocks."""
    a = _check_pairs(pairs, 2)
    b = _check_pairs(pairs_independent_copy, 2)
    products = sign_products(a, b)
    return EstimationResult(
        estimate=float(products.mean()),
        sigma2_hat=float(products.var(ddof=1)),
        n=a.shape[0],
        seed=seed,
        estimator_id="tau",
    )


def estimate_tau_overlap(pairs, seed: int = 0) -> EstimationResult:
    """Kendall's tau from overlapping consecutive pairs of one stream.

    Consecutive products are 1-dependent, so the variance estimate adds
    twice the lag-1 sample autocovariance to the sample variance; a
    negative total is floored at 0 and flagged.
    """
    arr = _check_pairs(pairs, 3)
    products = sign_products(arr[:-1], arr[1:])
    m = products.size
    centered = products - products.mean()
    gamma0 = float(centered @ centered) / (m - 1)
    lag1 = float(centered[:-1] @ centered[1:]) / (m - 1)
    sigma2 = gamma0 + 2.0 * lag1
    floored = sigma2 < 0.0
    return EstimationResult(
        estimate=float(products.mean()),
        sigma2_hat=max(sigma2, 0.0),
        n=m,
        seed=seed,
        estimator_id="tau-overlap",
        variance_floored=floored,
    )


def _shift_statistics(dist: ConcordanceInducing, pairs):
    if dist.is_shifted:
        raise ContractError("optimal shift is defined for the unshifted law")
    arr = _check_pairs(pairs, 2)
    x = dist.quantile(arr[:, 0])
    y = dist.quantile(arr[:, 1])
    products = x * y
    sums = x + y
    var_sum = float(sums.var(ddof=1))
    cov = float(np.cov(products, sums, ddof=1)[0, 1])
    return products, sums, cov, var_sum


def estimate_optimal_shift(dist: ConcordanceInducing, pairs) -> float:
    """Plug-in variance-minimizing shift -Cov(XY, X+Y)/Var(X+Y); zero when
    the sum is numerically degenerate."""
    _, _, cov, var_sum = _shift_statistics(dist, pairs)
    if var_sum < _DEGENERATE_VAR:
        return 0.0
    return -cov / var_sum


def optimal_shift_and_se(dist: ConcordanceInducing, pairs) -> tuple[float, float]:
    """Plug-in optimal shift together with its delta-method standard error."""
    products, sums, cov, var_sum = _shift_statistics(dist, pairs)
    if var_sum < _DEGENERATE_VAR:
        return 0.0, 0.0
    mu = -cov / var_sum
    ds = sums - sums.mean()
    dp = products - products.mean()
    influence = dp * ds + mu * ds ** 2
    se = float(influence.std(ddof=1)) / (var_sum * np.sqrt(len(sums)))
    return mu, se


def confidence_interval(result: EstimationResult,
                        level: float) -> tuple[float, float]:
    """Central-limit interval: estimate +/- z_(1+level)/2 sqrt(sigma2/n)."""
    if not 0.0 < level < 1.0:
        raise ContractError(f"level must be in (0,1), got {level}")
    z = float(ndtri((1.0 + level) / 2.0))
    half = z * np.sqrt(result.sigma2_hat / result.n)
    return result.estimate - half, result.estimate + half


def combine(a: EstimationResult, b: EstimationResult) -> EstimationResult:
    """Merge two shards of the same estimator into the whole-sample result.

    The pooled mean is exact; the pooled variance matches the two-pass
    value on the concatenated products.  The overlapping-tau estimator is
    excluded (its autocovariance term does not merge from summaries).
    """
    if a.estimator_id != b.estimator_id:
        raise ContractError(
            f"cannot merge {a.estimator_id!r} with {b.estimator_id!r}")
    if a.estimator_id == "tau-overlap":
        raise ContractError("tau-overlap results cannot be merged")
    n = a.n + b.n
    delta = b.estimate - a.estimate
    estimate = a.estimate + delta * b.n / n
    m2 = (a.sigma2_hat * (a.n - 1) + b.sigma2_hat * (b.n - 1)
          + delta ** 2 * a.n * b.n / n)
    return EstimationResult(
        estimate=estimate,
        sigma2_hat=m2 / (n - 1),
        n=n,
        seed=mix_seed(a.seed, b.seed),
        estimator_id=a.estimator_id,
    )


def variance_se(products) -> float:
    """Plug-in standard error of the unbiased sample variance.

    Uses the exact i.i.d. formula Var(s^2) = m4/n - s^4 (n-3)/(n(n-1))
    with plug-in central moments; the second-order term matters when the
    products are nearly two-valued and the first-order term degenerates.
    """
    arr = np.asarray(products, dtype=float)
    n = arr.size
    if n < 2:
        raise ContractError("need at least 2 products")
    centered = arr - arr.mean()
    var = float(centered @ centered) / n
    m4 = float((centered ** 2) @ (centered ** 2)) / n
    v_s2 = (m4 - var ** 2 * (n - 3) / (n - 1)) / n
    return float(np.sqrt(max(v_s2, 0.0)))
