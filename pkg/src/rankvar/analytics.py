"""Closed-form dependence quantities.

Everything here is analytic: correlation values of the transformed-rank
family and Kendall's tau on tractable copulas, the asymptotic variance of
their canonical estimators, best/worst variance envelopes over Frechet
mixtures, optimal location shifts, the explicit sums for discrete
transform laws, and the copula of the squared transforms.

The central identity: for X = Q(U), Y = Q(V) with Q the quantile of a
standardized law and (U,V) from a copula, the canonical estimator's
asymptotic variance is

    Var(XY) = Cov(X^2, Y^2) + 1 - Cov(X, Y)^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .copulas import (ClaytonCopula, Comonotone, Copula, CounterMonotone,
                      Frechet, FrechetWeights, GaussianCopula, Independence,
                      ReflectedCopula, StudentTCopula)
from .distributions import ConcordanceInducing, DiscreteSymmetricSpec
from .errors import CapabilityError, ContractError

__all__ = [
    "AttainerToken",
    "VarianceEnvelope",
    "MixtureMoments",
    "Preference",
    "sigma2_from_covariances",
    "sigma2_frechet",
    "kappa_frechet",
    "tau_frechet",
    "envelope_frechet",
    "prefer",
    "sigma2_beta",
    "beta_clayton",
    "beta_closed_form",
    "tau_closed_form",
    "sigma2_tau_analytic",
    "sigma2_nvm",
    "sigma2_nvm_from_var_x2",
    "optimal_shift_analytic",
    "optimal_shifted_sigma2",
    "kappa_discrete",
    "sigma2_discrete",
    "squared_copula",
    "sigma2_closed_form",
]


class AttainerToken(enum.Enum):
    """Symbolic copula descriptors for envelope attainer sets."""

    M = "M"
    W = "W"
    PI = "Pi"
    MID_MW = "(M+W)/2"
    SEGMENT_MID_MW_PI = "p*(M+W)/2+(1-p)*Pi"


@dataclass(frozen=True)
class VarianceEnvelope:
    best: float
    worst: float
    best_attainers: frozenset[AttainerToken]
    worst_attainers: frozenset[AttainerToken]

    def __post_init__(self):
        if not 0.0 <= self.best <= self.worst:
            raise ContractError(
                f"envelope must satisfy 0 <= best <= worst, got {self}")


@dataclass(frozen=True)
class MixtureMoments:
    """First two moments of the nonnegative mixing variable of a normal
    variance mixture."""

    e_w: float
    e_w2: float

    def __post_init__(self):
        if self.e_w <= 0.0 or self.e_w2 <= 0.0:
            raise ContractError("mixture moments must be positive")
        if self.e_w2 < self.e_w ** 2 - 1e-12:
            raise ContractError(
                f"E[W^2] >= E[W]^2 violated: {self.e_w2} < {self.e_w ** 2}")

    @property
    def ratio(self) -> float:
        return self.e_w2 / self.e_w ** 2


class Preference(enum.Enum):
    FIRST = "first"
    SECOND = "second"
    EQUIVALENT = "equivalent"


def _require_unshifted(dist: ConcordanceInducing) -> None:
    if dist.is_shifted:
        raise ContractError(
            f"{dist.name} carries a location shift; closed forms need the "
            "standardized (unshifted) law")


def sigma2_from_covariances(cov_x2y2: float, cov_xy: float) -> float:
    """Var(XY) from Cov(X^2,Y^2) and Cov(X,Y) for standardized margins."""
    return cov_x2y2 + 1.0 - cov_xy ** 2


def kappa_frechet(w: FrechetWeights) -> float:
    """Transformed rank correlation of a Frechet mixture: p_m - p_w,
    whatever the transform law."""
    return w.p_m - w.p_w


def tau_frechet(w: FrechetWeights) -> float:
    """Kendall's tau of a Frechet mixture."""
    return (w.p_m - w.p_w) * (w.p_m + w.p_w + 2.0) / 3.0


def sigma2_frechet(dist: ConcordanceInducing, w: FrechetWeights) -> float:
    """Asymptotic variance on the Frechet mixture with the given weights:
    (p_m + p_w) * Var(X^2) + 1 - (p_m - p_w)^2."""
    _require_unshifted(dist)
    v = dist.var_x_squared
    return (w.p_m + w.p_w) * v + 1.0 - (w.p_m - w.p_w) ** 2


def envelope_frechet(dist: ConcordanceInducing) -> VarianceEnvelope:
    """Best and worst asymptotic variances over all Frechet mixtures,
    with their attaining mixtures as symbolic descriptors."""
    _require_unshifted(dist)
    v = dist.var_x_squared
    if v < 1.0:
        best_at = frozenset({AttainerToken.M, AttainerToken.W})
    elif v == 1.0:
        best_at = frozenset({AttainerToken.M, AttainerToken.PI, AttainerToken.W})
    else:
        best_at = frozenset({AttainerToken.PI})
    if v > 0.0:
        worst_at = frozenset({AttainerToken.MID_MW})
    else:
        worst_at = frozenset({AttainerToken.SEGMENT_MID_MW_PI})
    return VarianceEnvelope(best=min(1.0, v), worst=1.0 + v,
                            best_attainers=best_at, worst_attainers=worst_at)


def prefer(first: ConcordanceInducing, second: ConcordanceInducing) -> Preference:
    """Which transform law has the better (smaller) best/worst variance
    envelope.  Total order on Var(X^2); ties are equivalent."""
    _require_unshifted(first)
    _require_unshifted(second)
    if first.var_x_squared < second.var_x_squared:
        return Preference.FIRST
    if first.var_x_squared > second.var_x_squared:
        return Preference.SECOND
    return Preference.EQUIVALENT


def sigma2_beta(copula: Copula) -> float:
    """Asymptotic variance of the median-correlation estimator:
    4 p(C) (1 - p(C)) where p is the center balance."""
    p = copula.p_balance()
    return 4.0 * p * (1.0 - p)


def beta_clayton(theta: float) -> float:
    """Median correlation of a Clayton copula: 4(2^(theta+1)-1)^(-1/theta)-1.

    theta = 0 is resolved as the independence limit 0.
    """
    if theta < -1.0:
        raise ContractError(f"theta must be >= -1, got {theta}")
    if abs(theta) < 1e-8:
        return 0.0
    return 4.0 * (2.0 ** (theta + 1.0) - 1.0) ** (-1.0 / theta) - 1.0


def beta_closed_form(copula: Copula) -> float:
    """Median correlation by family closed form.

    Elliptical: (2/pi) arcsin(rho); Clayton: the explicit power form;
    Frechet mixtures: p_m - p_w.
    """
    if isinstance(copula, Comonotone):
        return 1.0
    if isinstance(copula, CounterMonotone):
        return -1.0
    if isinstance(copula, Independence):
        return 0.0
    if isinstance(copula, (GaussianCopula, StudentTCopula)):
        return (2.0 / math.pi) * math.asin(copula.rho)
    if isinstance(copula, ClaytonCopula):
        return beta_clayton(copula.theta)
    if isinstance(copula, Frechet):
        return kappa_frechet(copula.weights)
    if isinstance(copula, ReflectedCopula):
        inner = beta_closed_form(copula.base)
        return inner if copula.axes == "uv" else -inner
    raise CapabilityError(
        f"no closed-form median correlation for family {copula.family!r}")


def tau_closed_form(copula: Copula) -> float:
    """Kendall's tau by family closed form.

    Elliptical: (2/pi) arcsin(rho); Clayton: theta/(theta+2); Frechet
    mixtures: the cubic-free product form.
    """
    if isinstance(copula, Comonotone):
        return 1.0
    if isinstance(copula, CounterMonotone):
        return -1.0
    if isinstance(copula, Independence):
        return 0.0
    if isinstance(copula, (GaussianCopula, StudentTCopula)):
        return (2.0 / math.pi) * math.asin(copula.rho)
    if isinstance(copula, ClaytonCopula):
        if abs(copula.theta) < 1e-8:
            return 0.0
        return copula.theta / (copula.theta + 2.0)
    if isinstance(copula, Frechet):
        return tau_frechet(copula.weights)
    if isinstance(copula, ReflectedCopula):
        inner = tau_closed_form(copula.base)
        return inner if copula.axes == "uv" else -inner
    raise CapabilityError(
        f"no closed-form Kendall tau for family {copula.family!r}")


def sigma2_tau_analytic(tau: float) -> float:
    """Asymptotic variance of the canonical tau estimator: 1 - tau^2."""
    if not -1.0 <= tau <= 1.0:
        raise ContractError(f"tau must be in [-1, 1], got {tau}")
    return 1.0 - tau ** 2


def sigma2_nvm(moments: MixtureMoments, rho: float) -> float:
    """Optimally shifted asymptotic variance when the transformed pair is
    a normal variance mixture: (2 E[W^2]/E[W]^2 - 1) rho^2 + E[W^2]/E[W]^2."""
    if not -1.0 <= rho <= 1.0:
        raise ContractError(f"rho must be in [-1, 1], got {rho}")
    r = moments.ratio
    return (2.0 * r - 1.0) * rho ** 2 + r


def sigma2_nvm_from_var_x2(var_x2: float, rho: float) -> float:
    """Same value written through the transform law's Var(X^2), which for
    a normal variance mixture equals 3 E[W^2]/E[W]^2 - 1."""
    if var_x2 < 0.0:
        raise ContractError(f"Var(X^2) must be >= 0, got {var_x2}")
    r = (var_x2 + 1.0) / 3.0
    return (var_x2 - r) * rho ** 2 + r


def optimal_shift_analytic(cov_xy_sum: float, var_sum: float) -> float:
    """Variance-minimizing location shift: -Cov(XY, X+Y)/Var(X+Y), or 0
    when the sum is degenerate."""
    if var_sum < 0.0:
        raise ContractError(f"Var(X+Y) must be >= 0, got {var_sum}")
    if var_sum == 0.0:
        return 0.0
    return -cov_xy_sum / var_sum


def optimal_shifted_sigma2(var_products: float, cov_xy_sum: float,
                           var_sum: float) -> float:
    """Asymptotic variance at the optimal shift:
    Var(XY) - Cov(XY, X+Y)^2 / Var(X+Y) (unchanged when degenerate)."""
    if var_sum < 0.0:
        raise ContractError(f"Var(X+Y) must be >= 0, got {var_sum}")
    if var_sum == 0.0:
        return var_products
    return var_products - cov_xy_sum ** 2 / var_sum


def _discrete_volume_sums(spec: DiscreteSymmetricSpec,
                          copula: Copula) -> tuple[float, float]:
    cells = [(z, lo, hi) for _, z, lo, hi in spec.partition()]
    first = 0.0
    second = 0.0
    for z_i, lo_i, hi_i in cells:
        if z_i == 0.0 or hi_i <= lo_i:
            continue
        for z_j, lo_j, hi_j in cells:
            if z_j == 0.0 or hi_j <= lo_j:
                continue
            vol = copula.rectangle_volume(lo_i, hi_i, lo_j, hi_j)
            first += z_i * z_j * vol
            second += (z_i * z_j) ** 2 * vol
    return first, second


def kappa_discrete(spec: DiscreteSymmetricSpec, copula: Copula) -> float:
    """Correlation value of the discrete transform law as an explicit sum
    of copula rectangle volumes over the probability partition."""
    first, _ = _discrete_volume_sums(spec, copula)
    return first


def sigma2_discrete(spec: DiscreteSymmetricSpec, copula: Copula) -> float:
    """Asymptotic variance of the discrete transform law's estimator,
    from the same rectangle-volume sums: E[(XY)^2] - (E[XY])^2."""
    first, second = _discrete_volume_sums(spec, copula)
    return second - first ** 2


def squared_copula(copula: Copula, u: float, v: float,
                   g_continuous: bool = True) -> float:
    """CDF of the copula of (X^2, Y^2) for a continuous transform law.

    Sums, over the four partial reflections of the base copula, the
    center-survival weight times the conditional upper-quadrant CDF; each
    conditional is a normalized rectangle volume over
    [1/2,(u+1)/2] x [1/2,(v+1)/2], and zero-weight terms contribute 0.
    """
    if not g_continuous:
        raise ContractError(
            "the squared-pair copula formula requires a continuous "
            "transform law")
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ContractError("u, v must lie in [0, 1]")
    su = (u + 1.0) / 2.0
    sv = (v + 1.0) / 2.0
    total = 0.0
    reflections = (copula, copula.reflect("u"), copula.reflect("v"),
                   copula.reflect("uv"))
    for refl in reflections:
        weight = refl.rectangle_volume(0.5, 1.0, 0.5, 1.0)
        if weight <= 0.0:
            continue
        conditional = refl.rectangle_volume(0.5, su, 0.5, sv) / weight
        total += weight * conditional
    return float(min(max(total, 0.0), 1.0))


def sigma2_closed_form(dist: ConcordanceInducing,
                       copula: Copula) -> float | None:
    """Closed-form asymptotic variance for the (law, copula) pairs that
    admit one; None otherwise.

    Covered: any unshifted law on a Frechet mixture (or fundamental
    copula); the symmetric Bernoulli law wherever the center balance is
    computable; the normal law on a Gaussian copula; a Student t law on
    the Student t copula with matching degrees of freedom.
    """
    if dist.is_shifted:
        return None
    v = dist.var_x_squared
    if isinstance(copula, Comonotone) or isinstance(copula, CounterMonotone):
        return v
    if isinstance(copula, Independence):
        return 1.0
    if isinstance(copula, Frechet):
        return sigma2_frechet(dist, copula.weights)
    if v == 0.0:
        try:
            return sigma2_beta(copula)
        except CapabilityError:
            return None
    if dist.name == "normal" and isinstance(copula, GaussianCopula):
        return sigma2_nvm_from_var_x2(2.0, copula.rho)
    if (isinstance(copula, StudentTCopula)
            and dist.name == f"t:{copula.nu:g}"):
        return sigma2_nvm_from_var_x2(v, copula.rho)
    return None
