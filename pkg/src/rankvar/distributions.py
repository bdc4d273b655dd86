"""Concordance-inducing distributions.

A concordance-inducing distribution is a standardized (mean 0, variance 1)
radially symmetric law with finite fourth moment.  Transforming copula
samples through its left-continuous generalized inverse turns rank
dependence into an ordinary correlation.  This module builds the standard
families (uniform, symmetric Bernoulli, normal, Student t, symmetric Beta),
a symmetric discrete family with explicit probability-interval partitions,
a point-mass/uniform mixture, and location-shifted variants.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import betainc, betaincinv, ndtr, ndtri

from .errors import ConstraintError, ContractError, ParseError

__all__ = [
    "SupportKind",
    "ConcordanceInducing",
    "DiscreteSymmetricSpec",
    "make_builtin",
    "make_discrete",
    "make_mixture_point_uniform",
    "shifted",
    "parse_distribution",
]

_SQRT3 = math.sqrt(3.0)
_SQRT6 = math.sqrt(6.0)


class SupportKind(enum.Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class ConcordanceInducing:
    """A standardized radially symmetric law, plus a location shift.

    ``quantile_fn`` and ``cdf_fn`` describe the *unshifted* law;
    :meth:`quantile` and :meth:`cdf` apply ``shift`` on top.
    ``var_x_squared`` and ``fourth_moment`` are moments of the unshifted
    law (for a shifted law they no longer describe X itself and the
    closed-form variance machinery must not use them).

    Instances are immutable and safe to share across threads; all
    operations are pure.
    """

    name: str
    quantile_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    cdf_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    var_x_squared: float
    fourth_moment: float
    support_kind: SupportKind
    shift: float = 0.0

    def quantile(self, p):
        """Left-continuous generalized inverse at p in (0,1), plus shift.

        Accepts a float or array; rejects any p outside the open interval.
        """
        arr = np.asarray(p, dtype=float)
        if arr.size and not ((arr > 0.0).all() and (arr < 1.0).all()):
            raise ContractError(f"quantile requires p in (0,1); got range "
                                f"[{arr.min()}, {arr.max()}]")
        out = self.quantile_fn(arr)
        if self.shift != 0.0:
            out = out + self.shift
        if np.isscalar(p):
            return float(out)
        return out

    def cdf(self, x):
        arr = np.asarray(x, dtype=float)
        out = self.cdf_fn(arr - self.shift if self.shift != 0.0 else arr)
        if np.isscalar(x):
            return float(out)
        return out

    @property
    def is_shifted(self) -> bool:
        return self.shift != 0.0


@dataclass(frozen=True)
class DiscreteSymmetricSpec:
    """Parameters (m, z, p) of a symmetric discrete law on 2m+1 atoms.

    The law puts mass ``p[0]`` at 0 and mass ``p[i]`` at each of -z[i-1],
    +z[i-1].  Validity requires p[0] + 2*sum(p[1:]) = 1 (total mass) and
    sum(p[i]*z[i-1]^2) = 1/2 (unit variance).
    """

    m: int
    z: tuple[float, ...]
    p: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if self.m < 1:
            raise ConstraintError(f"m must be a positive integer, got {self.m}")
        if len(self.z) != self.m:
            raise ConstraintError(f"len(z) = {len(self.z)} but m = {self.m}")
        if len(self.p) != self.m + 1:
            raise ConstraintError(f"len(p) = {len(self.p)} but m + 1 = {self.m + 1}")
        if any(v <= 0.0 for v in self.z):
            raise ConstraintError("all z values must be > 0")
        if any(b <= a for a, b in zip(self.z, self.z[1:])):
            raise ConstraintError("z must be strictly increasing")
        if any(v < 0.0 for v in self.p):
            raise ConstraintError("all p values must be >= 0")
        mass = self.p[0] + 2.0 * sum(self.p[1:])
        if abs(mass - 1.0) > 1e-12:
            raise ConstraintError(
                f"constraint p0 + 2*sum(p_i) = 1 failed: got {mass!r}")
        second = sum(pi * zi * zi for pi, zi in zip(self.p[1:], self.z))
        if abs(second - 0.5) > 1e-12:
            raise ConstraintError(
                f"constraint sum(p_i * z_i^2) = 1/2 failed: got {second!r}")

    def partition(self) -> list[tuple[int, float, float, float]]:
        """Intervals of (0,1) on which the quantile is constant.

        Returns ``(i, z_i, lo, hi)`` for i = -m..m, where z_{-i} = -z_i and
        z_0 = 0.  Intervals for zero-probability atoms are degenerate.
        """
        p_plus = sum(self.p[1:])
        out: list[tuple[int, float, float, float]] = []
        for i in range(self.m, 0, -1):
            lo = p_plus - sum(self.p[1:i + 1])
            hi = p_plus - sum(self.p[1:i])
            out.append((-i, -self.z[i - 1], lo, hi))
        out.append((0, 0.0, p_plus, p_plus + self.p[0]))
        for i in range(1, self.m + 1):
            lo = p_plus + self.p[0] + sum(self.p[1:i])
            hi = p_plus + self.p[0] + sum(self.p[1:i + 1])
            out.append((i, self.z[i - 1], lo, hi))
        return out

    def atoms_and_probs(self) -> tuple[np.ndarray, np.ndarray]:
        atoms = np.array([-v for v in reversed(self.z)] + [0.0] + list(self.z))
        probs = np.array(list(reversed(self.p[1:])) + [self.p[0]] + list(self.p[1:]))
        return atoms, probs


def _builtin_uniform() -> ConcordanceInducing:
    return ConcordanceInducing(
        name="uniform",
        quantile_fn=lambda p: _SQRT3 * (2.0 * p - 1.0),
        cdf_fn=lambda x: np.clip((x / _SQRT3 + 1.0) / 2.0, 0.0, 1.0),
        var_x_squared=0.8,
        fourth_moment=1.8,
        support_kind=SupportKind.BOUNDED,
    )


def _builtin_bernoulli() -> ConcordanceInducing:
    return ConcordanceInducing(
        name="bernoulli",
        quantile_fn=lambda p: np.where(p > 0.5, 1.0, -1.0),
        cdf_fn=lambda x: np.where(x >= 1.0, 1.0, np.where(x >= -1.0, 0.5, 0.0)),
        var_x_squared=0.0,
        fourth_moment=1.0,
        support_kind=SupportKind.DISCRETE,
    )


def _builtin_normal() -> ConcordanceInducing:
    return ConcordanceInducing(
        name="normal",
        quantile_fn=ndtri,
        cdf_fn=ndtr,
        var_x_squared=2.0,
        fourth_moment=3.0,
        support_kind=SupportKind.UNBOUNDED,
    )


def _student_t_quantile(nu: float, p: np.ndarray) -> np.ndarray:
    # invert the tail identity P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2)
    tail = 2.0 * np.minimum(p, 1.0 - p)
    x = betaincinv(0.5 * nu, 0.5, tail)
    with np.errstate(divide="ignore"):
        t = np.sqrt(nu * (1.0 - x) / x)
    return np.where(p < 0.5, -t, np.where(p > 0.5, t, 0.0))


def _builtin_student_t(nu: float) -> ConcordanceInducing:
    if nu <= 4.0:
        raise ContractError(
            f"student t requires nu > 4 for a finite fourth moment, got {nu}")
    scale = math.sqrt((nu - 2.0) / nu)
    m4 = 3.0 * (nu - 2.0) / (nu - 4.0)

    def cdf(x):
        t = np.asarray(x, dtype=float) / scale
        half_tail = 0.5 * betainc(0.5 * nu, 0.5, nu / (nu + t * t))
        return np.where(t >= 0.0, 1.0 - half_tail, half_tail)

    return ConcordanceInducing(
        name=f"t:{nu:g}",
        quantile_fn=lambda p: scale * _student_t_quantile(nu, p),
        cdf_fn=cdf,
        var_x_squared=m4 - 1.0,
        fourth_moment=m4,
        support_kind=SupportKind.UNBOUNDED,
    )


def _builtin_beta(alpha: float) -> ConcordanceInducing:
    if alpha <= 0.0:
        raise ContractError(f"beta requires alpha > 0, got {alpha}")
    # Beta(a, a) on (0,1): mean 1/2, variance 1/(4(2a+1))
    scale = 2.0 * math.sqrt(2.0 * alpha + 1.0)
    m4 = 3.0 - 6.0 / (2.0 * alpha + 3.0)
    return ConcordanceInducing(
        name=f"beta:{alpha:g}",
        quantile_fn=lambda p: (betaincinv(alpha, alpha, p) - 0.5) * scale,
        cdf_fn=lambda x: betainc(alpha, alpha, np.clip(x / scale + 0.5, 0.0, 1.0)),
        var_x_squared=4.0 * alpha / (2.0 * alpha + 3.0),
        fourth_moment=m4,
        support_kind=SupportKind.BOUNDED,
    )


def make_builtin(kind: str, *, nu: float | None = None,
                 alpha: float | None = None,
                 beta: float | None = None) -> ConcordanceInducing:
    """Build a standardized law of one of the named families.

    ``kind`` is one of ``uniform``, ``bernoulli``, ``normal``,
    ``student_t`` (alias ``t``, requires ``nu > 4``) or ``beta``
    (requires symmetric shape; pass ``alpha``, optionally ``beta`` equal
    to it).
    """
    kind = kind.lower()
    if kind == "uniform":
        return _builtin_uniform()
    if kind == "bernoulli":
        return _builtin_bernoulli()
    if kind == "normal":
        return _builtin_normal()
    if kind in ("student_t", "t"):
        if nu is None:
            raise ContractError("student_t requires nu")
        return _builtin_student_t(float(nu))
    if kind == "beta":
        if alpha is None:
            raise ContractError("beta requires alpha")
        if beta is not None and float(beta) != float(alpha):
            raise ContractError(
                f"beta must be symmetric (alpha == beta); got {alpha}, {beta}")
        return _builtin_beta(float(alpha))
    raise ContractError(f"unknown builtin kind {kind!r}")


def make_discrete(spec: DiscreteSymmetricSpec) -> ConcordanceInducing:
    """Discrete symmetric law on {-z_m..-z_1, 0, z_1..z_m}."""
    atoms, probs = spec.atoms_and_probs()
    cum = np.cumsum(probs)
    cum[-1] = 1.0

    def quantile(p):
        idx = np.searchsorted(cum, p, side="left")
        return atoms[idx]

    def cdf(x):
        idx = np.searchsorted(atoms, x, side="right")
        padded = np.concatenate([[0.0], cum])
        return padded[idx]

    m4 = float(np.sum(probs * atoms ** 4))
    z_txt = ",".join(f"{v:g}" for v in spec.z)
    p_txt = ",".join(f"{v:g}" for v in spec.p)
    return ConcordanceInducing(
        name=f"discrete:{spec.m}:{z_txt}:{p_txt}",
        quantile_fn=quantile,
        cdf_fn=cdf,
        var_x_squared=m4 - 1.0,
        fourth_moment=m4,
        support_kind=SupportKind.DISCRETE,
    )


def make_mixture_point_uniform() -> ConcordanceInducing:
    """Equal-weight mixture of a point mass at 0 and Unif(-sqrt6, sqrt6).

    The quantile is 0 on (1/4, 3/4] and linear outside; mean 0, variance 1,
    E[X^4] = 3.6.
    """

    def quantile(p):
        lower = _SQRT6 * (4.0 * p - 1.0)
        upper = _SQRT6 * (4.0 * p - 3.0)
        return np.where(p <= 0.25, lower, np.where(p > 0.75, upper, 0.0))

    def cdf(x):
        u = np.clip((x / _SQRT6 + 1.0) / 2.0, 0.0, 1.0)
        return 0.5 * u + 0.5 * (x >= 0.0)

    return ConcordanceInducing(
        name="mix0u6",
        quantile_fn=quantile,
        cdf_fn=cdf,
        var_x_squared=2.6,
        fourth_moment=3.6,
        support_kind=SupportKind.BOUNDED,
    )


def shifted(dist: ConcordanceInducing, mu: float) -> ConcordanceInducing:
    """Location-shifted copy of an unshifted law.

    The shifted quantile is ``quantile(p) + mu``.  Double shifting is
    rejected; shift an unshifted law instead.
    """
    if dist.is_shifted:
        raise ContractError(
            f"{dist.name} already carries shift {dist.shift}; "
            "shift the unshifted law instead")
    mu = float(mu)
    name = dist.name if mu == 0.0 else f"{dist.name}+shift:{mu:g}"
    return ConcordanceInducing(
        name=name,
        quantile_fn=dist.quantile_fn,
        cdf_fn=dist.cdf_fn,
        var_x_squared=dist.var_x_squared,
        fourth_moment=dist.fourth_moment,
        support_kind=dist.support_kind,
        shift=mu,
    )


_SHIFT_RE = re.compile(r"^(?P<base>.*?)\+shift:(?P<mu>.+)$")


def parse_distribution(text: str) -> tuple[ConcordanceInducing, bool]:
    """Parse a distribution config string.

    Grammar::

        uniform | bernoulli | normal | t:<nu> | beta:<alpha>
            | discrete:<m>:<z-list>:<p-list> | mix0u6
        ... optionally suffixed '+shift:<mu>' or '+shift:opt'

    Returns ``(law, wants_optimal_shift)``.  For a numeric shift the law
    already carries it; for ``+shift:opt`` the returned law is unshifted
    and the flag is True (the caller supplies the data-driven shift).
    """
    text = text.strip()
    want_opt = False
    match = _SHIFT_RE.match(text)
    mu = 0.0
    if match:
        text = match.group("base")
        raw = match.group("mu")
        if raw == "opt":
            want_opt = True
        else:
            try:
                mu = float(raw)
            except ValueError as exc:
                raise ParseError(f"bad shift value {raw!r}") from exc

    parts = text.split(":")
    head = parts[0].lower()
    try:
        if head in ("uniform", "bernoulli", "normal", "mix0u6") and len(parts) == 1:
            dist = (make_mixture_point_uniform() if head == "mix0u6"
                    else make_builtin(head))
        elif head == "t" and len(parts) == 2:
            dist = make_builtin("t", nu=float(parts[1]))
        elif head == "beta" and len(parts) == 2:
            dist = make_builtin("beta", alpha=float(parts[1]))
        elif head == "discrete" and len(parts) == 4:
            m = int(parts[1])
            z = tuple(float(v) for v in parts[2].split(","))
            p = tuple(float(v) for v in parts[3].split(","))
            dist = make_discrete(DiscreteSymmetricSpec(m=m, z=z, p=p))
        else:
            raise ParseError(f"unrecognized distribution spec {text!r}")
    except ValueError as exc:
        raise ParseError(f"bad number in distribution spec {text!r}") from exc

    if mu != 0.0:
        dist = shifted(dist, mu)
    return dist, want_opt
