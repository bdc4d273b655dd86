"""Bivariate copulas: construction, seeded sampling, CDFs, reflections.

Families: the fundamental copulas (comonotone M, counter-monotone W,
independence Pi), their Frechet mixtures, Gaussian and Student t copulas,
Clayton copulas over the full parameter range theta >= -1, straight
shuffles of the comonotone copula, and partial reflections of any of the
above.

All copula objects are immutable.  Sampling takes the seed as an argument
and owns a local generator, so concurrent sampling with distinct seeds is
race-free by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, ndtr, ndtri

from .bvn import bvn_cdf
from .errors import CapabilityError, ConstraintError, ContractError, ParseError

__all__ = [
    "Copula",
    "FrechetWeights",
    "ShuffleSpec",
    "comonotone",
    "counter_monotone",
    "independence",
    "frechet",
    "gaussian",
    "student_t",
    "clayton",
    "shuffle_of_m",
    "sample_csv",
    "parse_copula",
]

# open-interval clamp for sampled points
_LO = 2.0 ** -53
_HI = 1.0 - 2.0 ** -53

# parameters below this are treated as exact independence
_INDEP_TOL = 1e-8

_REFLECTIONS = ("u", "v", "uv")


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def _clip_open(a: np.ndarray) -> np.ndarray:
    return np.clip(a, _LO, _HI)


def _check_uv(u, v) -> tuple[np.ndarray, np.ndarray]:
    ua = np.asarray(u, dtype=float)
    va = np.asarray(v, dtype=float)
    if ua.size and ((ua < 0).any() or (ua > 1).any()):
        raise ContractError("u must lie in [0, 1]")
    if va.size and ((va < 0).any() or (va > 1).any()):
        raise ContractError("v must lie in [0, 1]")
    return ua, va


class Copula:
    """Base class; concrete families override `_sample` and `_cdf`."""

    family: str = "?"
    sampleable: bool = True
    cdf_available: bool = True

    def sample(self, n: int, seed: int) -> np.ndarray:
        """Draw n i.i.d. pairs in (0,1)^2; identical (n, seed) reproduce
        bit-identical output."""
        if not self.sampleable:
            raise CapabilityError(f"{self.family} copula is not sampleable")
        n = int(n)
        if n < 1:
            raise ContractError(f"sample size must be >= 1, got {n}")
        out = self._sample(n, _rng(seed))
        out[:, 0] = _clip_open(out[:, 0])
        out[:, 1] = _clip_open(out[:, 1])
        return out

    def cdf(self, u, v):
        if not self.cdf_available:
            raise CapabilityError(f"{self.family} copula has no CDF evaluator")
        ua, va = _check_uv(u, v)
        out = np.clip(self._cdf(ua, va), 0.0, 1.0)
        if np.isscalar(u) and np.isscalar(v):
            return float(out)
        return out

    def rectangle_volume(self, u1, u2, v1, v2):
        """Probability mass of [u1,u2] x [v1,v2], clamped to [0,1]."""
        if not (0.0 <= u1 <= u2 <= 1.0 and 0.0 <= v1 <= v2 <= 1.0):
            raise ContractError("rectangle must satisfy 0<=u1<=u2<=1, 0<=v1<=v2<=1")
        vol = (self.cdf(u2, v2) - self.cdf(u1, v2)
               - self.cdf(u2, v1) + self.cdf(u1, v1))
        return float(min(max(vol, 0.0), 1.0))

    def survival_at_center(self) -> float:
        """P(U > 1/2, V > 1/2); equals C(1/2,1/2) for any copula."""
        return self.p_balance() / 2.0

    def p_balance(self) -> float:
        """C(1/2,1/2) + survival(1/2,1/2) = 2 C(1/2,1/2).

        1 means all mass sits in the lower-left/upper-right quadrants
        (totally positively imbalanced), 0 the opposite, 1/2 balanced.
        """
        return 2.0 * float(self.cdf(0.5, 0.5))

    def reflect(self, axes: str) -> "Copula":
        """Partial reflection: 'u' maps (u,v)->(1-u,v), 'v' the other
        coordinate, 'uv' both."""
        if axes not in _REFLECTIONS:
            raise ContractError(f"axes must be one of {_REFLECTIONS}, got {axes!r}")
        return ReflectedCopula(base=self, axes=axes)

    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def _cdf(self, u: np.ndarray, v: np.ndarray):
        raise NotImplementedError


@dataclass(frozen=True)
class Comonotone(Copula):
    family = "M"

    def _sample(self, n, rng):
        u = rng.random(n)
        return np.column_stack([u, u])

    def _cdf(self, u, v):
        return np.minimum(u, v)


@dataclass(frozen=True)
class CounterMonotone(Copula):
    family = "W"

    def _sample(self, n, rng):
        u = rng.random(n)
        return np.column_stack([u, 1.0 - u])

    def _cdf(self, u, v):
        return np.maximum(u + v - 1.0, 0.0)


@dataclass(frozen=True)
class Independence(Copula):
    family = "Pi"

    def _sample(self, n, rng):
        return rng.random((n, 2))

    def _cdf(self, u, v):
        return u * v


@dataclass(frozen=True)
class FrechetWeights:
    """Point (p_m, p_pi, p_w) on the 3-simplex."""

    p_m: float
    p_pi: float
    p_w: float

    def __post_init__(self):
        for name, val in (("p_m", self.p_m), ("p_pi", self.p_pi), ("p_w", self.p_w)):
            if val < 0.0:
                raise ConstraintError(f"{name} must be >= 0, got {val}")
        total = self.p_m + self.p_pi + self.p_w
        if abs(total - 1.0) > 1e-12:
            raise ConstraintError(f"weights must sum to 1, got {total!r}")


@dataclass(frozen=True)
class Frechet(Copula):
    """Mixture p_m*M + p_pi*Pi + p_w*W."""

    weights: FrechetWeights
    family = "frechet"

    def _sample(self, n, rng):
        w = self.weights
        cat = rng.random(n)
        u = rng.random(n)
        alt = rng.random(n)
        v = np.where(cat < w.p_m, u,
                     np.where(cat < w.p_m + w.p_pi, alt, 1.0 - u))
        return np.column_stack([u, v])

    def _cdf(self, u, v):
        w = self.weights
        return (w.p_m * np.minimum(u, v) + w.p_pi * u * v
                + w.p_w * np.maximum(u + v - 1.0, 0.0))


@dataclass(frozen=True)
class GaussianCopula(Copula):
    rho: float
    family = "gauss"

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ContractError(f"rho must be in [-1, 1], got {self.rho}")

    def _correlated_normals(self, n, rng):
        z = rng.standard_normal((n, 2))
        x = z[:, 0]
        y = self.rho * z[:, 0] + math.sqrt(1.0 - self.rho ** 2) * z[:, 1]
        return x, y

    def _sample(self, n, rng):
        if self.rho == 1.0:
            u = ndtr(rng.standard_normal(n))
            return np.column_stack([u, u])
        if self.rho == -1.0:
            u = ndtr(rng.standard_normal(n))
            return np.column_stack([u, 1.0 - u])
        x, y = self._correlated_normals(n, rng)
        return np.column_stack([ndtr(x), ndtr(y)])

    def _cdf(self, u, v):
        if abs(self.rho) < _INDEP_TOL:
            return u * v
        # quantiles of exact 0/1 are +-inf; the bvn evaluator handles them
        with np.errstate(divide="ignore"):
            x = ndtri(u)
            y = ndtri(v)
        return bvn_cdf(x, y, self.rho)

    def p_balance(self) -> float:
        return 0.5 + math.asin(self.rho) / math.pi


@dataclass(frozen=True)
class StudentTCopula(Copula):
    """Student t copula.  Sampleable; CDF evaluation is not provided
    (bivariate t integration), but the center balance p(C) is available
    through the elliptical arcsine identity."""

    rho: float
    nu: float
    family = "t"
    cdf_available = False

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ContractError(f"rho must be in [-1, 1], got {self.rho}")
        if self.nu <= 0.0:
            raise ContractError(f"nu must be > 0, got {self.nu}")

    def _sample(self, n, rng):
        z = rng.standard_normal((n, 2))
        x = z[:, 0]
        y = self.rho * z[:, 0] + math.sqrt(max(0.0, 1.0 - self.rho ** 2)) * z[:, 1]
        s = rng.chisquare(self.nu, n)
        scale = np.sqrt(self.nu / s)
        return np.column_stack([_t_cdf(self.nu, x * scale),
                                _t_cdf(self.nu, y * scale)])

    def p_balance(self) -> float:
        return 0.5 + math.asin(self.rho) / math.pi


def _t_cdf(nu: float, t: np.ndarray) -> np.ndarray:
    half_tail = 0.5 * betainc(0.5 * nu, 0.5, nu / (nu + t * t))
    return np.where(t >= 0.0, 1.0 - half_tail, half_tail)


@dataclass(frozen=True)
class ClaytonCopula(Copula):
    """Clayton copula, theta in [-1, inf); theta = 0 is independence,
    theta = -1 is the counter-monotone copula."""

    theta: float
    family = "clayton"

    def __post_init__(self):
        if self.theta < -1.0:
            raise ContractError(f"theta must be >= -1, got {self.theta}")

    def _sample(self, n, rng):
        th = self.theta
        if abs(th) < _INDEP_TOL:
            return rng.random((n, 2))
        if th == -1.0:
            u = rng.random(n)
            return np.column_stack([u, 1.0 - u])
        if th > 0.0:
            # Marshall-Olkin frailty construction; tiny frailty values are
            # floored (the pair then lands at the lower clamp, its limit)
            g = np.maximum(rng.gamma(1.0 / th, 1.0, n), 1e-300)
            e = rng.exponential(1.0, (n, 2))
            with np.errstate(over="ignore"):
                pair = (1.0 + e / g[:, None]) ** (-1.0 / th)
            return pair
        # -1 < theta < 0: invert the conditional distribution of V given U
        u = _clip_open(rng.random(n))
        w = _clip_open(rng.random(n))
        bracket = (w ** (-th / (1.0 + th)) - 1.0) * u ** (-th) + 1.0
        v = np.maximum(bracket, 0.0) ** (-1.0 / th)
        return np.column_stack([u, v])

    def _cdf(self, u, v):
        th = self.theta
        if abs(th) < _INDEP_TOL:
            return u * v
        if th == -1.0:
            return np.maximum(u + v - 1.0, 0.0)
        u = np.maximum(u, 0.0)
        v = np.maximum(v, 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            t = u ** (-th) + v ** (-th) - 1.0
            out = np.where(t > 0.0, np.maximum(t, _LO) ** (-1.0 / th), 0.0)
        # zero margins carry zero mass regardless of theta's sign
        out = np.where((u == 0.0) | (v == 0.0), 0.0, out)
        return out


@dataclass(frozen=True)
class ShuffleSpec:
    """A straight shuffle of the comonotone copula.

    ``breakpoints`` partition [0,1] into n strips; strip i's mass is moved
    to the v-interval of strip ``permutation[i-1]`` (1-based), traversed
    forward for flip -1 and reversed for flip +1.  Uniform margins require
    each strip to have the same width as its image.
    """

    n: int
    breakpoints: tuple[float, ...]
    permutation: tuple[int, ...]
    flips: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints",
                           tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "permutation",
                           tuple(int(k) for k in self.permutation))
        object.__setattr__(self, "flips", tuple(int(f) for f in self.flips))
        if self.n < 1:
            raise ConstraintError(f"n must be >= 1, got {self.n}")
        bp = self.breakpoints
        if len(bp) != self.n + 1 or bp[0] != 0.0 or bp[-1] != 1.0:
            raise ConstraintError(
                "breakpoints must be n+1 values running from 0 to 1")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ConstraintError("breakpoints must be strictly increasing")
        if sorted(self.permutation) != list(range(1, self.n + 1)):
            raise ConstraintError(
                f"permutation must be a bijection on 1..{self.n}")
        if any(f not in (-1, 1) for f in self.flips) or len(self.flips) != self.n:
            raise ConstraintError("flips must be n values in {-1, +1}")
        widths = [b - a for a, b in zip(bp, bp[1:])]
        for i, tgt in enumerate(self.permutation):
            if abs(widths[i] - widths[tgt - 1]) > 1e-12:
                raise ConstraintError(
                    f"strip {i + 1} and its image {tgt} differ in width; "
                    "margins would not be uniform")

    @staticmethod
    def equal_strips(permutation, flips=None) -> "ShuffleSpec":
        n = len(permutation)
        if flips is None:
            flips = (1,) * n
        bp = tuple(i / n for i in range(n + 1))
        return ShuffleSpec(n=n, breakpoints=bp, permutation=tuple(permutation),
                           flips=tuple(flips))


@dataclass(frozen=True)
class ShuffleOfM(Copula):
    spec: ShuffleSpec
    family = "shuffle"

    def _sample(self, n, rng):
        sp = self.spec
        bp = np.asarray(sp.breakpoints)
        widths = np.diff(bp)
        perm0 = np.asarray(sp.permutation) - 1
        flips = np.asarray(sp.flips)

        u = _clip_open(rng.random(n))
        idx = np.searchsorted(bp, u, side="left") - 1
        t = (u - bp[idx]) / widths[idx]
        tgt = perm0[idx]
        forward = bp[tgt] + t * widths[tgt]
        backward = bp[tgt + 1] - t * widths[tgt]
        v = np.where(flips[idx] == -1, forward, backward)
        return np.column_stack([u, v])

    def _cdf(self, u, v):
        sp = self.spec
        bp = np.asarray(sp.breakpoints)
        widths = np.diff(bp)
        total = np.zeros(np.broadcast(u, v).shape, dtype=float)
        for i in range(sp.n):
            tgt = sp.permutation[i] - 1
            lam = widths[i]
            along_u = np.clip(u - bp[i], 0.0, lam)
            if sp.flips[i] == -1:
                along_v = np.clip(v - bp[tgt], 0.0, lam)
                total += np.minimum(along_u, along_v)
            else:
                blocked = np.clip(bp[tgt + 1] - v, 0.0, lam)
                total += np.maximum(along_u - blocked, 0.0)
        return total


@dataclass(frozen=True)
class ReflectedCopula(Copula):
    base: Copula
    axes: str
    family = "reflected"

    @property
    def sampleable(self):  # type: ignore[override]
        return self.base.sampleable

    @property
    def cdf_available(self):  # type: ignore[override]
        return self.base.cdf_available

    def _sample(self, n, rng):
        pts = self.base._sample(n, rng)
        if self.axes in ("u", "uv"):
            pts[:, 0] = 1.0 - pts[:, 0]
        if self.axes in ("v", "uv"):
            pts[:, 1] = 1.0 - pts[:, 1]
        return pts

    def _cdf(self, u, v):
        base = self.base
        if self.axes == "u":
            return v - base._cdf(1.0 - u, v)
        if self.axes == "v":
            return u - base._cdf(u, 1.0 - v)
        return u + v - 1.0 + base._cdf(1.0 - u, 1.0 - v)

    def p_balance(self) -> float:
        p = self.base.p_balance()
        return p if self.axes == "uv" else 1.0 - p


def comonotone() -> Copula:
    return Comonotone()


def counter_monotone() -> Copula:
    return CounterMonotone()


def independence() -> Copula:
    return Independence()


def frechet(p_m: float, p_pi: float, p_w: float) -> Copula:
    return Frechet(FrechetWeights(p_m=p_m, p_pi=p_pi, p_w=p_w))


def gaussian(rho: float) -> Copula:
    return GaussianCopula(rho=float(rho))


def student_t(rho: float, nu: float) -> Copula:
    return StudentTCopula(rho=float(rho), nu=float(nu))


def clayton(theta: float) -> Copula:
    return ClaytonCopula(theta=float(theta))


def shuffle_of_m(spec: ShuffleSpec) -> Copula:
    return ShuffleOfM(spec=spec)


def sample_csv(copula: Copula, n: int, seed: int) -> str:
    """Seeded sample dump as CSV with header ``u,v``."""
    pts = copula.sample(n, seed)
    lines = ["u,v"]
    lines += [f"{u:.17g},{v:.17g}" for u, v in pts]
    return "\n".join(lines) + "\n"


def parse_copula(text: str) -> Copula:
    """Parse a copula config string.

    Grammar::

        M | W | Pi | frechet:<pM>,<pPi>,<pW> | gauss:<rho> | t:<rho>,<nu>
          | clayton:<theta> | shuffle:<n>:<perm>:<flips>

    ``shuffle`` uses n equal-width strips; perm and flips are
    comma-separated (flips entries are -1 or 1).
    """
    text = text.strip()
    head, _, rest = text.partition(":")
    head_l = head.lower()
    try:
        if head_l == "m" and not rest:
            return comonotone()
        if head_l == "w" and not rest:
            return counter_monotone()
        if head_l == "pi" and not rest:
            return independence()
        if head_l == "frechet":
            pm, ppi, pw = (float(x) for x in rest.split(","))
            return frechet(pm, ppi, pw)
        if head_l == "gauss":
            return gaussian(float(rest))
        if head_l == "t":
            rho, nu = (float(x) for x in rest.split(","))
            return student_t(rho, nu)
        if head_l == "clayton":
            return clayton(float(rest))
        if head_l == "shuffle":
            n_txt, perm_txt, flips_txt = rest.split(":")
            perm = tuple(int(x) for x in perm_txt.split(","))
            flips = tuple(int(x) for x in flips_txt.split(","))
            if len(perm) != int(n_txt):
                raise ParseError(f"shuffle says n={n_txt} but perm has {len(perm)}")
            return shuffle_of_m(ShuffleSpec.equal_strips(perm, flips))
    except (ValueError, ConstraintError) as exc:
        raise ParseError(f"bad copula spec {text!r}: {exc}") from exc
    raise ParseError(f"unrecognized copula spec {text!r}")
