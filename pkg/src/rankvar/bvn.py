"""Bivariate standard normal CDF.

Single-pass Gauss-Legendre evaluation of the Drezner-Wesolowsky integral
in the form given by Genz (2004), "Numerical computation of rectangular
bivariate and trivariate normal and t probabilities".  Absolute error is
below 5e-16 for |rho| < 0.925 and below 1e-13 overall, comfortably inside
the 1e-7 contract used elsewhere in this package.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

__all__ = ["bvn_cdf"]

# Gauss-Legendre (weights, nodes) on [-1, 1]; symmetric halves listed once.
_GL6 = (
    (0.1713244923791705, 0.3607615730481384, 0.4679139345726904),
    (-0.9324695142031522, -0.6612093864662647, -0.2386191860831970),
)
_GL12 = (
    (0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
     0.2031674267230659, 0.2334925365383547, 0.2491470458134029),
    (-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
     -0.5873179542866171, -0.3678314989981802, -0.1252334085114692),
)
_GL20 = (
    (0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
     0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
     0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
     0.1527533871307259),
    (-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
     -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
     -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
     -0.07652652113349733),
)

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def _phi(x: float) -> float:
    return float(ndtr(x))


def _bvnu(dh: float, dk: float, r: float) -> float:
    """Upper-quadrant probability P(X > dh, Y > dk) for correlation r."""
    if math.isinf(dh) or math.isinf(dk):
        if dh == math.inf or dk == math.inf:
            return 0.0
        if dh == -math.inf:
            return 1.0 if dk == -math.inf else _phi(-dk)
        return _phi(-dh)

    if abs(r) < 0.3:
        weights, nodes = _GL6
    elif abs(r) < 0.75:
        weights, nodes = _GL12
    else:
        weights, nodes = _GL20

    h, k = dh, dk
    hk = h * k
    bvn = 0.0

    if abs(r) < 0.925:
        hs = (h * h + k * k) / 2.0
        asr = math.asin(r) / 2.0
        for w, x in zip(weights, nodes):
            for sgn in (-1.0, 1.0):
                sn = math.sin(asr * (sgn * x + 1.0))
                bvn += w * math.exp((sn * hk - hs) / (1.0 - sn * sn))
        return bvn * asr / (2.0 * math.pi) + _phi(-h) * _phi(-k)

    # |r| >= 0.925: Genz's transformed integrand with explicit tail terms.
    if r < 0.0:
        k = -k
        hk = -hk
    if abs(r) < 1.0:
        a_sq = (1.0 - r) * (1.0 + r)
        a = math.sqrt(a_sq)
        bs = (h - k) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        asr = -(bs / a_sq + hk) / 2.0
        if asr > -100.0:
            bvn = a * math.exp(asr) * (
                1.0 - c * (bs - a_sq) * (1.0 - d * bs / 5.0) / 3.0
                + c * d * a_sq * a_sq / 5.0
            )
        if -hk < 100.0:
            b = math.sqrt(bs)
            bvn -= (
                math.exp(-hk / 2.0) * _SQRT_TWO_PI * _phi(-b / a) * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
            )
        a /= 2.0
        for w, x in zip(weights, nodes):
            for sgn in (-1.0, 1.0):
                xs = (a * (sgn * x + 1.0)) ** 2
                rs = math.sqrt(1.0 - xs)
                asr = -(bs / xs + hk) / 2.0
                if asr > -100.0:
                    bvn += (
                        a * w * math.exp(asr)
                        * (math.exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs
                           - (1.0 + c * xs * (1.0 + d * xs)))
                    )
        bvn = -bvn / (2.0 * math.pi)
    if r > 0.0:
        return bvn + _phi(-max(h, k))
    bvn = -bvn
    if k > h:
        bvn += _phi(k) - _phi(h)
    return bvn


def bvn_cdf(x, y, rho):
    """P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.

    Scalar or array-like ``x``/``y`` are accepted and broadcast; ``rho`` must
    be a scalar in [-1, 1].  The degenerate cases rho = +/-1 use the exact
    comonotone/counter-monotone formulas.
    """
    rho = float(rho)
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must be in [-1, 1], got {rho}")

    xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if rho == 1.0:
        out = ndtr(np.minimum(xa, ya))
    elif rho == -1.0:
        out = np.maximum(ndtr(xa) + ndtr(ya) - 1.0, 0.0)
    else:
        out = np.empty(xa.shape, dtype=float)
        flat_x, flat_y, flat_o = xa.ravel(), ya.ravel(), out.ravel()
        for i in range(flat_x.size):
            flat_o[i] = _bvnu(-flat_x[i], -flat_y[i], rho)
    out = np.clip(out, 0.0, 1.0)
    if np.isscalar(x) and np.isscalar(y):
        return float(out)
    return out
