"""Numerically stable Yeo-Johnson transform with exact partial derivatives.

The transform is piecewise in x with a power-law branch on each side:

    x >= 0:  ((1+x)^lam - 1) / lam
    x <  0:  -((1-x)^(2-lam) - 1) / (2-lam)

Both branches share one shape after substituting a = lam (x >= 0) or
a = 2-lam (x < 0), s = sign(x), u = log1p(|x|):

    value   = s * expm1(a*u) / a
    d/dx    = exp((a-1) * u)
    d/dlam  = (exp(a*u) * (a*u - 1) + 1) / a**2        (same sign on both sides)

The divisions are removable singularities at a = 0 (i.e. lam = 0 for
x >= 0, lam = 2 for x < 0); inside |a| < eps we switch to second-order
series in a, whose truncation error crosses the direct formula's rounding
error near eps = 1e-6 in float64.  a = 1 short-circuits to the exact
identity so freshly initialized modulation is bitwise transparent.
"""

from __future__ import annotations

import math

import numpy as np

from .nn import InputError, ShapeError

DEFAULT_EPS = 1e-6


def _yj_kernel(x: np.ndarray, lam: np.ndarray, eps: float):
    """Elementwise (value, d/dx, d/dlam) for broadcast-matched x and lam."""
    x, lam = np.broadcast_arrays(x, lam)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))

    pos = x >= 0.0
    sign = np.where(pos, 1.0, -1.0)
    a = np.where(pos, lam, 2.0 - lam)
    u = np.log1p(np.abs(x))
    au = a * u

    one = a == 1.0  # lam = 1: the transform is exactly the identity
    series = np.abs(a) < eps
    direct = ~(series | one)

    vals = np.empty_like(x)
    vals[one] = x[one]
    vals[direct] = sign[direct] * np.expm1(au[direct]) / a[direct]
    if series.any():
        us, as_ = u[series], a[series]
        vals[series] = sign[series] * (
            us + as_ * us**2 / 2.0 + as_**2 * us**3 / 6.0
        )

    dx = np.exp((a - 1.0) * u)
    dx[one] = 1.0

    dlam = np.empty_like(x)
    nonseries = ~series
    dlam[nonseries] = (
        np.exp(au[nonseries]) * (au[nonseries] - 1.0) + 1.0
    ) / a[nonseries] ** 2
    if series.any():
        us, as_ = u[series], a[series]
        dlam[series] = us**2 / 2.0 + as_ * us**3 / 3.0 + as_**2 * us**4 / 8.0

    return vals, dx, dlam


def _check_scalar(x: float, lam: float) -> None:
    if not (math.isfinite(x) and math.isfinite(lam)):
        raise InputError(f"yeo-johnson: non-finite input x={x}, lambda={lam}")


def yj_forward(x: float, lam: float, eps: float = DEFAULT_EPS) -> float:
    _check_scalar(x, lam)
    vals, _, _ = _yj_kernel(np.float64(x), np.float64(lam), eps)
    return float(vals[0])


def yj_dx(x: float, lam: float, eps: float = DEFAULT_EPS) -> float:
    _check_scalar(x, lam)
    _, dx, _ = _yj_kernel(np.float64(x), np.float64(lam), eps)
    return float(dx[0])


def yj_dlambda(x: float, lam: float, eps: float = DEFAULT_EPS) -> float:
    _check_scalar(x, lam)
    _, _, dlam = _yj_kernel(np.float64(x), np.float64(lam), eps)
    return float(dlam[0])


def yj_batch(x: np.ndarray, lam: np.ndarray, eps: float = DEFAULT_EPS):
    """Columnwise transform of a batch matrix.

    ``lam`` holds one lambda per feature column, shape (m,), or per-row
    values of shape (n, m).  Returns (values, d/dx, d/dlam), each (n, m).
    """
    x = np.asarray(x, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"yj_batch: x must be 2-D, got {x.shape}")
    if lam.shape not in ((x.shape[1],), x.shape):
        raise ShapeError(
            f"yj_batch: lambda shape {lam.shape} incompatible with x {x.shape}"
        )
    return _yj_kernel(x, lam, eps)
