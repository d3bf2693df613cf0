"""Complex log-gamma and digamma kernels.

Both functions use the asymptotic (Stirling) series once the argument has
been pushed to |z| >= 10 by the recurrence, and the reflection formula for
Re z < 1/2.  The log-sine in the reflection is evaluated on the branch that
keeps log-gamma equal to the analytic continuation from the positive real
axis (real there, continuous off the cut along the non-positive reals).

Accuracy target is 1e-13 relative in the right half plane; products of many
kernel factors amplify per-factor error roughly linearly, so headroom
matters more here than speed.
"""

from __future__ import annotations

import numpy as np

from .errors import PoleError

LN_SQRT_2PI = 0.9189385332046727417803297364056176
LN_PI = 1.1447298858494001741434273513530587

# B_{2n} / (2n (2n-1)) for the log-gamma series
_LG_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
)

# B_{2n} / (2n) for the digamma series
_PSI_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
    -174611.0 / 6600.0,
    77683.0 / 276.0,
    -236364091.0 / 65520.0,
)

_SHIFT_RADIUS = 10.0
_POLE_TOL = 1e-12


def _as_array(z):
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    return np.atleast_1d(arr).copy(), scalar


def _check_poles(z: np.ndarray) -> None:
    near_axis = np.abs(z.imag) < _POLE_TOL
    if not near_axis.any():
        return
    re = z.real[near_axis]
    bad = (re < 0.5) & (np.abs(re - np.round(re)) < _POLE_TOL)
    if bad.any():
        raise PoleError(f"gamma pole at z = {re[bad][0]:.17g}")


def _log_sin_pi_upper(w: np.ndarray) -> np.ndarray:
    # valid for Im w >= 0; |exp(2 i pi w)| <= 1 keeps log1p on its principal branch
    return (
        -1j * np.pi * w
        + np.log1p(-np.exp(2j * np.pi * w))
        + 1j * np.pi / 2.0
        - np.log(2.0)
    )


def log_sin_pi(z):
    """Branch of log(sin(pi z)) continuous off the real integer points."""
    z, scalar = _as_array(z)
    out = np.empty_like(z)
    upper = z.imag >= 0.0
    if upper.any():
        out[upper] = _log_sin_pi_upper(z[upper])
    lower = ~upper
    if lower.any():
        out[lower] = np.conj(_log_sin_pi_upper(np.conj(z[lower])))
    return out[0] if scalar else out


def _stirling_log_gamma(w: np.ndarray) -> np.ndarray:
    rz = 1.0 / w
    rz2 = rz * rz
    ser = np.zeros_like(w)
    for c in reversed(_LG_COEFFS):
        ser = (ser + c) * rz2
    ser = ser * w  # convert even-power sum into odd powers of 1/w
    return (w - 0.5) * np.log(w) - w + LN_SQRT_2PI + ser


def log_gamma(z):
    """Principal (analytic) log-gamma, vectorized over complex arrays.

    Raises PoleError at non-positive integers.
    """
    z, scalar = _as_array(z)
    _check_poles(z)
    neg = z.real < 0.5
    w = np.where(neg, 1.0 - z, z)
    shift = np.zeros_like(w)
    wk = w.copy()
    while True:
        small = np.abs(wk) < _SHIFT_RADIUS
        if not small.any():
            break
        shift[small] += np.log(wk[small])
        wk[small] += 1.0
    lg = _stirling_log_gamma(wk) - shift
    if neg.any():
        lg[neg] = LN_PI - log_sin_pi(z[neg]) - lg[neg]
    return lg[0] if scalar else lg


def _stirling_digamma(w: np.ndarray) -> np.ndarray:
    rz = 1.0 / w
    rz2 = rz * rz
    ser = np.zeros_like(w)
    for c in reversed(_PSI_COEFFS):
        ser = (ser + c) * rz2
    return np.log(w) - 0.5 * rz - ser


def _cot_pi(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    up = z.imag > 0.5
    dn = z.imag < -0.5
    mid = ~(up | dn)
    if up.any():
        q = np.exp(2j * np.pi * z[up])
        out[up] = -1j * (1.0 + q) / (1.0 - q)
    if dn.any():
        q = np.exp(-2j * np.pi * z[dn])
        out[dn] = 1j * (1.0 + q) / (1.0 - q)
    if mid.any():
        w = z[mid]
        out[mid] = np.cos(np.pi * w) / np.sin(np.pi * w)
    return out


def digamma(z):
    """Digamma (logarithmic derivative of gamma), vectorized."""
    z, scalar = _as_array(z)
    _check_poles(z)
    neg = z.real < 0.5
    w = np.where(neg, 1.0 - z, z)
    corr = np.zeros_like(w)
    wk = w.copy()
    while True:
        small = np.abs(wk) < _SHIFT_RADIUS
        if not small.any():
            break
        corr[small] += 1.0 / wk[small]
        wk[small] += 1.0
    ps = _stirling_digamma(wk) - corr
    if neg.any():
        ps[neg] = ps[neg] - np.pi * _cot_pi(z[neg])
    return ps[0] if scalar else ps
