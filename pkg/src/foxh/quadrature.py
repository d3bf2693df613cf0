"""Shared quadrature machinery.

Everything on the positive half line is integrated after the substitution
t = exp(tau), which turns both endpoint behaviours of the weighted-space
integrands into exponential decay in tau.  The resulting line integrals are
handled by the trapezoidal rule with automatic range expansion and nested
step halving (spectrally accurate for integrands analytic in a strip around
the real tau axis).

Finite panels (Mellin-Barnes contours, oscillation arches) use composite
Gauss-Legendre; endpoint-singular weights use Gauss-Jacobi nodes computed
by Golub-Welsch.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DivergentIntegralError, NumericalError

_TINY = 1e-300


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=256)
def gauss_jacobi(n: int, a: float, b: float):
    """Golub-Welsch nodes/weights for weight (1-x)^a (1+x)^b on [-1, 1]."""
    if a <= -1.0 or b <= -1.0:
        raise ValueError("Jacobi exponents must exceed -1")
    k = np.arange(n, dtype=float)
    apb = a + b
    diag = np.empty(n)
    if n > 0:
        diag[0] = (b - a) / (apb + 2.0)
    if n > 1:
        kk = k[1:]
        diag[1:] = (b * b - a * a) / ((2 * kk + apb) * (2 * kk + apb + 2.0))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = math.sqrt(4.0 * (1 + a) * (1 + b) / ((apb + 2) ** 2 * (apb + 3)))
    if n > 2:
        kk = k[2:]
        num = 4.0 * kk * (kk + a) * (kk + b) * (kk + apb)
        den = (2 * kk + apb) ** 2 * (2 * kk + apb + 1.0) * (2 * kk + apb - 1.0)
        off[1:] = np.sqrt(num / den)
    jm = np.diag(diag)
    if n > 1:
        jm += np.diag(off, 1) + np.diag(off, -1)
    vals, vecs = np.linalg.eigh(jm)
    mu0 = math.exp(
        (apb + 1) * math.log(2.0)
        + math.lgamma(a + 1.0)
        + math.lgamma(b + 1.0)
        - math.lgamma(apb + 2.0)
    )
    weights = mu0 * vecs[0, :] ** 2
    return vals, weights


def jacobi_unit_interval(n: int, exp_at_one: float, exp_at_zero: float):
    """Nodes/weights for u^exp_at_zero (1-u)^exp_at_one * smooth(u) on (0, 1).

    Returns (u, w) so that the integral equals sum(w * smooth(u)); the
    singular endpoint powers are absorbed into the weights.
    """
    x, w = gauss_jacobi(n, exp_at_one, exp_at_zero)
    u = 0.5 * (x + 1.0)
    scale = 0.5 ** (exp_at_one + exp_at_zero + 1.0)
    return u, w * scale


def panel_rule(t_lo: float, t_hi: float, panel_width: float, nodes_per_panel: int):
    """Composite Gauss-Legendre nodes/weights on [t_lo, t_hi]."""
    if t_hi <= t_lo:
        raise ValueError("empty panel range")
    n_panels = max(1, int(math.ceil((t_hi - t_lo) / panel_width)))
    edges = np.linspace(t_lo, t_hi, n_panels + 1)
    x, w = gauss_legendre(nodes_per_panel)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _sweep(g, spacing: float, offset: float, center: float, tol: float,
           block: int, max_span: float):
    """sum of g over {center +- (offset + spacing*k), k >= 0}, times spacing.

    For offset == 0 the k=0 lattice point appears in both directions and is
    counted once; for offset > 0 the two directions interleave without
    overlap (together they tile the shifted lattice center + offset + k*spacing).
    """
    total = 0.0 + 0.0j
    scale = 0.0
    amax = 0.0
    k0 = 0
    while spacing * k0 < max_span:
        idx = np.arange(k0, k0 + block)
        taus = np.concatenate(
            [center + offset + spacing * idx, center - offset - spacing * idx]
        )
        vals = np.asarray(g(taus), dtype=complex)
        if k0 == 0 and offset == 0.0:
            vals[block] = 0.0
        if not np.all(np.isfinite(vals)):
            raise DivergentIntegralError("integrand overflow on the line")
        total += vals.sum() * spacing
        amax = float(np.max(np.abs(vals)))
        scale = max(scale, amax)
        # never conclude before any mass has been seen: the support may sit
        # far from the expansion center
        if scale > 0.0 and k0 > 0 and amax * spacing <= tol * scale * spacing * 1e-2:
            return total
        k0 += block
    if scale == 0.0:
        return total  # identically zero on the whole span
    # ran out of range: decide between divergence and budget exhaustion
    if amax > 1e-8 * scale:
        raise DivergentIntegralError("integrand does not decay on the line")
    raise NumericalError("line quadrature range budget exhausted")


def trapezoid_line(
    g,
    *,
    tol: float = 1e-12,
    h: float = 0.5,
    center: float = 0.0,
    block: int = 64,
    max_span: float = 900.0,
    max_halvings: int = 4,
):
    """Integrate vectorized g over the whole real line by trapezoid sums.

    g must decay at least exponentially in both directions.  Step halving
    reuses previous lattice points; returns (value, error_estimate).
    """
    value = _sweep(g, h, 0.0, center, tol, block, max_span)
    err = math.inf
    for _ in range(max_halvings):
        fill = _sweep(g, h, 0.5 * h, center, tol, block, max_span)
        refined = 0.5 * value + 0.5 * fill
        err = abs(refined - value)
        value = refined
        h *= 0.5
        if err <= tol * max(1.0, abs(value)):
            break
    return value, err


def log_axis_quad(f, *, tol: float = 1e-12, weight=None, center: float = 0.0):
    """Integral of f over (0, infinity) dt, via t = exp(tau).

    weight(tau) may supply an extra complex factor (e.g. exp((s-1) tau));
    the Jacobian e^tau is applied here.  Returns (value, error_estimate).
    """

    def g(tau):
        t = np.exp(tau)
        vals = np.asarray(f(t), dtype=complex) * t
        if weight is not None:
            vals = vals * weight(tau)
        return vals

    return trapezoid_line(g, tol=tol, center=center)


def wynn_epsilon(partial_sums):
    """Accelerate partial sums with Wynn's epsilon algorithm.

    Returns (best_estimate, stability_gap): the top even-column entry and
    the spread of the last few even columns, usable as an error proxy.
    """
    s = [complex(v) for v in partial_sums]
    n = len(s)
    if n == 0:
        raise ValueError("no partial sums")
    if n < 3:
        return s[-1], (abs(s[-1] - s[0]) if n > 1 else math.inf)
    scale = max(abs(v) for v in s)
    if scale == 0.0:
        return 0.0 + 0.0j, 0.0
    if max(abs(b - a) for a, b in zip(s[:-1], s[1:])) <= 1e-15 * scale:
        return s[-1], 0.0
    col_prev = [0.0 + 0.0j] * (n + 1)
    col_curr = list(s)
    even_tops = [col_curr[-1]]
    k = 0
    exhausted = False
    while len(col_curr) >= 2 and not exhausted:
        col_next = []
        for j in range(len(col_curr) - 1):
            d = col_curr[j + 1] - col_curr[j]
            # dividing differences at rounding level only makes noise
            if abs(d) <= 5e-16 * (abs(col_curr[j]) + abs(col_curr[j + 1])) + 1e-280:
                exhausted = True
                break
            col_next.append(col_prev[j + 1] + 1.0 / d)
        if exhausted:
            break
        col_prev, col_curr = col_curr, col_next
        k += 1
        if k % 2 == 0 and col_curr:
            even_tops.append(col_curr[-1])
    # keep the entry where consecutive even columns agree best (the plateau)
    best_val, best_gap = even_tops[-1], math.inf
    for a, b in zip(even_tops[:-1], even_tops[1:]):
        gap = abs(b - a)
        if gap <= best_gap:
            best_gap, best_val = gap, b
    return best_val, best_gap
