"""Pointwise kernel evaluation by vertical-line contour quadrature.

The kernel at argument x is the inverse Mellin transform of its symbol
along a vertical line inside the strip of analyticity.  The line is chosen
automatically: midpoint of a bounded strip, unit offset from a single
finite edge, or shifted toward the decaying side when only algebraic decay
is available.  Truncation is controlled by the magnitude envelope of the
symbol (a true bound once the asymptotic regime is reached), quadrature by
composite Gauss-Legendre panels with density doubling.

Only vertical contours are supported.  Kernels whose symbol does not decay
on any admissible vertical line (the balanced cases, and oscillatory ones
without enough algebraic decay) are refused; the transform engine reaches
those kernels through factorization chains instead of pointwise values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    HypothesisError,
    NoAdmissibleContourError,
    NumericalError,
    ParameterError,
)
from .gammasym import GammaSymbol, symbol_from_params
from .params import HParams, Invariants, derive_invariants
from .quadrature import panel_rule

_T_CAP = 2.0e4
_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class ContourSpec:
    """Vertical line Re s = re_line truncated at |Im s| <= half_height."""

    re_line: float
    half_height: float
    nodes_per_unit: int = 8
    rule: str = "gauss-legendre-panel"

    def __post_init__(self):
        if self.half_height <= 0:
            raise ParameterError("half_height must be positive")
        if self.nodes_per_unit < 4:
            raise ParameterError("nodes_per_unit must be at least 4")


@dataclass(frozen=True)
class EvalResult:
    value: complex
    truncation_bound: float
    quadrature_error_estimate: float
    contour_used: ContourSpec


def _tail_bound(inv: Invariants, gamma: float, T: float) -> float:
    """Upper bound on the neglected |Im s| > T part of the contour integral.

    Uses the magnitude envelope K |t|^rho exp(-c |t|): for c > 0 the bound
    t^rho <= T^rho e^{rho (t-T)/T} (rho >= 0) or T^rho (rho < 0) gives a
    closed form; for c = 0 the algebraic tail integrates exactly.
    """
    K = inv.stirling_front * inv.delta ** gamma * math.exp(
        abs(inv.xi.imag) * math.pi / 2.0
    )
    rho = inv.delta_cap * gamma + inv.mu.real
    c = math.pi * inv.a_star / 2.0
    if c > 0:
        if rho >= 0:
            denom = c - rho / T
            if denom <= 0:
                return math.inf
            return 2.0 * K * T ** rho * math.exp(-c * T) / denom
        return 2.0 * K * T ** rho * math.exp(-c * T) / c
    if rho < -1.0:
        return 2.0 * K * T ** (rho + 1.0) / (-1.0 - rho)
    return math.inf


def choose_contour(inv: Invariants, x: float, target_abs_err: float = 1e-10,
                   nodes_per_unit: int = 8) -> ContourSpec:
    """Pick an admissible vertical contour with tail bound <= target/2."""
    if x <= 0:
        raise ParameterError("kernel argument must be positive")
    alpha, beta = inv.alpha_low, inv.beta_high
    if not (alpha < beta):
        raise NoAdmissibleContourError("empty analyticity strip")
    if inv.a_star > 0:
        if math.isfinite(alpha) and math.isfinite(beta):
            gamma = 0.5 * (alpha + beta)
        elif math.isfinite(alpha):
            gamma = alpha + 1.0
        elif math.isfinite(beta):
            gamma = beta - 1.0
        else:
            gamma = 0.0
    elif inv.a_star < 0:
        raise NoAdmissibleContourError("a* < 0: symbol grows on every vertical line")
    else:
        if inv.delta_cap == 0:
            raise NoAdmissibleContourError(
                "no admissible contour: balanced symbol has no decay on vertical lines"
            )
        # need Delta*gamma + Re mu well below -1, inside the strip
        margin = 0.05 * (beta - alpha) if math.isfinite(alpha) and math.isfinite(beta) else 0.25
        if inv.delta_cap > 0:
            edge = alpha + margin if math.isfinite(alpha) else -_T_CAP
            gamma = min(edge, (-4.0 - inv.mu.real) / inv.delta_cap)
            gamma = max(gamma, alpha + 1e-3) if math.isfinite(alpha) else gamma
        else:
            edge = beta - margin if math.isfinite(beta) else _T_CAP
            gamma = max(edge, (-4.0 - inv.mu.real) / inv.delta_cap)
            gamma = min(gamma, beta - 1e-3) if math.isfinite(beta) else gamma
        if not (alpha < gamma < beta) or inv.delta_cap * gamma + inv.mu.real >= -1.0:
            raise NoAdmissibleContourError(
                "no admissible contour: algebraic-decay condition cannot be met in the strip"
            )
    # grow T geometrically until the envelope tail is small enough; the
    # envelope is asymptotic, so start beyond the first few oscillations
    target = max(target_abs_err, 1e-14) / 2.0
    scale = x ** (-gamma)
    T = 4.0
    while T <= _T_CAP:
        if _tail_bound(inv, gamma, T) * scale <= target:
            return ContourSpec(gamma, T, nodes_per_unit)
        T *= 1.3
    raise NumericalError("truncation horizon exceeds the quadrature budget")


class KernelEvaluator:
    """Reusable contour data for one kernel: symbol values computed once.

    Covers arguments with |ln x| up to log_span; the truncation height is
    sized so the envelope tail stays below the target even against the
    worst x^(-gamma) amplification in that range.
    """

    def __init__(self, params: HParams, target_abs_err: float = 1e-11,
                 log_span: float = 45.0):
        self.params = params
        self.inv = derive_invariants(params)
        self.target = target_abs_err
        base = choose_contour(self.inv, 1.0, target_abs_err)
        gamma = base.re_line
        T = base.half_height
        worst_scale = math.exp(abs(gamma) * log_span)
        while T <= _T_CAP and _tail_bound(self.inv, gamma, T) * worst_scale > target_abs_err / 2.0:
            T *= 1.15
        npu = max(base.nodes_per_unit, int(math.ceil(1.8 * log_span)) + 4)
        if 2 * T * npu > _NODE_BUDGET:
            raise NumericalError("truncation horizon exceeds the quadrature budget")
        self.contour = ContourSpec(gamma, T, npu)
        sym = symbol_from_params(params)
        nodes, weights = panel_rule(-T, T, 1.0, npu)
        s = gamma + 1j * nodes
        self._coeff_fine = sym.eval(s) * weights / (2.0 * math.pi)
        self._s_fine = s
        nodes_c, weights_c = panel_rule(-T, T, 1.0, max(4, int(npu / 1.6)))
        s_c = gamma + 1j * nodes_c
        self._coeff_coarse = sym.eval(s_c) * weights_c / (2.0 * math.pi)
        self._s_coarse = s_c

    def eval(self, x_arr: np.ndarray):
        logx = np.log(x_arr)
        gamma = self.contour.re_line
        fine = np.exp(-np.outer(logx, self._s_fine)) @ self._coeff_fine
        coarse = np.exp(-np.outer(logx, self._s_coarse)) @ self._coeff_coarse
        qerr = np.abs(fine - coarse)
        tail = _tail_bound(self.inv, gamma, self.contour.half_height)
        tails = tail * np.exp(-gamma * logx)
        return fine, qerr, tails


_EVALUATOR_CACHE: dict = {}


def kernel_evaluator(params: HParams, target_abs_err: float = 1e-11) -> KernelEvaluator:
    key = (params, round(math.log10(target_abs_err), 3))
    ev = _EVALUATOR_CACHE.get(key)
    if ev is None:
        ev = KernelEvaluator(params, target_abs_err)
        if len(_EVALUATOR_CACHE) > 64:
            _EVALUATOR_CACHE.clear()
        _EVALUATOR_CACHE[key] = ev
    return ev


def eval_hfunction_batch(params: HParams, xs, contour=None,
                         target_abs_err: float = 1e-10):
    """Kernel values at many positive arguments, sharing one contour.

    With contour=None the contour is chosen automatically and tightened to
    the worst argument of the batch (symbol data is cached per kernel, so
    repeated batches are cheap).  Returns a list of EvalResult in order.
    """
    xs = list(xs)
    if len(xs) == 0:
        return []
    x_arr = np.asarray([float(v) for v in xs], dtype=float)
    if np.any(x_arr <= 0) or not np.all(np.isfinite(x_arr)):
        raise ParameterError("x must be positive")
    inv = derive_invariants(params)
    if contour is None:
        ev = kernel_evaluator(params, min(target_abs_err, 1e-10))
        vals, qerr, tails = ev.eval(x_arr)
        return [
            EvalResult(
                value=complex(vals[k]),
                truncation_bound=float(tails[k]),
                quadrature_error_estimate=float(qerr[k]),
                contour_used=ev.contour,
            )
            for k in range(x_arr.size)
        ]
    if not (inv.alpha_low < contour.re_line < inv.beta_high):
        raise HypothesisError(
            "contour inside strip",
            f"Re s = {contour.re_line:g} outside ({inv.alpha_low:g}, {inv.beta_high:g})",
        )
    sym = symbol_from_params(params)
    gamma, T = contour.re_line, contour.half_height
    # oscillation exp(-i t ln x) needs density scaled to |ln x|
    npu = max(contour.nodes_per_unit, int(math.ceil(1.8 * float(np.max(np.abs(np.log(x_arr)))))) + 4)
    if 2 * T * npu > _NODE_BUDGET:
        raise NumericalError("truncation horizon exceeds the quadrature budget")

    def quad(density):
        t, w = panel_rule(-T, T, 1.0, density)
        s = gamma + 1j * t
        vals = sym.eval(s)
        mat = np.exp(-np.outer(np.log(x_arr), s))
        return (mat @ (vals * w)) / (2.0 * math.pi)

    # density increase until two refinements agree or stop improving
    coarse = quad(npu)
    fine = None
    best_err = math.inf
    for _ in range(4):
        denser = int(npu * 1.6) + 2
        fine = quad(denser)
        qerr_max = float(np.max(np.abs(fine - coarse)))
        if qerr_max <= target_abs_err / 2.0 or denser * 2 * T > _NODE_BUDGET \
                or qerr_max > 0.5 * best_err:
            break
        best_err = qerr_max
        coarse, npu = fine, denser
    qerr = np.abs(fine - coarse)
    tails = np.array([_tail_bound(inv, gamma, T) * xv ** (-gamma) for xv in x_arr])
    out = []
    for k in range(x_arr.size):
        out.append(EvalResult(
            value=complex(fine[k]),
            truncation_bound=float(tails[k]),
            quadrature_error_estimate=float(qerr[k]),
            contour_used=contour,
        ))
    return out


def eval_hfunction(params: HParams, x: float, contour=None,
                   target_abs_err: float = 1e-10) -> EvalResult:
    """Kernel value at a single positive argument."""
    return eval_hfunction_batch(params, [x], contour, target_abs_err)[0]
