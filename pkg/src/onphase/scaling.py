"""Power-law and piecewise critical-law fitting; exponent/dimension algebra.

Near the transition the energy curve is modeled as two power-law branches
joined at (T_c, E_c):

    E(T) = E_c + A_plus * (T - T_c)**(1 - alpha)        for T > T_c
    E(T) = E_c - A_minus * (T_c - T)**(1 - alpha_prime) for T < T_c

with A_plus, A_minus >= 0 and alpha, alpha_prime < 1. The below-branch
exponent maps to the spatial dimension of the matching spin model through
d = 2*(2 - alpha)/(1 - alpha), whose inverse is alpha = (d - 4)/(d - 2);
together with nu = 1/(d - 2) this satisfies nu*d = 2 - alpha identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from .energy import EnergyCurve
from .errors import ConvergenceError, InsufficientDataError, ValidationError

# Optimization uses p = 1 - alpha; the box p in [P_MIN, P_MAX] is exactly
# alpha in [-2, 0.99].
P_MIN, P_MAX = 0.01, 3.0
_AMPLITUDE_FLOOR = 1e-6


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    log_prefactor: float
    r_squared: float


@dataclass(frozen=True)
class JointLossParams:
    """Constants of the two-variable loss surface L(P, D)."""

    P_c: float
    D_c: float
    alpha: float
    beta: float

    def __post_init__(self):
        if min(self.P_c, self.D_c, self.alpha, self.beta) <= 0:
            raise ValidationError("all joint-loss parameters must be strictly positive")


@dataclass(frozen=True)
class CriticalFit:
    """Fitted two-branch critical law plus the derived internal dimension."""

    T_c: float
    E_c: float
    A_plus: float
    A_minus: float
    alpha: float
    alpha_prime: float
    residual_sse: float
    d_internal: float

    def __post_init__(self):
        if self.alpha >= 1 or self.alpha_prime >= 1:
            raise ValidationError("branch exponents must be < 1")
        if self.A_plus < 0 or self.A_minus < 0:
            raise ValidationError("branch amplitudes must be >= 0")


def fit_power_law(xs, ys) -> PowerLawFit:
    """Least-squares line through (ln x, ln y); the slope is the exponent."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValidationError("xs and ys must be 1-d arrays of equal length")
    if xs.size < 2:
        raise InsufficientDataError("power-law fit needs at least 2 points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValidationError("power-law fit requires strictly positive data")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-20 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return PowerLawFit(exponent=float(slope), log_prefactor=float(intercept), r_squared=r2)


def compose_exponents(a: float, b: float) -> float:
    """Chain rule for power-law exponents: y~x^a, z~x^b gives y~z^(a/b)."""
    if b == 0:
        raise ValidationError("cannot compose with a zero exponent")
    return a / b


def evaluate_joint_loss(P: float, D: float, params: JointLossParams) -> float:
    """((P_c/P)^(alpha/beta) + D_c/D)^beta."""
    if P <= 0 or D <= 0:
        raise ValidationError("P and D must be strictly positive")
    return ((params.P_c / P) ** (params.alpha / params.beta) + params.D_c / D) ** params.beta


def internal_dimension(alpha: float) -> float:
    """Spatial dimension matched to a specific-heat exponent: 2*(2-a)/(1-a)."""
    if alpha >= 1:
        raise ValidationError(f"internal dimension has a pole at alpha=1; got {alpha}")
    return 2.0 * (2.0 - alpha) / (1.0 - alpha)


def alpha_of_dimension(d: float) -> float:
    """Inverse of :func:`internal_dimension`: (d-4)/(d-2)."""
    if d == 2:
        raise ValidationError("alpha(d) is singular at d=2")
    return (d - 4.0) / (d - 2.0)


def nu_of_dimension(d: float) -> float:
    """Correlation-length exponent 1/(d-2), valid above two dimensions."""
    if d <= 2:
        raise ValidationError(f"nu(d) requires d > 2, got {d}")
    return 1.0 / (d - 2.0)


def hyperscaling_residual(nu: float, alpha: float, d: float) -> float:
    """nu*d - (2 - alpha); zero iff the hyperscaling relation holds."""
    if not all(math.isfinite(v) for v in (nu, alpha, d)):
        raise ValidationError("hyperscaling inputs must be finite")
    return nu * d - (2.0 - alpha)


def critical_energy_curve(T, T_c, E_c, A_plus, A_minus, alpha, alpha_prime):
    """Evaluate the two-branch critical law at temperatures ``T``."""
    T = np.asarray(T, dtype=np.float64)
    out = np.full(T.shape, E_c, dtype=np.float64)
    above = T > T_c
    below = T < T_c
    out[above] += A_plus * (T[above] - T_c) ** (1.0 - alpha)
    out[below] -= A_minus * (T_c - T[below]) ** (1.0 - alpha_prime)
    return out


def default_tc_grid(curve: EnergyCurve) -> list[float]:
    """Interior curve temperatures plus midpoints of consecutive temperatures."""
    T = curve.temperatures
    candidates = list(T[1:-1])
    candidates.extend((T[i] + T[i + 1]) / 2 for i in range(len(T) - 1))
    return sorted(candidates)


def _loglin_init(x, resid, fallback_amp):
    """Initial (amplitude, p) from a line fit of ln(resid) vs ln(x)."""
    good = resid > 0
    if good.sum() >= 2:
        slope, intercept = np.polyfit(np.log(x[good]), np.log(resid[good]), 1)
        p0 = float(np.clip(slope, P_MIN, P_MAX))
        a0 = float(min(np.exp(intercept), 1e6))
    else:
        p0, a0 = 0.5, fallback_amp
    return max(a0, _AMPLITUDE_FLOOR), p0


def _fit_candidate(tc, T, E, w):
    below = T < tc
    above = T > tc
    xb = tc - T[below]
    xa = T[above] - tc
    eb, ea = E[below], E[above]
    wb, wa = w[below], w[above]

    ec0 = float(np.interp(tc, T, E))
    amp_scale = max(float(E.max() - E.min()), 1e-3)
    a_m0, p_m0 = _loglin_init(xb, ec0 - eb, amp_scale)
    a_p0, p_p0 = _loglin_init(xa, ea - ec0, amp_scale)

    def residuals(theta):
        ec, a_m, p_m, a_p, p_p = theta
        model_b = ec - a_m * xb**p_m
        model_a = ec + a_p * xa**p_p
        return np.concatenate([wb * (model_b - eb), wa * (model_a - ea)])

    x0 = np.array([ec0, a_m0, p_m0, a_p0, p_p0])
    lower = np.array([-np.inf, 0.0, P_MIN, 0.0, P_MIN])
    upper = np.array([np.inf, np.inf, P_MAX, np.inf, P_MAX])
    x0 = np.clip(x0, lower, upper)
    result = least_squares(residuals, x0, bounds=(lower, upper), max_nfev=400)
    sse = float(2.0 * result.cost)
    ec, a_m, p_m, a_p, p_p = result.x
    return sse, result.success, {
        "T_c": float(tc),
        "E_c": float(ec),
        "A_minus": float(a_m),
        "alpha_prime": float(1.0 - p_m),
        "A_plus": float(a_p),
        "alpha": float(1.0 - p_p),
    }


def fit_critical(curve: EnergyCurve, T_c_grid=None) -> CriticalFit:
    """Grid search over T_c candidates with a shared-E_c two-branch fit each.

    The candidate minimizing the (weighted) SSE wins; ties break toward lower
    T_c. Raises :class:`ConvergenceError` carrying the best fit so far when
    the law is unidentifiable (both amplitudes collapse to zero) or when no
    candidate beats a constant model.
    """
    T = curve.temperatures
    E = curve.mean_energies
    se = curve.stderrs
    w = 1.0 / se if np.all(se > 0) else np.ones_like(E)

    if T_c_grid is None:
        T_c_grid = default_tc_grid(curve)
    candidates = [tc for tc in sorted(T_c_grid) if (T < tc).sum() >= 4 and (T > tc).sum() >= 4]
    if not candidates:
        raise InsufficientDataError(
            "no T_c candidate has >= 4 curve points on each side"
        )

    best = None
    for tc in candidates:
        sse, _, params = _fit_candidate(tc, T, E, w)
        if best is None or sse < best[0] - 1e-12:
            best = (sse, params)
    sse, params = best

    fit = CriticalFit(
        residual_sse=sse,
        d_internal=internal_dimension(params["alpha_prime"]),
        **params,
    )

    const = float(np.sum(w**2 * E) / np.sum(w**2))
    sse_const = float(np.sum((w * (E - const)) ** 2))
    if sse > sse_const + 1e-9 * max(sse_const, 1.0):
        raise ConvergenceError(
            f"two-branch fit (SSE={sse:.4g}) worse than constant model (SSE={sse_const:.4g})",
            best=fit,
        )
    # degenerate when both branches contribute nothing over the curve's span
    reach_below = (fit.T_c - T[0]) ** (1.0 - fit.alpha_prime)
    reach_above = (T[-1] - fit.T_c) ** (1.0 - fit.alpha)
    contribution = max(fit.A_minus * reach_below, fit.A_plus * reach_above)
    if contribution < _AMPLITUDE_FLOOR * max(1.0, float(np.abs(E).max())):
        raise ConvergenceError(
            "both branch amplitudes are zero; T_c is unidentifiable on this curve",
            best=fit,
        )
    return fit


def fit_residuals(fit: CriticalFit, curve: EnergyCurve) -> np.ndarray:
    """Per-point (unweighted) residuals of a fit against its curve."""
    model = critical_energy_curve(
        curve.temperatures, fit.T_c, fit.E_c, fit.A_plus, fit.A_minus, fit.alpha, fit.alpha_prime
    )
    return curve.mean_energies - model


def write_fit_report(fit: CriticalFit, curve: EnergyCurve, path) -> Path:
    """Structured-text record with all fit fields plus per-point residuals."""
    path = Path(path)
    payload = {
        "T_c": fit.T_c,
        "E_c": fit.E_c,
        "A_plus": fit.A_plus,
        "A_minus": fit.A_minus,
        "alpha": fit.alpha,
        "alpha_prime": fit.alpha_prime,
        "residual_sse": fit.residual_sse,
        "d_internal": fit.d_internal,
        "residuals": [
            {"temperature": float(t), "residual": float(r)}
            for t, r in zip(curve.temperatures, fit_residuals(fit, curve))
        ],
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
