"""Sharp-interface 1D reference solver and matched-asymptotics machinery.

Solves the coupled two-domain transmission problem directly (no diffuse
layer), evaluates the closed-form transition-layer integrals, extracts the
matching constants of the inner expansion, and solves the first-order
correction problem whose nonzero solution pins the method's accuracy at
exactly first order in the interface width.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .geometry import PointInterface1D
from .model import TransmissionProblem, eval_field

_ALPHA_MATCH_TOL = 1e-8  # |alpha - 1| below this routes to the equal-diffusivity case


class CaseMismatchError(ValueError):
    """A formula valid only for distinct diffusivities was hit with alpha = 1."""


@dataclass(frozen=True)
class SharpSolution:
    """Two-domain reference solution on node grids that include the interface."""

    x_left: np.ndarray
    u_left: np.ndarray
    x_right: np.ndarray
    u_right: np.ndarray
    interface_value: float
    slope_left: float    # one-sided derivative from the exterior side
    slope_right: float   # one-sided derivative from the interior side


@dataclass(frozen=True)
class CorrectionSolution:
    """First-order outer correction; discontinuous at the interface unless alpha = 1."""

    x_left: np.ndarray
    u_left: np.ndarray
    x_right: np.ndarray
    u_right: np.ndarray
    value_left: float
    value_right: float
    slope_left: float
    slope_right: float
    case: str            # "distinct-diffusivity" or "matched-diffusivity"
    conditioning: float  # condition number of the 2x2 interface coupling system


@dataclass(frozen=True)
class MatchingConstants:
    interface_value: float             # zeroth-order solution value at the interface
    exterior_flux: float               # alpha times the exterior slope at the interface
    first_order_offset: float | None   # integration constant of the first-order inner solution
    second_order_flux: float | None    # flux constant of the second-order inner solution


def _require_1d_point(problem: TransmissionProblem):
    if problem.dimension != 1 or not isinstance(problem.geometry, PointInterface1D):
        raise ValueError("reference solves need a 1D problem with a point interface")


def _two_domain_solve(problem, n, src_right, src_left, value_jump,
                      flux_coeff_right, flux_coeff_left, flux_rhs):
    """Direct banded solve of the coupled two-domain system.

    Unknowns are the left nodes then the right nodes (both include the
    interface node).  Interface rows impose
        u_left(x0) - u_right(x0) = value_jump
        u_right'(x0) - alpha u_left'(x0)
            = flux_coeff_right u_right(x0) + flux_coeff_left u_left(x0) + flux_rhs
    with one-sided second-order derivative stencils, and both outer ends
    carry homogeneous Neumann conditions via ghost-node reflection.
    """
    (a, b) = problem.box[0]
    x0 = problem.geometry.x0
    alpha, beta, gamma = problem.alpha, problem.beta, problem.gamma
    hl = (x0 - a) / n
    hr = (b - x0) / n
    xl = a + hl * np.arange(n + 1)
    xr = x0 + hr * np.arange(n + 1)
    m = 2 * n + 2
    lband, uband = 3, 2
    ab = np.zeros((lband + uband + 1, m))
    rhs = np.zeros(m)

    def put(i, j, val):
        ab[uband + i - j, j] += val

    il = np.arange(1, n)                     # left interior rows / columns
    ab[uband, il] += 2.0 * alpha / hl**2 + beta
    ab[uband + 1, il - 1] += -alpha / hl**2  # A[i, i-1]
    ab[uband - 1, il + 1] += -alpha / hl**2  # A[i, i+1]
    rhs[il] = eval_field(src_left, xl[il])

    put(0, 0, 2.0 * alpha / hl**2 + beta)
    put(0, 1, -2.0 * alpha / hl**2)
    rhs[0] = eval_field(src_left, xl[0])

    put(n, n, 1.0)
    put(n, n + 1, -1.0)
    rhs[n] = value_jump

    row = n + 1
    put(row, n + 1, -1.5 / hr - flux_coeff_right)
    put(row, n + 2, 2.0 / hr)
    put(row, n + 3, -0.5 / hr)
    put(row, n, -1.5 * alpha / hl - flux_coeff_left)
    put(row, n - 1, 2.0 * alpha / hl)
    put(row, n - 2, -0.5 * alpha / hl)
    rhs[row] = flux_rhs

    ir = np.arange(1, n)                     # right interior; rows n+1+j
    rows = n + 1 + ir
    ab[uband, rows] += 2.0 / hr**2 + gamma
    ab[uband + 1, rows - 1] += -1.0 / hr**2
    ab[uband - 1, rows + 1] += -1.0 / hr**2
    rhs[rows] = eval_field(src_right, xr[ir])

    put(m - 1, m - 1, 2.0 / hr**2 + gamma)
    put(m - 1, m - 2, -2.0 / hr**2)
    rhs[m - 1] = eval_field(src_right, xr[n])

    z = solve_banded((lband, uband), ab, rhs)
    ul, ur = z[: n + 1], z[n + 1:]
    slope_left = (3.0 * ul[-1] - 4.0 * ul[-2] + ul[-3]) / (2.0 * hl)
    slope_right = (-3.0 * ur[0] + 4.0 * ur[1] - ur[2]) / (2.0 * hr)
    return xl, ul, xr, ur, slope_left, slope_right


def sharp_solve_1d(problem: TransmissionProblem, n: int = 4096) -> SharpSolution:
    """Direct second-order solve of the sharp two-sided problem.

    n is the number of intervals per subdomain.
    """
    _require_1d_point(problem)
    if n < 16:
        raise ValueError("need at least 16 intervals per subdomain")
    lam = float(eval_field(problem.g, problem.geometry.x0))
    xl, ul, xr, ur, sl, sr = _two_domain_solve(
        problem, n, problem.q, problem.h,
        value_jump=0.0, flux_coeff_right=problem.kappa, flux_coeff_left=0.0,
        flux_rhs=lam)
    return SharpSolution(xl, ul, xr, ur, float(ur[0]), sl, sr)


def _interface_system(problem, flux_coeff_right, flux_coeff_left):
    """Closed-form 2x2 coupling of the homogeneous correction problem.

    Works on the interface values (right, left); used for conditioning
    diagnostics of the correction solve.
    """
    (a, b) = problem.box[0]
    x0 = problem.geometry.x0
    sg = math.sqrt(problem.gamma)
    slope_r = -sg * math.tanh(sg * (b - x0))  # d/dx of the unit right mode at x0
    if problem.beta > 0:
        mu = math.sqrt(problem.beta / problem.alpha)
        slope_l = mu * math.tanh(mu * (x0 - a))
    else:
        slope_l = 0.0
    return np.array([
        [-1.0, 1.0],
        [slope_r - flux_coeff_right, -problem.alpha * slope_l - flux_coeff_left],
    ])


def first_order_correction_1d(problem: TransmissionProblem,
                              sharp: SharpSolution, n: int | None = None) -> CorrectionSolution:
    """Solve the homogeneous first-order correction problem.

    The interface conditions depend on whether the two diffusivities differ:
    for alpha != 1 the correction takes a value jump proportional to
    log(alpha) times the zeroth-order derivative jump; for alpha = 1 it is
    continuous with a modified Robin-type flux jump.
    """
    _require_1d_point(problem)
    if n is None:
        n = len(sharp.x_right) - 1
    alpha, kappa = problem.alpha, problem.kappa
    slope_jump = sharp.slope_right - sharp.slope_left
    if abs(alpha - 1.0) <= _ALPHA_MATCH_TOL:
        case = "matched-diffusivity"
        value_jump = 0.0
        coeff_r, coeff_l = kappa, 0.0
        flux_rhs = 0.5 * kappa * slope_jump
    else:
        case = "distinct-diffusivity"
        value_jump = 0.5 * math.log(alpha) * slope_jump
        coeff_r = kappa / (alpha - 1.0)
        coeff_l = -kappa * alpha / (alpha - 1.0)
        flux_rhs = 0.0

    coupling = _interface_system(problem, coeff_r, coeff_l)
    conditioning = float(np.linalg.cond(coupling))
    if conditioning > 1e12:
        warnings.warn("near-singular interface coupling in the correction solve "
                      f"(cond = {conditioning:.3e})", RuntimeWarning, stacklevel=2)

    xl, ul, xr, ur, sl, sr = _two_domain_solve(
        problem, n, 0.0, 0.0,
        value_jump=value_jump, flux_coeff_right=coeff_r, flux_coeff_left=coeff_l,
        flux_rhs=flux_rhs)
    return CorrectionSolution(xl, ul, xr, ur, float(ul[-1]), float(ur[0]),
                              sl, sr, case, conditioning)


class LayerIntegrals(NamedTuple):
    """Closed forms of the transition-layer integrals from 0 to z."""

    inv_diffusivity: float | np.ndarray        # integral of 1/D
    phase_over_diffusivity: float | np.ndarray  # integral of phi/D
    phase: float | np.ndarray                   # integral of phi


def _log_alpha_plus_e2z(z, alpha):
    """Overflow-safe log(alpha + exp(2z))."""
    z = np.asarray(z, dtype=float)
    pos = 2.0 * z + np.log1p(alpha * np.exp(-2.0 * np.clip(z, 0.0, None)))
    neg = math.log(alpha) + np.log1p(np.exp(2.0 * np.clip(z, None, 0.0)) / alpha)
    return np.where(z > 0, pos, neg)


def layer_integrals(z, alpha: float) -> LayerIntegrals:
    """Evaluate the three layer integrals at stretched coordinate z."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    z = np.asarray(z, dtype=float)
    log_ae = _log_alpha_plus_e2z(z, alpha)
    log_a1 = math.log(alpha + 1.0)
    i0 = ((alpha - 1.0) * log_ae + 2.0 * z) / (2.0 * alpha) - (alpha - 1.0) * log_a1 / (2.0 * alpha)
    i1 = 0.5 * (log_ae - log_a1)
    log_1e = np.where(z > 0,
                      2.0 * np.clip(z, 0.0, None) + np.log1p(np.exp(-2.0 * np.abs(z))),
                      np.log1p(np.exp(2.0 * np.clip(z, None, 0.0))))
    i2 = 0.5 * (log_1e - math.log(2.0))
    if z.ndim == 0:
        return LayerIntegrals(float(i0), float(i1), float(i2))
    return LayerIntegrals(i0, i1, i2)


def _first_order_offset(alpha, kappa, lam, interface_value,
                        corr_value_right, corr_value_left):
    if abs(alpha - 1.0) <= _ALPHA_MATCH_TOL:
        return corr_value_right + 0.5 * (kappa * interface_value + lam) * math.log(2.0)
    return corr_value_right + (corr_value_left - corr_value_right) \
        * math.log(alpha + 1.0) / math.log(alpha)


def _general_second_order_flux(problem, lam, c00, c11, c10, corr_slope_right):
    """Invert the inner second-order flux relation (distinct diffusivities)."""
    alpha, kappa = problem.alpha, problem.kappa
    if abs(alpha - 1.0) <= _ALPHA_MATCH_TOL:
        raise CaseMismatchError("formula requires alpha != 1")
    x0 = problem.geometry.x0
    q0 = float(eval_field(problem.q, x0))
    h0 = float(eval_field(problem.h, x0))
    robin = kappa**2 * c00 + kappa * lam
    bulk = c00 * (problem.gamma - problem.beta) + h0 - q0 + robin / (alpha - 1.0)
    return (corr_slope_right
            - (robin / (alpha - 1.0) + kappa * c11 / alpha) * math.log(alpha + 1.0) / 2.0
            - kappa * c10 / 2.0
            + bulk * math.log(2.0) / 2.0)


def _matched_second_order_flux(problem, lam, c00, c11, c10, corr_slope_right):
    kappa = problem.kappa
    x0 = problem.geometry.x0
    q0 = float(eval_field(problem.q, x0))
    h0 = float(eval_field(problem.h, x0))
    robin = kappa**2 * c00 + kappa * lam
    bulk = c00 * (problem.gamma - problem.beta) + h0 - q0 - kappa * c11
    return (corr_slope_right + bulk * math.log(2.0) / 2.0 - kappa * c10
            - robin / 4.0 + kappa * c00 / 2.0)


def matching_constants(problem: TransmissionProblem, sharp: SharpSolution,
                       correction: CorrectionSolution | None = None) -> MatchingConstants:
    """Matching constants of the inner expansion.

    The zeroth-order constants come from the sharp traces; the first-order
    offset and the diagnostic second-order flux need the correction solve
    (two-stage fill: pass correction=None first if it is not available yet).
    """
    _require_1d_point(problem)
    c00 = sharp.interface_value
    c11 = problem.alpha * sharp.slope_left
    if correction is None:
        return MatchingConstants(c00, c11, None, None)
    lam = float(eval_field(problem.g, problem.geometry.x0))
    c10 = _first_order_offset(problem.alpha, problem.kappa, lam, c00,
                              correction.value_right, correction.value_left)
    if abs(problem.alpha - 1.0) <= _ALPHA_MATCH_TOL:
        c21 = _matched_second_order_flux(problem, lam, c00, c11, c10,
                                         correction.slope_right)
    else:
        c21 = _general_second_order_flux(problem, lam, c00, c11, c10,
                                         correction.slope_right)
    return MatchingConstants(c00, c11, c10, c21)


def expansion_eval(sharp: SharpSolution, correction: CorrectionSolution | None,
                   eps: float, x) -> np.ndarray:
    """Outer expansion u0(x) + eps*u1(x), cubic-interpolated from the references.

    Valid in the outer region only; the caller chooses how far from the
    interface to evaluate.
    """
    x0 = float(sharp.x_right[0])
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    left = CubicSpline(sharp.x_left, sharp.u_left)
    right = CubicSpline(sharp.x_right, sharp.u_right)
    out = np.where(x < x0, left(x), right(x))
    if correction is not None and eps != 0.0:
        cl = CubicSpline(correction.x_left, correction.u_left)
        cr = CubicSpline(correction.x_right, correction.u_right)
        out = out + eps * np.where(x < x0, cl(x), cr(x))
    return float(out[0]) if scalar else out
