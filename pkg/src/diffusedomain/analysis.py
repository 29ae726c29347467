"""Error norms, log-log rate fitting, and the convergence experiment drivers."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .discretization import build_rhs
from .geometry import DistanceField, signed_distance
from .grid import Grid, box_grid, line_grid
from .model import BenchmarkCase, exact_solution
from .multigrid import ConfigurationError, build_hierarchy, solve
from .reference import CorrectionSolution, SharpSolution, first_order_correction_1d, sharp_solve_1d

SUBDOMAINS = ("omega", "interior", "exterior")

# rows with eps below this many cell widths sit in the under-resolved regime
# where grid error floors bend the fit ("spikes" at very small eps)
RESOLUTION_GUARD = 20.0


@dataclass(frozen=True)
class StudyRow:
    eps: float
    h: float
    n_cells: int
    l2_error: float
    linf_error: float
    mg_cycles: int
    final_residual: float
    wall_seconds: float
    converged: bool
    resolved: bool


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[StudyRow, ...]      # sorted by decreasing eps
    subdomain: str
    slope_l2: float                 # full-range fits (nan with < 3 usable rows)
    slope_linf: float
    resolved_slope_l2: float        # fits restricted to resolved rows
    resolved_slope_linf: float


class RateFit(NamedTuple):
    slope: float
    resolved_slope: float
    n_points: int
    n_resolved: int


def _lsq_slope(eps, err):
    return float(np.polyfit(np.log(eps), np.log(err), 1)[0]) if len(eps) >= 3 else math.nan


def fit_rate(points: Sequence[tuple[float, float]], *,
             solver_tol: float = 0.0, h: float = 0.0) -> RateFit:
    """Least-squares slope of log(error) against log(eps).

    The resolved-range slope drops points with error at the solver floor
    (below 100x the solver tolerance) or with eps under the resolution
    guard (eps < 20 h).
    """
    pts = [(float(e), float(v)) for e, v in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points to fit a rate")
    if any(v <= 0.0 for _, v in pts):
        raise ValueError("errors must be positive for a log-log fit")
    eps = np.array([e for e, _ in pts])
    err = np.array([v for _, v in pts])
    keep = (err > 100.0 * solver_tol) & (eps >= RESOLUTION_GUARD * h)
    return RateFit(
        slope=_lsq_slope(eps, err),
        resolved_slope=_lsq_slope(eps[keep], err[keep]),
        n_points=len(pts),
        n_resolved=int(keep.sum()),
    )


def _subdomain_mask(grid, distance, subdomain):
    if subdomain not in SUBDOMAINS:
        raise ValueError(f"unknown subdomain {subdomain!r}; choose from {SUBDOMAINS}")
    if subdomain == "omega":
        return np.ones(grid.shape, dtype=bool)
    if distance is None:
        raise ValueError("subdomain errors need a signed distance field")
    r = distance.values if isinstance(distance, DistanceField) else np.asarray(distance)
    return r >= 0.0 if subdomain == "interior" else r < 0.0


def discrete_error(u: np.ndarray, ref, grid: Grid,
                   distance=None, subdomain: str = "omega") -> tuple[float, float]:
    """Cell-measure-weighted l2 error and max error against a reference.

    ref may be an array on the grid or a callable evaluated at cell centers;
    subdomain membership follows the sign of the distance at the center
    (the r = 0 cells count as interior).
    """
    mask = _subdomain_mask(grid, distance, subdomain)
    if not mask.any():
        raise ValueError(f"subdomain {subdomain!r} contains no cells")
    ref_vals = ref(*grid.centers()) if callable(ref) else np.asarray(ref)
    diff = (u - ref_vals)[mask]
    l2 = float(np.sqrt(np.sum(diff * diff) * grid.cell_volume))
    linf = float(np.max(np.abs(diff)))
    return l2, linf


def _case_grid(case: BenchmarkCase, n) -> Grid:
    box = case.problem.box
    if len(box) == 1:
        return line_grid(box[0][0], box[0][1], int(n))
    return box_grid(box, n)


def _finish_table(rows, subdomain, solver_tol):
    rows = tuple(sorted(rows, key=lambda r: -r.eps))
    good = [r for r in rows if r.converged and r.l2_error > 0.0]
    res = [r for r in good if r.resolved]

    def fit(rs, attr):
        return _lsq_slope(np.array([r.eps for r in rs]),
                          np.array([getattr(r, attr) for r in rs]))

    return ConvergenceTable(
        rows, subdomain,
        slope_l2=fit(good, "l2_error"), slope_linf=fit(good, "linf_error"),
        resolved_slope_l2=fit(res, "l2_error"), resolved_slope_linf=fit(res, "linf_error"),
    )


def _study_row(problem, grid, eps, distance, reference, subdomain,
               tol, max_cycles):
    hier = build_hierarchy(problem, grid, eps, distance=distance)
    rhs = build_rhs(problem, grid, eps, distance=distance)
    u, report = solve(problem, grid, eps, tol=tol, max_cycles=max_cycles,
                      distance=distance, rhs=rhs, hierarchy=hier)
    l2, linf = discrete_error(u, reference, grid, distance=distance, subdomain=subdomain)
    h = max(grid.spacing)
    return u, StudyRow(
        eps=eps, h=h, n_cells=grid.n_cells, l2_error=l2, linf_error=linf,
        mg_cycles=report.cycles, final_residual=report.final_relative_residual,
        wall_seconds=report.wall_time, converged=report.converged,
        resolved=(eps >= RESOLUTION_GUARD * h and l2 > 100.0 * tol),
    )


def _map_rows(worker, args, threads):
    if threads <= 1:
        return [worker(a) for a in args]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, args))  # order preserved -> deterministic


def epsilon_study(case: BenchmarkCase, n, eps_list, *, subdomain: str = "omega",
                  tol: float = 1e-10, max_cycles: int = 200, reference=None,
                  distance: DistanceField | None = None, threads: int = 1) -> ConvergenceTable:
    """Fixed grid, shrinking interface width; errors against a reference.

    The reference defaults to the case's exact solution; pass an array (or
    callable) to measure self-convergence instead.
    """
    grid = _case_grid(case, n)
    if distance is None:
        distance = signed_distance(case.problem.geometry, grid)
    if reference is None:
        reference = lambda *pts: exact_solution(case, *pts)  # noqa: E731

    def worker(eps):
        try:
            _, row = _study_row(case.problem, grid, eps, distance, reference,
                                subdomain, tol, max_cycles)
            return row
        except ConfigurationError:
            raise
        except Exception:
            h = max(grid.spacing)
            return StudyRow(eps, h, grid.n_cells, math.nan, math.nan, 0,
                            math.inf, 0.0, False, False)

    rows = _map_rows(worker, [float(e) for e in eps_list], threads)
    return _finish_table(rows, subdomain, tol)


def self_convergence_study(case: BenchmarkCase, n, eps_list, eps_ref: float, *,
                           subdomain: str = "omega", tol: float = 1e-10,
                           max_cycles: int = 200, threads: int = 1) -> ConvergenceTable:
    """Convergence against a fine-eps reference solve on the same grid."""
    if any(e <= eps_ref for e in eps_list):
        raise ConfigurationError("test widths must stay above the reference width")
    grid = _case_grid(case, n)
    distance = signed_distance(case.problem.geometry, grid)
    u_ref, report = solve(case.problem, grid, eps_ref, tol=tol,
                          max_cycles=max_cycles, distance=distance)
    if not report.converged:
        raise ConfigurationError("reference solve did not converge; widen eps_ref")
    return epsilon_study(case, n, eps_list, subdomain=subdomain, tol=tol,
                         max_cycles=max_cycles, reference=u_ref,
                         distance=distance, threads=threads)


def coupled_refinement_study(case: BenchmarkCase, ratio: float, levels: int, *,
                             n0: int = 512, subdomain: str = "omega",
                             tol: float = 1e-10, max_cycles: int = 200,
                             threads: int = 1) -> ConvergenceTable:
    """Refine grid and interface width together along eps = h / ratio."""
    if not 0.0 < ratio < 1.0:
        raise ConfigurationError("refinement ratio must lie in (0, 1)")
    if case.exact is None:
        raise ConfigurationError("coupled refinement needs an exact solution")
    box = case.problem.box

    def worker(level):
        n = n0 * 2**level
        grid = _case_grid(case, n)
        h = max(grid.spacing)
        eps = h / ratio
        distance = signed_distance(case.problem.geometry, grid)
        ref = lambda *pts: exact_solution(case, *pts)  # noqa: E731
        _, row = _study_row(case.problem, grid, eps, distance, ref,
                            subdomain, tol, max_cycles)
        return row

    rows = _map_rows(worker, range(levels), threads)
    return _finish_table(rows, subdomain, tol)


def one_sided_study(case: BenchmarkCase, eps_list, alpha_rule, *,
                    n: int = 2**15, tol: float = 1e-10, max_cycles: int = 200,
                    threads: int = 1) -> ConvergenceTable:
    """One-sided limit sweep: alpha fixed or tied to eps, errors on the interior.

    alpha_rule is either a constant or a callable eps -> alpha.
    """
    if case.problem.beta != 0.0:
        raise ConfigurationError("one-sided study requires beta = 0")
    grid = _case_grid(case, n)
    distance = signed_distance(case.problem.geometry, grid)
    ref = lambda *pts: exact_solution(case, *pts)  # noqa: E731

    def worker(eps):
        alpha = alpha_rule(eps) if callable(alpha_rule) else float(alpha_rule)
        problem = case.problem.with_alpha(alpha)
        _, row = _study_row(problem, grid, eps, distance, ref,
                            "interior", tol, max_cycles)
        return row

    rows = _map_rows(worker, [float(e) for e in eps_list], threads)
    return _finish_table(rows, "interior", tol)


@dataclass(frozen=True)
class ProbeRemainderTable:
    """Outer-region remainders of the expansion at probe points, per eps."""

    probes: tuple[float, ...]
    eps: tuple[float, ...]                 # decreasing
    corrected: np.ndarray                  # |u_eps - u0 - eps*u1|, shape (n_eps, n_probes)
    zeroth: np.ndarray                     # |u_eps - u0|
    slope_corrected: float                 # fit of max-over-probes remainders
    slope_zeroth: float


def asymptotic_order_check(case: BenchmarkCase, eps_list, probes, *,
                           n: int = 2**18, n_ref: int = 2**15,
                           tol: float = 1e-10, max_cycles: int = 200,
                           sharp: SharpSolution | None = None,
                           correction: CorrectionSolution | None = None,
                           threads: int = 1) -> ProbeRemainderTable:
    """Measure |u_eps - u0 - eps*u1| and |u_eps - u0| at outer probes.

    Removing the first-order term must leave a remainder at least one
    order smaller, which is the sharp numerical check that the expansion's
    first-order term is the exact leading error.
    """
    problem = case.problem
    if problem.dimension != 1:
        raise ConfigurationError("asymptotic check is one-dimensional")
    eps_sorted = sorted((float(e) for e in eps_list), reverse=True)
    x0 = problem.geometry.x0
    probes = tuple(float(p) for p in probes)
    (a, b) = problem.box[0]
    for p in probes:
        if abs(p - x0) < 10.0 * max(eps_sorted):
            raise ConfigurationError(f"probe {p} sits inside the transition layer")
        if not a < p < b:
            raise ConfigurationError(f"probe {p} lies outside the domain")

    if sharp is None:
        sharp = sharp_solve_1d(problem, n_ref)
    if correction is None:
        correction = first_order_correction_1d(problem, sharp)
    px = np.array(probes)
    if case.exact is not None:
        u0_p = np.array([exact_solution(case, p) for p in px])
    else:
        left = CubicSpline(sharp.x_left, sharp.u_left)
        right = CubicSpline(sharp.x_right, sharp.u_right)
        u0_p = np.where(px < x0, left(px), right(px))
    corr_left = CubicSpline(correction.x_left, correction.u_left)
    corr_right = CubicSpline(correction.x_right, correction.u_right)
    u1_p = np.where(px < x0, corr_left(px), corr_right(px))

    grid = _case_grid(case, n)
    distance = signed_distance(problem.geometry, grid)

    def worker(eps):
        u, report = solve(problem, grid, eps, tol=tol, max_cycles=max_cycles,
                          distance=distance)
        if not report.converged:
            raise ConfigurationError(f"solver stalled at eps={eps}")
        spline = CubicSpline(grid.axis_centers(0), u)
        return spline(px)

    u_eps = _map_rows(worker, eps_sorted, threads)
    corrected = np.array([np.abs(ue - u0_p - e * u1_p) for ue, e in zip(u_eps, eps_sorted)])
    zeroth = np.array([np.abs(ue - u0_p) for ue in u_eps])
    return ProbeRemainderTable(
        probes, tuple(eps_sorted), corrected, zeroth,
        slope_corrected=_lsq_slope(np.array(eps_sorted), corrected.max(axis=1)),
        slope_zeroth=_lsq_slope(np.array(eps_sorted), zeroth.max(axis=1)),
    )
