"""Geometric multigrid V-cycle solver for the diffuse system.

Red-black Gauss-Seidel smoothing, cell-average restriction, piecewise
constant prolongation, and re-discretized coarse operators: the signed
distance is restricted level by level and the diffuse coefficients are
re-evaluated analytically on each coarse grid.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .discretization import DiffuseOperator, build_operator, build_rhs, residual_norms
from .geometry import DistanceField, signed_distance
from .grid import Grid
from .model import TransmissionProblem


class ConfigurationError(ValueError):
    """Invalid solver or study configuration."""


class DivergenceError(RuntimeError):
    """The iteration produced non-finite values."""


@dataclass
class Level:
    grid: Grid
    op: DiffuseOperator
    red: np.ndarray = field(init=False)
    black: np.ndarray = field(init=False)

    def __post_init__(self):
        idx = np.indices(self.grid.shape).sum(axis=0)
        self.red = idx % 2 == 0
        self.black = ~self.red


@dataclass
class Hierarchy:
    levels: list[Level]
    pre_sweeps: int = 3
    post_sweeps: int = 3
    coarse_sweeps: int = 50

    @property
    def finest(self) -> Level:
        return self.levels[0]


@dataclass
class SolveReport:
    cycles: int
    converged: bool
    final_relative_residual: float
    residual_history: tuple[float, ...]  # absolute l2, initial value first
    contraction: float                   # geometric mean of per-cycle ratios
    wall_time: float


def max_levels(grid: Grid) -> int:
    n = 1
    g = grid
    while all(m % 2 == 0 and m // 2 >= 4 for m in g.shape):
        g = g.coarsen()
        n += 1
    return n


def build_hierarchy(problem: TransmissionProblem, grid: Grid, eps: float,
                    distance: DistanceField | np.ndarray | None = None,
                    levels: int | None = None,
                    pre_sweeps: int = 3, post_sweeps: int = 3,
                    coarse_sweeps: int = 50) -> Hierarchy:
    """Build grids and re-discretized operators from finest to coarsest."""
    if levels is None:
        levels = max_levels(grid)
    if levels < 1:
        raise ConfigurationError("need at least one level")
    for n in grid.shape:
        if n % 2 ** (levels - 1) != 0:
            raise ConfigurationError(
                f"{n} cells not divisible by 2^{levels - 1}; reduce levels")
        if n // 2 ** (levels - 1) < 4:
            raise ConfigurationError("coarsest grid would drop below 4 cells per axis")

    if distance is None:
        distance = signed_distance(problem.geometry, grid)
    r = distance.values if isinstance(distance, DistanceField) else np.asarray(distance, float)

    out = []
    g = grid
    for _ in range(levels):
        out.append(Level(g, build_operator(problem, g, eps, distance=r)))
        if len(out) < levels:
            g = g.coarsen()
            r = restrict(r)
    return Hierarchy(out, pre_sweeps, post_sweeps, coarse_sweeps)


def smooth(level: Level, u: np.ndarray, rhs: np.ndarray, sweeps: int) -> np.ndarray:
    """Red-black Gauss-Seidel in place; red (even index sum) first."""
    op = level.op
    for _ in range(sweeps):
        for mask in (level.red, level.black):
            update = (rhs + op.neighbor_sum(u)) / op.diagonal
            np.copyto(u, update, where=mask)
    return u


def restrict(fine: np.ndarray) -> np.ndarray:
    """Cell average onto the next coarser grid."""
    if fine.ndim == 1:
        return 0.5 * (fine[0::2] + fine[1::2])
    return 0.25 * (fine[0::2, 0::2] + fine[1::2, 0::2]
                   + fine[0::2, 1::2] + fine[1::2, 1::2])


def prolong(coarse: np.ndarray) -> np.ndarray:
    """Piecewise-constant injection onto the next finer grid."""
    if coarse.ndim == 1:
        return np.repeat(coarse, 2)
    return np.repeat(np.repeat(coarse, 2, axis=0), 2, axis=1)


def v_cycle(hier: Hierarchy, level: int, u: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """One V-cycle starting at the given level; updates u in place."""
    lv = hier.levels[level]
    smooth(lv, u, rhs, hier.pre_sweeps)
    if level == len(hier.levels) - 1:
        smooth(lv, u, rhs, hier.coarse_sweeps)
    else:
        res = rhs - lv.op.apply(u)
        coarse_rhs = restrict(res)
        correction = np.zeros_like(coarse_rhs)
        v_cycle(hier, level + 1, correction, coarse_rhs)
        u += prolong(correction)
    smooth(lv, u, rhs, hier.post_sweeps)
    return u


def solve(problem: TransmissionProblem, grid: Grid, eps: float,
          tol: float = 1e-10, max_cycles: int = 200,
          distance: DistanceField | np.ndarray | None = None,
          levels: int | None = None, rhs: np.ndarray | None = None,
          hierarchy: Hierarchy | None = None) -> tuple[np.ndarray, SolveReport]:
    """V-cycle from a zero initial guess to relative l2 residual <= tol.

    Non-convergence within max_cycles is flagged in the report, not fatal;
    non-finite iterates raise DivergenceError naming the cycle.
    """
    if tol <= 0:
        raise ConfigurationError("tolerance must be positive")
    t0 = time.perf_counter()
    if distance is None and (hierarchy is None or rhs is None):
        distance = signed_distance(problem.geometry, grid)
    if hierarchy is None:
        hierarchy = build_hierarchy(problem, grid, eps, distance=distance, levels=levels)
    if rhs is None:
        rhs = build_rhs(problem, grid, eps, distance=distance)
    op = hierarchy.finest.op
    u = np.zeros(grid.shape)
    r0, _ = residual_norms(op, u, rhs)
    history = [r0]
    if r0 == 0.0:
        return u, SolveReport(0, True, 0.0, tuple(history), 0.0,
                              time.perf_counter() - t0)
    converged = False
    cycles = 0
    for cycle in range(1, max_cycles + 1):
        v_cycle(hierarchy, 0, u, rhs)
        if not np.all(np.isfinite(u)):
            raise DivergenceError(f"non-finite iterate at cycle {cycle}")
        rk, _ = residual_norms(op, u, rhs)
        history.append(rk)
        cycles = cycle
        if rk <= tol * r0:
            converged = True
            break
    contraction = (history[-1] / r0) ** (1.0 / cycles) if cycles else 0.0
    return u, SolveReport(cycles, converged, history[-1] / r0, tuple(history),
                          contraction, time.perf_counter() - t0)
