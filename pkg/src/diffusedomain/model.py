"""Problem descriptions, builtin benchmark cases, and exact solutions.

A two-sided transmission problem couples a reaction-diffusion equation on
the interior region Omega_1 (reaction gamma, unit diffusivity, source q)
to one on the exterior Omega_2 (diffusivity alpha, reaction beta, source h)
through continuity of the solution and a prescribed flux jump kappa*u + g
across the interface, with zero flux on the outer box boundary.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

from .geometry import (ConvexPolygon, Ellipse, InterfaceGeometry, PointInterface1D,
                       Starfish, level_set)

ScalarField = Union[float, Callable]


def eval_field(f: ScalarField, x, y=None):
    """Evaluate a constant or callable coefficient field at coordinates."""
    if callable(f):
        out = f(x) if y is None else f(x, y)
        return np.asarray(out, dtype=float)
    return np.broadcast_to(np.float64(f), np.shape(x)).copy() if np.ndim(x) else float(f)


@dataclass(frozen=True)
class TransmissionProblem:
    alpha: float                 # exterior diffusivity, > 0
    beta: float                  # exterior reaction, >= 0
    gamma: float                 # interior reaction, > 0
    kappa: float                 # Robin coefficient, >= 0
    g: ScalarField               # interface source (field over the whole box)
    q: ScalarField               # interior source
    h: ScalarField               # exterior source
    geometry: InterfaceGeometry
    box: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("exterior diffusivity alpha must be positive")
        if self.gamma <= 0:
            raise ValueError("interior reaction gamma must be positive")
        if self.beta < 0 or self.kappa < 0:
            raise ValueError("beta and kappa must be nonnegative")
        box = tuple((float(a), float(b)) for a, b in self.box)
        object.__setattr__(self, "box", box)
        if len(box) not in (1, 2):
            raise ValueError("domain box must be 1D or 2D")
        _check_geometry_inside(self.geometry, box)

    @property
    def dimension(self) -> int:
        return len(self.box)

    def with_alpha(self, alpha: float) -> "TransmissionProblem":
        return replace(self, alpha=float(alpha))


def _check_geometry_inside(geom, box):
    """The interface must not touch the outer boundary."""
    if isinstance(geom, PointInterface1D):
        (a, b) = box[0]
        if not a < geom.x0 < b:
            raise ValueError("interface point lies outside the domain box")
    elif isinstance(geom, Ellipse):
        (a1, b1), (a2, b2) = box
        if not (a1 < -geom.a and geom.a < b1 and a2 < -geom.b and geom.b < b2):
            raise ValueError("ellipse touches the domain boundary")
    elif isinstance(geom, Starfish):
        (a1, b1), (a2, b2) = box
        rmax = geom.scale * (geom.base + abs(geom.amp))
        if rmax >= min(b1, b2, -a1, -a2):
            raise ValueError("starfish touches the domain boundary")
    elif isinstance(geom, ConvexPolygon):
        (a1, b1), (a2, b2) = box
        v = np.asarray(geom.vertices)
        if not (np.all(v[:, 0] > a1) and np.all(v[:, 0] < b1)
                and np.all(v[:, 1] > a2) and np.all(v[:, 1] < b2)):
            raise ValueError("polygon touches the domain boundary")
    # implicit geometries cannot be checked without sampling; trusted


@dataclass(frozen=True)
class InterfaceData:
    """Exact interface traces of a 1D reference solution."""

    value: float           # u(x0), shared by both sides
    slope_interior: float  # one-sided derivative from the interior (right) side
    slope_exterior: float  # one-sided derivative from the exterior (left) side


@dataclass(frozen=True)
class ExactSolution:
    interior: Callable
    exterior: Callable


@dataclass(frozen=True)
class BenchmarkCase:
    name: str
    problem: TransmissionProblem
    exact: ExactSolution | None = None
    interface: InterfaceData | None = None


def exact_solution(case: BenchmarkCase, x, y=None):
    """Evaluate the case's piecewise closed-form solution at coordinates.

    Subdomain membership follows the sign of the level set (interior where
    it is >= 0); both pieces agree on the interface by construction.
    """
    if case.exact is None:
        raise ValueError(f"case {case.name!r} has no exact solution")
    geom = case.problem.geometry
    if isinstance(geom, PointInterface1D):
        inside = np.asarray(x) >= geom.x0
    else:
        inside = np.asarray(level_set(geom, x, y)) >= 0.0
    ui = eval_field(case.exact.interior, x, y)
    ue = eval_field(case.exact.exterior, x, y)
    out = np.where(inside, ui, ue)
    return out if out.ndim else float(out)


# --- builtin benchmark data -------------------------------------------------

_FOUR_PI = 4.0 * math.pi


def _oscillatory_interior(x):
    return (4.0 * x**2 - 8.0 * x + 6.0) * np.cos(_FOUR_PI * x)


def _oscillatory_source(x):
    # q = -u'' + u for the oscillatory interior solution above
    p = 4.0 * x**2 - 8.0 * x + 6.0
    return ((16.0 * math.pi**2 + 1.0) * p * np.cos(_FOUR_PI * x)
            + 64.0 * math.pi * (x - 1.0) * np.sin(_FOUR_PI * x)
            - 8.0 * np.cos(_FOUR_PI * x))


def _paper_1d() -> BenchmarkCase:
    problem = TransmissionProblem(
        alpha=0.5, beta=1.0, gamma=1.0, kappa=1.6,
        g=-25.6,
        q=_oscillatory_source,
        h=lambda x: 8.0 * (x + 1.0) ** 2 - 10.0,
        geometry=PointInterface1D(0.0),
        box=((-1.0, 1.0),),
    )
    exact = ExactSolution(
        interior=_oscillatory_interior,
        exterior=lambda x: 8.0 * (x + 1.0) ** 2 - 2.0,
    )
    return BenchmarkCase("paper-1d", problem, exact,
                         InterfaceData(value=6.0, slope_interior=-8.0, slope_exterior=16.0))


def _one_sided_1d() -> BenchmarkCase:
    problem = TransmissionProblem(
        alpha=0.01, beta=0.0, gamma=1.0, kappa=1.6,
        g=-17.6,
        q=_oscillatory_source,
        h=0.0,
        geometry=PointInterface1D(0.0),
        box=((-1.0, 1.0),),
    )
    exact = ExactSolution(interior=_oscillatory_interior, exterior=6.0)
    return BenchmarkCase("one-sided-1d", problem, exact,
                         InterfaceData(value=6.0, slope_interior=-8.0, slope_exterior=0.0))


def _ellipse_2d() -> BenchmarkCase:
    problem = TransmissionProblem(
        alpha=0.5, beta=1.0, gamma=1.0, kappa=1.0,
        g=lambda x, y: x**2 + 4.0 * y**2 - 6.0 + 2.0 * np.sqrt(x**2 + 16.0 * y**2),
        q=lambda x, y: -(x**2) - 4.0 * y**2 + 16.0,
        h=2.0,
        geometry=Ellipse(2.0, 1.0),
        box=((-3.0, 3.0), (-3.0, 3.0)),
    )
    exact = ExactSolution(
        interior=lambda x, y: -(x**2) - 4.0 * y**2 + 6.0,
        exterior=2.0,
    )
    return BenchmarkCase("ellipse-2d", problem, exact)


def _starfish_2d() -> BenchmarkCase:
    problem = TransmissionProblem(
        alpha=3.0, beta=2.0, gamma=1.0, kappa=0.01,
        g=4.0,
        q=lambda x, y: -(x**2) + 15.0,
        h=lambda x, y: 2.5 * np.sin(x) + np.exp(np.cos(y)),
        geometry=Starfish(scale=0.9, base=1.2, amp=0.7, lobes=5),
        box=((-2.0, 2.0), (-2.0, 2.0)),
    )
    return BenchmarkCase("starfish-2d", problem)


def _pentagon_2d() -> BenchmarkCase:
    problem = TransmissionProblem(
        alpha=1.0, beta=1.0, gamma=2.0, kappa=0.5,
        g=4.5,
        q=lambda x, y: x**2 + 5.0,
        h=lambda x, y: -np.sin(x) - np.exp(np.cos(y)),
        geometry=ConvexPolygon(((0.8, 0.0), (0.3, 0.9), (-0.5, 0.7),
                                (-0.9, -0.2), (0.2, -0.8))),
        box=((-2.0, 2.0), (-2.0, 2.0)),
    )
    return BenchmarkCase("pentagon-2d", problem)


_BUILTIN = {
    "paper-1d": _paper_1d,
    "ellipse-2d": _ellipse_2d,
    "starfish-2d": _starfish_2d,
    "pentagon-2d": _pentagon_2d,
    "one-sided-1d": _one_sided_1d,
}


def case_names() -> tuple[str, ...]:
    return tuple(_BUILTIN)


def builtin_case(name: str) -> BenchmarkCase:
    """Return a fully populated builtin benchmark case by name."""
    try:
        make = _BUILTIN[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; known: {', '.join(_BUILTIN)}") from None
    return make()
