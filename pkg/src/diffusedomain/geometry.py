"""Interface geometries and signed distance fields.

The interface is the boundary of an interior region Omega_1 embedded in the
computational box.  Signed distance is positive inside Omega_1.  Analytic
formulas are used where exact (1D point, convex polygon); curved interfaces
go through a level-set sampling, a frozen-band initialization, and a
first-order fast-marching Eikonal solve.
"""

import heapq
from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from .grid import Grid


class GeometryError(ValueError):
    """Invalid or degenerate interface geometry."""


class NoInterfaceError(GeometryError):
    """The level set does not change sign anywhere on the grid."""


@dataclass(frozen=True)
class PointInterface1D:
    """1D interface at x = x0; r(x) = x - x0, positive on the right."""

    x0: float = 0.0


@dataclass(frozen=True)
class Ellipse:
    """Interior region x^2/a^2 + y^2/b^2 < 1."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise GeometryError("ellipse semi-axes must be positive")


@dataclass(frozen=True)
class Starfish:
    """Interior region r < scale*(base + amp*sin(lobes*theta)) in polar form."""

    scale: float
    base: float
    amp: float
    lobes: int

    def __post_init__(self):
        if self.scale <= 0 or self.base <= 0:
            raise GeometryError("starfish radial parameters must be positive")
        if self.base - abs(self.amp) <= 0:
            raise GeometryError("starfish radius must stay positive")

    def radius(self, theta):
        return self.scale * (self.base + self.amp * np.sin(self.lobes * theta))


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with vertices in counterclockwise order."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        v = np.asarray(verts)
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(np.isclose(cross, 0.0, atol=1e-14)):
            raise GeometryError("degenerate polygon: collinear consecutive edges")
        if not (np.all(cross > 0) or np.all(cross < 0)):
            raise GeometryError("polygon is not convex")
        if np.all(cross < 0):
            raise GeometryError("polygon vertices must be counterclockwise")


@dataclass(frozen=True)
class ImplicitCurve:
    """User level set psi(x[, y]); psi > 0 inside Omega_1."""

    func: Callable


InterfaceGeometry = Union[PointInterface1D, Ellipse, Starfish, ConvexPolygon, ImplicitCurve]


@dataclass
class DistanceField:
    """Signed distance sampled at cell centers, positive inside Omega_1."""

    grid: Grid
    values: np.ndarray
    positive_inside: bool = True

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("distance values must have one entry per cell")


def polygon_signed_distance(x, y, poly: ConvexPolygon):
    """Exact signed Euclidean distance to the polygon boundary.

    Positive inside, negative outside; accepts scalars or broadcastable
    arrays of coordinates.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    verts = np.asarray(poly.vertices)
    dist2 = np.full(np.broadcast(x, y).shape, np.inf)
    inside = np.ones(np.broadcast(x, y).shape, dtype=bool)
    n = len(verts)
    for k in range(n):
        x1, y1 = verts[k]
        x2, y2 = verts[(k + 1) % n]
        ex, ey = x2 - x1, y2 - y1
        px, py = x - x1, y - y1
        t = np.clip((px * ex + py * ey) / (ex * ex + ey * ey), 0.0, 1.0)
        dx, dy = px - t * ex, py - t * ey
        dist2 = np.minimum(dist2, dx * dx + dy * dy)
        inside &= (ex * py - ey * px) >= 0.0
    d = np.sqrt(dist2)
    return np.where(inside, d, -d) if d.ndim else (d if inside else -d)


def level_set(geom: InterfaceGeometry, x, y=None):
    """Signed level-set value, positive inside Omega_1 (not a distance in general)."""
    if isinstance(geom, PointInterface1D):
        return np.asarray(x, dtype=float) - geom.x0
    if isinstance(geom, Ellipse):
        a2, b2 = geom.a**2, geom.b**2
        return a2 * b2 - b2 * np.asarray(x) ** 2 - a2 * np.asarray(y) ** 2
    if isinstance(geom, Starfish):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        theta = np.arctan2(y, x)
        return geom.radius(theta) - r
    if isinstance(geom, ImplicitCurve):
        return geom.func(x) if y is None else geom.func(x, y)
    if isinstance(geom, ConvexPolygon):
        raise GeometryError("polygon distance is exact; use polygon_signed_distance")
    raise GeometryError(f"unknown geometry {type(geom).__name__}")


class Band(NamedTuple):
    """Frozen seed cells for fast marching."""

    frozen: np.ndarray     # bool mask of seeded cells
    distances: np.ndarray  # signed seed distances (valid where frozen)
    signs: np.ndarray      # +1 / -1 per cell from the level-set sign


def initialize_band(psi: np.ndarray, grid: Grid) -> Band:
    """Freeze every cell with a sign-change neighbor and seed its distance.

    The crossing along each axis is located by linear interpolation of psi,
    d_axis = h |psi_i| / (|psi_i| + |psi_j|), and axes combine through
    1/d^2 = sum over axes of 1/d_axis^2.
    """
    psi = np.asarray(psi, dtype=float)
    if psi.shape != grid.shape:
        raise ValueError("level-set values must have one entry per cell")
    signs = np.where(psi >= 0.0, 1.0, -1.0)
    inv_d2 = np.zeros(grid.shape)
    frozen = psi == 0.0

    for axis in range(grid.dim):
        h = grid.spacing[axis]
        lo = tuple(slice(None, -1) if k == axis else slice(None) for k in range(grid.dim))
        hi = tuple(slice(1, None) if k == axis else slice(None) for k in range(grid.dim))
        pl, ph = psi[lo], psi[hi]
        crossing = pl * ph < 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            frac_lo = np.abs(pl) / (np.abs(pl) + np.abs(ph))
        d_lo = h * frac_lo
        d_hi = h * (1.0 - frac_lo)
        contrib_lo = np.where(crossing, 1.0 / np.where(crossing, d_lo, 1.0) ** 2, 0.0)
        contrib_hi = np.where(crossing, 1.0 / np.where(crossing, d_hi, 1.0) ** 2, 0.0)
        # a cell may see crossings on both sides of one axis; keep the nearer one
        inv = np.zeros_like(psi)
        inv[lo] = np.maximum(inv[lo], contrib_lo)
        inv[hi] = np.maximum(inv[hi], contrib_hi)
        inv_d2 += inv
        touched = np.zeros(grid.shape, dtype=bool)
        touched[lo] |= crossing
        touched[hi] |= crossing
        frozen |= touched

    if not frozen.any():
        raise NoInterfaceError("level set does not change sign on the grid")

    with np.errstate(divide="ignore"):
        d = np.where(inv_d2 > 0.0, 1.0 / np.sqrt(np.where(inv_d2 > 0.0, inv_d2, 1.0)), 0.0)
    distances = signs * d
    distances[~frozen] = 0.0
    return Band(frozen, distances, signs)


def fast_march(band: Band, grid: Grid) -> DistanceField:
    """First-order Godunov upwind fast marching from the frozen band.

    Marches |r| over unfrozen cells in increasing-distance order via a
    priority queue; the level-set sign is reattached afterward.  Sign
    regions never interact: every sign-change face has both cells frozen.
    """
    if not band.frozen.any():
        raise NoInterfaceError("empty frozen band")
    n = grid.n_cells
    dist = np.full(n, np.inf)
    frozen_flat = band.frozen.ravel()
    dist[frozen_flat] = np.abs(band.distances.ravel()[frozen_flat])
    accepted = frozen_flat.tolist()
    dlist = dist.tolist()
    inf = np.inf

    if grid.dim == 1:
        (nx,) = grid.shape
        (hx,) = grid.spacing

        def update(idx):
            a = inf
            if idx > 0 and accepted[idx - 1]:
                a = dlist[idx - 1]
            if idx < nx - 1 and accepted[idx + 1] and dlist[idx + 1] < a:
                a = dlist[idx + 1]
            return a + hx

        def neighbors(idx):
            out = []
            if idx > 0:
                out.append(idx - 1)
            if idx < nx - 1:
                out.append(idx + 1)
            return out

    else:
        nx, ny = grid.shape
        hx, hy = grid.spacing
        ihx2, ihy2 = 1.0 / hx**2, 1.0 / hy**2

        def update(idx):
            i, j = divmod(idx, ny)
            a = inf
            if i > 0 and accepted[idx - ny]:
                a = dlist[idx - ny]
            if i < nx - 1 and accepted[idx + ny] and dlist[idx + ny] < a:
                a = dlist[idx + ny]
            b = inf
            if j > 0 and accepted[idx - 1]:
                b = dlist[idx - 1]
            if j < ny - 1 and accepted[idx + 1] and dlist[idx + 1] < b:
                b = dlist[idx + 1]
            if a == inf:
                return b + hy
            if b == inf:
                return a + hx
            p = ihx2 + ihy2
            q = a * ihx2 + b * ihy2
            disc = q * q - p * (a * a * ihx2 + b * b * ihy2 - 1.0)
            if disc >= 0.0:
                d = (q + disc**0.5) / p
                if d >= a and d >= b:
                    return d
            return min(a + hx, b + hy)  # causality fallback: one-axis update

        def neighbors(idx):
            i, j = divmod(idx, ny)
            out = []
            if i > 0:
                out.append(idx - ny)
            if i < nx - 1:
                out.append(idx + ny)
            if j > 0:
                out.append(idx - 1)
            if j < ny - 1:
                out.append(idx + 1)
            return out

    heap = []
    push = heapq.heappush
    for idx in np.flatnonzero(frozen_flat).tolist():
        for nb in neighbors(idx):
            if not accepted[nb]:
                d = update(nb)
                if d < dlist[nb]:
                    dlist[nb] = d
                    push(heap, (d, nb))

    pop = heapq.heappop
    while heap:
        d, idx = pop(heap)
        if accepted[idx] or d > dlist[idx]:
            continue
        accepted[idx] = True
        for nb in neighbors(idx):
            if not accepted[nb]:
                dn = update(nb)
                if dn < dlist[nb]:
                    dlist[nb] = dn
                    push(heap, (dn, nb))

    dist = np.asarray(dlist)
    values = band.signs.ravel() * dist
    values[frozen_flat] = band.distances.ravel()[frozen_flat]
    return DistanceField(grid, values.reshape(grid.shape))


def signed_distance(geom: InterfaceGeometry, grid: Grid) -> DistanceField:
    """Signed distance at cell centers: analytic where exact, marched otherwise."""
    if isinstance(geom, PointInterface1D):
        if grid.dim != 1:
            raise GeometryError("1D point interface requires a 1D grid")
        (x,) = grid.centers()
        return DistanceField(grid, x - geom.x0)
    if grid.dim != 2:
        raise GeometryError(f"{type(geom).__name__} requires a 2D grid")
    x, y = grid.centers()
    if isinstance(geom, ConvexPolygon):
        return DistanceField(grid, polygon_signed_distance(x, y, geom))
    psi = level_set(geom, x, y)
    band = initialize_band(psi, grid)
    return fast_march(band, grid)


def eikonal_residual(field: DistanceField) -> np.ndarray:
    """Godunov upwind |grad r| of a signed distance field (per cell).

    Uses max(backward difference, -forward difference, 0) per axis on |r|,
    the same upwinding the marcher satisfies; near-1 values away from the
    band indicate a consistent Eikonal solution.
    """
    r = np.abs(field.values)
    total = np.zeros_like(r)
    for axis in range(field.grid.dim):
        h = field.grid.spacing[axis]
        lo = tuple(slice(None, -1) if k == axis else slice(None) for k in range(field.grid.dim))
        hi = tuple(slice(1, None) if k == axis else slice(None) for k in range(field.grid.dim))
        back = np.zeros_like(r)
        fwd = np.zeros_like(r)
        back[hi] = (r[hi] - r[lo]) / h
        fwd[lo] = (r[hi] - r[lo]) / h
        g = np.maximum.reduce([back, -fwd, np.zeros_like(r)])
        total += g * g
    return np.sqrt(total)
