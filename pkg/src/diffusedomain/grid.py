"""Cell-centered structured grids in one and two dimensions.

A grid covers an axis-aligned box with ``shape[k]`` cells along axis ``k``;
cell centers sit at ``a + (i + 1/2) h``.  Fields on a grid are plain numpy
arrays of shape ``grid.shape`` (one value per cell).
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    box: tuple[tuple[float, float], ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        box = tuple((float(a), float(b)) for a, b in self.box)
        shape = tuple(int(n) for n in self.shape)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "shape", shape)
        if len(box) != len(shape) or len(box) not in (1, 2):
            raise ValueError("grid must be 1D or 2D with one (a,b) pair per axis")
        for (a, b), n in zip(box, shape):
            if not b > a:
                raise ValueError(f"degenerate box axis [{a}, {b}]")
            if n < 4:
                raise ValueError(f"need at least 4 cells per axis, got {n}")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((b - a) / n for (a, b), n in zip(self.box, self.shape))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_centers(self, axis: int) -> np.ndarray:
        a, b = self.box[axis]
        n = self.shape[axis]
        h = (b - a) / n
        return a + (np.arange(n) + 0.5) * h

    def centers(self) -> tuple[np.ndarray, ...]:
        """Cell-center coordinate arrays of shape ``self.shape`` (ij indexing)."""
        axes = [self.axis_centers(k) for k in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def coarsen(self) -> "Grid":
        """Grid with half the cells per axis (each axis count must be even)."""
        for n in self.shape:
            if n % 2 != 0 or n // 2 < 4:
                raise ValueError(f"cannot coarsen axis with {n} cells")
        return Grid(self.box, tuple(n // 2 for n in self.shape))


def line_grid(a: float, b: float, n: int) -> Grid:
    return Grid(((a, b),), (n,))


def box_grid(bounds, n) -> Grid:
    """2D grid; ``bounds = ((a1,b1),(a2,b2))``, ``n`` an int or (n1, n2)."""
    if np.isscalar(n):
        n = (int(n), int(n))
    return Grid(tuple(bounds), tuple(n))
