"""Phase field and diffuse coefficient evaluation.

The phase field phi(r) = (1 + tanh(r/eps))/2 smooths the characteristic
function of the interior region over a layer of width eps; the diffuse
diffusivity, reaction, and source interpolate between the interior and
exterior values through phi, and |grad phi| supplies the surface-delta
weight for the interface source.
"""

from typing import NamedTuple

import numpy as np

from .geometry import DistanceField
from .model import TransmissionProblem, eval_field

# beyond this |r/eps| the profile is clamped to exactly 0 or 1 so extreme
# alpha = eps^m runs cannot produce subnormal coefficients
_SATURATION = 350.0


def check_interface_width(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"interface width must lie in (0, 1), got {eps}")
    return eps


def phi(r, eps):
    """Phase profile (1 + tanh(r/eps))/2, in (0,1), monotone in r."""
    check_interface_width(eps)
    t = np.asarray(r, dtype=float) / eps
    out = 0.5 * (1.0 + np.tanh(t))
    out = np.where(t > _SATURATION, 1.0, out)
    out = np.where(t < -_SATURATION, 0.0, out)
    return out if out.ndim else float(out)


def surface_delta(r, eps):
    """|grad phi| through the distance field: (2/eps) phi (1 - phi).

    Assumes |grad r| = 1 (Eikonal), so the chain rule reduces |grad phi|
    to the profile derivative.
    """
    p = phi(r, eps)
    out = (2.0 / eps) * p * (1.0 - p)
    return out if np.ndim(out) else float(out)


class DiffuseCoefficients(NamedTuple):
    diffusivity: np.ndarray      # alpha + (1-alpha) phi
    reaction: np.ndarray         # beta + (gamma-beta) phi
    source: np.ndarray           # h + (q-h) phi
    boundary_weight: np.ndarray  # |grad phi|


def diffuse_coefficients(distance: DistanceField, problem: TransmissionProblem,
                         eps: float) -> DiffuseCoefficients:
    """Per-cell diffuse coefficient fields on the distance field's grid."""
    r = distance.values
    p = phi(r, eps)
    pts = distance.grid.centers()
    q = eval_field(problem.q, *pts)
    h = eval_field(problem.h, *pts)
    return DiffuseCoefficients(
        diffusivity=problem.alpha + (1.0 - problem.alpha) * p,
        reaction=problem.beta + (problem.gamma - problem.beta) * p,
        source=h + (q - h) * p,
        boundary_weight=surface_delta(r, eps),
    )
