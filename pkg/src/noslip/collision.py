"""No-slip collision maps for a rotating disc against a fixed boundary.

The disc's rotationally symmetric mass distribution enters through a single
angle ``beta`` (equivalently the dimensionless ``gamma``).  At a boundary
point the reflection acts on velocity 3-vectors (plane + spin components)
through the orthogonal involution ``C(beta)`` conjugated by the local
product frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWavefront
from .geometry import BoundaryLoc

__all__ = [
    "MassParams", "mass_params", "noslip_matrix", "collision_matrix_at",
    "collide", "eigenframe", "wavefront_frame", "two_disc_matrix",
    "two_disc_delta", "contact_velocity_mismatch", "noslip_tangent_vector",
]


@dataclass(frozen=True)
class MassParams:
    """Mass-distribution parameters of the disc.

    ``gamma = tan(beta/2)`` in [0, 1]; ``beta`` in [0, pi/2].  ``gamma = 0``
    is a point mass, ``gamma = 1/sqrt(2)`` the uniform disc, ``gamma = 1``
    all mass on the rim.
    """

    gamma: float
    beta: float

    @property
    def cos_half_beta(self) -> float:
        return math.cos(0.5 * self.beta)

    @property
    def sin_half_beta(self) -> float:
        return math.sin(0.5 * self.beta)


def mass_params(*, gamma: float | None = None, beta: float | None = None,
                lam: float | None = None, radius: float | None = None) -> MassParams:
    """Build MassParams from one of gamma, beta, or (lam, radius).

    ``lam`` is the normalized second moment of the mass distribution,
    in [0, radius**2 / 2]; gamma = sqrt(2*lam)/radius = tan(beta/2).
    """
    given = [gamma is not None, beta is not None, lam is not None]
    if sum(given) != 1:
        raise ValueError("specify exactly one of gamma, beta, lam")
    if lam is not None:
        if radius is None:
            raise ValueError("lam requires radius")
        if not 0.0 <= lam <= radius * radius / 2.0 + 1e-15:
            raise ValueError("lam must lie in [0, radius^2/2]")
        gamma = math.sqrt(2.0 * lam) / radius
    if beta is not None:
        if not 0.0 <= beta <= math.pi / 2.0 + 1e-15:
            raise ValueError("beta must lie in [0, pi/2]")
        gamma = math.tan(0.5 * beta)
    else:
        if not 0.0 <= gamma <= 1.0 + 1e-15:
            raise ValueError("gamma must lie in [0, 1]")
        beta = 2.0 * math.atan(gamma)
    return MassParams(gamma=float(gamma), beta=float(beta))


def noslip_matrix(params: MassParams) -> np.ndarray:
    """3x3 no-slip reflection in the product-frame basis (e1, e2, e3).

    An orthogonal involution with eigenvalues {+1, -1, -1}.
    """
    cb = math.cos(params.beta)
    sb = math.sin(params.beta)
    return np.array([
        [-cb, -sb, 0.0],
        [-sb, cb, 0.0],
        [0.0, 0.0, -1.0],
    ])


def collision_matrix_at(loc: BoundaryLoc, params: MassParams) -> np.ndarray:
    """World-coordinate collision map at a boundary point: sigma C sigma^T."""
    sigma = loc.frame.as_matrix()
    return sigma @ noslip_matrix(params) @ sigma.T


def collide(loc: BoundaryLoc, params: MassParams, v_in: np.ndarray) -> np.ndarray:
    """Apply the no-slip reflection to an incoming unit velocity.

    Requires ``v_in . e3 < 0``; the result satisfies ``v_out . e3 > 0`` and
    has the same norm.
    """
    if float(v_in @ loc.frame.e3) >= 0.0:
        raise ValueError("v_in must be incoming (v . e3 < 0)")
    return collision_matrix_at(loc, params) @ np.asarray(v_in, dtype=float)


def eigenframe(loc: BoundaryLoc, params: MassParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvectors (u1, u2, u3) of the collision map at ``loc``.

    ``u1`` is fixed by the reflection; ``u2`` and ``u3`` are negated.
    """
    c = params.cos_half_beta
    s = params.sin_half_beta
    e1, e2, e3 = loc.frame.e1, loc.frame.e2, loc.frame.e3
    return s * e1 - c * e2, c * e1 + s * e2, e3.copy()


def wavefront_frame(loc: BoundaryLoc, v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Velocity-adapted frame (w1, w2, w3 = v).

    ``w1`` is the normalized projection of the spin axis orthogonal to ``v``
    and ``w2 = v x w1``.  Raises DegenerateWavefront when ``v`` is parallel
    to the spin axis.
    """
    v = np.asarray(v, dtype=float)
    e1 = loc.frame.e1
    w1 = e1 - float(e1 @ v) * v
    norm = float(np.linalg.norm(w1))
    if norm < 1e-12:
        raise DegenerateWavefront("velocity parallel to spin axis")
    w1 /= norm
    return w1, np.cross(v, w1), v


def two_disc_delta(m1: float, gamma1: float, m2: float, gamma2: float) -> float:
    """Impulse weight of the two-disc no-slip collision matrix."""
    return 2.0 / ((1.0 / m1) * (1.0 + 1.0 / gamma1**2)
                  + (1.0 / m2) * (1.0 + 1.0 / gamma2**2))


def two_disc_matrix(m1: float, gamma1: float, m2: float, gamma2: float) -> np.ndarray:
    """6x6 no-slip collision matrix for two moving discs.

    Basis: (spin, tangential, normal) components of each body at the contact
    frame.  Involutive, and orthogonal for the kinetic-energy inner product
    diag(m1, m1, m1, m2, m2, m2).  Requires gamma_i in (0, 1].
    """
    if m1 <= 0.0 or m2 <= 0.0:
        raise ValueError("masses must be positive")
    if not (0.0 < gamma1 <= 1.0 and 0.0 < gamma2 <= 1.0):
        raise ValueError("gamma_i must lie in (0, 1]")
    m = m1 + m2
    d = two_disc_delta(m1, gamma1, m2, gamma2)
    g1, g2 = gamma1, gamma2
    return np.array([
        [1 - d / (m1 * g1 * g1), d / (m1 * g1), 0,
         -d / (m1 * g1 * g2), -d / (m1 * g1), 0],
        [d / (m1 * g1), 1 - d / m1, 0, d / (m1 * g2), d / m1, 0],
        [0, 0, 1 - 2 * m2 / m, 0, 0, 2 * m2 / m],
        [-d / (m2 * g1 * g2), d / (m2 * g2), 0,
         1 - d / (m2 * g2 * g2), -d / (m2 * g2), 0],
        [-d / (m2 * g1), d / m2, 0, -d / (m2 * g2), 1 - d / m2, 0],
        [0, 0, 2 * m1 / m, 0, 0, 1 - 2 * m1 / m],
    ])


def contact_velocity_mismatch(v: np.ndarray, gamma1: float, gamma2: float) -> np.ndarray:
    """Relative contact-point velocity (slip, normal) of a two-disc state.

    Zero exactly on the no-slip subspace; the collision matrix negates it.
    """
    v = np.asarray(v, dtype=float)
    v1, v2 = v[:3], v[3:]
    slip = (v1[1] - v2[1]) - (v1[0] / gamma1 + v2[0] / gamma2)
    return np.array([slip, v1[2] - v2[2]])


def noslip_tangent_vector(rng, gamma1: float, gamma2: float) -> np.ndarray:
    """Random vector in the no-slip subspace (fixed by the 6x6 map)."""
    a = rng.standard_normal(4)
    v1 = a[:3]
    v2_spin = a[3]
    v2 = np.array([v2_spin, v1[1] - v1[0] / gamma1 - v2_spin / gamma2, v1[2]])
    return np.concatenate([v1, v2])
