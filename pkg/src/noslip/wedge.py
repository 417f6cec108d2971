"""Closed-form theory of no-slip billiards in a wedge.

The wedge has corner angle ``2*phi``, opens along +x with the corner at the
origin; world coordinates are ``(x, y, spin)``.  All bounded dynamics is
captured by the two-collision return map, which in the chart attached to the
lower wall is a rigid rotation of the velocity azimuth by an angle ``theta``
depending only on ``delta = cos(beta/2) cos(phi)``, plus a shear of the
position that is controlled by an explicit invariant density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd

import numpy as np

from .collision import MassParams
from .errors import ChartExit, NoSolution

__all__ = [
    "WedgeParams", "WedgeState", "rotation_angle", "phi_for_period",
    "return_map", "velocity_shift", "invariant_density", "quotient_orbit",
    "state_from_chart", "chart_from_state", "simulate_return",
]


@dataclass(frozen=True)
class WedgeParams:
    """Wedge half-angle plus the disc's mass angle; precomputes the frames.

    ``phi`` in (0, pi/2) is half the corner angle.
    """

    phi: float
    mass: MassParams

    def __post_init__(self):
        if not 0.0 < self.phi < 0.5 * math.pi:
            raise ValueError("wedge half-angle must lie in (0, pi/2)")

    @property
    def delta(self) -> float:
        return self.mass.cos_half_beta * math.cos(self.phi)

    @property
    def rho_norm(self) -> float:
        """sqrt(1 - delta^2), the normalization of the period-2 velocity."""
        return math.sqrt(1.0 - self.delta * self.delta)

    def zeta(self, i: int) -> np.ndarray:
        """Eigenframe matrix of wall i (columns u1, u2, u3), i in {1, 2}."""
        c = self.mass.cos_half_beta
        s = self.mass.sin_half_beta
        cp, sp = math.cos(self.phi), math.sin(self.phi)
        sign = (-1.0) ** i
        return np.array([
            [sign * c * cp, -sign * s * cp, sp],
            [c * sp, -s * sp, -sign * cp],
            [s, c, 0.0],
        ])

    @property
    def a1(self) -> np.ndarray:
        return self.zeta(2).T @ self.zeta(1)

    @property
    def s_reflect(self) -> np.ndarray:
        return np.diag([1.0, -1.0, -1.0])

    @property
    def s1(self) -> np.ndarray:
        a1 = self.a1
        return a1.T @ self.s_reflect @ a1

    @property
    def s2(self) -> np.ndarray:
        return self.s_reflect @ self.s1

    def y_axis(self, i: int) -> np.ndarray:
        """Chart velocity of the period-2 orbit at wall i."""
        sp = math.sin(self.phi)
        s = self.mass.sin_half_beta
        cp = math.cos(self.phi)
        return np.array([0.0, (-1.0) ** i * sp, s * cp]) / self.rho_norm

    @property
    def eps_hat1(self) -> np.ndarray:
        """First azimuth basis vector, oriented so the azimuth advances by
        +rotation_angle per return."""
        return np.array([-1.0, 0.0, 0.0])

    @property
    def eps_hat2(self) -> np.ndarray:
        s = self.mass.sin_half_beta
        cp, sp = math.cos(self.phi), math.sin(self.phi)
        return np.array([0.0, s * cp, sp]) / self.rho_norm

    @property
    def chord_length(self) -> float:
        return 2.0 * math.sin(self.phi) * self.rho_norm

    @property
    def mu0(self) -> np.ndarray:
        return self.a1.T @ np.array([0.0, 0.0, 1.0])

    @property
    def mu1(self) -> np.ndarray:
        return self.zeta(1).T @ np.array([0.0, 0.0, 1.0])

    @property
    def x0(self) -> np.ndarray:
        return self.chord_length * self.y_axis(1)

    def anchor_point(self, i: int) -> np.ndarray:
        """Configuration-space point q_i of the reference period-2 orbit."""
        c = self.mass.cos_half_beta
        s = self.mass.sin_half_beta
        cp, sp = math.cos(self.phi), math.sin(self.phi)
        sign = (-1.0) ** i
        return np.array([s * cp, sign * s * sp, sign * c * sp * sp])


@dataclass(frozen=True)
class WedgeState:
    """Return-map chart state: position x, velocity azimuth and polar angle."""

    x: np.ndarray
    varphi: float
    psi: float


def rotation_angle(params: WedgeParams) -> float:
    """Per-return rotation of the velocity azimuth, in (-pi, pi]."""
    d2 = params.delta ** 2
    cos_t = 1.0 - 8.0 * d2 + 8.0 * d2 * d2
    sin_t = 4.0 * params.delta * (1.0 - 2.0 * d2) * math.sqrt(1.0 - d2)
    if abs(sin_t) < 1e-15 and cos_t < 0.0:
        return math.pi
    return math.atan2(sin_t, cos_t)


def phi_for_period(mass: MassParams, p: int, q: int, branch: str) -> float:
    """Wedge half-angle whose rotation angle is 2*pi*p/q.

    ``branch`` selects the smaller ("lower") or larger ("upper") root for
    delta^2; the upper branch only exists for p/q roughly in [0.392, 0.5].
    Raises NoSolution when no half-angle in (0, pi/2) works.
    """
    if q <= 0 or not 0 < p < q or gcd(p, q) != 1:
        raise ValueError("need coprime p, q with 0 < p/q < 1")
    if branch not in ("lower", "upper"):
        raise ValueError("branch must be 'lower' or 'upper'")
    root = math.sqrt((1.0 + math.cos(2.0 * math.pi * p / q)) / 2.0)
    d2 = 0.5 * (1.0 - root) if branch == "lower" else 0.5 * (1.0 + root)
    if d2 < 0.0 or d2 > 1.0:
        raise NoSolution("no delta in [0, 1] for this rotation number")
    cos_phi = math.sqrt(d2) / mass.cos_half_beta
    if not 0.0 < cos_phi < 1.0:
        raise NoSolution("delta not reachable for this mass distribution")
    return math.acos(cos_phi)


def _chart_Q(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if abs(y[2]) < 1e-12:
        raise ChartExit("flight direction parallel to the target wall")
    return x - (x[2] / y[2]) * y


def _single_wall_map(params: WedgeParams, i: int, x: np.ndarray,
                     y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Chart form of one collision leg: wall i to the opposite wall."""
    a = params.a1 if i == 1 else params.a1.T
    yi = params.y_axis(i)
    x_new = _chart_Q(a @ (x - params.chord_length * yi), a @ y)
    return x_new, params.s_reflect @ (a @ y)


def chart_velocity(params: WedgeParams, varphi: float, psi: float) -> np.ndarray:
    """Chart velocity y from spherical coordinates about the period-2 axis."""
    return (math.cos(psi) * params.y_axis(1)
            + math.sin(psi) * (math.cos(varphi) * params.eps_hat1
                               + math.sin(varphi) * params.eps_hat2))


def chart_angles(params: WedgeParams, y: np.ndarray) -> tuple[float, float]:
    """Spherical coordinates (varphi, psi) of a chart velocity."""
    a = float(y @ params.eps_hat1)
    b = float(y @ params.eps_hat2)
    axial = float(y @ params.y_axis(1))
    return math.atan2(b, a), math.atan2(math.hypot(a, b), axial)


def return_map(params: WedgeParams, state: WedgeState) -> WedgeState:
    """Two-collision return map in the lower-wall chart.

    The azimuth advances by the rotation angle and psi is conserved; the
    position picks up a shear that vanishes with psi.  Raises ChartExit
    when an intermediate leg degenerates.
    """
    x3 = np.array([state.x[0], state.x[1], 0.0])
    y = chart_velocity(params, state.varphi, state.psi)
    x3, y = _single_wall_map(params, 1, x3, y)
    x3, y = _single_wall_map(params, 2, x3, y)
    varphi, psi = chart_angles(params, y)
    return WedgeState(x3[:2].copy(), varphi, psi)


def velocity_shift(params: WedgeParams, r: float, varphi: float) -> np.ndarray:
    """Position-shear vector V_r of the return map at azimuth ``varphi``.

    The chart position transforms as X = x + (mu0 . (x - x0)) V_r.
    """
    s1 = params.s1
    a1 = params.a1
    y1 = params.y_axis(1)
    y13 = y1[2]
    w = math.cos(varphi) * params.eps_hat1 + math.sin(varphi) * params.eps_hat2
    iw = w + s1 @ w
    num = r * (iw - (iw[2] / y13) * y1) + r * r * (w[2] * (s1 @ w) - (s1 @ w)[2] * w) / y13
    den = 1.0 - r * (a1 @ w + s1 @ w)[2] / y13 + r * r * (a1 @ w)[2] * (s1 @ w)[2] / (y13 * y13)
    if abs(den) < 1e-12:
        raise ChartExit("return-map shear denominator vanished")
    return num / (y13 * den)


def invariant_density(params: WedgeParams, r: float, varphi: float) -> float:
    """Invariant azimuth density rho of the quotient return map.

    Requires r * tan(phi)/sin(beta/2) < 1 so the density stays positive.
    """
    coeff = r * math.tan(params.phi) / params.mass.sin_half_beta
    if coeff >= 1.0:
        raise ValueError("psi too large: density would not be positive")
    return 1.0 + coeff * math.sin(varphi)


def _chart_offset(params: WedgeParams) -> np.ndarray:
    """Chart coordinates of the period-2 anchor on the lower wall."""
    return params.zeta(1).T @ params.anchor_point(1)


def state_from_chart(table, params: WedgeParams, st: WedgeState):
    """World realization of a chart state on the lower wall.

    Returns the simulation state plus the disc's rotation coordinate, which
    the reduced dynamics does not track and must be carried alongside.
    """
    from .dynamics import make_state
    z1 = params.zeta(1)
    x3 = np.array([st.x[0], st.x[1], 0.0])
    q = z1 @ (x3 + _chart_offset(params))
    v = z1 @ chart_velocity(params, st.varphi, st.psi)
    s_arc = q[0] * math.cos(params.phi) - q[1] * math.sin(params.phi)
    return make_state(table, 0, s_arc, v), float(q[2])


def chart_from_state(params: WedgeParams, xi, rotation: float) -> WedgeState:
    """Chart coordinates of a lower-wall state with known rotation coordinate."""
    if xi.loc.piece_index != 0:
        raise ChartExit("state is not on the lower wall")
    z1 = params.zeta(1)
    q = np.array([xi.loc.position[0], xi.loc.position[1], rotation])
    x3 = z1.T @ q - _chart_offset(params)
    varphi, psi = chart_angles(params, z1.T @ xi.v)
    return WedgeState(x3[:2].copy(), varphi, psi)


def simulate_return(table, params: WedgeParams, st: WedgeState,
                    mass: MassParams | None = None) -> WedgeState:
    """Return map computed by two steps of the actual billiard dynamics.

    Serves as the simulation oracle for the closed-form return_map; the
    rotation coordinate is integrated along both flight legs.
    """
    from .dynamics import billiard_map
    mass = mass if mass is not None else params.mass
    xi, rot = state_from_chart(table, params, st)
    for _ in range(2):
        nxt, t = billiard_map(table, mass, xi)
        rot += t * xi.v[2]
        xi = nxt
    return chart_from_state(params, xi, rot)


def quotient_orbit(params: WedgeParams, x_bar0: float, varphi0: float,
                   r: float, n: int) -> list[tuple[float, float]]:
    """Iterates of the quotient return map from the closed form.

    Returns [(x_bar_k, varphi_k) for k = 1..n]; the position coordinate
    stays pinned to the fixed point up to the density ratio, so orbits are
    explicitly bounded.
    """
    theta = rotation_angle(params)
    x_fix = float(params.x0 @ params.mu0)
    rho0 = invariant_density(params, r, varphi0)
    out = []
    for k in range(1, n + 1):
        ratio = rho0 / invariant_density(params, r, varphi0 + k * theta)
        out.append((ratio * x_bar0 + (1.0 - ratio) * x_fix,
                    varphi0 + k * theta))
    return out
