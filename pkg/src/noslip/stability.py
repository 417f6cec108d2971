"""Linear stability of the no-slip billiard map.

The differential acts on the 4-dimensional space ``v-perp (+) v-perp``;
all matrices here are expressed in the wavefront bases (w1, w2) at the
departure and arrival states.  ``dT_analytic`` gives the exact differential
of one collision step, ``jacobian_fd`` the matching central-difference
oracle, and the ``*_period2`` / trace helpers give the closed forms for
period-2 orbits together with the elliptic/hyperbolic thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collision import (MassParams, collision_matrix_at, noslip_matrix,
                        wavefront_frame)
from .dynamics import State, billiard_map
from .geometry import Table, frame_at, param_direction

ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"

# generator of frame rotation in the (e2, e3) plane
_A_SPIN = np.array([
    [0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, -1.0, 0.0],
])


@dataclass(frozen=True)
class Jacobian4:
    """Differential of one billiard step in wavefront bases.

    ``matrix`` maps coefficient vectors (X.w1, X.w2, Y.w1, Y.w2) at the
    departure state to the same coefficients at the arrival state.
    """

    matrix: np.ndarray
    flight_time: float
    xi: State | None = None
    xi_next: State | None = None


@dataclass(frozen=True)
class StabilityReport:
    trace_T2: float
    eigenvalues: np.ndarray
    classification: str
    zeta: float | None = None
    zeta0: float | None = None
    critical_radius: float | None = None

    def to_json_dict(self) -> dict:
        d = {
            "trace": self.trace_T2,
            "eigenvalues": [[float(ev.real), float(ev.imag)]
                            for ev in self.eigenvalues],
            "class": self.classification,
        }
        for key in ("zeta", "zeta0", "critical_radius"):
            val = getattr(self, key)
            if val is not None:
                d[key] = float(val)
        return d


def phi_psi_of_state(loc_frame_e3: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """(cos_phi, cos_psi) of a velocity at a boundary frame.

    cos_psi = v.e3; cos_phi uses the projection of v orthogonal to the
    spin axis.
    """
    v_bar = v.copy()
    v_bar[2] = 0.0
    n = float(np.linalg.norm(v_bar))
    if n < 1e-12:
        raise ValueError("velocity parallel to spin axis")
    return float(v_bar @ loc_frame_e3) / n, float(v @ loc_frame_e3)


def _horizontal(z: np.ndarray, e3: np.ndarray, v: np.ndarray) -> np.ndarray:
    return z - (float(z @ e3) / float(v @ e3)) * v


def dT_analytic(table: Table, params: MassParams, xi: State) -> Jacobian4:
    """Exact differential of the billiard map at ``xi``.

    Follows the chain rule for T = C o Phi: the position block is the
    horizontal transport of X + tY, the velocity block adds the curvature
    term built from the commutator of the frame-rotation generator with the
    reflection matrix.
    """
    xi_t, t = billiard_map(table, params, xi)
    v = xi.v
    w1, w2, _ = wavefront_frame(xi.loc, v)
    w1t, w2t, _ = wavefront_frame(xi_t.loc, xi_t.v)
    e3q = xi.loc.frame.e3
    e3t = xi_t.loc.frame.e3
    e2t = xi_t.loc.frame.e2
    c_tilde = collision_matrix_at(xi_t.loc, params)
    cmat = noslip_matrix(params)
    sigma_t = xi_t.loc.frame.as_matrix()
    omega = sigma_t @ (_A_SPIN @ cmat - cmat @ _A_SPIN) @ sigma_t.T
    kappa_t = xi_t.loc.kappa
    cols = []
    basis = ((w1, None), (w2, None), (None, w1), (None, w2))
    zero = np.zeros(3)
    for xdir, ydir in basis:
        x_h = _horizontal(xdir, e3q, v) if xdir is not None else zero
        y = ydir if ydir is not None else zero
        x_tilde = _horizontal(x_h + t * y, e3t, v)
        y_tilde = c_tilde @ y + kappa_t * float(e2t @ x_tilde) * (omega @ v)
        cols.append([float(x_tilde @ w1t), float(x_tilde @ w2t),
                     float(y_tilde @ w1t), float(y_tilde @ w2t)])
    return Jacobian4(np.array(cols).T, t, xi, xi_t)


def jacobian_fd(table: Table, params: MassParams, xi: State,
                step: float = 1e-7) -> Jacobian4:
    """Central-difference differential in the same bases as ``dT_analytic``.

    Probe states are displaced along the boundary (plus the suppressed spin
    coordinate) and on the velocity sphere; probe errors propagate.
    """
    xi_t, t0 = billiard_map(table, params, xi)
    v = xi.v
    w1, w2, _ = wavefront_frame(xi.loc, v)
    w1t, w2t, _ = wavefront_frame(xi_t.loc, xi_t.v)
    e3q = xi.loc.frame.e3
    e2q = xi.loc.frame.e2
    sgn = param_direction(table, xi.loc)
    piece_index = xi.loc.piece_index
    s0 = xi.loc.s

    def forward(loc, spin_offset, vel):
        hit, t = billiard_map(table, params, State(loc, vel))
        plane = np.asarray(loc.position, dtype=float) + t * vel[:2]
        pos3 = np.array([plane[0], plane[1], spin_offset + t * vel[2]])
        return pos3, hit.v

    cols = []
    for j in range(4):
        outs = []
        for sign in (1.0, -1.0):
            h = sign * step
            if j < 2:
                x_h = _horizontal((w1, w2)[j], e3q, v)
                ds = float(x_h @ e2q) * sgn * h
                piece = table.pieces[piece_index]
                s_new = (s0 + ds) % piece.length if piece.closed else s0 + ds
                loc = frame_at(table, piece_index, s_new)
                spin = float(x_h[2]) * h
                vel = v
            else:
                loc = xi.loc
                spin = 0.0
                vel = v + h * (w1, w2)[j - 2]
                vel = vel / np.linalg.norm(vel)
            outs.append(forward(loc, spin, vel))
        dpos = (outs[0][0] - outs[1][0]) / (2.0 * step)
        dvel = (outs[0][1] - outs[1][1]) / (2.0 * step)
        cols.append([float(dpos @ w1t), float(dpos @ w2t),
                     float(dvel @ w1t), float(dvel @ w2t)])
    return Jacobian4(np.array(cols).T, t0, xi, xi_t)


def dT_along_orbit(table: Table, params: MassParams, xi: State,
                   n: int) -> tuple[np.ndarray, list[Jacobian4]]:
    """Product of analytic step differentials over ``n`` collisions."""
    legs = []
    total = np.eye(4)
    cur = xi
    for _ in range(n):
        jac = dT_analytic(table, params, cur)
        legs.append(jac)
        total = jac.matrix @ total
        cur = jac.xi_next
    return total, legs


def _wavefront_blocks(params: MassParams, phi: float) -> tuple[np.ndarray, np.ndarray]:
    c = params.cos_half_beta
    s = params.sin_half_beta
    cphi = math.cos(phi)
    rho = math.sqrt(1.0 - c * c * cphi * cphi)
    a = 1.0 - 2.0 * c * c * cphi * cphi
    b = 2.0 * c * cphi * rho
    cblock = np.array([[a, -b], [-b, -a]])
    cos_psi = s * cphi / rho
    theta = 2.0 * c * (cos_psi / cphi) * np.array([[0.0, rho],
                                                  [0.0, -c * cphi]]) if cphi != 0.0 \
        else np.zeros((2, 2))
    return cblock, theta


def dT_period2(params: MassParams, phi: float, t: float,
               kappa_tilde: float) -> Jacobian4:
    """One-leg differential of a period-2 orbit in the wavefront basis.

    Block form [[I, tI], [-k*Theta, C - t*k*Theta]] with the 2x2 reflection
    and rank-1 curvature blocks evaluated at chord angle ``phi``.
    """
    if not 0.0 <= phi < 0.5 * math.pi:
        raise ValueError("phi must lie in [0, pi/2)")
    cblock, theta = _wavefront_blocks(params, phi)
    mat = np.zeros((4, 4))
    mat[:2, :2] = np.eye(2)
    mat[:2, 2:] = t * np.eye(2)
    mat[2:, :2] = -kappa_tilde * theta
    mat[2:, 2:] = cblock - t * kappa_tilde * theta
    return Jacobian4(mat, t)


def dT2_period2(params: MassParams, phi: float, t: float,
                kappa_q: float, kappa_qt: float) -> np.ndarray:
    """Differential of the full period-2 return map (two composed legs).

    The second leg equals the first conjugated by the signed permutation
    R = diag(1, -1, 1, -1) of the wavefront basis, with the curvatures
    exchanged.
    """
    r4 = np.diag([1.0, -1.0, 1.0, -1.0])
    leg_first = dT_period2(params, phi, t, kappa_qt).matrix
    leg_second = r4 @ dT_period2(params, phi, t, kappa_q).matrix @ r4
    return leg_second @ leg_first


def trace_T2(params: MassParams, phi: float, d_bar: float,
             kappa_q: float, kappa_qt: float) -> float:
    """Trace of the period-2 return differential from the closed form.

    ``d_bar`` is the plane distance between the two collision points.
    """
    if d_bar <= 0.0:
        raise ValueError("d_bar must be positive")
    c2 = params.cos_half_beta ** 2
    cphi = math.cos(phi)
    a = 1.0 - 2.0 * c2 * cphi * cphi
    return 4.0 * (a * a
                  - (kappa_q + kappa_qt) * c2 * cphi * a * d_bar
                  + kappa_q * kappa_qt * c2 * c2 * cphi * cphi * d_bar * d_bar)


def classify(trace: float, tol: float = 1e-9) -> str:
    """Linear type of a period-2 point from Tr(dT^2)."""
    dev = abs(trace - 2.0)
    if dev < 2.0 - tol:
        return ELLIPTIC
    if dev > 2.0 + tol:
        return HYPERBOLIC
    return PARABOLIC


def critical_zeta(params: MassParams, phi: float, curvature_sign: int) -> float:
    """Critical value of zeta = kappa * d_bar separating elliptic from not.

    Positive curvature: zeta0 = (2 - 2 c^2 cos^2 phi) / (c^2 cos phi), with
    the orbit elliptic for 0 < zeta < zeta0.  Negative curvature:
    zeta0 = -2 cos phi, elliptic for |zeta| < |zeta0|.
    """
    if not 0.0 <= phi < 0.5 * math.pi:
        raise ValueError("phi must lie in [0, pi/2)")
    cphi = math.cos(phi)
    if curvature_sign > 0:
        c2 = params.cos_half_beta ** 2
        if c2 * cphi < 1e-15:
            raise ValueError("cos(beta/2) cos(phi) too small for this branch")
        return (2.0 - 2.0 * c2 * cphi * cphi) / (c2 * cphi)
    return -2.0 * cphi


def sinai_critical_radius(params: MassParams, phi: float) -> float:
    """Scatterer radius where the phi-family period-2 orbit turns elliptic.

    On the unit torus zeta = (1 - 2 R cos phi)/R, so the threshold is
    R0 = 1/(zeta0 + 2 cos phi); for the uniform disc this is cos(phi)/3.
    """
    zeta0 = critical_zeta(params, phi, +1)
    return 1.0 / (zeta0 + 2.0 * math.cos(phi))


def period2_report(params: MassParams, phi: float, d_bar: float,
                   kappa_q: float, kappa_qt: float,
                   tol: float = 1e-9) -> StabilityReport:
    """Stability report for a period-2 orbit given its geometric data."""
    trace = trace_T2(params, phi, d_bar, kappa_q, kappa_qt)
    rho = math.sqrt(1.0 - (params.cos_half_beta * math.cos(phi)) ** 2)
    t = d_bar * rho / params.sin_half_beta
    mat = dT2_period2(params, phi, t, kappa_q, kappa_qt)
    eigs = np.linalg.eigvals(mat)
    zeta = zeta0 = critical_radius = None
    if kappa_q == kappa_qt and kappa_q != 0.0:
        zeta = kappa_q * d_bar
        zeta0 = critical_zeta(params, phi, 1 if kappa_q > 0 else -1)
        if kappa_q > 0:
            critical_radius = sinai_critical_radius(params, phi)
    return StabilityReport(trace, eigs, classify(trace, tol),
                           zeta=zeta, zeta0=zeta0,
                           critical_radius=critical_radius)
