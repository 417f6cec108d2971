"""Iteration of the no-slip billiard map in the reduced phase space.

A phase point is a boundary location plus an outgoing unit velocity 3-vector
``(x, y, spin)``.  The absolute rotation coordinate of the disc is quotiented
out; only its velocity (the spin component) is tracked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .collision import MassParams, collision_matrix_at, wavefront_frame
from .errors import (BilliardError, CornerHit, DegenerateWavefront, Escape,
                     Grazing, NonRealizable)
from .geometry import BoundaryLoc, Table, cast_ray

COMPLETED = "completed"
ESCAPE = "escape"
CORNER_HIT = "corner_hit"
GRAZING = "grazing"
DEGENERATE_WAVEFRONT = "degenerate_wavefront"

_TERMINATION_OF = {
    Escape: ESCAPE,
    CornerHit: CORNER_HIT,
    Grazing: GRAZING,
    DegenerateWavefront: DEGENERATE_WAVEFRONT,
}


@dataclass(frozen=True)
class State:
    """Post-collision phase point: boundary location + outgoing unit velocity."""

    loc: BoundaryLoc
    v: np.ndarray

    def wavefront(self):
        return wavefront_frame(self.loc, self.v)


@dataclass
class TrajectoryRecord:
    states: list[State] = field(default_factory=list)
    flight_times: list[float] = field(default_factory=list)
    termination: str = COMPLETED


def make_state(table: Table, piece_index: int, s: float, v) -> State:
    """Convenience constructor validating the outgoing condition."""
    loc = geometry.frame_at(table, piece_index, s)
    v = np.asarray(v, dtype=float)
    if float(v @ loc.frame.e3) <= 0.0:
        raise ValueError("state velocity must be outgoing (v . e3 > 0)")
    return State(loc, v)


def billiard_map(table: Table, params: MassParams, xi: State,
                 specular: bool = False) -> tuple[State, float]:
    """One collision step: free flight to the next boundary hit, then reflect.

    With ``specular=True`` the standard reflection (normal component reversed,
    spin conserved) replaces the no-slip map; used for comparison runs only.
    Geometry errors (Escape, CornerHit, Grazing) propagate.
    """
    hit, t = cast_ray(table, xi.loc, xi.v[:2])
    e3 = hit.frame.e3
    if specular:
        v_out = xi.v - 2.0 * float(xi.v @ e3) * e3
    else:
        v_out = collision_matrix_at(hit, params) @ xi.v
    return State(hit, v_out), t


def trajectory(table: Table, params: MassParams, xi0: State, n: int,
               specular: bool = False) -> TrajectoryRecord:
    """Iterate the billiard map up to ``n`` collisions, recording each state.

    An error termination (escape, corner, grazing) stops early and is
    reported in ``termination`` rather than raised.
    """
    if n < 1:
        raise ValueError("collision count must be >= 1")
    rec = TrajectoryRecord(states=[xi0])
    xi = xi0
    for _ in range(n):
        try:
            xi, t = billiard_map(table, params, xi, specular=specular)
        except BilliardError as err:
            rec.termination = _TERMINATION_OF[type(err)]
            return rec
        rec.states.append(xi)
        rec.flight_times.append(t)
    return rec


def velocity_coords(xi: State) -> tuple[float, float]:
    """Coordinates (v.e1, v.e2) of the velocity in the open unit disc."""
    return float(xi.v @ xi.loc.frame.e1), float(xi.v @ xi.loc.frame.e2)


def state_from_coords(table: Table, piece_index: int, s: float,
                      u1: float, u2: float) -> State:
    """Reconstruct the outgoing state from disc coordinates (u1, u2)."""
    r2 = u1 * u1 + u2 * u2
    if r2 >= 1.0:
        raise ValueError("(u1, u2) must lie in the open unit disc")
    loc = geometry.frame_at(table, piece_index, s)
    f = loc.frame
    v = u1 * f.e1 + u2 * f.e2 + math.sqrt(1.0 - r2) * f.e3
    return State(loc, v)


def reverse_state(params: MassParams, xi: State) -> State:
    """Time-reversal involution: (q, v) -> (q, -C_q v), again outgoing."""
    v_rev = -(collision_matrix_at(xi.loc, params) @ xi.v)
    return State(xi.loc, v_rev)


def period2_state(params: MassParams, loc_a: BoundaryLoc,
                  loc_b: BoundaryLoc, chord=None) -> State:
    """Closed-form period-2 state launching from ``loc_a`` towards ``loc_b``.

    phi is the angle between the chord and the inward normal at ``loc_a``;
    raises NonRealizable when the resulting velocity is not reversed by the
    collision map at ``loc_b``.  On a torus the default chord (difference of
    fundamental-domain positions) may be the wrong lattice representative;
    pass the intended displacement explicitly.
    """
    if chord is None:
        chord = loc_b.position - loc_a.position
    chord = np.asarray(chord, dtype=float)
    norm = float(np.linalg.norm(chord))
    if norm == 0.0:
        raise NonRealizable("coincident boundary points")
    f = loc_a.frame
    cos_phi = float(chord @ f.e3[:2]) / norm
    sin_phi = float(chord @ f.e2[:2]) / norm
    c = params.cos_half_beta
    s = params.sin_half_beta
    den = math.sqrt(1.0 - c * c * cos_phi * cos_phi)
    v = (c * sin_phi * f.e1 + s * (sin_phi * f.e2 + cos_phi * f.e3)) / den
    c_b = collision_matrix_at(loc_b, params)
    if float(np.linalg.norm(c_b @ v + v)) > 1e-9:
        raise NonRealizable("chord geometry does not support a period-2 orbit")
    return State(loc_a, v)


def _states_close(a: State, b: State, tol: float, piece_lengths) -> bool:
    if a.loc.piece_index != b.loc.piece_index:
        return False
    ds = abs(a.loc.s - b.loc.s)
    length, closed = piece_lengths[a.loc.piece_index]
    if closed:
        ds = min(ds, length - ds)
    if ds > tol:
        return False
    return float(np.max(np.abs(a.v - b.v))) <= tol


def detect_period(table: Table, record: TrajectoryRecord,
                  tol: float = 1e-6) -> int | None:
    """Smallest lag p with state_{k+p} close to state_k for every k, if any."""
    if record.termination != COMPLETED or len(record.states) < 2:
        raise ValueError("record must be completed with at least 2 states")
    states = record.states
    piece_lengths = [(p.length, p.closed) for p in table.pieces]
    for p in range(1, len(states)):
        if all(_states_close(states[k], states[k + p], tol, piece_lengths)
               for k in range(len(states) - p)):
            return p
    return None


def recurs_at_lag(table: Table, record: TrajectoryRecord, p: int,
                  tol: float = 1e-6) -> bool:
    """Whether every state recurs after exactly ``p`` collisions."""
    states = record.states
    if len(states) <= p:
        raise ValueError("record too short for the requested lag")
    piece_lengths = [(pc.length, pc.closed) for pc in table.pieces]
    return all(_states_close(states[k], states[k + p], tol, piece_lengths)
               for k in range(len(states) - p))


def random_state(table: Table, rng: np.random.Generator,
                 margin: float = 1e-3) -> State:
    """Sample a state uniformly in boundary arc-length x velocity disc."""
    lengths = np.array([p.length for p in table.pieces])
    k = int(rng.choice(len(lengths), p=lengths / lengths.sum()))
    length = lengths[k]
    s = float(rng.uniform(margin * length, (1.0 - margin) * length))
    while True:
        u = rng.uniform(-1.0, 1.0, size=2)
        r2 = float(u @ u)
        if r2 < (1.0 - margin) ** 2:
            break
    return state_from_coords(table, k, s, float(u[0]), float(u[1]))
