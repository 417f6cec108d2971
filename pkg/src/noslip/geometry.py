"""Billiard table geometry: boundary pieces, frames, curvature and ray casting.

World coordinates are 3-vectors ``(x, y, spin)``: the first two components
live in the plane of the table, the third is the rescaled rotation coordinate
of the rolling disc.  The spin axis ``e1 = (0, 0, 1)`` is the same at every
boundary point; ``e2`` (tangent) and ``e3`` (inward normal) lie in the plane.
The frame is right handed: ``e1 x e2 = e3``.

Curvature convention: ``kappa = <e2, D_{e2} e3>`` with ``e3`` the inward
normal, so a circular scatterer with the table outside has ``kappa = +1/R``
and a focusing circular boundary (table inside) has ``kappa = -1/R``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CornerHit, Escape, Grazing

TWO_PI = 2.0 * math.pi

#: candidate intersections closer than this are treated as the departure point
T_MIN = 1e-9
#: hits within this arc-length of a piece endpoint terminate with CornerHit
EPS_CORNER = 1e-9
#: |v . e3| below this at the hit point terminates with Grazing
EPS_GRAZE = 1e-12
#: two candidate flight times closer than this are an ambiguous (corner) hit
EPS_TIE = 1e-12

DEFAULT_MAX_FLIGHT_TIME = 1e4


@dataclass(frozen=True)
class Segment:
    """Straight boundary piece from ``a`` to ``b``.

    The inward normal is the direction ``a -> b`` rotated by +90 degrees,
    i.e. the table lies to the left of the directed segment.
    """

    a: tuple[float, float]
    b: tuple[float, float]

    def __post_init__(self):
        if math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1]) == 0.0:
            raise ValueError("segment endpoints must be distinct")

    @property
    def length(self) -> float:
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])

    @property
    def closed(self) -> bool:
        return False


@dataclass(frozen=True)
class Arc:
    """Circular boundary piece, parametrized counterclockwise by angle.

    ``side`` says on which side of the circle the table lies: ``"outside"``
    gives a dispersing wall (inward normal radially outward, kappa = +1/R),
    ``"inside"`` a focusing wall (kappa = -1/R).  The angular extent
    ``angle_end - angle_start`` must lie in (0, 2*pi]; a full circle is a
    closed piece without corners.
    """

    center: tuple[float, float]
    radius: float
    angle_start: float
    angle_end: float
    side: str = "outside"

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("arc radius must be positive")
        extent = self.angle_end - self.angle_start
        if not 0.0 < extent <= TWO_PI + 1e-12:
            raise ValueError("arc angular extent must be in (0, 2*pi]")
        if self.side not in ("outside", "inside"):
            raise ValueError("side must be 'outside' or 'inside'")

    @property
    def length(self) -> float:
        return self.radius * (self.angle_end - self.angle_start)

    @property
    def closed(self) -> bool:
        return self.angle_end - self.angle_start >= TWO_PI - 1e-12


Piece = Segment | Arc


@dataclass(frozen=True)
class Planar:
    pass


@dataclass(frozen=True)
class Torus:
    period_x: float
    period_y: float

    def __post_init__(self):
        if self.period_x <= 0.0 or self.period_y <= 0.0:
            raise ValueError("torus periods must be positive")


Topology = Planar | Torus


@dataclass(frozen=True)
class Table:
    """A billiard domain: boundary pieces plus planar or toroidal topology."""

    pieces: tuple[Piece, ...]
    topology: Topology = field(default_factory=Planar)
    max_flight_time: float = DEFAULT_MAX_FLIGHT_TIME

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise ValueError("table needs at least one boundary piece")


@dataclass(frozen=True)
class Frame:
    """Orthonormal product frame (spin axis, tangent, inward normal)."""

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def as_matrix(self) -> np.ndarray:
        """Orthogonal matrix with columns e1, e2, e3 (standard basis -> frame)."""
        return np.column_stack((self.e1, self.e2, self.e3))


@dataclass(frozen=True)
class BoundaryLoc:
    """A boundary point with its product frame and signed geodesic curvature."""

    piece_index: int
    s: float
    position: np.ndarray
    frame: Frame
    kappa: float


def _piece_point(piece: Piece, s: float) -> tuple[float, float]:
    if isinstance(piece, Segment):
        ux = (piece.b[0] - piece.a[0]) / piece.length
        uy = (piece.b[1] - piece.a[1]) / piece.length
        return piece.a[0] + s * ux, piece.a[1] + s * uy
    theta = piece.angle_start + s / piece.radius
    return (piece.center[0] + piece.radius * math.cos(theta),
            piece.center[1] + piece.radius * math.sin(theta))


def _piece_normal(piece: Piece, s: float) -> tuple[float, float]:
    """Inward (table-side) unit normal in the plane."""
    if isinstance(piece, Segment):
        ux = (piece.b[0] - piece.a[0]) / piece.length
        uy = (piece.b[1] - piece.a[1]) / piece.length
        return -uy, ux
    theta = piece.angle_start + s / piece.radius
    if piece.side == "outside":
        return math.cos(theta), math.sin(theta)
    return -math.cos(theta), -math.sin(theta)


def _piece_kappa(piece: Piece) -> float:
    if isinstance(piece, Segment):
        return 0.0
    return 1.0 / piece.radius if piece.side == "outside" else -1.0 / piece.radius


def param_direction(table: Table, loc: BoundaryLoc) -> float:
    """Sign of d(position)/ds relative to the tangent e2 (+1 or -1)."""
    piece = table.pieces[loc.piece_index]
    if isinstance(piece, Segment):
        return 1.0
    # CCW parametrization runs against e2 on dispersing arcs
    return -1.0 if piece.side == "outside" else 1.0


def frame_at(table: Table, piece_index: int, s: float) -> BoundaryLoc:
    """Boundary location with product frame and curvature at arc-length ``s``.

    Raises ``IndexError`` for a bad piece index and ``ValueError`` when ``s``
    is outside the piece's arc-length range.
    """
    if not 0 <= piece_index < len(table.pieces):
        raise IndexError(f"piece index {piece_index} out of range")
    piece = table.pieces[piece_index]
    if not -1e-12 <= s <= piece.length + 1e-12:
        raise ValueError(f"arc-length {s} outside [0, {piece.length}]")
    px, py = _piece_point(piece, s)
    nx, ny = _piece_normal(piece, s)
    # t = rot(-90) n so that e1 x e2 = e3 with e1 the spin axis
    tx, ty = ny, -nx
    frame = Frame(
        e1=np.array([0.0, 0.0, 1.0]),
        e2=np.array([tx, ty, 0.0]),
        e3=np.array([nx, ny, 0.0]),
    )
    return BoundaryLoc(piece_index, s, np.array([px, py]), frame, _piece_kappa(piece))


def _seg_intersections(piece: Segment, ox: float, oy: float,
                       dx: float, dy: float) -> list[tuple[float, float]]:
    """(t, s) pairs where the ray o + t d crosses the segment."""
    ax, ay = piece.a
    ex = piece.b[0] - ax
    ey = piece.b[1] - ay
    den = dx * ey - dy * ex
    if den == 0.0:
        return []
    # o + t d = a + (u/L) e ;  u in [0, L]
    wx = ax - ox
    wy = ay - oy
    t = (wx * ey - wy * ex) / den
    if t <= 0.0:
        return []
    u = (wx * dy - wy * dx) / den * piece.length
    if -1e-12 <= u <= piece.length + 1e-12:
        return [(t, min(max(u, 0.0), piece.length))]
    return []


def _arc_intersections(piece: Arc, ox: float, oy: float,
                       dx: float, dy: float) -> list[tuple[float, float]]:
    cx, cy = piece.center
    fx = ox - cx
    fy = oy - cy
    a = dx * dx + dy * dy
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - piece.radius * piece.radius
    disc = b * b - 4.0 * a * c
    if disc < 0.0 or a == 0.0:
        return []
    sq = math.sqrt(disc)
    out = []
    extent = piece.angle_end - piece.angle_start
    for t in ((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)):
        if t <= 0.0:
            continue
        hx = ox + t * dx - cx
        hy = oy + t * dy - cy
        theta = math.atan2(hy, hx)
        rel = (theta - piece.angle_start) % TWO_PI
        if rel <= extent + 1e-12 / piece.radius or piece.closed:
            s = min(rel * piece.radius, piece.length)
            out.append((t, s))
    return out


def _piece_intersections(piece: Piece, ox, oy, dx, dy):
    if isinstance(piece, Segment):
        return _seg_intersections(piece, ox, oy, dx, dy)
    return _arc_intersections(piece, ox, oy, dx, dy)


def _best_hit_planar(table, ox, oy, dx, dy):
    best = None  # (t, piece_index, s, offx, offy)
    for k, piece in enumerate(table.pieces):
        for t, s in _piece_intersections(piece, ox, oy, dx, dy):
            if t <= T_MIN:
                continue
            if best is None or t < best[0]:
                if best is not None and abs(t - best[0]) <= EPS_TIE and best[1] != k:
                    raise CornerHit("ambiguous hit shared by two pieces")
                best = (t, k, s, 0.0, 0.0)
            elif abs(t - best[0]) <= EPS_TIE and best[1] != k:
                raise CornerHit("ambiguous hit shared by two pieces")
    return best


def _best_hit_torus(table, ox, oy, dx, dy, max_t):
    lx, ly = table.topology.period_x, table.topology.period_y
    ix = math.floor(ox / lx)
    iy = math.floor(oy / ly)
    # grid traversal (DDA): visit cells in the order the ray enters them
    step_x = 1 if dx > 0 else -1
    step_y = 1 if dy > 0 else -1
    tmax_x = ((ix + (dx > 0)) * lx - ox) / dx if dx != 0.0 else math.inf
    tmax_y = ((iy + (dy > 0)) * ly - oy) / dy if dy != 0.0 else math.inf
    tdelta_x = lx / abs(dx) if dx != 0.0 else math.inf
    tdelta_y = ly / abs(dy) if dy != 0.0 else math.inf
    t_cur = 0.0
    best = None
    while True:
        offx, offy = ix * lx, iy * ly
        for k, piece in enumerate(table.pieces):
            for t, s in _piece_intersections(piece, ox - offx, oy - offy, dx, dy):
                if t <= T_MIN:
                    continue
                if best is None or t < best[0] - EPS_TIE:
                    best = (t, k, s, offx, offy)
                elif abs(t - best[0]) <= EPS_TIE and (best[1] != k or best[3:] != (offx, offy)):
                    raise CornerHit("ambiguous hit shared by two pieces")
        if tmax_x < tmax_y:
            t_cur, tmax_x, ix = tmax_x, tmax_x + tdelta_x, ix + step_x
        else:
            t_cur, tmax_y, iy = tmax_y, tmax_y + tdelta_y, iy + step_y
        if best is not None and t_cur > best[0] + EPS_TIE:
            return best
        if t_cur > max_t:
            return best


def cast_ray(table: Table, start: BoundaryLoc,
             plane_velocity: np.ndarray) -> tuple[BoundaryLoc, float]:
    """First boundary intersection of the free flight from ``start``.

    ``plane_velocity`` is the 2-D plane component of the velocity (not
    necessarily unit); the returned flight time is measured against it.
    On a torus the hit is reported in the fundamental domain while the
    flight time is the unwrapped one.

    Raises ``Escape``, ``CornerHit`` or ``Grazing``.
    """
    dx, dy = float(plane_velocity[0]), float(plane_velocity[1])
    speed = math.hypot(dx, dy)
    if speed == 0.0:
        raise ValueError("plane velocity must be nonzero")
    nx, ny = _piece_normal(table.pieces[start.piece_index], start.s)
    if dx * nx + dy * ny <= 0.0:
        raise ValueError("plane velocity must point into the table interior")
    ox, oy = float(start.position[0]), float(start.position[1])
    # max_flight_time caps the travelled plane distance; t is in time units
    t_cap = table.max_flight_time / speed
    if isinstance(table.topology, Torus):
        best = _best_hit_torus(table, ox, oy, dx, dy, t_cap)
    else:
        best = _best_hit_planar(table, ox, oy, dx, dy)
    if best is None or best[0] > t_cap:
        raise Escape("no boundary hit within max_flight_time")
    t, k, s, _, _ = best
    piece = table.pieces[k]
    if not piece.closed and (s < EPS_CORNER or s > piece.length - EPS_CORNER):
        raise CornerHit(f"hit within corner tolerance on piece {k}")
    hnx, hny = _piece_normal(piece, s)
    if abs((dx * hnx + dy * hny) / speed) < EPS_GRAZE:
        raise Grazing(f"tangential hit on piece {k}")
    return frame_at(table, k, s), t
