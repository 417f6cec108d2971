"""Builders for the standard billiard tables used throughout the project."""

from __future__ import annotations

import math

from .geometry import Arc, Planar, Segment, Table, Torus

TWO_PI = 2.0 * math.pi


def strip(width: float, length: float = 1e7,
          max_flight_time: float = 1e4) -> Table:
    """Infinite strip 0 < y < width, truncated at |x| = length/2."""
    if width <= 0.0:
        raise ValueError("strip width must be positive")
    half = 0.5 * length
    return Table(
        pieces=(
            Segment((-half, 0.0), (half, 0.0)),
            Segment((half, width), (-half, width)),
        ),
        max_flight_time=max_flight_time,
    )


def wedge(phi: float, length: float = 1e6,
          max_flight_time: float = 1e4) -> Table:
    """Wedge with corner angle 2*phi opening along +x, corner at the origin."""
    if not 0.0 < phi < 0.5 * math.pi:
        raise ValueError("wedge half-angle must lie in (0, pi/2)")
    c, s = math.cos(phi), math.sin(phi)
    return Table(
        pieces=(
            Segment((0.0, 0.0), (length * c, -length * s)),
            Segment((length * c, length * s), (0.0, 0.0)),
        ),
        max_flight_time=max_flight_time,
    )


def polygon(vertices: list[tuple[float, float]]) -> Table:
    """Polygonal table from counterclockwise vertices (interior on the left)."""
    if len(vertices) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    pieces = []
    for i, a in enumerate(vertices):
        b = vertices[(i + 1) % len(vertices)]
        pieces.append(Segment(tuple(a), tuple(b)))
    return Table(pieces=tuple(pieces))


def regular_polygon(n: int, circumradius: float = 1.0) -> Table:
    """Regular n-gon centered at the origin with a vertex at angle pi/2."""
    if n < 3:
        raise ValueError("need n >= 3")
    verts = []
    for k in range(n):
        a = 0.5 * math.pi + TWO_PI * k / n
        verts.append((circumradius * math.cos(a), circumradius * math.sin(a)))
    return polygon(verts)


def sinai(radius: float, periods: tuple[float, float] = (1.0, 1.0),
          max_flight_time: float = 1e4) -> Table:
    """Torus with a central circular scatterer removed."""
    lx, ly = periods
    if not 0.0 < 2.0 * radius < min(lx, ly):
        raise ValueError("scatterer must fit inside the fundamental domain")
    return Table(
        pieces=(Arc((0.5 * lx, 0.5 * ly), radius, 0.0, TWO_PI, side="outside"),),
        topology=Torus(lx, ly),
        max_flight_time=max_flight_time,
    )


def two_arc_lens(cap_angle: float, chord: float = 1.0) -> Table:
    """Lens bounded by two symmetric focusing arcs meeting at (0, +-chord/2).

    ``cap_angle`` is the angular extent of each arc; cap_angle = pi gives the
    full disc.
    """
    if not 0.0 < cap_angle <= math.pi:
        raise ValueError("cap angle must lie in (0, pi]")
    if chord <= 0.0:
        raise ValueError("chord must be positive")
    h = 0.5 * chord
    radius = h / math.sin(0.5 * cap_angle)
    d = radius * math.cos(0.5 * cap_angle)
    return Table(pieces=(
        Arc((-d, 0.0), radius, -0.5 * cap_angle, 0.5 * cap_angle, side="inside"),
        Arc((d, 0.0), radius, math.pi - 0.5 * cap_angle,
            math.pi + 0.5 * cap_angle, side="inside"),
    ))
