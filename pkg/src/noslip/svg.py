"""Tiny deterministic SVG writer for scatter and path plots.

Hand-rolled so that identical data produces byte-identical files; all
coordinates are formatted with 6 digits.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Figure"]


def _fmt(x: float) -> str:
    return f"{x:.6f}"


class Figure:
    """Fixed-size canvas mapping data coordinates to pixels."""

    def __init__(self, width: int = 640, height: int = 640,
                 xlim=(-1.0, 1.0), ylim=(-1.0, 1.0), margin: int = 20):
        self.width = width
        self.height = height
        self.xlim = xlim
        self.ylim = ylim
        self.margin = margin
        self.elements: list[str] = []

    def _px(self, x: float, y: float) -> tuple[float, float]:
        x0, x1 = self.xlim
        y0, y1 = self.ylim
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin
        return (self.margin + (x - x0) / (x1 - x0) * w,
                self.margin + (y1 - y) / (y1 - y0) * h)

    def scatter(self, points, radius: float = 1.0, color: str = "#1f4e8c"):
        for p in np.asarray(points, dtype=float):
            cx, cy = self._px(p[0], p[1])
            self.elements.append(
                f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                f'r="{_fmt(radius)}" fill="{color}"/>')

    def polyline(self, points, color: str = "#333333", width: float = 1.0):
        pts = " ".join(f"{_fmt(px)},{_fmt(py)}"
                       for px, py in (self._px(p[0], p[1])
                                      for p in np.asarray(points, dtype=float)))
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(width)}"/>')

    def circle_outline(self, center, radius: float, color: str = "#000000",
                       width: float = 1.0):
        cx, cy = self._px(center[0], center[1])
        x0, x1 = self.xlim
        r_px = radius / (x1 - x0) * (self.width - 2 * self.margin)
        self.elements.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r_px)}" '
            f'fill="none" stroke="{color}" stroke-width="{_fmt(width)}"/>')

    def to_string(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">\n'
                f'<rect width="{self.width}" height="{self.height}" '
                f'fill="#ffffff"/>\n')
        return head + "\n".join(self.elements) + "\n</svg>\n"

    def write(self, path: str):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_string())
