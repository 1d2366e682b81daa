"""Minimal deterministic SVG output on a fixed 800 x 800 canvas."""

from __future__ import annotations

import numpy as np

SIZE = 800
MARGIN = 40


class Canvas:
    """Maps a world bounding box onto the canvas (y up) and collects elements."""

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
        self.scale = (SIZE - 2 * MARGIN) / span
        mid = 0.5 * (lo + hi)
        self.offset = np.array([SIZE / 2, SIZE / 2]) - self.scale * np.array([mid[0], -mid[1]])
        self.items: list[str] = []

    def _xy(self, p):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        return np.column_stack([self.scale * p[:, 0], -self.scale * p[:, 1]]) + self.offset

    @staticmethod
    def _fmt(v) -> str:
        return f"{v:.3f}"

    def polyline(self, pts, stroke="black", width=1.5, closed=False, fill="none"):
        q = self._xy(pts)
        coords = " ".join(f"{self._fmt(x)},{self._fmt(y)}" for x, y in q)
        tag = "polygon" if closed else "polyline"
        self.items.append(f'<{tag} points="{coords}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="{width}"/>')

    def line(self, p, q, stroke="gray", width=0.8):
        (x1, y1), (x2, y2) = self._xy([p, q])
        self.items.append(f'<line x1="{self._fmt(x1)}" y1="{self._fmt(y1)}" x2="{self._fmt(x2)}" '
                          f'y2="{self._fmt(y2)}" stroke="{stroke}" stroke-width="{width}"/>')

    def circle(self, center, radius, stroke="blue", width=1.2, fill="none"):
        (cx, cy), = self._xy([center])
        self.items.append(f'<circle cx="{self._fmt(cx)}" cy="{self._fmt(cy)}" '
                          f'r="{self._fmt(self.scale * radius)}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="{width}"/>')

    def dot(self, center, fill="red", r=3.0):
        (cx, cy), = self._xy([center])
        self.items.append(f'<circle cx="{self._fmt(cx)}" cy="{self._fmt(cy)}" r="{r}" fill="{fill}"/>')

    def render(self, title: str = "") -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
                f'viewBox="0 0 {SIZE} {SIZE}">')
        body = [head]
        if title:
            body.append(f"<title>{title}</title>")
        body.append(f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>')
        body.extend(self.items)
        body.append("</svg>")
        return "\n".join(body) + "\n"
