"""Static SVG rendering of hyperbolic-disk realizations.

Geodesic edges are drawn as circular arcs orthogonal to the boundary circle
(straight chords through the origin degenerate to line segments); filled
triangles are polygonal approximations with a fixed number of samples per
arc-sided edge.
"""

from __future__ import annotations

import math

import numpy as np

from .complexes import ComplexSample
from .space import ball_from_chart

__all__ = ["disk_svg", "line_process_svg", "geodesic_arc"]

ARC_SAMPLES = 24


def _circumcenter(a, b, c):
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if abs(d) < 1e-14:
        return None
    na, nb, nc = a @ a, b @ b, c @ c
    ux = (na * (b[1] - c[1]) + nb * (c[1] - a[1]) + nc * (a[1] - b[1])) / d
    uy = (na * (c[0] - b[0]) + nb * (a[0] - c[0]) + nc * (b[0] - a[0])) / d
    return np.array([ux, uy])


def geodesic_arc(p, q, samples: int = ARC_SAMPLES) -> np.ndarray:
    """Sampled polyline along the hyperbolic geodesic between two ball points."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    cross = p[0] * q[1] - p[1] * q[0]
    if abs(cross) < 1e-12 or np.allclose(p, q):
        t = np.linspace(0.0, 1.0, samples)[:, None]
        return p + t * (q - p)
    inv = p / (p @ p) if p @ p > 1e-24 else q / (q @ q)
    center = _circumcenter(p, q, inv)
    if center is None:
        t = np.linspace(0.0, 1.0, samples)[:, None]
        return p + t * (q - p)
    radius = float(np.linalg.norm(p - center))
    ang_p = math.atan2(p[1] - center[1], p[0] - center[0])
    ang_q = math.atan2(q[1] - center[1], q[0] - center[0])
    sweep = (ang_q - ang_p + math.pi) % (2.0 * math.pi) - math.pi
    angles = ang_p + np.linspace(0.0, sweep, samples)
    return center + radius * np.column_stack([np.cos(angles), np.sin(angles)])


def _svg_header(size: int) -> list[str]:
    pad = 1.06
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{-pad} {-pad} {2 * pad} {2 * pad}">',
        f'<circle cx="0" cy="0" r="1" fill="white" stroke="black" stroke-width="0.006"/>',
    ]


def _path(points: np.ndarray, close: bool = False) -> str:
    coords = " L ".join(f"{x:.5f} {-y:.5f}" for x, y in points)
    return f"M {coords}" + (" Z" if close else "")


def disk_svg(sample: ComplexSample, size: int = 640) -> str:
    """Render a hyperbolic-disk realization: points, geodesic edges, triangles."""
    if sample.points.chart != "hyperbolic":
        raise ValueError("disk rendering requires a hyperbolic sample")
    ball = ball_from_chart(sample.points.locations)
    parts = _svg_header(size)
    if sample.alpha >= 2:
        for row in sample.simplices[2]:
            v = [ball[i] for i in row]
            boundary = np.vstack(
                [
                    geodesic_arc(v[0], v[1])[:-1],
                    geodesic_arc(v[1], v[2])[:-1],
                    geodesic_arc(v[2], v[0]),
                ]
            )
            parts.append(f'<path d="{_path(boundary, close=True)}" fill="#7aa6d6" fill-opacity="0.45" stroke="none"/>')
    if sample.alpha >= 1:
        for row in sample.simplices[1]:
            arc = geodesic_arc(ball[row[0]], ball[row[1]])
            parts.append(f'<path d="{_path(arc)}" fill="none" stroke="#1f3c66" stroke-width="0.006"/>')
    for x, y in ball:
        parts.append(f'<circle cx="{x:.5f}" cy="{-y:.5f}" r="0.012" fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _full_geodesic(z: np.ndarray, samples: int = 64) -> np.ndarray | None:
    """The complete hyperbolic line whose closest point to the origin is z."""
    rho = float(np.linalg.norm(z))
    if rho < 1e-12:
        return None
    if rho >= 1.0:
        return None
    s = (1.0 + rho * rho) / (2.0 * rho)
    radius = (1.0 - rho * rho) / (2.0 * rho)
    center = z * (s / rho)
    # endpoints on the unit circle: the ideal boundary points of the line
    phi_c = math.atan2(center[1], center[0])
    half = math.acos(min(1.0 / s, 1.0))
    # angles of the arc as seen from the arc center
    a1 = math.atan2(math.sin(phi_c + half) - center[1], math.cos(phi_c + half) - center[0])
    a2 = math.atan2(math.sin(phi_c - half) - center[1], math.cos(phi_c - half) - center[0])
    sweep = (a2 - a1 + math.pi) % (2.0 * math.pi) - math.pi
    angles = a1 + np.linspace(0.0, sweep, samples)
    pts = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])
    # numerical guard: clip just inside the disk
    norms = np.linalg.norm(pts, axis=1)
    pts[norms > 1.0] /= norms[norms > 1.0, None] * (1.0 + 1e-9)
    return pts


def line_process_svg(sample: ComplexSample, size: int = 640) -> str:
    """Render the line process H(z) of a hyperbolic sample."""
    if sample.points.chart != "hyperbolic":
        raise ValueError("line rendering requires a hyperbolic sample")
    ball = ball_from_chart(sample.points.locations)
    parts = _svg_header(size)
    for z in ball:
        arc = _full_geodesic(np.asarray(z))
        if arc is not None:
            parts.append(f'<path d="{_path(arc)}" fill="none" stroke="#333333" stroke-width="0.005"/>')
    for x, y in ball:
        parts.append(f'<circle cx="{x:.5f}" cy="{-y:.5f}" r="0.010" fill="#aa2222"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
