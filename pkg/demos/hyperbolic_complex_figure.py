"""Render one realization of the hyperbolic-disk model as an SVG figure.

The underlying graph connects points within hyperbolic distance r; every
triangle whose edges are present is filled independently with probability p.
Point clustering toward the boundary and the bending of geodesic edges make
the negative curvature visible.
"""

import pathlib

import numpy as np

from randcomplex import (
    HyperbolicDiskWindow,
    build_complex,
    disk_svg,
    hyperbolic_geometric_system,
    sample_poisson,
)

BETA = 30.0
RADIUS = 2.0          # hyperbolic radius of the window
R_CONNECT = 2.0 / 5.0
P_TRIANGLE = 0.5

rng = np.random.default_rng(2025)
window = HyperbolicDiskWindow(RADIUS)
system = hyperbolic_geometric_system(2, R_CONNECT, (P_TRIANGLE,))

points = sample_poisson(window, BETA, rng)
sample = build_complex(points, system, int(rng.integers(1 << 63)))

f = sample.f_counts()
print(f"points: {f[0]}, edges: {f[1]}, filled triangles: {f[2]}")

out = pathlib.Path(__file__).with_suffix(".svg")
out.write_text(disk_svg(sample))
print(f"wrote {out}")
