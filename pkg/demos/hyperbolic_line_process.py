"""A hyperbolic line process and the complex it induces.

Each sampled point z is identified with the unique hyperbolic line whose
closest point to the origin is z; two points are joined when their lines
cross.  The first figure shows the lines, the second the resulting complex
with triangles filled at probability p.
"""

import pathlib

import numpy as np

from randcomplex import (
    HyperbolicDiskWindow,
    build_complex,
    disk_svg,
    hyperbolic_line_system,
    line_process_svg,
    sample_poisson,
)

BETA = 11.0 / 5.0
P_TRIANGLE = 0.5

rng = np.random.default_rng(7)
window = HyperbolicDiskWindow(2.5)
system = hyperbolic_line_system(P_TRIANGLE)

points = sample_poisson(window, BETA, rng)
sample = build_complex(points, system, int(rng.integers(1 << 63)))
print(f"f-vector: {list(sample.f_counts())}")

here = pathlib.Path(__file__).parent
(here / "hyperbolic_lines.svg").write_text(line_process_svg(sample))
(here / "hyperbolic_lines_complex.svg").write_text(disk_svg(sample))
print("wrote hyperbolic_lines.svg and hyperbolic_lines_complex.svg")
