#!/usr/bin/env python3
"""Map where first-order theory ends and quasiclassics begins.

A sweep of the (delta, eps) plane classifies every cell by the smoothness
score of its dominant turning point and locates, per eps column, the point
where the first-order and quasiclassical reflectances come closest.  On the
(ln 1/eps, ln 1/delta) plane those points line up with slope 1 for the
smooth step and slope 2 for the sech^2 bump; the gaussian bump follows
ln(1/delta) = 1/eps^2.  Each shape owns its dividing line: there is no
universal boundary.

Writes cells_<family>.csv and line_<family>.csv next to this script.
"""

from pathlib import Path

import numpy as np

from overbarrier import (
    Family,
    crossover_line,
    sweep,
    write_cells_csv,
    write_line_csv,
)

OUT = Path(__file__).resolve().parent


def main():
    jobs = [
        (Family.FERMI_STEP, np.geomspace(1e-4, 0.9, 24), np.geomspace(0.05, 1.0, 12),
         "slope 1 expected"),
        (Family.SECH_SQUARED, np.geomspace(1e-4, 0.9, 24), np.geomspace(0.05, 1.0, 12),
         "slope 2 expected"),
        (Family.GAUSSIAN_BUMP, np.geomspace(1e-16, 0.9, 30), np.geomspace(0.2, 0.5, 8),
         "coefficient 1 vs 1/eps^2 expected"),
    ]
    for family, deltas, epss, note in jobs:
        cells = sweep(family, deltas, epss)
        line = crossover_line(cells)
        write_cells_csv(cells, OUT / f"cells_{family.value}.csv")
        write_line_csv(line, OUT / f"line_{family.value}.csv")
        counts = {}
        for c in cells:
            counts[c.regime] = counts.get(c.regime, 0) + 1
        print(f"{family.value:>6}: fitted slope {line.slope:+.3f} "
              f"(vs {line.fit_variable}), intercept {line.intercept:+.3f}, "
              f"rms {line.residual_rms:.3f}  [{note}]")
        print(f"        regimes: {counts}")
        print(f"        wrote cells_{family.value}.csv, line_{family.value}.csv")
    print("\nPlot ln_inv_delta against ln_inv_eps from the line CSVs to redraw")
    print("the applicability map; the cells CSVs carry the full classification.")


if __name__ == "__main__":
    main()
