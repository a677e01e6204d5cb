#!/usr/bin/env python
# Densities on a grid around three obstacles, written as CSV for plotting
# elsewhere.  The summary printed at the end shows how far lambda gets from
# lambda'' over the grid, against the constant 2.15.

import sys

import numpy as np

from hyptype import C0, DensityKind
from hyptype.geometry import DomainSpec, RemovedBall, RemovedPoint, WholeSpace
from hyptype.harness import GridSpec, field, field_csv

D = DomainSpec(2, WholeSpace(), (
    RemovedBall([0.0, 0.0], 0.4),
    RemovedPoint([1.0, 0.2]),
    RemovedBall([-0.6, 1.1], 0.15),
))
grid = GridSpec([-2.0, -2.0], [2.0, 2.0], [81, 81])

rows = {k: field(D, k, grid) for k in DensityKind}
lam = np.array([r["value"] for r in rows[DensityKind.LAMBDA]])
lam2 = np.array([r["value"] for r in rows[DensityKind.LAMBDA_PPRIME]])
inside = np.isfinite(lam)

ratio = lam[inside] / lam2[inside]
print(f"{inside.sum()} grid points in D, {(~inside).sum()} outside", file=sys.stderr)
print(f"lambda/lambda'': min {ratio.min():.4f}  max {ratio.max():.4f}  (bound {C0})", file=sys.stderr)
exc = sum(r["exceptional"] for r in rows[DensityKind.LAMBDA])
print(f"midpoint witnesses: {exc} points", file=sys.stderr)

out = sys.argv[1] if len(sys.argv) > 1 else "density_field.csv"
with open(out, "w") as fh:
    fh.write(field_csv(rows[DensityKind.LAMBDA]))
print("wrote", out, file=sys.stderr)
