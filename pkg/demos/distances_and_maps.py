#!/usr/bin/env python
# Path distances between two points of a twice-punctured plane, all four
# kinds on one graph, then what a radial stretch does to the density and to
# the distance.

import numpy as np

from hyptype import GraphParams, MetricKind, RadialStretch, check_qc1, check_qc2, dilatation
from hyptype.geodesic import all_distances, distance
from hyptype.geometry import DomainSpec, RemovedPoint, WholeSpace
from hyptype.qcmaps import qc1_constant

D = DomainSpec(2, WholeSpace(), (RemovedPoint([4.0, 0.0]), RemovedPoint([16.0, 0.0])))
z, w = np.array([6.0, 0.5]), np.array([10.0, -0.5])

params = GraphParams(h_rel=1 / 12, quad_order=8)
for kind, value in all_distances(D, z, w, params).items():
    print(f"{kind.value:>16}: {value:.6f}")

# refinement only ever lowers the value; each entry is an upper bound
r = distance(D, z, w, MetricKind.D_LAMBDA, GraphParams(h_rel=1 / 12, quad_order=8, refinements=2))
print("d by refinement level:", np.round(r.history, 6))

f = RadialStretch(2.0)
dil = dilatation(f, 2)
print(f"\nradial stretch: K_O = {dil.K_O}, K_I = {dil.K_I}, alpha = {dil.alpha}")
C1 = qc1_constant(f, 2)
for x in ([8.0, 0.0], [5.0, 3.0], [12.0, -1.0], [30.0, 0.0]):
    ratio = check_qc1(f, D, np.array(x))
    print(f"lambda d ratio at {x}: {ratio:.4f}  (allowed [{1 / C1:.4f}, {C1:.4f}])")

lhs, rhs = check_qc2(f, D, z, w, params)
print(f"\nd(f z, f w) = {lhs:.4f},  max(d, d^alpha) = {rhs:.4f},  ratio {lhs / rhs:.4f}")
