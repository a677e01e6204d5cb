#!/usr/bin/env python
# R^2 minus ({2 e1} and a closed ball of radius eps around e1), looked at from 0.
# As eps shrinks the three densities separate at different rates: 1/lambda''
# sits about eps above 1, 1/lambda' only about eps^2 above 1, and lambda stays
# pinned at 1 because the midpoint e1 of 0 and 2 e1 is inside the removed ball.

import numpy as np

from hyptype import DensityKind, density_all
from hyptype.geometry import lemma5_domain

z = np.zeros((1, 2))
print(f"{'eps':>8} {'1/lambda-1':>12} {'(1/lambda1-1)/eps^2':>20} {'(1/lambda2-1)/eps':>18}  midpoint")
for eps in [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001]:
    out = density_all(lemma5_domain(eps), z)
    r0 = out[DensityKind.LAMBDA].reciprocal[0]
    r1 = out[DensityKind.LAMBDA_PRIME].reciprocal[0]
    r2 = out[DensityKind.LAMBDA_PPRIME].reciprocal[0]
    exc = out[DensityKind.LAMBDA].exceptional[0]
    print(f"{eps:8.3f} {r0 - 1:12.2e} {(r1 - 1) / eps**2:20.6f} {(r2 - 1) / eps:18.6f}  {exc}")

# the witness pairs behind the numbers at eps = 0.01
out = density_all(lemma5_domain(0.01), z)
for kind, res in out.items():
    print(kind.value, "a =", np.round(res.witness_a[0], 6), "b =", np.round(res.witness_b[0], 6))
