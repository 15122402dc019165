"""Grid-refinement study on the convected isentropic vortex (DG P2).

Uses coarse grids so the script finishes quickly; the acceptance suite runs
the full refinement sequence.
"""

import time

import numpy as np

from hpr import ader
from hpr import benchmarks as bm

errors = []
grids = [10, 20]
for nx in grids:
    case = bm.vortex_case(nx=nx, scheme=ader.SchemeConfig(N=2, M=2, cfl=0.9))
    t0 = time.time()
    out = case.run()
    L1, L2, Linf = bm.error_norms(out.stepper, out.final(), case.exact,
                                  out.times[-1])
    errors.append(L1)
    print(f"Nx={nx:3d}: L1(rho)={L1:.4e}  L2={L2:.4e}  Linf={Linf:.4e} "
          f"[{out.steps} steps, {time.time() - t0:.1f}s]")

orders = bm.convergence_orders(grids, errors)
print("observed L1 orders:", np.round(orders, 2))
