"""Diffusing shear layer (Stokes' first problem) versus the erf solution.

Runs a coarse, fast variant of the shear-layer case and prints the velocity
profile against v0 erf(x / (2 sqrt(mu t))).
"""

import numpy as np

from hpr import ader
from hpr import benchmarks as bm
from hpr import hpr_system as hs

mu = 1e-2
case = bm.stokes_case(mu=mu, scheme=ader.SchemeConfig(N=0, M=2, cfl=0.45))
case = case.with_grid(50, 4)
case = bm.replace(case, t_end=0.25)

out = case.run()
st = out.stepper
prim = hs.cons_to_prim(out.final(), case.params)
xc = st.grid.xc()
v_num = prim[2].mean(axis=1)
v_ref = bm.stokes_exact(xc, out.times[-1], mu, v0=0.1)

print(f"{'x':>8} {'v (HPR)':>12} {'v (erf)':>12}")
for i in range(0, len(xc), 4):
    print(f"{xc[i]:8.3f} {v_num[i]:12.6f} {v_ref[i]:12.6f}")
print(f"\nmax deviation: {np.abs(v_num - v_ref).max():.3e} "
      f"(viscosity mu = {mu}, t = {out.times[-1]})")
