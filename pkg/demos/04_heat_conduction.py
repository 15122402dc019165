"""Hyperbolic heat conduction relaxing onto Fourier's law.

Runs the density-jump heat-conduction problem on a coarse grid and compares
the model's heat flux alpha^2 T J against -kappa dT/dx.
"""

import numpy as np

from hpr import ader
from hpr import benchmarks as bm
from hpr import hpr_system as hs
from hpr import material as mat

case = bm.heat_case(scheme=ader.SchemeConfig(N=0, M=2, cfl=0.45))
case = case.with_grid(50, 3)
case = bm.replace(case, t_end=0.4)
out = case.run()
st = out.stepper
params = case.params

prim = hs.cons_to_prim(out.final(), params)
rho = prim[0].mean(axis=1)
T = prim[4].mean(axis=1) / ((params.gamma - 1.0) * rho * params.cv)
J1 = prim[hs.J0].mean(axis=1)
q_model = params.alpha**2 * T * J1
_, kappa = mat.transport_from_relaxation(params)
q_fourier = -kappa * np.gradient(T, st.grid.dx, edge_order=2)

xc = st.grid.xc()
print(f"{'x':>8} {'T':>10} {'a^2 T J':>12} {'-k dT/dx':>12}")
for i in range(0, len(xc), 5):
    print(f"{xc[i]:8.3f} {T[i]:10.5f} {q_model[i]:12.5e} "
          f"{q_fourier[i]:12.5e}")
sel = np.abs(xc) < 0.4
rel = (np.linalg.norm(q_model[sel] - q_fourier[sel])
       / np.linalg.norm(q_fourier[sel]))
print(f"\nrelative L2 mismatch over the smooth region: {rel:.2%}")
