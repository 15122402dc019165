"""Phase-velocity and attenuation curves of a viscous, heat-conducting gas.

Sweeps the acoustic (longitudinal), shear and heat branches over ten decades
of angular frequency for an air-like gas, printing the limit speeds and
writing the full table to dispersion_curves.csv.
"""

import math

import numpy as np

from hpr import analysis as an
from hpr import material as mat
from hpr.material import MaterialParams

# air-like gas: c0 = 344.3 m/s at the chosen rest state, cs = 50 m/s
params = MaterialParams(gamma=1.4, cv=718.0, rho0=1.177, cs=50.0,
                        alpha=50.0, T0=300.0)
params = params.with_transport(mu=1.846e-5, kappa=2.6e-2)
rho = 1.177
p = rho * 344.3**2 / params.gamma

c0 = math.sqrt(float(mat.sound_speed_sq(params, rho, p)))
cinf = mat.high_frequency_speed(c0, params.cs)
print(f"strain relaxation time tau1 = {params.tau1:.3e} s")
print(f"low-frequency sound speed  c0    = {c0:8.3f} m/s")
print(f"high-frequency limit       c_inf = {cinf:8.3f} m/s")

omega = np.logspace(2, 14, 241)
cols = an.sweep(omega, params, rho, p)

with open("dispersion_curves.csv", "w") as fh:
    fh.write(",".join(an.SWEEP_COLUMNS) + "\n")
    for i in range(omega.size):
        fh.write(",".join(f"{cols[c][i]:.10e}"
                          for c in an.SWEEP_COLUMNS) + "\n")

for mark in (1e-2, 1.0, 1e2):
    i = np.argmin(np.abs(cols["Omega"] - mark))
    print(f"Omega={cols['Omega'][i]:9.3g}: V_long={cols['V_long'][i]:8.3f}"
          f"  V_shear={cols['V_shear'][i]:7.3f}"
          f"  atten_long={cols['atten_long'][i]:10.3e}")
print("wrote dispersion_curves.csv")
