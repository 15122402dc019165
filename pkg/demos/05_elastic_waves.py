"""Elastic-solid mode: plane P- and S-waves at the exact speeds.

Runs the linear velocity-stress companion system on periodic plane-wave
initial data and measures the propagation speed of each family from the
phase drift of the dominant Fourier mode.
"""

import numpy as np

from hpr import ader
from hpr import grid as gr
from hpr import hpr_system as hs

ep = hs.ElasticParams(lam=7.509672500e9, mu=7.509163750e9, rho=2200.0)
system = hs.ElasticSystem(ep)
print(f"Lame constants: lambda={ep.lam:.4e}, mu={ep.mu:.4e}, rho={ep.rho}")
print(f"wave speeds: c_p={ep.cp:.1f} m/s, c_s={ep.cs:.1f} m/s")

for name, R, speed in [
        ("P", np.array([-(ep.lam + 2 * ep.mu), -ep.lam, 0.0, ep.cp, 0.0]),
         ep.cp),
        ("S", np.array([0.0, 0.0, -ep.mu, 0.0, ep.cs]), ep.cs)]:
    cfg = ader.SchemeConfig(N=3, M=3, cfl=0.5)
    g = gr.CartesianGrid(32, 3, 0.0, 1.0, 0.0, 1.0, ghost=1)
    st = ader.Stepper(system, g, gr.BoundarySet(), cfg)

    def ic(x, y):
        prof = 1e-3 * np.sin(2 * np.pi * x)
        return R[(slice(None),) + (None,) * prof.ndim] * prof

    u = st.initialize(ic)
    t, t_end = 0.0, 0.2 / speed
    while t < t_end - 1e-15:
        dt = min(st.timestep(u), t_end - t)
        u = st.step(u, t, dt)
        t += dt
    avg = st.cell_averages(u)
    row = 3 if name == "P" else 4
    spec0 = np.fft.rfft(1e-3 * np.sin(2 * np.pi * g.xc()))
    spec1 = np.fft.rfft(avg[row] .mean(axis=1) / R[row])
    v_measured = -np.angle(spec1[1] / spec0[1]) / (2 * np.pi) / t_end
    print(f"{name}-wave: measured {v_measured:9.2f} m/s "
          f"(exact {speed:9.2f}, error {abs(v_measured/speed-1):.2e})")
