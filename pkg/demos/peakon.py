# A filtered periodic peakon at a = 1 travels at its height c = 1.
import numpy as np

from fracch import helmholtz_invert, run_preset

res = run_preset("peakon_a1")
run = res.reports["main"]
u0 = helmholtz_invert(run.m0, 1.0)
uT = helmholtz_invert(run.final.m, 1.0)
g = run.grid
print(f"peak at x={g.x[np.argmax(u0.values)]:.3f} -> x={g.x[np.argmax(uT.values)]:.3f} "
      f"after t={run.final.t}")
print(f"speed {res.extra['speed']:.5f}, relative shape error {res.extra['shape_error']:.2e}")
