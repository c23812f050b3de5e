# Perturb the data by eps and by eps/10. The momentum difference, measured in
# B^{-1/2}_{2,inf}, grows by a bounded factor that does not depend on eps.
import numpy as np

from fracch import PeriodicGrid, SimConfig, continuous_dependence_probe

g = PeriodicGrid(512, 40.0)
u0 = g(lambda x: np.exp(-x**2))
out = continuous_dependence_probe(u0, 1e-4, SimConfig(a=1.5, T=1.0), trials=3, seed=1)
for t in out["trials"]:
    print(f"seed {t['seed']}  eps={t['eps']:.0e}  A_weak={t['amp_weak']:.4f}  A_L2={t['amp_l2']:.4f}")
print("two-scale ratios:", np.round(out["ratios"], 6), " passed:", out["passed"])
