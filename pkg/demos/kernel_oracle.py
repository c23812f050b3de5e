# Inverting (1 - d_xx)^a two ways: as a Fourier multiplier, and as convolution
# with the kernel built from s^(a-1) e^(-s) times the heat semigroup.
import time

import numpy as np

from fracch import PeriodicGrid, green_kernel, helmholtz_invert, kernel_convolve, random_field
from fracch.kernel import kernel_derivative_sup

g = PeriodicGrid(512, 40.0)
f = random_field(g, 11, kmax=120, decay=25)

for a in (0.75, 1.0, 1.5, 2.0):
    t0 = time.perf_counter()
    ref = helmholtz_invert(f, a).values
    conv = kernel_convolve(f, a).values
    err = np.max(np.abs(conv - ref)) / np.max(np.abs(ref))
    print(f"a={a:<5} rel. error {err:.2e}   ({time.perf_counter() - t0:.2f}s)")

# a = 1 is the classical e^{-|x|}/2, a = 2 is (1 + |x|) e^{-|x|}/4
x = np.array([0.0, 0.5, 2.0])
print("G_1:", green_kernel(1.0, x), " exact:", np.exp(-x) / 2)
print("G_2:", green_kernel(2.0, x), " exact:", (1 + x) * np.exp(-x) / 4)

for a in (1.25, 1.5, 2.0, 3.0):
    print(f"sup|G_a'| at a={a}: {kernel_derivative_sup(a):.9f}")
