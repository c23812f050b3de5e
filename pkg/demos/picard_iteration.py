# Build the solution by iterated linear transport and watch the differences
# contract.
from fracch import run_preset
from fracch.presets import picard_table

res = run_preset("picard_demo")
print(" n   d_n          ratio    sup ||u^n||")
for n, d, r, s in picard_table(res.reports["picard"]):
    print(f"{n:2d}   {d:.3e}   {r:7.4f}   {s:.6f}")
print(f"gap to the direct solver at T: {res.extra['gap']:.2e}")
print(f"fitted constant C={res.extra['fitted_C']:.3f}, window 1/(C q^2)={res.extra['window']:.1f}")
