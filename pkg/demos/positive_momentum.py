# A non-negative momentum stays non-negative, so ||m||_L1 = int m is conserved
# and the kernel bound caps |u_x| for all time.
import numpy as np

from fracch import run_preset

res = run_preset("thm13_positive")
run = res.reports["main"]
for r in run.rows[::10]:
    print(f"t={r.t:4.1f}  min m={r.min_m: .2e}  |m|_L1={r.l1_m:.12f}  max|u_x|={r.sup_ux:.4f}")

for v in res.verdicts:
    print(f"{'ok  ' if v.passed else 'FAIL'} {v.name:<18} {v.measured:.3e}  (tol {v.tolerance:.3e})")
