# Odd data: m <= 0 left of the centre characteristic and m >= 0 right of it.
# The flow map stays odd and q(t, 0) = 0.
from fracch import run_preset
from fracch.presets import characteristics_check

res = run_preset("thm14_odd")
run = res.reports["main"]
flow, defects, audit = characteristics_check(run)

print("centre characteristic drift:", abs(flow.q[:, flow.labels.size // 2]).max())
print("max Lagrangian defect |m(q) q_xi^2 - m0|:", defects.max())
print("sign audit:", audit.as_dict())
for v in res.verdicts:
    print(f"{'ok  ' if v.passed else 'FAIL'} {v.name:<18} {v.measured:.3e}")
