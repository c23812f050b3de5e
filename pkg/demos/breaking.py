# Steep odd velocity: at a = 1 the slope steepens until the analyticity strip
# collapses; at a = 2 the same data stay smooth.
from fracch import run_preset

res = run_preset("breaking_a1")
a1, a2 = res.reports["main"], res.reports["contrast_a2"]
ev = a1.events[0]
print(f"a=1: {ev.reason} at t={ev.t:.3f}, x={ev.x:.3f}, monitored value {ev.value:.3g}")
print(f"a=2: finished at t={a2.final.t}, max |u_x| = {max(r.sup_ux for r in a2.rows):.3f}")
for r in a1.rows[::2]:
    print(f"  a=1 t={r.t:.2f}  |u_x|={r.sup_ux:7.3f}")
