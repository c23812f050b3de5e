# Dyadic blocks, Besov norms, and Bony's splitting of a product.
import numpy as np

from fracch import BesovParams, PeriodicGrid, besov_norm, build_partition, random_field
from fracch.littlewood_paley import block_norms, paraproduct, remainder, sobolev_norm

g = PeriodicGrid(512, 40.0)
part = build_partition(g)
print(f"blocks -1..{part.jmax}, partition-of-unity defect {part.unity_defect():.1e}")
sq = part.square_sum()
print(f"chi^2 + sum phi^2 ranges over [{sq.min():.4f}, {sq.max():.4f}]")

f = random_field(g, 3, kmax=150, decay=30)
j, w = block_norms(f, BesovParams(1.0, 2, 2))
for jj, ww in zip(j, w):
    print(f"  j={jj:>2}  2^j |Delta_j f|_2 = {ww:.4e}")
print("B^1_{2,2} / H^1 =", besov_norm(f, BesovParams(1.0, 2, 2)) / sobolev_norm(f, 1.0))

u, v = random_field(g, 1), random_field(g, 2)
uv = u.values * v.values
split = paraproduct(u, v).values + paraproduct(v, u).values + remainder(u, v).values
print("Bony reconstruction error:", np.linalg.norm(split - uv) / np.linalg.norm(uv))
