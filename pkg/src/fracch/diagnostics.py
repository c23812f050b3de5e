"""Per-instant diagnostics of the momentum field."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .grid import Field, SpectralOps
from .littlewood_paley import BesovParams, besov_norm

COLUMNS = (
    "t", "l1_m", "int_m", "energy_um", "min_m", "max_m",
    "min_ux", "max_ux", "odd_defect", "besov_s_p_r",
)


@dataclass(frozen=True)
class DiagnosticRow:
    t: float
    l1_m: float
    int_m: float
    energy_um: float
    min_m: float
    max_m: float
    min_ux: float
    max_ux: float
    odd_defect: float
    besov_s_p_r: Optional[float] = None

    @property
    def sup_m(self) -> float:
        return max(abs(self.min_m), abs(self.max_m))

    @property
    def sup_ux(self) -> float:
        return max(abs(self.min_ux), abs(self.max_ux))

    def as_dict(self):
        return asdict(self)


def measure(t: float, m: np.ndarray, ops: SpectralOps,
            besov: BesovParams | None = None) -> DiagnosticRow:
    """Diagnostics of the state ``m`` at time ``t``.

    ``odd_defect`` is ``max_j |m(x_j) + m(-x_j)|`` (absolute, not scaled).
    ``energy_um`` is ``int u m dx``, the squared ``H^a`` norm of ``u``.
    """
    dx = ops.grid.dx
    u = ops.u_of_m(m)
    ux = ops.dx(u)
    odd = float(np.max(np.abs(m + ops.grid.reflect(m))))
    b = besov_norm(Field(ops.grid, m), besov) if besov is not None else None
    return DiagnosticRow(
        t=float(t),
        l1_m=float(dx * np.abs(m).sum()),
        int_m=float(dx * m.sum()),
        energy_um=float(dx * (u * m).sum()),
        min_m=float(m.min()),
        max_m=float(m.max()),
        min_ux=float(ux.min()),
        max_ux=float(ux.max()),
        odd_defect=odd,
        besov_s_p_r=b,
    )


def strip_width(m: np.ndarray, grid) -> float:
    """Width of the analyticity strip estimated from spectral decay.

    Fits ``log |c_n| ~ -delta k_n`` over the upper half of the resolved
    modes (``|n| <= N/3``) that sit above roundoff. Returns ``inf`` when
    fewer than 8 modes qualify (the field is resolved to roundoff).
    """
    c = np.abs(np.fft.rfft(m)) / grid.N
    k = 2 * np.pi * np.arange(c.size) / grid.L
    n3 = grid.N // 3
    top = c[: n3 + 1].max()
    sel = np.arange(1, n3 + 1)
    sel = sel[c[sel] > 1e-13 * top]
    if sel.size:
        sel = sel[sel >= max(4, sel.max() // 2)]
    if sel.size < 8:
        return float("inf")
    slope = np.polyfit(k[sel], np.log(c[sel]), 1)[0]
    return float(-slope)


def series(rows, name):
    return np.array([getattr(r, name) for r in rows], dtype=float)


def field_names():
    return [f.name for f in fields(DiagnosticRow)]
