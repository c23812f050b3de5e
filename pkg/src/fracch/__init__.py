"""Spectral laboratory for the fractional Camassa-Holm equation

    m_t + 2 u_x m + u m_x = 0,    m = (1 - d_xx)^a u,

on a periodic interval.
"""
from .audit import (Verdict, audit_energy, audit_int, audit_l1, audit_ux_bound,
                    continuous_dependence_probe)
from .characteristics import (FlowMap, SignAudit, flow_map, lagrangian_defects,
                              lagrangian_invariant, sign_audit, trig_eval, velocity_trajectory)
from .diagnostics import COLUMNS, DiagnosticRow, measure, strip_width
from .dynamics import (BlowUp, BlowUpEvent, NonFiniteError, RunReport, SimConfig, StepState,
                       cfl_dt, detect_blowup, rhs, rk4_step, simulate)
from .grid import (Field, Multiplier, PeriodicGrid, derivative, forward_transform,
                   helmholtz_apply, helmholtz_invert, inverse_transform)
from .io import load_snapshot, parse_config, save_snapshot
from .kernel import (QuadratureError, QuadSpec, green_kernel, green_kernel_dx,
                     kernel_convolve, kernel_derivative_sup)
from .littlewood_paley import (BesovParams, DyadicPartition, besov_norm, block,
                               build_partition, low_freq_truncate, paraproduct, remainder)
from .picard import (IterateRecord, PicardConfig, PicardDivergence, PicardResult,
                     linear_transport_solve, source_term)
from .picard import iterate as picard_iterate
from .presets import PRESETS, run_preset
from .rng import random_field, splitmix64
from .trajectory import Trajectory

__version__ = "0.1.0"
