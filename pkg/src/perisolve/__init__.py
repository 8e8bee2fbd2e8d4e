"""Spectral solver and audit toolkit for periodic linear delay differential equations."""
from .besov import BesovParams, DyadicPartition, besov_norm, build_partition, lifting_ratio
from .char_symbol import (ProblemSpec, SymbolFamily, build_family, char_matrix, resolvent,
                          seq_a, seq_b, seq_c)
from .delay_operator import DelayKernel, DelaySpec, HistorySegment, apply, symbol, verify_transfer
from .estimators import FiniteDifferencePeriodicSolver, SpectralPeriodicSolver
from .exceptions import (NyquistViolation, PerisolveError, Resonance, SingularSystem)
from .fd_oracle import FdSolution, compare, solve_fd
from .lemma_audit import (AuditReport, OperatorSequence, fourier_type_ratio, m_bound_report,
                          multiplier_apply, step1_audit, step2_audit, step3_audit)
from .periodic_fourier import (SampledFunction, TrigPolynomial, analyze, derivative, lp_norm,
                               parseval_defect, synthesize)
from .spectral_solver import PeriodicSolution, residual, solve, uniqueness_probe

__version__ = "0.1.0"
