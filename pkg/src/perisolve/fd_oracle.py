"""Periodic finite-difference collocation of the delay equation.

Serves as an independent cross-check of the spectral solver: derivatives are
powers of the central-difference matrix, delays are circulant shifts (linearly
interpolated between grid nodes when the lag is not a multiple of the step),
and the resulting sparse system is solved directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .char_symbol import DEFAULT_COND_LIMIT, ProblemSpec
from .delay_operator import kernel_nodes, trapezoid_weights
from .exceptions import DimensionMismatch, InputError, NyquistViolation, SingularSystem
from .periodic_fourier import TWO_PI, TrigPolynomial, grid, synthesize


@dataclass(frozen=True)
class FdSolution:
    M: int
    samples: np.ndarray
    cond: float

    @property
    def nodes(self) -> np.ndarray:
        return grid(self.M)


def central_difference(M: int) -> sp.csr_matrix:
    """Circulant ``(x_{m+1} - x_{m-1}) / (2h)`` with ``h = 2 pi / M``."""
    h = TWO_PI / M
    main = np.arange(M)
    rows = np.concatenate([main, main])
    cols = np.concatenate([(main + 1) % M, (main - 1) % M])
    vals = np.concatenate([np.full(M, 1.0), np.full(M, -1.0)]) / (2 * h)
    return sp.csr_matrix((vals, (rows, cols)), shape=(M, M))


def lag_matrix(M: int, r: float) -> sp.csr_matrix:
    """Circulant approximation of ``x(t_m - r)``."""
    h = TWO_PI / M
    s = r / h
    main = np.arange(M)
    s_int = round(s)
    if abs(s - s_int) <= 1e-9 * max(1.0, abs(s)):
        return sp.csr_matrix((np.ones(M), (main, (main - s_int) % M)), shape=(M, M))
    s0 = math.floor(s)
    alpha = s - s0
    rows = np.concatenate([main, main])
    cols = np.concatenate([(main - s0) % M, (main - s0 - 1) % M])
    vals = np.concatenate([np.full(M, 1.0 - alpha), np.full(M, alpha)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(M, M))


def assemble(p: ProblemSpec, M: int) -> sp.csc_matrix:
    """The ``(M d) x (M d)`` collocation matrix; unknown ``(m, i)`` sits at ``m*d + i``."""
    d = p.dim
    eye_d = sp.identity(d, dtype=complex, format="csr")
    C = central_difference(M)
    deriv = sp.csr_matrix((M, M), dtype=float)
    power = sp.identity(M, format="csr")
    for _ in range(p.n):
        power = power @ C
        deriv = deriv + power
    system = sp.kron(deriv, eye_d) - sp.kron(sp.identity(M), sp.csr_matrix(p.A))
    for r, B in p.delay.discrete:
        system = system - sp.kron(lag_matrix(M, r), sp.csr_matrix(B))
    if p.delay.kernel is not None:
        ker = p.delay.kernel
        nodes = kernel_nodes(ker.grid_count, p.delay.periods)
        w = trapezoid_weights(ker.grid_count, p.delay.periods)
        for wq, th, Kq in zip(w, nodes, ker.values):
            system = system - wq * sp.kron(lag_matrix(M, -th), sp.csr_matrix(Kq))
    return sp.csc_matrix(system, dtype=complex)


def mode_symbols(system: sp.spmatrix, M: int, d: int) -> np.ndarray:
    """Block symbols of a block-circulant system, shape ``(M, d, d)``; index = mode mod M."""
    row_block = system[:d, :].toarray().reshape(d, M, d)
    # symbol_k = sum_l R[:, l, :] exp(i k l h)
    return np.moveaxis(np.fft.ifft(row_block, axis=1) * M, 1, 0)


def _signed(mode: int, M: int) -> int:
    return mode if mode <= M // 2 else mode - M


def solve_fd(p: ProblemSpec, f: TrigPolynomial, M: int,
             cond_limit: float = DEFAULT_COND_LIMIT) -> FdSolution:
    """Collocate the equation on ``M`` uniform nodes and solve.

    The system is block circulant, so its exact 2-norm condition number is
    read off the per-mode block symbols; a singular or too ill-conditioned
    system raises :class:`SingularSystem` naming the worst mode (this includes
    the Nyquist mode, where the central-difference symbol vanishes).
    """
    if M < 8 or M % 2:
        raise InputError(f"grid size must be even and at least 8, got {M}")
    if f.dim != p.dim:
        raise DimensionMismatch(f"forcing dim {f.dim} vs problem dim {p.dim}")
    if M <= 2 * f.max_frequency:
        raise NyquistViolation(f"grid size M={M} must exceed 2*{f.max_frequency}")
    system = assemble(p, M)
    sv = np.linalg.svd(mode_symbols(system, M, p.dim), compute_uv=False)
    smin = sv[:, -1]
    worst = int(np.argmin(smin))
    cond = float(np.max(sv[:, 0]) / smin[worst]) if smin[worst] > 0 else math.inf
    if not math.isfinite(cond) or cond > cond_limit:
        raise SingularSystem(_signed(worst, M), cond)
    rhs = synthesize(f, grid(M)).reshape(-1)
    try:
        x = splu(system).solve(rhs)
    except RuntimeError as exc:  # exactly singular factor
        raise SingularSystem(_signed(worst, M), math.inf) from exc
    return FdSolution(M, x.reshape(M, p.dim), cond)


def backward_error(p: ProblemSpec, f: TrigPolynomial, fd: FdSolution) -> float:
    """``|S x - b| / (|S| |x| + |b|)`` in the infinity norm."""
    system = assemble(p, fd.M)
    x = fd.samples.reshape(-1)
    b = synthesize(f, grid(fd.M)).reshape(-1)
    r = system @ x - b
    snorm = float(np.max(np.abs(system).sum(axis=1)))
    denom = snorm * np.max(np.abs(x), initial=0.0) + np.max(np.abs(b), initial=0.0)
    return float(np.max(np.abs(r))) / denom if denom > 0 else 0.0


def consistency_residual(p: ProblemSpec, u: TrigPolynomial, f: TrigPolynomial, M: int) -> float:
    """Max-norm of ``S u(t_m) - f(t_m)`` for an exact solution sampled on the grid."""
    system = assemble(p, M)
    x = synthesize(u, grid(M)).reshape(-1)
    b = synthesize(f, grid(M)).reshape(-1)
    return float(np.max(np.abs(system @ x - b)))


def compare(fd: FdSolution, spec) -> float:
    """``max_m |fd(t_m) - u(t_m)|`` against a spectral solution or trig polynomial."""
    u = getattr(spec, "u", spec)
    if u.dim != fd.samples.shape[1]:
        raise DimensionMismatch("solutions have different dimensions")
    diff = fd.samples - synthesize(u, fd.nodes)
    return float(np.max(np.linalg.norm(diff, axis=1)))
