"""Frequency-wise solution of periodic linear delay equations.

Because the forcing is a trigonometric polynomial, applying ``N_k`` to each of
its coefficients yields the periodic solution exactly; no spectral truncation
error is involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .char_symbol import (DEFAULT_COND_LIMIT, ProblemSpec, build_family_on, char_matrices,
                          conditioning, ik_power)
from .delay_operator import apply_on_grid
from .exceptions import DimensionMismatch, InputError, TruncationTooSmall
from .periodic_fourier import TrigPolynomial, default_grid, grid, synthesize


@dataclass(frozen=True)
class PeriodicSolution:
    u: TrigPolynomial
    K: int
    residual_coeff: float
    resonance_margin: float

    def __call__(self, t):
        return synthesize(self.u, t)


def solve(p: ProblemSpec, f: TrigPolynomial, K: int | None = None,
          cond_limit: float = DEFAULT_COND_LIMIT, n_jobs: int | None = None) -> PeriodicSolution:
    """Solve ``sum_j x^(j) = A x + L(x_t) + f`` for the 2*pi-periodic ``x``.

    Parameters
    ----------
    p : ProblemSpec
    f : TrigPolynomial
        Forcing; every frequency must satisfy ``|k| <= K``.
    K : int, optional
        Truncation bound. Defaults to the highest frequency of ``f``.
    cond_limit : float
        Frequencies whose characteristic matrix has a larger condition number
        are treated as resonant.

    Returns
    -------
    PeriodicSolution
        ``u_hat(k) = N_k f_hat(k)``, the coefficient residual and the smallest
        ``1 / cond_k`` over ``|k| <= K`` (see ``char_symbol.conditioning``).

    Raises
    ------
    Resonance
        If any ``|k| <= K`` has a singular characteristic matrix, since the
        periodic solution would then not be unique.
    """
    if f.dim != p.dim:
        raise DimensionMismatch(f"forcing dim {f.dim} vs problem dim {p.dim}")
    if K is None:
        K = f.max_frequency
    if K < 0:
        raise InputError(f"K must be nonnegative, got {K}")
    if f.max_frequency > K:
        raise TruncationTooSmall(f"forcing has frequency {f.max_frequency} beyond K={K}")
    # every |k| <= K must be non-resonant, not only the forced frequencies
    fam = build_family_on(p, range(-K, K + 1), cond_limit, n_jobs)
    margin = float(np.min(1.0 / fam.cond))
    if not f.coeffs:
        return PeriodicSolution(f, K, 0.0, margin)
    u = f.map(lambda k, v: fam.N[fam._index[k]] @ v)
    coeff_defect, _ = residual(p, u, f, grid_check=False)
    return PeriodicSolution(u, K, coeff_defect, margin)


def residual(p: ProblemSpec, u: TrigPolynomial, f: TrigPolynomial, M: int | None = None,
             grid_check: bool = True) -> tuple[float, float]:
    """Return ``(coeff_defect, grid_defect)``.

    ``coeff_defect`` is ``max_k |D_k u_hat(k) - f_hat(k)|`` over the union of
    frequencies. ``grid_defect`` is the time-domain residual
    ``max_t |sum_j u^(j)(t) - A u(t) - L(u_t) - f(t)|`` on a Nyquist grid, with
    derivatives taken from the coefficients and ``L`` applied to the actual
    history segments. It is ``nan`` when ``grid_check`` is false.
    """
    if u.dim != p.dim or f.dim != p.dim:
        raise DimensionMismatch("solution, forcing and problem dimensions must agree")
    ks = sorted(set(u.frequencies) | set(f.frequencies))
    coeff_defect = 0.0
    if ks:
        D = char_matrices(p, ks)
        for k, Dk in zip(ks, D):
            r = Dk @ u.coefficient(k) - f.coefficient(k)
            coeff_defect = max(coeff_defect, float(np.linalg.norm(r)))
    if not grid_check:
        return coeff_defect, float("nan")
    if M is None:
        M = max(default_grid(u), default_grid(f))
    t = grid(M)
    lhs = np.zeros((M, p.dim), dtype=complex)
    for k, v in u.coeffs.items():
        lhs += np.outer(np.exp(1j * k * t), _derivative_sum(k, p.n) * v)
    rhs = synthesize(u, t) @ p.A.T + apply_on_grid(p.delay, u, t) + synthesize(f, t)
    grid_defect = float(np.max(np.linalg.norm(lhs - rhs, axis=1)))
    return coeff_defect, grid_defect


def _derivative_sum(k: int, n: int) -> complex:
    return complex(sum(ik_power([k], j)[0] for j in range(1, n + 1)))


def uniqueness_probe(p: ProblemSpec, K: int) -> float:
    """Smallest ``sigma_min(D_k)`` over ``|k| <= K``.

    A strictly positive value means ``u = 0`` is the only trigonometric
    polynomial of degree ``<= K`` solving the homogeneous equation.
    """
    return float(np.min(singular_margins(p, range(-K, K + 1))[1]))


def singular_margins(p: ProblemSpec, ks) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(ks, sigma_min(D_k), cond_k)`` for a frequency scan; see :func:`conditioning`."""
    ks = np.asarray(list(ks), dtype=np.int64)
    smin = np.empty(ks.size)
    cond = np.empty(ks.size)
    for i in range(0, ks.size, 4096):
        _, c, s = conditioning(p, ks[i:i + 4096])
        smin[i:i + 4096] = s
        cond[i:i + 4096] = c
    return ks, smin, cond
