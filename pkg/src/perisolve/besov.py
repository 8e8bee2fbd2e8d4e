"""Littlewood-Paley blocks and periodic Besov norms of trigonometric polynomials."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, PartitionTooShort, ZeroInput
from .periodic_fourier import TrigPolynomial, default_grid, derivative, lp_norm


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        if not (1 <= self.p < math.inf):
            raise InputError(f"p must lie in [1, inf), got {self.p}")
        if not (1 <= self.q < math.inf):
            raise InputError(f"q must lie in [1, inf), got {self.q}")


@dataclass(frozen=True)
class DyadicPartition:
    """Hat functions in ``log2|t|`` summing to one on ``|t| <= 2**jmax``.

    ``phi_0`` is 1 on ``|t| <= 1`` and ``1 - log2|t|`` on ``1 < |t| <= 2``;
    for ``j >= 1``, ``phi_j(t) = max(0, 1 - |log2|t| - j|)``, supported in
    ``2^(j-1) <= |t| <= 2^(j+1)``.
    """

    jmax: int

    def __post_init__(self):
        if int(self.jmax) != self.jmax or self.jmax < 0:
            raise InputError(f"jmax must be a nonnegative integer, got {self.jmax!r}")

    @property
    def reach(self) -> int:
        return 2 ** self.jmax

    def phi(self, j: int, t):
        """Evaluate ``phi_j`` at ``t`` (scalar or array)."""
        t = np.abs(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore"):
            x = np.log2(t)
        if j == 0:
            out = np.where(t <= 1, 1.0, np.clip(1.0 - x, 0.0, 1.0))
        else:
            out = np.clip(1.0 - np.abs(x - j), 0.0, 1.0)
            # exact hat centres and zeros at dyadic points
            out = np.where(t == 0, 0.0, out)
        return out[()] if out.ndim == 0 else out

    def __call__(self, t) -> np.ndarray:
        """Matrix of all hats, shape ``(jmax + 1,) + shape(t)``."""
        return np.stack([np.asarray(self.phi(j, t), dtype=float) for j in range(self.jmax + 1)])

    def active(self, k: int) -> list[int]:
        """Indices ``j`` with ``phi_j(k) != 0``."""
        return [j for j in range(self.jmax + 1) if self.phi(j, k) != 0]


def build_partition(jmax: int) -> DyadicPartition:
    return DyadicPartition(jmax)


def partition_for(f: TrigPolynomial) -> DyadicPartition:
    """Shortest partition reaching the highest frequency of ``f``."""
    kmax = f.max_frequency
    return DyadicPartition(max(0, math.ceil(math.log2(kmax))) if kmax > 1 else 1)


def _check_reach(f: TrigPolynomial, part: DyadicPartition):
    if f.max_frequency > part.reach:
        raise PartitionTooShort(
            f"frequency {f.max_frequency} exceeds partition reach 2**{part.jmax}"
        )


def block(f: TrigPolynomial, part: DyadicPartition, j: int) -> TrigPolynomial:
    """The j-th Littlewood-Paley piece: coefficients ``phi_j(k) f_hat(k)``."""
    return TrigPolynomial(
        f.dim,
        {k: part.phi(j, k) * v for k, v in f.coeffs.items() if part.phi(j, k) != 0},
    )


def besov_blocks(f: TrigPolynomial, params: BesovParams, part: DyadicPartition,
                 M: int | None = None) -> list[tuple[int, float, float]]:
    """Per-block ``(j, |Delta_j f|_p, 2^(s j) |Delta_j f|_p)``."""
    _check_reach(f, part)
    if M is None:
        M = default_grid(f)
    out = []
    for j in range(part.jmax + 1):
        bn = lp_norm(block(f, part, j), params.p, M)
        out.append((j, bn, 2.0 ** (params.s * j) * bn))
    return out


def besov_norm(f: TrigPolynomial, params: BesovParams, part: DyadicPartition | None = None,
               M: int | None = None) -> float:
    """``(sum_j 2^(s j q) |sum_k e_k phi_j(k) f_hat(k)|_p^q)^(1/q)``."""
    if part is None:
        part = partition_for(f)
    weighted = np.array([w for _, _, w in besov_blocks(f, params, part, M)])
    return float(np.sum(weighted ** params.q) ** (1.0 / params.q))


def lifting_ratio(f: TrigPolynomial, params: BesovParams, part: DyadicPartition | None = None,
                  M: int | None = None) -> float:
    """``besov_norm(f', s) / besov_norm(f, s + 1)``."""
    if part is None:
        part = partition_for(f)
    top = besov_norm(derivative(f, 1), params, part, M)
    bottom = besov_norm(f, BesovParams(params.s + 1, params.p, params.q), part, M)
    if bottom == 0.0:
        raise ZeroInput("lifting ratio is undefined for the zero polynomial")
    return top / bottom
