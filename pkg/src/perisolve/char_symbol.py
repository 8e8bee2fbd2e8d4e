"""Characteristic matrices of the periodic delay equation and their inverses.

For the equation ``sum_{j=1}^n x^(j)(t) = A x(t) + L(x_t) + f(t)`` the symbol at
integer frequency ``k`` is

    D_k = sum_{j=1}^n (ik)^j I - A - L_k,

and the periodic solution is built from ``N_k = D_k^{-1}``. The module also
evaluates three scalar sequences (``seq_a``, ``seq_b``, ``seq_c``) that appear
when the difference ``N_{k+1} - N_k`` is expanded with the binomial theorem.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .delay_operator import DelaySpec, matrix_from_json, matrix_to_json, symbols
from .exceptions import DimensionMismatch, InputError, Resonance, ZeroFrequency

DEFAULT_COND_LIMIT = 1e12
# frequencies per work unit; fixed so results never depend on the thread count
CHUNK = 512


@dataclass(frozen=True)
class ProblemSpec:
    """Left-hand side of ``sum_{j<=n} x^(j) = A x + L(x_t) + f``."""

    n: int
    A: np.ndarray
    delay: DelaySpec | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"order n must be a positive integer, got {self.n!r}")
        A = np.atleast_2d(np.asarray(self.A, dtype=complex)).copy()
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got shape {A.shape}")
        A.setflags(write=False)
        delay = self.delay if self.delay is not None else DelaySpec.zero(A.shape[0])
        if delay.dim != A.shape[0]:
            raise DimensionMismatch(f"delay dim {delay.dim} does not match A ({A.shape[0]})")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "delay", delay)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.A.imag == 0)) and self.delay.is_real

    def to_json(self) -> dict:
        return {"n": self.n, "dim": self.dim, "A": matrix_to_json(self.A),
                "delay": self.delay.to_json()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "ProblemSpec":
        try:
            n = int(obj["n"])
            dim = int(obj["dim"])
            A = matrix_from_json(obj["A"], dim)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed problem JSON: {exc}") from exc
        delay = DelaySpec.from_json(obj.get("delay"), dim)
        return cls(n, A, delay)


def ik_power_sums(ks, n: int) -> np.ndarray:
    """``sum_{j=1}^n (ik)^j`` for each k, by repeated multiplication."""
    z = 1j * np.atleast_1d(np.asarray(ks, dtype=float))
    acc = np.ones_like(z)
    total = np.zeros_like(z)
    for _ in range(n):
        acc = acc * z
        total = total + acc
    return total


def ik_power(ks, n: int) -> np.ndarray:
    z = 1j * np.atleast_1d(np.asarray(ks, dtype=float))
    acc = np.ones_like(z)
    for _ in range(n):
        acc = acc * z
    return acc


def char_matrices(p: ProblemSpec, ks) -> np.ndarray:
    """Stack of ``D_k`` for each k in ``ks``."""
    ks = np.atleast_1d(np.asarray(ks))
    eye = np.eye(p.dim)
    return ik_power_sums(ks, p.n)[:, None, None] * eye - p.A[None] - symbols(p.delay, ks)


def char_matrix(p: ProblemSpec, k: int) -> np.ndarray:
    """``D_k = sum_{j=1}^n (ik)^j I - A - L_k``."""
    return char_matrices(p, [k])[0]


def conditioning(p: ProblemSpec, ks) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(D_k, cond_k, sigma_min(D_k))`` for each k.

    ``cond_k = scale_k / sigma_min(D_k)`` with
    ``scale_k = sum_j |k|^j + |A| + |L_k|`` (spectral norms). Since
    ``sigma_max(D_k) <= scale_k`` this dominates the usual condition number, and
    it also catches cancellation in the scalar case where ``sigma_max / sigma_min``
    is always 1.
    """
    ks = np.atleast_1d(np.asarray(ks))
    Lk = symbols(p.delay, ks)
    D = ik_power_sums(ks, p.n)[:, None, None] * np.eye(p.dim) - p.A[None] - Lk
    sv = np.linalg.svd(D, compute_uv=False)
    absk = np.abs(ks.astype(float))
    scale = sum(absk ** j for j in range(1, p.n + 1)) + np.linalg.norm(p.A, 2)
    scale = np.maximum(scale + np.linalg.norm(Lk, ord=2, axis=(1, 2)), sv[:, 0])
    smin = sv[:, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(smin > 0, scale / np.where(smin > 0, smin, 1.0), np.inf)
    return D, cond, smin


def _first_resonant(ks, bad) -> int:
    # smallest |k| first, positive k wins ties
    cand = [int(k) for k, b in zip(ks, bad) if b]
    return min(cand, key=lambda k: (abs(k), k < 0))


def resolvent(p: ProblemSpec, k: int, cond_limit: float = DEFAULT_COND_LIMIT):
    """Return ``(N_k, cond_k)``; raise :class:`Resonance` if ``D_k`` is not safely invertible."""
    D, cond, _ = conditioning(p, [k])
    if not np.isfinite(cond[0]) or cond[0] > cond_limit:
        raise Resonance(k, cond[0])
    return np.linalg.inv(D)[0], float(cond[0])


@dataclass(frozen=True)
class SymbolRecord:
    k: int
    D: np.ndarray
    N: np.ndarray
    S: np.ndarray
    T: np.ndarray
    P: np.ndarray
    cond: float


@dataclass(frozen=True)
class SymbolFamily:
    """Per-frequency matrices over ``-K..K`` stored as stacked arrays."""

    problem: ProblemSpec
    ks: np.ndarray
    D: np.ndarray
    N: np.ndarray
    S: np.ndarray
    T: np.ndarray
    P: np.ndarray
    cond: np.ndarray
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._index.update({int(k): i for i, k in enumerate(self.ks)})

    @property
    def K(self) -> int:
        return int(np.max(np.abs(self.ks))) if self.ks.size else 0

    def __contains__(self, k) -> bool:
        return int(k) in self._index

    def __getitem__(self, k: int) -> SymbolRecord:
        i = self._index[int(k)]
        return SymbolRecord(int(k), self.D[i], self.N[i], self.S[i], self.T[i], self.P[i],
                            float(self.cond[i]))

    def __iter__(self):
        return (self[int(k)] for k in self.ks)

    def __len__(self):
        return self.ks.size

    def to_json(self) -> dict:
        return {
            "n": self.problem.n,
            "dim": self.problem.dim,
            "records": [
                {
                    "k": int(k),
                    "D": matrix_to_json(self.D[i]),
                    "N": matrix_to_json(self.N[i]),
                    "S": matrix_to_json(self.S[i]),
                    "T": matrix_to_json(self.T[i]),
                    "P": matrix_to_json(self.P[i]),
                    "cond": float(self.cond[i]),
                }
                for i, k in enumerate(self.ks)
            ],
        }


def _family_block(p: ProblemSpec, ks: np.ndarray, cond_limit: float):
    D, cond, _ = conditioning(p, ks)
    bad = ~np.isfinite(cond) | (cond > cond_limit)
    if np.any(bad):
        return ks, bad, cond, None
    N = np.linalg.inv(D)
    Lk = symbols(p.delay, ks)
    S = ik_power(ks, p.n)[:, None, None] * N
    T = Lk @ N
    P = ik_power_sums(ks, p.n)[:, None, None] * N
    return ks, bad, cond, (D, N, S, T, P)


def resolve_n_jobs(n_jobs: int | None) -> int:
    """Thread count: explicit value, else ``PERISOLVE_THREADS``, else 1."""
    if n_jobs is None:
        env = os.environ.get("PERISOLVE_THREADS")
        try:
            n_jobs = int(env) if env else 1
        except ValueError:
            raise InputError(f"PERISOLVE_THREADS must be an integer, got {env!r}") from None
    return max(1, int(n_jobs))


def build_family_on(p: ProblemSpec, ks: Iterable[int], cond_limit: float = DEFAULT_COND_LIMIT,
                    n_jobs: int | None = None) -> SymbolFamily:
    """Symbol family over an arbitrary sorted set of frequencies."""
    ks = np.unique(np.asarray(list(ks), dtype=np.int64))
    chunks = [ks[i:i + CHUNK] for i in range(0, ks.size, CHUNK)]
    workers = resolve_n_jobs(n_jobs)
    if workers == 1 or len(chunks) == 1:
        results = [_family_block(p, c, cond_limit) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _family_block(p, c, cond_limit), chunks))
    bad_ks = [int(k) for kc, bad, _, _ in results for k, b in zip(kc, bad) if b]
    if bad_ks:
        k = _first_resonant(bad_ks, [True] * len(bad_ks))
        for kc, _, cond, _ in results:
            if k in kc:
                raise Resonance(k, cond[kc == k][0])
    D, N, S, T, P = (np.concatenate([r[3][i] for r in results]) for i in range(5))
    cond = np.concatenate([r[2] for r in results])
    return SymbolFamily(p, ks, D, N, S, T, P, cond)


def build_family(p: ProblemSpec, K: int, cond_limit: float = DEFAULT_COND_LIMIT,
                 n_jobs: int | None = None) -> SymbolFamily:
    """Compute ``D, N, S, T, P`` for all ``|k| <= K``.

    ``S_k = (ik)^n N_k``, ``T_k = L_k N_k`` and ``P_k = sum_j (ik)^j N_k``.
    Raises :class:`Resonance` for the resonant frequency of smallest ``|k|``.
    """
    if K < 0:
        raise InputError(f"K must be nonnegative, got {K}")
    return build_family_on(p, range(-K, K + 1), cond_limit, n_jobs)


# ---------------------------------------------------------------------------
# scalar proof sequences
# ---------------------------------------------------------------------------

def _pow(z: complex, e: int) -> complex:
    # exact repeated multiplication; negative powers via a single reciprocal
    acc = complex(1.0)
    for _ in range(abs(e)):
        acc *= z
    return acc if e >= 0 else 1.0 / acc


def _check(n: int, k: int, allow_zero: bool):
    if int(n) != n or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    if k == 0 and not allow_zero:
        raise ZeroFrequency("the sequence involves negative powers of ik and is undefined at k=0")


def seq_a(n: int, k: int) -> complex:
    """``n + sum_{j=1}^{n-1} sum_{p=1}^{j} C(j,p)(ik)^{j+1-n-p} i^{p-1}
    + sum_{p=2}^{n} C(n,p)(ik)^{1-p} i^{p-1}``."""
    _check(n, k, allow_zero=False)
    z, I = complex(0, k), 1j
    total = complex(n)
    for j in range(1, n):
        for p in range(1, j + 1):
            total += math.comb(j, p) * _pow(z, j + 1 - n - p) * _pow(I, p - 1)
    for p in range(2, n + 1):
        total += math.comb(n, p) * _pow(z, 1 - p) * _pow(I, p - 1)
    return total


def seq_b(n: int, k: int) -> complex:
    """Term-by-term value of

    ``2 sum_{p=1}^n C(n,p)(ik)^{-p} i^p + sum_{j=1}^{n-1}(ik)^{j-n}
    + sum_{j=1}^{n-1} sum_{p=0}^{j} C(j,p)(ik)^{j-p-n} i^p
    + [sum_{p=1}^n C(n,p)(ik)^{-p} i^p][sum_{j=1}^{n-1}(ik)^{j-n}]``.
    """
    _check(n, k, allow_zero=False)
    z, I = complex(0, k), 1j
    first = sum((math.comb(n, p) * _pow(z, -p) * _pow(I, p) for p in range(1, n + 1)), 0j)
    tail = sum((_pow(z, j - n) for j in range(1, n)), 0j)
    double = 0j
    for j in range(1, n):
        for p in range(0, j + 1):
            double += math.comb(j, p) * _pow(z, j - p - n) * _pow(I, p)
    return 2 * first + tail + double + first * tail


def seq_c(n: int, k: int) -> complex:
    """``sum_{p=0}^n C(n,p)(ik)^{n-p} i^p * sum_{j=1}^n (ik)^j
    - (ik)^n sum_{j=1}^n sum_{p=0}^j C(j,p)(ik)^{j-p} i^p``. Defined at k = 0."""
    _check(n, k, allow_zero=True)
    z, I = complex(0, k), 1j
    binom_n = sum((math.comb(n, p) * _pow(z, n - p) * _pow(I, p) for p in range(n + 1)), 0j)
    powers = sum((_pow(z, j) for j in range(1, n + 1)), 0j)
    double = 0j
    for j in range(1, n + 1):
        for p in range(0, j + 1):
            double += math.comb(j, p) * _pow(z, j - p) * _pow(I, p)
    return binom_n * powers - _pow(z, n) * double
