"""Bounded delay functionals acting on history segments of periodic functions.

A delay functional is

    L(phi) = sum_m B_m phi(-r_m) + integral_{-2 pi N}^0 K(theta) phi(theta) dtheta,

with the integral replaced by the trapezoid rule on the kernel's own uniform
nodes. Its frequency symbol is ``L_k = L(e_k I)`` with ``e_k(theta) = exp(i k theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .exceptions import DimensionMismatch, InputError, NyquistViolation
from .periodic_fourier import TWO_PI, TrigPolynomial, analyze, grid, synthesize

# relative slack on the delay interval endpoints
_ENDPOINT_TOL = 1e-12


def _as_matrix(value, dim: int, what: str = "matrix") -> np.ndarray:
    mat = np.atleast_2d(np.asarray(value, dtype=complex)).copy()
    if mat.shape != (dim, dim):
        raise DimensionMismatch(f"{what} must be {dim}x{dim}, got shape {mat.shape}")
    mat.setflags(write=False)
    return mat


def matrix_to_json(mat) -> dict:
    mat = np.atleast_2d(np.asarray(mat, dtype=complex))
    return {"re": mat.real.tolist(), "im": mat.imag.tolist()}


def matrix_from_json(obj, dim: int | None = None) -> np.ndarray:
    if isinstance(obj, Mapping):
        try:
            re = np.asarray(obj["re"], dtype=float)
        except KeyError as exc:
            raise InputError("matrix JSON needs an 're' field") from exc
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise InputError("matrix 're' and 'im' parts differ in shape")
        mat = re + 1j * im
    else:
        mat = np.asarray(obj, dtype=complex)
    mat = np.atleast_2d(mat)
    if dim is not None and mat.shape != (dim, dim):
        raise DimensionMismatch(f"expected {dim}x{dim} matrix, got shape {mat.shape}")
    return mat


@dataclass(frozen=True)
class DelayKernel:
    """Matrix kernel ``K`` sampled at ``grid_count`` uniform nodes on ``[-2 pi N, 0]``."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 3 or vals.shape[1] != vals.shape[2]:
            raise InputError(f"kernel values must have shape (q, d, d), got {vals.shape}")
        if vals.shape[0] < 2:
            raise InputError("a kernel needs at least two nodes")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def grid_count(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_function(cls, fn, grid_count: int, periods: int = 1) -> "DelayKernel":
        nodes = kernel_nodes(grid_count, periods)
        return cls(np.array([np.atleast_2d(fn(th)) for th in nodes], dtype=complex))


def kernel_nodes(grid_count: int, periods: int) -> np.ndarray:
    return np.linspace(-TWO_PI * periods, 0.0, grid_count)


def trapezoid_weights(grid_count: int, periods: int) -> np.ndarray:
    h = TWO_PI * periods / (grid_count - 1)
    w = np.full(grid_count, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _coarse_rule(grid_count: int, periods: int) -> tuple[np.ndarray, np.ndarray]:
    """Node indices and weights of the trapezoid rule on every other node.

    When the interval count is odd, the last fine interval is kept as is.
    """
    h = TWO_PI * periods / (grid_count - 1)
    idx = list(range(0, grid_count, 2))
    if idx[-1] != grid_count - 1:
        idx.append(grid_count - 1)
    idx = np.asarray(idx)
    widths = np.diff(idx) * h
    w = np.zeros(idx.size)
    w[:-1] += 0.5 * widths
    w[1:] += 0.5 * widths
    return idx, w


@dataclass(frozen=True)
class DelaySpec:
    """Delay functional on ``[-2 pi N, 0]``: discrete lags plus an optional kernel.

    ``discrete`` holds ``(r, B)`` pairs with lag ``r`` in ``[0, 2 pi N]`` evaluated
    at ``-r``. The empty spec is the zero functional.
    """

    dim: int
    periods: int = 1
    discrete: Sequence[tuple[float, np.ndarray]] = field(default_factory=tuple)
    kernel: DelayKernel | None = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim!r}")
        if int(self.periods) != self.periods or self.periods < 1:
            raise InputError(f"periods must be a positive integer, got {self.periods!r}")
        r_max = TWO_PI * self.periods
        terms = []
        for r, B in self.discrete:
            r = float(r)
            if not (-_ENDPOINT_TOL * r_max <= r <= r_max * (1 + _ENDPOINT_TOL)):
                raise InputError(f"delay r={r} outside [0, 2*pi*{self.periods}]")
            terms.append((min(max(r, 0.0), r_max), _as_matrix(B, self.dim, "delay matrix")))
        kernel = self.kernel
        if kernel is not None and not isinstance(kernel, DelayKernel):
            kernel = DelayKernel(kernel)
        if kernel is not None and kernel.values.shape[1] != self.dim:
            raise DimensionMismatch(
                f"kernel matrices are {kernel.values.shape[1]}x{kernel.values.shape[1]}, "
                f"expected {self.dim}x{self.dim}"
            )
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "periods", int(self.periods))
        object.__setattr__(self, "discrete", tuple(terms))
        object.__setattr__(self, "kernel", kernel)

    @classmethod
    def zero(cls, dim: int, periods: int = 1) -> "DelaySpec":
        return cls(dim, periods)

    @property
    def is_zero(self) -> bool:
        return not self.discrete and self.kernel is None

    @property
    def is_real(self) -> bool:
        mats = [B for _, B in self.discrete]
        if self.kernel is not None:
            mats.append(self.kernel.values)
        return all(np.all(np.asarray(m).imag == 0) for m in mats)

    @property
    def max_lag(self) -> float:
        return TWO_PI * self.periods

    def __add__(self, other: "DelaySpec") -> "DelaySpec":
        """Sum of functionals. Kernels must share node count and period count."""
        if other.dim != self.dim:
            raise DimensionMismatch("cannot add delay specs of different dimension")
        periods = max(self.periods, other.periods)
        kernel = self.kernel
        if other.kernel is not None:
            if kernel is None:
                kernel = other.kernel
            else:
                if (kernel.grid_count != other.kernel.grid_count
                        or self.periods != other.periods):
                    raise InputError("kernels on different node sets cannot be added")
                kernel = DelayKernel(kernel.values + other.kernel.values)
        if kernel is not None and periods != (self.periods if self.kernel is not None else other.periods):
            raise InputError("kernel support must match the period count of the sum")
        return DelaySpec(self.dim, periods, tuple(self.discrete) + tuple(other.discrete), kernel)

    # -- JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "dim": self.dim,
            "periods": self.periods,
            "discrete": [{"r": r, "B": matrix_to_json(B)} for r, B in self.discrete],
        }
        if self.kernel is not None:
            out["kernel"] = {
                "grid_count": self.kernel.grid_count,
                "values": [matrix_to_json(K) for K in self.kernel.values],
            }
        return out

    @classmethod
    def from_json(cls, obj: Mapping, dim: int | None = None) -> "DelaySpec":
        if obj is None:
            if dim is None:
                raise InputError("missing delay specification")
            return cls.zero(dim)
        try:
            d = int(obj.get("dim", dim))
            periods = int(obj.get("periods", 1))
            discrete = [(float(t["r"]), matrix_from_json(t["B"], d)) for t in obj.get("discrete", [])]
            kernel = None
            if obj.get("kernel") is not None:
                kobj = obj["kernel"]
                values = np.array([matrix_from_json(v, d) for v in kobj["values"]])
                if int(kobj.get("grid_count", len(values))) != len(values):
                    raise InputError("kernel grid_count disagrees with the number of values")
                kernel = DelayKernel(values)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed DelaySpec JSON: {exc}") from exc
        if dim is not None and d != dim:
            raise DimensionMismatch(f"delay dim {d} does not match problem dim {dim}")
        return cls(d, periods, discrete, kernel)


@dataclass(frozen=True)
class HistorySegment:
    """The window ``theta -> u(time + theta)`` for ``theta`` in ``[-2 pi N, 0]``."""

    base: TrigPolynomial
    time: float
    periods: int = 1

    def __call__(self, theta):
        th = np.asarray(theta, dtype=float)
        lo = -TWO_PI * self.periods
        if np.any(th > _ENDPOINT_TOL) or np.any(th < lo * (1 + _ENDPOINT_TOL)):
            raise InputError(f"history segment is defined on [{lo}, 0]")
        return synthesize(self.base, self.time + th)


def apply(L: DelaySpec, seg: HistorySegment) -> np.ndarray:
    """Evaluate ``L(x_t)`` for one history segment."""
    if seg.base.dim != L.dim:
        raise DimensionMismatch(f"segment dim {seg.base.dim} vs delay dim {L.dim}")
    return apply_on_grid(L, seg.base, np.array([seg.time]))[0]


def apply_on_grid(L: DelaySpec, u: TrigPolynomial, times) -> np.ndarray:
    """``L(u_t)`` for every ``t`` in ``times``; returns shape ``(len(times), dim)``."""
    if u.dim != L.dim:
        raise DimensionMismatch(f"function dim {u.dim} vs delay dim {L.dim}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.zeros((times.size, L.dim), dtype=complex)
    for r, B in L.discrete:
        out += synthesize(u, times - r) @ B.T
    if L.kernel is not None:
        nodes = kernel_nodes(L.kernel.grid_count, L.periods)
        w = trapezoid_weights(L.kernel.grid_count, L.periods)
        for wq, th, Kq in zip(w, nodes, L.kernel.values):
            out += wq * (synthesize(u, times + th) @ Kq.T)
    return out


def symbols(L: DelaySpec, ks) -> np.ndarray:
    """Stack of ``L_k`` for each ``k`` in ``ks``; shape ``(len(ks), d, d)``.

    Each matrix depends only on its own ``k``, so results do not change with
    how a frequency range is split into batches.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    out = np.zeros((ks.size, L.dim, L.dim), dtype=complex)
    for r, B in L.discrete:
        out += np.exp(-1j * ks * r)[:, None, None] * B[None, :, :]
    if L.kernel is not None:
        nodes = kernel_nodes(L.kernel.grid_count, L.periods)
        w = trapezoid_weights(L.kernel.grid_count, L.periods)
        for wq, th, Kq in zip(w, nodes, L.kernel.values):
            out += (wq * np.exp(1j * ks * th))[:, None, None] * Kq[None, :, :]
    return out


def symbol(L: DelaySpec, k: int) -> np.ndarray:
    """``L_k = sum_m exp(-i k r_m) B_m + quadrature of integral exp(i k theta) K(theta)``."""
    return symbols(L, [k])[0]


def quadrature_error(L: DelaySpec, ks) -> np.ndarray:
    """Estimated error of the kernel quadrature in ``L_k``, one value per ``k``.

    Uses the spectral-norm gap between the fine trapezoid rule and the rule on
    every other node (about three times the fine-rule error for smooth
    integrands), plus a rounding floor. Zero for kernel-free specs.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if L.kernel is None:
        return np.zeros(ks.size)
    q = L.kernel.grid_count
    nodes = kernel_nodes(q, L.periods)
    w = trapezoid_weights(q, L.periods)
    vals = L.kernel.values
    phase = np.exp(1j * np.outer(ks, nodes))
    fine = np.einsum("kq,q,qij->kij", phase, w, vals)
    if q < 3:
        gap = np.full(ks.size, np.inf)
    else:
        idx, wc = _coarse_rule(q, L.periods)
        coarse = np.einsum("kq,q,qij->kij", phase[:, idx], wc, vals[idx])
        gap = np.linalg.norm(fine - coarse, ord=2, axis=(1, 2))
    scale = float(np.sum(w * np.linalg.norm(vals, ord=2, axis=(1, 2))))
    return gap + 64 * np.finfo(float).eps * q * scale


def verify_transfer(L: DelaySpec, u: TrigPolynomial, kmax: int, M: int) -> float:
    """Max over ``|k| <= kmax`` of ``|FourierCoeff_k[t -> L(u_t)] - L_k u_hat(k)|``.

    The left side is computed in the time domain (grid evaluation of ``L``
    followed by discrete analysis), the right side from the symbol.
    """
    if u.dim != L.dim:
        raise DimensionMismatch(f"function dim {u.dim} vs delay dim {L.dim}")
    if M <= 2 * max(kmax, u.max_frequency):
        raise NyquistViolation(
            f"grid size M={M} must exceed twice max(kmax, deg u)={max(kmax, u.max_frequency)}"
        )
    from .periodic_fourier import SampledFunction

    values = apply_on_grid(L, u, grid(M))
    lhs = analyze(SampledFunction(values), kmax)
    ks = list(range(-kmax, kmax + 1))
    Ls = symbols(L, ks)
    defect = 0.0
    for k, Lk in zip(ks, Ls):
        diff = lhs.coefficient(k) - Lk @ u.coefficient(k)
        defect = max(defect, float(np.linalg.norm(diff)))
    return defect


def transfer_bound(L: DelaySpec, u: TrigPolynomial, kmax: int, M: int) -> float:
    """Tolerance that accompanies :func:`verify_transfer`.

    Sum of the kernel quadrature error estimates weighted by ``|u_hat(k)|`` plus a
    rounding allowance for the grid evaluation and discrete analysis.
    """
    ks = u.frequencies
    quad = quadrature_error(L, ks) if ks else np.zeros(0)
    weighted = float(sum(e * np.linalg.norm(u.coefficient(k)) for e, k in zip(quad, ks)))
    lnorm = sum(float(np.linalg.norm(B, 2)) for _, B in L.discrete)
    if L.kernel is not None:
        w = trapezoid_weights(L.kernel.grid_count, L.periods)
        lnorm += float(np.sum(w * np.linalg.norm(L.kernel.values, ord=2, axis=(1, 2))))
    unorm = float(sum(np.linalg.norm(v) for v in u.coeffs.values()))
    rounding = 64 * np.finfo(float).eps * (1 + math.log2(max(M, 2))) * (1 + lnorm) * (1 + unorm)
    return weighted + rounding
