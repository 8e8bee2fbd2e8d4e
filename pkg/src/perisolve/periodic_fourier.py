"""Trigonometric calculus for vector-valued 2*pi-periodic functions.

Fourier coefficients use the normalisation

    f_hat(k) = 1/(2 pi) * integral_0^{2 pi} exp(-i k t) f(t) dt,

so a function is recovered as ``sum_k exp(i k t) f_hat(k)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .exceptions import DimensionMismatch, InputError, NyquistViolation

TWO_PI = 2.0 * math.pi


def _as_vector(value, dim: int) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(value, dtype=complex)).copy()
    if vec.shape != (dim,):
        raise DimensionMismatch(f"expected a vector of length {dim}, got shape {vec.shape}")
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """A finite Fourier series ``t -> sum_k exp(i k t) coeffs[k]`` in C^dim.

    Absent frequencies carry a zero coefficient. Instances are immutable;
    arithmetic returns new polynomials.
    """

    dim: int
    coeffs: Mapping[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim!r}")
        clean = {}
        for k, v in self.coeffs.items():
            if int(k) != k:
                raise InputError(f"frequencies must be integers, got {k!r}")
            clean[int(k)] = _as_vector(v, self.dim)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, dim: int) -> "TrigPolynomial":
        return cls(dim, {})

    @classmethod
    def monomial(cls, k: int, x0=1.0, dim: int | None = None) -> "TrigPolynomial":
        """``e_k * x0``, i.e. ``t -> exp(i k t) x0``."""
        x0 = np.atleast_1d(np.asarray(x0, dtype=complex))
        if dim is None:
            dim = x0.size
        if x0.size == 1 and dim > 1:
            x0 = np.full(dim, x0[0])
        return cls(dim, {k: x0})

    # -- queries ----------------------------------------------------------
    @property
    def frequencies(self) -> list[int]:
        return list(self.coeffs)

    @property
    def max_frequency(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def coefficient(self, k: int) -> np.ndarray:
        v = self.coeffs.get(int(k))
        return np.zeros(self.dim, dtype=complex) if v is None else v

    def energy(self) -> float:
        """Sum of squared Euclidean norms of the coefficients."""
        return float(sum(np.vdot(v, v).real for v in self.coeffs.values()))

    def is_real(self, atol: float = 1e-12) -> bool:
        """True when coefficients are conjugate-symmetric (real-valued function)."""
        for k in set(self.coeffs) | {-k for k in self.coeffs}:
            if np.max(np.abs(self.coefficient(k) - np.conj(self.coefficient(-k)))) > atol:
                return False
        return True

    def __call__(self, t):
        return synthesize(self, t)

    # -- algebra ----------------------------------------------------------
    def map(self, fn: Callable[[int, np.ndarray], np.ndarray]) -> "TrigPolynomial":
        """Apply ``fn(k, coeff)`` frequency-wise. Output dimension may change."""
        out = {k: np.atleast_1d(np.asarray(fn(k, v), dtype=complex)) for k, v in self.coeffs.items()}
        dim = next(iter(out.values())).size if out else self.dim
        return TrigPolynomial(dim, out)

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"cannot add dim {self.dim} and dim {other.dim}")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return TrigPolynomial(self.dim, out)

    def __eq__(self, other):
        # equality as functions: an explicit zero coefficient equals an absent one
        if not isinstance(other, TrigPolynomial):
            return NotImplemented
        if self.dim != other.dim:
            return False
        ks = set(self.coeffs) | set(other.coeffs)
        return all(np.array_equal(self.coefficient(k), other.coefficient(k)) for k in ks)

    __hash__ = None

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, alpha) -> "TrigPolynomial":
        if not np.isscalar(alpha):
            return NotImplemented
        return TrigPolynomial(self.dim, {k: alpha * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def sample(self, M: int) -> "SampledFunction":
        """Values on the uniform grid ``t_m = 2 pi m / M``."""
        return SampledFunction(synthesize(self, grid(M)))

    # -- JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "coeffs": [
                {"k": k, "re": v.real.tolist(), "im": v.imag.tolist()}
                for k, v in self.coeffs.items()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "TrigPolynomial":
        try:
            dim = int(obj["dim"])
            coeffs = {}
            for entry in obj.get("coeffs", []):
                k = entry["k"]
                if int(k) != k:
                    raise InputError(f"non-integer frequency {k!r}")
                re = np.asarray(entry["re"], dtype=float)
                im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
                if int(k) in coeffs:
                    raise InputError(f"duplicate frequency {k}")
                coeffs[int(k)] = re + 1j * im
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed TrigPolynomial JSON: {exc}") from exc
        return cls(dim, coeffs)


@dataclass(frozen=True)
class SampledFunction:
    """Samples of a periodic function on ``t_m = 2 pi m / M``, shape ``(M, dim)``."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim == 1:
            s = s[:, None]
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise InputError(f"samples must have shape (M, dim), got {s.shape}")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def M(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def nodes(self) -> np.ndarray:
        return grid(self.M)

    @classmethod
    def from_callable(cls, fn, M: int) -> "SampledFunction":
        return cls(np.array([np.atleast_1d(fn(t)) for t in grid(M)], dtype=complex))


def grid(M: int) -> np.ndarray:
    if M < 1:
        raise InputError(f"grid size must be positive, got {M}")
    return TWO_PI * np.arange(M) / M


def _check_nyquist(M: int, kmax: int):
    if M <= 2 * kmax:
        raise NyquistViolation(f"grid size M={M} must exceed 2*kmax={2 * kmax}")


def analyze(g: SampledFunction, kmax: int) -> TrigPolynomial:
    """Discrete Fourier coefficients ``(1/M) sum_m g(t_m) exp(-i k t_m)``, |k| <= kmax.

    Exact whenever ``g`` samples a trigonometric polynomial of degree <= kmax.
    Frequencies whose coefficient is exactly zero are still stored.
    """
    if kmax < 0:
        raise InputError("kmax must be nonnegative")
    _check_nyquist(g.M, kmax)
    spectrum = np.fft.fft(g.samples, axis=0) / g.M
    ks = range(-kmax, kmax + 1)
    return TrigPolynomial(g.dim, {k: spectrum[k % g.M] for k in ks})


def synthesize(f: TrigPolynomial, t) -> np.ndarray:
    """Evaluate ``sum_k exp(i k t) f_hat(k)``.

    Scalar ``t`` gives a ``(dim,)`` vector; an array of times gives ``(len(t), dim)``.
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    out = np.zeros((t_arr.size, f.dim), dtype=complex)
    for k, v in f.coeffs.items():
        out += np.exp(1j * k * t_arr)[:, None] * v[None, :]
    return out[0] if scalar else out


def _ik_power(k: int, j: int) -> complex:
    # repeated multiplication keeps small integer powers exact
    z = complex(0.0, k)
    acc = complex(1.0, 0.0)
    for _ in range(j):
        acc *= z
    return acc


def derivative(f: TrigPolynomial, j: int = 1) -> TrigPolynomial:
    """The j-th derivative: coefficient k is multiplied by ``(ik)**j``."""
    if j < 1:
        raise InputError(f"derivative order must be >= 1, got {j}")
    return TrigPolynomial(
        f.dim, {k: _ik_power(k, j) * v for k, v in f.coeffs.items() if k != 0}
    )


def lp_norm(f: TrigPolynomial, p: float, M: int | None = None) -> float:
    """``(integral_0^{2pi} |f(t)|^p dt)^(1/p)`` by the uniform rectangle rule.

    The rule is exact for ``p = 2``; for other exponents it converges spectrally
    for smooth ``|f|^p`` and algebraically where ``f`` vanishes.
    """
    if not (1 <= p < math.inf):
        raise InputError(f"p must lie in [1, inf), got {p}")
    if M is None:
        M = default_grid(f)
    _check_nyquist(M, f.max_frequency)
    if not f.coeffs:
        return 0.0
    pointwise = np.linalg.norm(synthesize(f, grid(M)), axis=1)
    h = TWO_PI / M
    return float((h * np.sum(pointwise ** p)) ** (1.0 / p))


def parseval_defect(f: TrigPolynomial, M: int | None = None) -> float:
    """``|sum_k |f_hat(k)|^2 - lp_norm(f, 2)^2 / (2 pi)|``."""
    return abs(f.energy() - lp_norm(f, 2, M) ** 2 / TWO_PI)


def default_grid(f: TrigPolynomial, minimum: int = 64) -> int:
    return max(minimum, 4 * f.max_frequency + 4)


def random_trig_polynomial(rng: np.random.Generator, dim: int, kmax: int,
                           real: bool = False, density: float = 1.0) -> TrigPolynomial:
    """Random band-limited polynomial with standard normal coefficients.

    ``real=True`` enforces conjugate symmetry, giving a real-valued function.
    """
    coeffs: dict[int, np.ndarray] = {}
    for k in range(-kmax, kmax + 1):
        if real and k < 0:
            continue
        if density < 1.0 and rng.random() > density:
            continue
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        if real:
            if k == 0:
                v = v.real.astype(complex)
            else:
                coeffs[-k] = np.conj(v)
        coeffs[k] = v
    return TrigPolynomial(dim, coeffs)


def from_terms(dim: int, terms: Iterable[tuple[int, object]]) -> TrigPolynomial:
    """Build a polynomial from ``(k, coefficient)`` pairs, summing repeats."""
    out: dict[int, np.ndarray] = {}
    for k, v in terms:
        vec = _as_vector(v, dim)
        out[k] = out[k] + vec if k in out else vec
    return TrigPolynomial(dim, out)
