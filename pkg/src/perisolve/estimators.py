"""scikit-learn style wrappers around the spectral and finite-difference solvers.

Both estimators map sampled forcing ``X`` of shape ``(M, dim)`` on the uniform
grid ``t_m = 2 pi m / M`` to the sampled periodic solution on the same grid,
so they slot into pipelines and parameter searches like any transformer.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import fd_oracle, spectral_solver
from .char_symbol import DEFAULT_COND_LIMIT, ProblemSpec, build_family
from .delay_operator import DelaySpec
from .exceptions import DimensionMismatch, InputError
from .periodic_fourier import SampledFunction, analyze, grid, synthesize


def check_samples(X, dim: int | None = None) -> tuple[np.ndarray, bool]:
    """Validate grid samples; returns a complex ``(M, dim)`` array and whether ``X`` was real.

    sklearn's ``check_array`` rejects complex input, so this does the
    equivalent shape and finiteness checks itself.
    """
    arr = np.asarray(X)
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.number):
        raise InputError(f"samples must be numeric, got dtype {arr.dtype}")
    was_real = not np.iscomplexobj(arr)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InputError(f"samples must be 1-D or 2-D, got {arr.ndim}-D")
    if arr.shape[0] < 1:
        raise InputError("at least one sample is required")
    if not np.all(np.isfinite(arr)):
        raise InputError("samples contain NaN or infinity")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatch(f"samples have {arr.shape[1]} components, expected {dim}")
    return arr.astype(complex), was_real


def _problem(A, order, delay) -> ProblemSpec:
    if A is None:
        raise InputError("the state matrix A must be given")
    A = np.atleast_2d(np.asarray(A))
    delay = delay if delay is not None else DelaySpec.zero(A.shape[0])
    return ProblemSpec(order, A, delay)


class SpectralPeriodicSolver(TransformerMixin, BaseEstimator):
    """Spectral solver for ``sum_{j<=order} x^(j) = A x + L(x_t) + f``.

    Parameters
    ----------
    A : array-like of shape (dim, dim)
    order : int, default=1
    delay : DelaySpec, optional
        Delay functional ``L``; zero when omitted.
    modes : int, default=64
        Frequencies ``|k| <= modes`` are precomputed by :meth:`fit` and used
        by :meth:`transform`.
    cond_limit : float, default=1e12
    n_jobs : int, optional
        Threads for the per-frequency work; ``None`` reads ``PERISOLVE_THREADS``.

    Attributes
    ----------
    problem_ : ProblemSpec
    family_ : SymbolFamily
    resonance_margin_ : float
        ``min_k sigma_min(D_k) / sigma_max(D_k)`` over the fitted range.
    n_features_in_ : int
    """

    def __init__(self, A=None, order=1, delay=None, modes=64,
                 cond_limit=DEFAULT_COND_LIMIT, n_jobs=None):
        self.A = A
        self.order = order
        self.delay = delay
        self.modes = modes
        self.cond_limit = cond_limit
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        self.problem_ = _problem(self.A, self.order, self.delay)
        if X is not None:
            check_samples(X, self.problem_.dim)
        self.family_ = build_family(self.problem_, int(self.modes), self.cond_limit, self.n_jobs)
        self.resonance_margin_ = float(np.min(1.0 / self.family_.cond))
        self.n_features_in_ = self.problem_.dim
        return self

    def transform(self, X):
        """Solution samples for forcing samples ``X``.

        The forcing is analysed up to ``min(modes, (M - 1) // 2)``; any content
        above that band is discarded. Real forcing on a real problem gives a
        real result.
        """
        check_is_fitted(self, "family_")
        arr, was_real = check_samples(X, self.problem_.dim)
        M = arr.shape[0]
        kmax = min(int(self.modes), (M - 1) // 2)
        f = analyze(SampledFunction(arr), kmax)
        u = f.map(lambda k, v: self.family_.N[self.family_._index[k]] @ v)
        out = synthesize(u, grid(M))
        if was_real and self.problem_.is_real:
            out = out.real
        return out

    def solve(self, f):
        """Solve for a :class:`TrigPolynomial` forcing; returns a ``PeriodicSolution``."""
        check_is_fitted(self, "family_")
        return spectral_solver.solve(self.problem_, f, max(int(self.modes), f.max_frequency),
                                     self.cond_limit, self.n_jobs)

    def score(self, X, y=None):
        """Negative max coefficient residual of the solution for forcing ``X``."""
        check_is_fitted(self, "family_")
        arr, _ = check_samples(X, self.problem_.dim)
        kmax = min(int(self.modes), (arr.shape[0] - 1) // 2)
        f = analyze(SampledFunction(arr), kmax)
        u = f.map(lambda k, v: self.family_.N[self.family_._index[k]] @ v)
        coeff_defect, _ = spectral_solver.residual(self.problem_, u, f, grid_check=False)
        return -coeff_defect


class FiniteDifferencePeriodicSolver(TransformerMixin, BaseEstimator):
    """Central-difference collocation of the same equation on the sample grid.

    The grid size is taken from ``X`` at transform time (even, at least 8).
    """

    def __init__(self, A=None, order=1, delay=None, cond_limit=DEFAULT_COND_LIMIT):
        self.A = A
        self.order = order
        self.delay = delay
        self.cond_limit = cond_limit

    def fit(self, X=None, y=None):
        self.problem_ = _problem(self.A, self.order, self.delay)
        if X is not None:
            check_samples(X, self.problem_.dim)
        self.n_features_in_ = self.problem_.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "problem_")
        arr, was_real = check_samples(X, self.problem_.dim)
        M = arr.shape[0]
        # band-limit the forcing to what the grid resolves
        f = analyze(SampledFunction(arr), (M - 1) // 2)
        fd = fd_oracle.solve_fd(self.problem_, f, M, self.cond_limit)
        out = fd.samples
        if was_real and self.problem_.is_real:
            out = out.real
        return out
