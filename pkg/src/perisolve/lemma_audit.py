"""Finite numerical audits of multiplier-boundedness claims.

A sequence ``{M_k}`` is M-bounded (of order one) when both ``sup_k |M_k|`` and
``sup_k |k (M_{k+1} - M_k)|`` are finite. A computer can only look at finitely
many ``k``; every audit here sweeps ``|k| <= 64`` exactly, follows a geometric
ladder ``k = +-2^i`` up to the range bound, and reports how much the suprema move
when the range bound is halved. A sup whose value has stopped moving is the
numerical shadow of a finite supremum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .char_symbol import ProblemSpec, build_family_on, ik_power, seq_b, seq_c
from .exceptions import InvalidExponent, MissingFrequency, RangeTooSmall
from .periodic_fourier import TWO_PI, TrigPolynomial, lp_norm

EXACT_SWEEP = 64
STABILITY_TOL = 1e-3
IDENTITY_TOL = 1e-9


def ladder(K: int, start: int = 0) -> list[int]:
    """Audited frequencies: every ``start <= |k| <= min(K, 64)``, then ``+-2^i``, ``+-K/2``, ``+-K``."""
    ks = {k for k in range(-min(K, EXACT_SWEEP), min(K, EXACT_SWEEP) + 1) if abs(k) >= start}
    i = 0
    while 2 ** i <= K:
        if 2 ** i >= start:
            ks.update((2 ** i, -(2 ** i)))
        i += 1
    for edge in (K // 2, K):
        if edge >= start:
            ks.update((edge, -edge))
    return sorted(ks)


def relative_change(new: float, old: float) -> float:
    if new == old:
        return 0.0
    if old == 0.0:
        return math.inf
    return abs(new - old) / abs(old)


class OperatorSequence:
    """A sequence of matrices indexed by integers.

    Backed either by an explicit mapping or by a callable with an optional
    predicate describing which ``k`` it covers.
    """

    def __init__(self, label: str, func: Callable[[int], np.ndarray],
                 covers: Callable[[int], bool] | None = None):
        self.label = label
        self._func = func
        self._covers = covers or (lambda k: True)

    @classmethod
    def from_mapping(cls, label: str, values: Mapping[int, object]) -> "OperatorSequence":
        vals = {int(k): np.atleast_2d(np.asarray(v, dtype=complex)) for k, v in values.items()}
        shapes = {v.shape for v in vals.values()}
        if len(shapes) > 1:
            raise ValueError(f"inconsistent matrix shapes in sequence {label!r}: {shapes}")
        return cls(label, vals.__getitem__, vals.__contains__)

    @classmethod
    def constant(cls, label: str, mat) -> "OperatorSequence":
        mat = np.atleast_2d(np.asarray(mat, dtype=complex))
        return cls(label, lambda k: mat)

    def covers(self, k: int) -> bool:
        return bool(self._covers(int(k)))

    def __getitem__(self, k: int) -> np.ndarray:
        if not self.covers(k):
            raise MissingFrequency(k)
        return np.atleast_2d(np.asarray(self._func(int(k)), dtype=complex))

    def scaled(self, lam: complex) -> "OperatorSequence":
        return OperatorSequence(f"{lam}*{self.label}", lambda k: lam * self[k], self._covers)

    def then(self, other: "OperatorSequence") -> "OperatorSequence":
        """The product sequence ``other_k @ self_k`` (apply ``self`` first)."""
        return OperatorSequence(
            f"{other.label}*{self.label}",
            lambda k: other[k] @ self[k],
            lambda k: self.covers(k) and other.covers(k),
        )


@dataclass
class AuditRow:
    k: int
    value: float
    discrepancy: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"k": self.k, "value": self.value, "discrepancy": self.discrepancy}
        out.update(self.extra)
        return out


@dataclass
class AuditReport:
    label: str
    sup_norm: float = 0.0
    sup_diff: float = 0.0
    stability: float = 0.0
    rows: list[AuditRow] = field(default_factory=list)
    passed: bool = True
    details: dict = field(default_factory=dict)
    children: list["AuditReport"] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "sup_norm": _jsonable(self.sup_norm),
            "sup_diff": _jsonable(self.sup_diff),
            "stability": _jsonable(self.stability),
            "rows": [r.to_json() for r in self.rows],
            "pass": bool(self.passed),
        }
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out


def _jsonable(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def opnorm(mat) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(np.atleast_2d(mat), ord=2))


def _suprema(norms: Mapping[int, float], diffs: Mapping[int, float], K: int) -> tuple[float, float]:
    sn = max((v for k, v in norms.items() if abs(k) <= K), default=0.0)
    sd = max((v for k, v in diffs.items() if abs(k) <= K), default=0.0)
    return sn, sd


def m_bound_report(seq: OperatorSequence, K: int) -> AuditReport:
    """Suprema of ``|M_k|`` and ``|k (M_{k+1} - M_k)|`` over the audit ladder.

    ``stability`` is the larger relative change of the two suprema between
    ranges ``K/2`` and ``K``; the report passes when both suprema are finite and
    ``stability < 1e-3``.
    """
    if K < 4:
        raise RangeTooSmall(f"range bound must be at least 4, got {K}")
    ks = ladder(K)
    cache: dict[int, np.ndarray] = {}

    def get(k):
        if k not in cache:
            cache[k] = seq[k]
        return cache[k]

    norms, diffs, rows = {}, {}, []
    for k in ks:
        norms[k] = opnorm(get(k))
        diffs[k] = abs(k) * opnorm(get(k + 1) - get(k))
        rows.append(AuditRow(k, norms[k], diffs[k]))
    sn, sd = _suprema(norms, diffs, K)
    sn_half, sd_half = _suprema(norms, diffs, K // 2)
    stability = max(relative_change(sn, sn_half), relative_change(sd, sd_half))
    passed = math.isfinite(sn) and math.isfinite(sd) and stability < STABILITY_TOL
    return AuditReport(seq.label, sn, sd, stability, rows, passed,
                       details={"K": K, "sup_norm_half": sn_half, "sup_diff_half": sd_half})


def step1_audit(n: int, K: int) -> AuditReport:
    """Tabulate ``|k b_k|`` over ``1 <= |k| <= K``; stability compares ranges K/2 and K."""
    if K < 8:
        raise RangeTooSmall(f"step 1 audit needs K >= 8, got {K}")
    rows = [AuditRow(k, float(abs(k * seq_b(n, k)))) for k in ladder(K, start=1)]
    sup = max(r.value for r in rows)
    sup_half = max(r.value for r in rows if abs(r.k) <= K // 2)
    stability = relative_change(sup, sup_half)
    return AuditReport(f"step1 |k b_k| n={n}", sup, 0.0, stability, rows,
                       math.isfinite(sup) and stability < STABILITY_TOL,
                       details={"n": n, "K": K, "sup_half": sup_half})


def step2_audit(n: int, K: int = 64) -> AuditReport:
    """Compare ``c_k`` with ``(ik)^{2n} b_k`` frequency by frequency.

    Each row stores both sides and ``|lhs - rhs| / (1 + |lhs| + |rhs|)``. The
    report's ``passed`` flag records whether the two agree within 1e-9 on every
    audited k; disagreement is reported, never raised.
    """
    rows = []
    worst = 0.0
    for k in ladder(K, start=1):
        lhs = seq_c(n, k)
        rhs = ik_power([k], 2 * n)[0] * seq_b(n, k)
        disc = abs(lhs - rhs) / (1 + abs(lhs) + abs(rhs))
        worst = max(worst, disc)
        rows.append(AuditRow(k, float(abs(lhs - rhs)), float(disc),
                             {"lhs": [float(lhs.real), float(lhs.imag)],
                              "rhs": [float(rhs.real), float(rhs.imag)]}))
    holds = bool(worst <= IDENTITY_TOL)
    return AuditReport(f"step2 c_k vs (ik)^2n b_k n={n}", rows=rows, passed=holds,
                       details={"n": n, "K": K, "max_discrepancy": worst, "identity_holds": holds})


def step3_audit(p: ProblemSpec, K: int, cond_limit: float = 1e12,
                n_jobs: int | None = None) -> AuditReport:
    """M-bound reports for the N, S, T, P families plus the resolvent-difference check.

    The check compares ``k (N_{k+1} - N_k)`` with ``-k N_{k+1} (D_{k+1} - D_k) N_k``
    and allows a defect of ``1e-9 * cond^2``.
    """
    ks = ladder(K)
    needed = sorted(set(ks) | {k + 1 for k in ks})
    fam = build_family_on(p, needed, cond_limit, n_jobs)
    children = []
    for name in ("N", "S", "T", "P"):
        arr = getattr(fam, name)
        seq = OperatorSequence(f"{name}_k", lambda k, arr=arr: arr[fam._index[k]],
                               lambda k: k in fam)
        children.append(m_bound_report(seq, K))
    rows, worst, ok = [], 0.0, True
    for k in ks:
        a, b = fam[k], fam[k + 1]
        lhs = k * (b.N - a.N)
        rhs = -k * (b.N @ (b.D - a.D) @ a.N)
        defect = opnorm(lhs - rhs)
        cond = max(a.cond, b.cond)
        ok = ok and bool(defect <= IDENTITY_TOL * cond ** 2)
        worst = max(worst, defect)
        rows.append(AuditRow(k, opnorm(lhs), defect, {"cond": cond}))
    passed = ok and all(c.passed for c in children)
    return AuditReport(
        f"step3 n={p.n} dim={p.dim}",
        sup_norm=max(c.sup_norm for c in children),
        sup_diff=max(c.sup_diff for c in children),
        stability=max(c.stability for c in children),
        rows=rows, passed=passed, children=children,
        details={"K": K, "resolvent_identity_defect": worst, "resolvent_identity_ok": ok},
    )


def fourier_type_ratio(f: TrigPolynomial, r: float, M: int | None = None) -> float:
    """``|f_hat|_{l^r'} / |f|_{L^r(dt/2pi)}`` with ``1/r + 1/r' = 1``, for ``r`` in (1, 2]."""
    if not (1 < r <= 2):
        raise InvalidExponent(f"r must lie in (1, 2], got {r}")
    if not f.coeffs:
        raise InvalidExponent("the ratio is undefined for the zero polynomial")
    r_dual = r / (r - 1)
    mags = np.array([np.linalg.norm(v) for v in f.coeffs.values()])
    top = float(np.sum(mags ** r_dual) ** (1 / r_dual))
    bottom = lp_norm(f, r, M) / TWO_PI ** (1 / r)
    return top / bottom


def multiplier_apply(seq: OperatorSequence, f: TrigPolynomial) -> TrigPolynomial:
    """``u_hat(k) = M_k f_hat(k)`` for every frequency present in ``f``."""
    for k in f.frequencies:
        if not seq.covers(k):
            raise MissingFrequency(k)
    if not f.coeffs:
        return f
    return f.map(lambda k, v: seq[k] @ v)
