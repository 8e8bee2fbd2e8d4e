"""Independent reference evaluations used as test oracles.

Nothing here calls into the code paths it checks.
"""
import math

import numpy as np
import sympy
from scipy import integrate

I = sympy.I


def _C(n, p):
    return sympy.binomial(n, p)


def exact_seq_a(n, k):
    z = I * k
    total = sympy.Integer(n)
    total += sum((_C(j, p) * z ** (j + 1 - n - p) * I ** (p - 1)
                  for j in range(1, n) for p in range(1, j + 1)), sympy.Integer(0))
    total += sum((_C(n, p) * z ** (1 - p) * I ** (p - 1) for p in range(2, n + 1)), sympy.Integer(0))
    return complex(sympy.expand(total))


def exact_seq_b(n, k):
    z = I * k
    first = sum((_C(n, p) * z ** (-p) * I ** p for p in range(1, n + 1)), sympy.Integer(0))
    tail = sum((z ** (j - n) for j in range(1, n)), sympy.Integer(0))
    double = sum((_C(j, p) * z ** (j - p - n) * I ** p
                  for j in range(1, n) for p in range(0, j + 1)), sympy.Integer(0))
    return complex(sympy.expand(2 * first + tail + double + first * tail))


def exact_seq_c(n, k):
    z = I * k
    a = sum((_C(n, p) * z ** (n - p) * I ** p for p in range(n + 1)), sympy.Integer(0))
    s = sum((z ** j for j in range(1, n + 1)), sympy.Integer(0))
    d = sum((_C(j, p) * z ** (j - p) * I ** p
             for j in range(1, n + 1) for p in range(j + 1)), sympy.Integer(0))
    return complex(sympy.expand(a * s - z ** n * d))


def factored_seq_c(n, k):
    """(ik+i)^n sum_j (ik)^j - (ik)^n sum_j (ik+i)^j, evaluated exactly."""
    z, w = I * k, I * (k + 1)
    return complex(sympy.expand(w ** n * sum(z ** j for j in range(1, n + 1))
                                - z ** n * sum(w ** j for j in range(1, n + 1))))


def quad_lp_norm(fn, p):
    """(integral_0^2pi |fn(t)|^p dt)^(1/p) by adaptive quadrature."""
    val, _ = integrate.quad(lambda t: np.linalg.norm(np.atleast_1d(fn(t))) ** p,
                            0, 2 * math.pi, limit=400, epsabs=1e-13, epsrel=1e-13)
    return val ** (1 / p)


def hat(j, t):
    """Closed-form dyadic hat, written independently of the package."""
    t = abs(t)
    if j == 0:
        if t <= 1:
            return 1.0
        return max(0.0, 1.0 - math.log2(t)) if t <= 2 else 0.0
    if t == 0:
        return 0.0
    return max(0.0, 1.0 - abs(math.log2(t) - j))
