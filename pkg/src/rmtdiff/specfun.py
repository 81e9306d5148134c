"""Special functions and quadrature rules used by the closed-form evaluators.

Gauss rules are thin validated wrappers over ``numpy.polynomial``; the Bessel
and error functions come from ``scipy.special``.  The terminating Gauss
hypergeometric sum and the monic Gaussian-weight orthogonal polynomials are
implemented here directly since only small, exact cases are needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.special as sp

from .errors import DomainError

__all__ = [
    "QuadratureRule",
    "gauss_hermite",
    "gauss_laguerre",
    "gauss_legendre_mapped",
    "erfc",
    "log_erfc",
    "bessel_k0",
    "bessel_k0_log",
    "hyp2f1_terminating",
    "monic_pi_hermite",
    "cauchy_transform_f",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a Gauss-type rule.

    Attributes
    ----------
    family : str
        One of ``gauss-hermite``, ``gauss-laguerre``, ``gauss-legendre-mapped``.
    order : int
        Number of nodes.
    nodes, weights : np.ndarray
        Strictly increasing nodes and positive weights, both of length ``order``.
    """

    family: str
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if len(nodes) != self.order or len(weights) != self.order:
            raise DomainError("rule arrays must match the stated order")
        if self.order > 1 and not np.all(np.diff(nodes) > 0):
            raise DomainError("quadrature nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise DomainError("quadrature weights must be positive")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)


@lru_cache(maxsize=128)
def gauss_hermite(order: int) -> QuadratureRule:
    """Gauss-Hermite rule for the weight ``exp(-s**2)`` on the real line.

    Exact for polynomial integrands up to degree ``2*order - 1``.
    """
    if order < 1:
        raise DomainError("gauss_hermite order must be >= 1")
    nodes, weights = sp.roots_hermite(order)
    nodes, weights = _trim_underflow(nodes, weights)
    return QuadratureRule("gauss-hermite", len(nodes), nodes, weights)


@lru_cache(maxsize=128)
def gauss_laguerre(order: int) -> QuadratureRule:
    """Gauss-Laguerre rule for the weight ``exp(-t)`` on ``[0, inf)``.

    Orders above a few hundred are unreliable (node recurrence overflow);
    the evaluators here never need them.
    """
    if order < 1:
        raise DomainError("gauss_laguerre order must be >= 1")
    nodes, weights = sp.roots_laguerre(order)
    nodes, weights = _trim_underflow(nodes, weights)
    return QuadratureRule("gauss-laguerre", len(nodes), nodes, weights)


def _trim_underflow(nodes: np.ndarray, weights: np.ndarray):
    # extreme tail weights of high-order exponential-weight rules underflow
    # to exactly 0.0; those nodes contribute < 1e-300 and are dropped so the
    # retained weights stay strictly positive
    keep = weights > 0.0
    return nodes[keep], weights[keep]


@lru_cache(maxsize=32)
def _legendre_raw(order: int):
    nodes, weights = sp.roots_legendre(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_legendre_mapped(order: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Legendre rule mapped from ``[-1, 1]`` to ``[a, b]``."""
    if order < 1:
        raise DomainError("gauss_legendre_mapped order must be >= 1")
    if not b > a:
        raise DomainError("interval must satisfy b > a")
    nodes, weights = _legendre_raw(order)
    half = 0.5 * (b - a)
    return QuadratureRule(
        "gauss-legendre-mapped", order, half * nodes + 0.5 * (b + a), half * weights
    )


def erfc(x):
    """Complementary error function (vectorized)."""
    return sp.erfc(x)


def log_erfc(x):
    """log(erfc(x)), stable for large positive arguments via the scaled erfcx."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0.0, np.log(sp.erfcx(np.maximum(x, 0.0))) - x * x,
                   np.log(sp.erfc(np.minimum(x, 0.0))))
    return out if out.ndim else float(out)


def bessel_k0(x):
    """Modified Bessel function of the second kind, order zero, for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0):
        raise DomainError("bessel_k0 requires x > 0")
    out = sp.k0(x)
    return out if out.ndim else float(out)


def bessel_k0_log(x):
    """log(K0(x)); avoids underflow of K0 itself at large ``x``."""
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0):
        raise DomainError("bessel_k0_log requires x > 0")
    out = np.log(sp.k0e(x)) - x
    return out if out.ndim else float(out)


def hyp2f1_terminating(a: float, b: float, c: float, x):
    """Gauss hypergeometric series 2F1(a, b; c; x) for terminating parameters.

    Either ``a`` or ``b`` must be a nonpositive integer so the series is a
    finite sum, which is evaluated exactly (up to rounding).  ``c`` must not
    hit a nonpositive integer before the series terminates.
    """
    stops = []
    for v in (a, b):
        r = round(v)
        if abs(v - r) < 1e-9 and r <= 0:
            stops.append(int(-r))
    if not stops:
        raise DomainError("hyp2f1_terminating requires a or b to be a nonpositive integer")
    m = min(stops)
    for j in range(m):
        if abs(c + j) < 1e-12:
            raise DomainError("hyp2f1_terminating: c hits a nonpositive integer before termination")
    x = np.asarray(x)
    term = np.ones_like(x, dtype=np.result_type(x, float))
    total = term.copy()
    for j in range(m):
        term = term * ((a + j) * (b + j) / ((c + j) * (j + 1.0))) * x
        total = total + term
    return total if total.ndim else total[()]


def monic_pi_hermite(k: int, sigma2: float, z):
    """Monic orthogonal polynomial of degree ``k`` for the Gaussian weight
    ``exp(-s**2 / (2*sigma2))``, by the three-term recursion
    ``p[k+1] = z*p[k] - sigma2*k*p[k-1]``.
    """
    if k < 0:
        raise DomainError("degree must be nonnegative")
    z = np.asarray(z, dtype=np.complex128)
    prev = np.ones_like(z)
    if k == 0:
        return prev if prev.ndim else complex(prev[()])
    cur = z.copy()
    for j in range(1, k):
        prev, cur = cur, z * cur - sigma2 * j * prev
    return cur if cur.ndim else complex(cur[()])


def cauchy_transform_f(
    k: int,
    w: complex,
    tau: float,
    n: int,
    rtol: float = 1e-9,
    max_order: int = 1024,
) -> complex:
    """Cauchy-kernel integral of the Gaussian weight against the degree-k
    monic polynomial:  f_k(w) = int exp(-n*s**2/(2*tau)) * p_k(s) / (w - s) ds.

    Defined off the real axis only.  Gauss-Hermite order is doubled until the
    result is stable to ``rtol`` (capped at ``max_order``).
    """
    if w.imag == 0:
        raise DomainError("Im(w) must be nonzero")
    scale = np.sqrt(2.0 * tau / n)
    sigma2 = tau / n

    def value(order: int) -> complex:
        rule = gauss_hermite(order)
        s = scale * rule.nodes
        vals = monic_pi_hermite(k, sigma2, s) / (w - s)
        return scale * complex(rule.weights @ vals)

    order = 64
    prev = value(order)
    while order < max_order:
        order *= 2
        cur = value(order)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev
