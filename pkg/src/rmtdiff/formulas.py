"""Low-dimensional integral representations of the averaged determinants.

Each evaluator here computes, by deterministic quadrature (or Monte Carlo in
parameter space where the dimension makes quadrature impractical), the same
ensemble average that the ``montecarlo`` module estimates by sampling
matrices.  The two routes are compared by the ``verify`` module.

Conventions fixed once for the whole module:

* Gaussian integrals over the real line are reduced to the weight
  ``exp(-s**2)`` and evaluated by Gauss-Hermite rules.
* Integrals of radially invariant functions of a complex Gaussian variable
  ``b`` with ``E|b|^2 = var`` use the substitution ``t = |b|^2 / var``,
  giving a Gauss-Laguerre rule times a uniform angle average.
* Large-power radial integrands are handled entirely in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from . import montecarlo, observables
from .errors import DomainError
from .specfun import (
    bessel_k0,
    gauss_hermite,
    gauss_laguerre,
    gauss_legendre_mapped,
    hyp2f1_terminating,
    log_erfc,
    monic_pi_hermite,
    cauchy_transform_f,
)

__all__ = [
    "MultiIndex",
    "RatioResult",
    "DualityReport",
    "pi_poly",
    "theta_fun",
    "ratio_average",
    "ratio_correction_sum",
    "gue_ratio_reduction",
    "duality_rhs",
    "duality_check",
    "correlated_average",
    "forrester_rains_reduction",
    "product2_average",
    "product2_reduced",
    "crossover_average",
    "crossover_measure_norm",
    "crossover_average_log",
    "crossover_finite_curve",
    "crossover_bump",
    "crossover_bump_log",
    "crossover_bump_curve",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class MultiIndex:
    """Factor multiplicities over the source eigenvalues.

    ``sources`` are the (real) eigenvalues of the diagonal source matrix and
    ``multiplicities[i]`` counts how many times factor ``i`` appears in the
    product inside the integrand.
    """

    sources: np.ndarray
    multiplicities: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.sources, dtype=float)
        mul = np.asarray(self.multiplicities, dtype=int)
        if src.ndim != 1 or mul.shape != src.shape:
            raise DomainError("sources and multiplicities must be 1-d and equally long")
        if np.any(mul < 0):
            raise DomainError("multiplicities must be nonnegative")
        src.flags.writeable = False
        mul.flags.writeable = False
        object.__setattr__(self, "sources", src)
        object.__setattr__(self, "multiplicities", mul)

    @classmethod
    def ones(cls, sources) -> "MultiIndex":
        sources = np.asarray(sources, dtype=float)
        return cls(sources, np.ones(len(sources), dtype=int))

    def drop(self, i: int) -> "MultiIndex":
        mul = self.multiplicities.copy()
        mul[i] = 0
        return MultiIndex(self.sources, mul)

    def double(self, i: int) -> "MultiIndex":
        mul = self.multiplicities.copy()
        mul[i] = 2
        return MultiIndex(self.sources, mul)

    @property
    def degree(self) -> int:
        return int(self.multiplicities.sum())


@dataclass(frozen=True)
class RatioResult:
    """Value of the averaged ratio together with its two building pieces.

    ``value == pieces[0] - (tau/n) * pieces[1]`` up to rounding, where
    ``pieces[0]`` is the leading polynomial-times-inverse term and
    ``pieces[1]`` the correction sum.
    """

    value: complex
    pieces: tuple[complex, complex]
    quad_order: int


def pi_poly(z: complex, idx: MultiIndex, tau: float, n: int) -> complex:
    """Gaussian heat average of the source-factor polynomial.

    Evaluates sqrt(n/(2 pi tau)) * int du exp(-n (u - i z)^2 / (2 tau))
    * prod_i (-i u - h_i)^{m_i} along the shifted contour ``u = i z + s``,
    where the integrand is a polynomial in real ``s`` against a Gaussian, so
    a Gauss-Hermite rule of sufficient order is exact.
    """
    scale = math.sqrt(2.0 * tau / n)
    order = max(16, idx.degree // 2 + 2)
    rule = gauss_hermite(order)
    pts = z - 1j * scale * rule.nodes
    acc = np.ones_like(pts)
    for h, m in zip(idx.sources, idx.multiplicities):
        if m:
            acc = acc * (pts - h) ** int(m)
    return complex(rule.weights @ acc) / _SQRT_PI


def _theta(
    w: complex,
    idx: MultiIndex,
    tau: float,
    n: int,
    quad_order: int | None = None,
    rtol: float = 1e-9,
    max_order: int = 1024,
) -> tuple[complex, int]:
    if complex(w).imag == 0:
        raise DomainError("Im(w) must be nonzero")
    scale = math.sqrt(2.0 * tau / n)

    def value(order: int) -> complex:
        rule = gauss_hermite(order)
        pts = w + scale * rule.nodes
        acc = np.ones_like(pts)
        for h, m in zip(idx.sources, idx.multiplicities):
            if m:
                acc = acc * (pts - h) ** (-int(m))
        return complex(rule.weights @ acc) / _SQRT_PI

    if quad_order is not None:
        return value(quad_order), quad_order
    order = 64
    prev = value(order)
    while order < max_order:
        order *= 2
        cur = value(order)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur, order
        prev = cur
    return prev, order


def theta_fun(w: complex, idx: MultiIndex, tau: float, n: int,
              quad_order: int | None = None) -> complex:
    """Gaussian heat average of the inverse source factors.

    Evaluates sqrt(n/(2 pi tau)) * int dq exp(-n (q - w)^2 / (2 tau))
    * prod_i (q - h_i)^{-m_i} along the horizontal contour through ``w``
    (``q = w + s`` with real ``s``), which avoids the poles at the real
    sources whenever ``Im(w) != 0``.  Quadrature order is doubled until the
    value is stable to 1e-9 relative (capped at 1024).
    """
    value, _ = _theta(w, idx, tau, n, quad_order)
    return value


def ratio_average(z: complex, w: complex, sources, tau: float,
                  quad_order: int | None = None) -> RatioResult:
    """Averaged ratio of characteristic polynomials over the Hermitian
    external-source measure with diagonal source eigenvalues ``sources``.

    value = pi(z) * theta(w) - (tau/n) * sum_i pi_without_i(z) * theta_double_i(w)

    where dropping factor ``i`` from the polynomial term and doubling it in
    the inverse term implements the correction coming from the coupled heat
    system of the extended (super-)determinant.
    """
    sources = np.atleast_1d(np.asarray(sources, dtype=float))
    n = len(sources)
    base = MultiIndex.ones(sources)
    lead_th, used = _theta(w, base, tau, n, quad_order)
    lead = pi_poly(z, base, tau, n) * lead_th
    corr = 0.0 + 0.0j
    for i in range(n):
        th, o = _theta(w, base.double(i), tau, n, quad_order)
        used = max(used, o)
        corr += pi_poly(z, base.drop(i), tau, n) * th
    value = lead - (tau / n) * corr
    return RatioResult(value=value, pieces=(lead, corr), quad_order=used)


def ratio_correction_sum(z: complex, w: complex, sources, tau: float,
                         quad_order: int | None = None) -> complex:
    """The correction sum alone (the inhomogeneity of the ratio heat system)."""
    return ratio_average(z, w, sources, tau, quad_order).pieces[1]


def gue_ratio_reduction(z: complex, w: complex, n: int, tau: float) -> complex:
    """Null-source reduction of the averaged ratio in terms of the monic
    Gaussian orthogonal polynomials and their Cauchy transforms:

        g[n-1] * p_n(z) * f[n-1](w) - tau * g[n] * f[n](w) * p[n-1](z)

    with g[k] = (1/k!) (n/tau)^k sqrt(n/(2 pi tau)).
    """
    if complex(w).imag == 0:
        raise DomainError("Im(w) must be nonzero")
    sigma2 = tau / n

    def gamma(k: int) -> float:
        return (n / tau) ** k / math.factorial(k) * math.sqrt(n / (2.0 * math.pi * tau))

    pn = monic_pi_hermite(n, sigma2, z)
    pn1 = monic_pi_hermite(n - 1, sigma2, z)
    fn = cauchy_transform_f(n, w, tau, n)
    fn1 = cauchy_transform_f(n - 1, w, tau, n)
    return gamma(n - 1) * pn * fn1 - tau * gamma(n) * fn * pn1


def _disk_average(f, var: float, radial_order: int, angle_start: int,
                  rtol: float = 1e-9, max_angles: int = 4096) -> complex:
    """E[f(b)] for b complex Gaussian with E|b|^2 = var.

    Radial direction by Gauss-Laguerre after t = |b|^2/var (exact once the
    angle-averaged integrand is polynomial in t); uniform angle grid doubled
    until stable to ``rtol``.
    """
    rule = gauss_laguerre(radial_order)
    radii = np.sqrt(var * rule.nodes)

    def value(m: int) -> complex:
        phi = 2.0 * np.pi * np.arange(m) / m
        b = radii[:, None] * np.exp(1j * phi)[None, :]
        vals = f(b.ravel()).reshape(len(radii), m).mean(axis=1)
        return complex(rule.weights @ vals)

    m = angle_start
    prev = value(m)
    while m < max_angles:
        m *= 2
        cur = value(m)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


@dataclass(frozen=True)
class DualityReport:
    """Two-route comparison of a product average."""

    lhs: montecarlo.McEstimate
    rhs: object  # complex or McEstimate
    z_score: float
    analytic: complex | None = None


def duality_rhs(zs, x0, tau: float, samples: int | None = None, seed: int = 0,
                streams: int = 4):
    """Parameter-space side of the product-average duality.

    For ``k = 1`` the two-real-dimensional Gaussian integral over the coupling
    scalar is evaluated deterministically (radial Gauss-Laguerre times a
    uniform angle grid).  For ``k >= 2`` it is estimated by Monte Carlo over
    a k x k complex Gaussian coupling matrix with E|B_ij|^2 = tau/n, and an
    ``McEstimate`` is returned instead of a complex number.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    k = len(zs)
    x0 = np.asarray(x0, dtype=np.complex128)
    n = x0.shape[-1]
    var = tau / n
    if k == 1:
        def f(b):
            return observables.keacp_det(zs, b[:, None, None], x0)

        return _disk_average(f, var, radial_order=max(64, n + 2),
                             angle_start=max(8, n + 2))
    if samples is None:
        raise DomainError("k >= 2 requires a Monte Carlo sample count")
    scale = math.sqrt(var / 2.0)

    def sampler(gen, size):
        return (gen.standard_normal((size, k, k)) + 1j * gen.standard_normal((size, k, k))) * scale

    def observable(b):
        return observables.keacp_det(zs, b, x0)

    return montecarlo.estimate_from_sampler(observable, sampler, samples, seed, streams)


def duality_check(zs, x0, tau: float, samples: int, seed: int = 0,
                  streams: int = 4) -> DualityReport:
    """Compare the matrix-space and parameter-space sides of the duality.

    The left side is a Monte Carlo average of prod_i |det(z_i - X)|^2 over
    the non-Hermitian external-source measure; the right side comes from
    ``duality_rhs``.  The z-score combines the standard errors of whichever
    sides are stochastic.
    """
    from . import ensembles

    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    x0 = np.asarray(x0, dtype=np.complex128)
    n = x0.shape[-1]
    spec = ensembles.EnsembleSpec("ginibre", n, tau, source=x0)
    eye = np.eye(n, dtype=np.complex128)

    def observable(x):
        acc = np.ones(x.shape[0], dtype=np.complex128)
        for z in zs:
            d = np.linalg.det(z * eye - x)
            acc = acc * (d * np.conj(d))
        return acc

    lhs = montecarlo.estimate(observable, spec, samples, seed, streams)
    rhs = duality_rhs(zs, x0, tau, samples=samples, seed=seed + 1, streams=streams)
    if isinstance(rhs, montecarlo.McEstimate):
        z = montecarlo.z_score(None, lhs, rhs)
    else:
        z = montecarlo.z_score(rhs, lhs)
    analytic = None
    if len(zs) == 1 and n == 1:
        analytic = abs(complex(zs[0]) - complex(x0[0, 0])) ** 2 + tau
    return DualityReport(lhs=lhs, rhs=rhs, z_score=z, analytic=analytic)


def correlated_average(z: complex, x0, gamma, omega, tau: float) -> complex:
    """Gaussian parameter-space average of the correlation-deformed block
    determinant: E over u ~ CN(0, tau/n) of the deformed determinant at u.
    """
    x0 = np.asarray(x0, dtype=np.complex128)
    n = x0.shape[-1]

    def f(u):
        return observables.correlated_det(z, x0, gamma, omega, u)

    return _disk_average(f, tau / n, radial_order=max(64, n + 2),
                         angle_start=max(8, n + 2))


def forrester_rains_reduction(z: complex, gamma, omega, tau: float, n: int) -> float:
    """Null-source radial form of the correlated average:

        (2n/tau) int_0^inf dr r exp(-n r^2 / tau) prod_i (|z|^2 + r^2 / (g_i o_i)^2)

    evaluated exactly by Gauss-Laguerre after t = n r^2 / tau.
    """
    gamma = np.asarray(gamma, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if not (np.all(gamma > 0) and np.all(omega > 0)):
        raise DomainError("gamma and omega must be strictly positive")
    rule = gauss_laguerre(max(64, n + 2))
    q = abs(complex(z)) ** 2
    coeff = (tau / n) / (gamma * omega) ** 2
    vals = np.prod(q + rule.nodes[:, None] * coeff[None, :], axis=1)
    return float(rule.weights @ vals)


def product2_average(z: complex, x10, x20, tau: float,
                     samples: int | None = None, seed: int = 0,
                     streams: int = 4, method: str | None = None):
    """Parameter-space average of the linearized two-matrix product block
    determinant: E over independent v, w ~ CN(0, tau/n) at u = 1.

    ``method="mc"`` (default when ``samples`` is given) returns an
    ``McEstimate``; ``method="quad"`` evaluates the 4-real-dimensional
    integral by an exact tensor rule (radial Gauss-Laguerre times angle
    grids), practical for small n.
    """
    x10 = np.asarray(x10, dtype=np.complex128)
    x20 = np.asarray(x20, dtype=np.complex128)
    n = x10.shape[-1]
    var = tau / n
    if method is None:
        method = "mc" if samples is not None else "quad"
    if method == "quad":
        rule = gauss_laguerre(max(64, n + 2))
        m = max(4, n + 2)
        radii = np.sqrt(var * rule.nodes)

        def value(m: int) -> complex:
            phi = 2.0 * np.pi * np.arange(m) / m
            pts = (radii[:, None] * np.exp(1j * phi)[None, :]).ravel()
            vg, wg = np.meshgrid(pts, pts, indexing="ij")
            vals = observables.product2_det(z, x10, x20, 1.0, vg.ravel(), wg.ravel())
            vals = vals.reshape(len(pts), len(radii), m).mean(axis=2)
            vals = vals.reshape(len(radii), m, len(radii)).mean(axis=1)
            return complex(rule.weights @ vals @ rule.weights)

        prev = value(m)
        cur = value(2 * m)
        if abs(cur - prev) > 1e-9 * max(abs(cur), 1e-300):
            cur = value(4 * m)
        return cur
    if method != "mc":
        raise DomainError("method must be 'mc' or 'quad'")
    if samples is None:
        raise DomainError("Monte Carlo evaluation requires a sample count")
    scale = math.sqrt(var / 2.0)

    def sampler(gen, size):
        v = (gen.standard_normal(size) + 1j * gen.standard_normal(size)) * scale
        w = (gen.standard_normal(size) + 1j * gen.standard_normal(size)) * scale
        return v, w

    def observable(draw):
        v, w = draw
        return observables.product2_det(z, x10, x20, 1.0, v, w)

    return montecarlo.estimate_from_sampler(observable, sampler, samples, seed, streams)


def product2_reduced(z: complex, n: int, tau: float, form: str = "besselk0-1d") -> float:
    """Null-source reduced representations of the two-matrix product average.

    ``hyp2f1-2d``: double radial integral with the terminating Gauss
    hypergeometric kernel, exact under a tensor Gauss-Laguerre rule.
    ``besselk0-1d``: single radial integral against t*K0, evaluated by
    adaptive Gauss-Kronrod quadrature (the K0 endpoint is logarithmic, which
    adaptive subdivision handles well).  The two forms agree to ~1e-6.
    """
    q = abs(complex(z)) ** 2

    def kernel(s):
        # (q + s)^n * 2F1((1-n)/2, -n/2; 1; 4 q s / (q + s)^2): polynomial in s
        s = np.asarray(s, dtype=float)
        base = q + s
        arg = np.divide(4.0 * q * s, base**2, out=np.zeros_like(base), where=base != 0)
        return base**n * hyp2f1_terminating((1 - n) / 2.0, -n / 2.0, 1.0, arg)

    if form == "hyp2f1-2d":
        rule = gauss_laguerre(max(64, n + 2))
        tu = np.outer(rule.nodes, rule.nodes) * (tau / n) ** 2
        vals = kernel(tu)
        return float(rule.weights @ vals @ rule.weights)
    if form == "besselk0-1d":
        c = tau / (2.0 * n)

        def integrand(u):
            return u * bessel_k0(u) * kernel((c * u) ** 2)

        upper = 80.0 + 10.0 * n + 2.0 * math.log1p(q)
        val, _ = scipy.integrate.quad(integrand, 0.0, upper, limit=400, epsabs=0.0, epsrel=1e-11)
        return float(val)
    raise DomainError("form must be 'hyp2f1-2d' or 'besselk0-1d'")


def _crossover_rate(alpha: float, tau: float, n: int) -> float:
    return 2.0 * n / (tau * (1.0 + alpha * alpha))


def crossover_average(z: complex, x0, alpha: float, tau: float,
                      prefactor: str = "normalized") -> float:
    """Radial average of the crossover block determinant:

        c * int_0^inf dr r exp(-2 n r^2 / (tau (1 + alpha^2))) * det_block(z, x0, r)

    The block determinant is radially invariant in its coupling argument for
    every source, so the angle integral is trivial.  The default prefactor
    ``c = 4n / (tau (1 + alpha^2))`` normalizes the radial measure for every
    alpha; ``prefactor="fixed-2n"`` selects the unnormalized ``c = 2n/tau``
    variant for comparison (it only agrees at alpha = 1).
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    x0 = np.asarray(x0, dtype=np.complex128)
    n = x0.shape[-1]
    rate = _crossover_rate(alpha, tau, n)
    rule = gauss_laguerre(max(64, n + 2))
    r = np.sqrt(rule.nodes / rate)
    vals = observables.crossover_det(z, x0, r)
    out = float((rule.weights @ vals).real)
    if prefactor == "fixed-2n":
        out *= (1.0 + alpha * alpha) / 2.0
    elif prefactor != "normalized":
        raise DomainError("prefactor must be 'normalized' or 'fixed-2n'")
    return out


def crossover_measure_norm(alpha: float, tau: float, n: int) -> float:
    """The crossover radial measure applied to the unit integrand (exactly 1
    for the normalized prefactor, for every alpha)."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    rule = gauss_laguerre(max(64, n + 2))
    return float(rule.weights.sum())


def crossover_average_log(z: complex, alpha: float, tau: float, n: int,
                          rtol: float = 1e-10, max_order: int = 8192) -> float:
    """log of the null-source crossover average, stable for very large n.

    The radial integrand exp(-c t) (|z|^2 + t)^n (t = r^2) is integrated on a
    window around its log-peak with mapped Gauss-Legendre rules, summing in
    the log domain; the order is doubled until the log value is stable.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    q = abs(complex(z)) ** 2
    c = _crossover_rate(alpha, tau, n)
    t_peak = max(n / c - q, 0.0)
    sigma = math.sqrt(n) / c
    upper = t_peak + 30.0 * sigma

    def log_value(order: int) -> float:
        rule = gauss_legendre_mapped(order, 0.0, upper)
        t = rule.nodes
        logs = np.log(rule.weights) - c * t + n * np.log(q + t)
        peak = logs.max()
        return float(peak + np.log(np.exp(logs - peak).sum()) + math.log(c))

    order = 256
    prev = log_value(order)
    while order < max_order:
        order *= 2
        cur = log_value(order)
        if abs(cur - prev) <= rtol * max(abs(cur), 1.0):
            return cur
        prev = cur
    return prev


def crossover_finite_curve(etas, a: float, tau: float, n: int) -> np.ndarray:
    """Finite-size profile of the near-real-axis bump, normalized at eta = 0.

    With the crossover rate scaled as ``alpha = a * n**-0.25``, the average
    characteristic polynomial is evaluated on the path
    ``|z|^2 = tau/2 + eta^2 / sqrt(n)`` (the transition window of its radial
    profile); the smooth exponential background ``exp(2 n |z|^2 / tau)`` is
    divided out and the curve is normalized at eta = 0, all in log domain.
    """
    etas = np.asarray(etas, dtype=float)
    alpha = a * n ** -0.25
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("a * n**-0.25 must lie in [0, 1]")

    def log_curve(eta: float) -> float:
        q = tau / 2.0 + eta * eta / math.sqrt(n)
        zq = 1j * math.sqrt(q)
        return crossover_average_log(zq, alpha, tau, n) - 2.0 * n * q / tau

    base = log_curve(0.0)
    return np.exp(np.array([log_curve(e) for e in etas]) - base)


def crossover_bump_log(eta: float, a: float, tau: float) -> float:
    """log of the large-size bump profile near the real axis."""
    arg = math.sqrt(2.0) * eta * eta / tau - a * a / math.sqrt(2.0)
    return -(a**4) / 2.0 - 2.0 * a * a * eta * eta / tau + float(log_erfc(arg))


def crossover_bump(eta: float, a: float, tau: float) -> float:
    """Asymptotic bump profile e^{-a^4/2} e^{-2 a^2 eta^2 / tau}
    erfc(sqrt(2) eta^2 / tau - a^2 / sqrt(2)), up to an overall constant."""
    return math.exp(crossover_bump_log(eta, a, tau))


def crossover_bump_curve(etas, a: float, tau: float) -> np.ndarray:
    """Asymptotic bump profile on a grid, normalized at eta = 0."""
    etas = np.asarray(etas, dtype=float)
    base = crossover_bump_log(0.0, a, tau)
    return np.exp(np.array([crossover_bump_log(e, a, tau) for e in etas]) - base)
