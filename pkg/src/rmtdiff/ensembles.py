"""Seeded samplers for the Gaussian matrix measures with an external source.

Five measures are supported, each centered at a fixed source matrix with a
width set by the diffusion time ``tau``:

* ``gue``        -- complex Hermitian, density ~ exp(-(n/(2*tau)) Tr (H-H0)^2)
* ``ginibre``    -- complex iid entries, density ~ exp(-(n/tau) Tr (X-X0)^+(X-X0))
* ``crossover``  -- real parts of entries diffuse with unit rate, imaginary
                    parts with rate alpha**2 (alpha in [0, 1])
* ``two-ginibre``-- an independent pair of ginibre matrices

Per-entry variances: gue entries carry E|G_ij|^2 = tau/n (diagonal real);
ginibre entries E|G_ij|^2 = tau/n; crossover entries split into
Var(Re) = tau/(2n) and Var(Im) = alpha^2 * tau/(2n).

All draws are reproducible: a draw is a pure function of (spec, seed,
stream id).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "EnsembleSpec",
    "RngStream",
    "sample_gue",
    "sample_ginibre",
    "sample_crossover",
    "sample_two_ginibre",
    "sample",
    "ou_reparametrize",
]

KINDS = ("gue", "ginibre", "crossover", "two-ginibre")


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream id) pair naming one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng((int(self.seed), int(self.stream_id)))


@dataclass(frozen=True, eq=False)
class EnsembleSpec:
    """Description of one diffusive Gaussian measure.

    ``source`` defaults to the zero matrix; ``source2`` is the second source
    matrix required by the ``two-ginibre`` kind; ``alpha`` is the crossover
    parameter, only meaningful for the ``crossover`` kind.
    """

    kind: str
    n: int
    tau: float
    source: np.ndarray | None = None
    source2: np.ndarray | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 1:
            raise DomainError("matrix size n must be >= 1")
        if not self.tau > 0:
            raise DomainError("tau must be > 0")
        src = self._coerce(self.source)
        object.__setattr__(self, "source", src)
        if self.kind == "two-ginibre":
            object.__setattr__(self, "source2", self._coerce(self.source2))
        elif self.source2 is not None:
            raise DomainError("source2 is only valid for the two-ginibre kind")
        if self.kind == "gue":
            if not np.allclose(src, src.conj().T, rtol=0.0, atol=1e-12):
                raise DomainError("gue source must be Hermitian")
        if self.kind == "crossover":
            if self.alpha is None or not 0.0 <= self.alpha <= 1.0:
                raise DomainError("crossover requires alpha in [0, 1]")
        elif self.alpha is not None:
            raise DomainError(f"alpha is only valid for the crossover kind, not {self.kind!r}")

    def _coerce(self, src) -> np.ndarray:
        if src is None:
            return np.zeros((self.n, self.n), dtype=np.complex128)
        a = np.asarray(src, dtype=np.complex128)
        if a.shape != (self.n, self.n):
            raise DimensionError(f"source must be {self.n}x{self.n}, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("source entries must be finite")
        return a


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


def _shape(n: int, size: int | None) -> tuple[int, ...]:
    return (n, n) if size is None else (size, n, n)


def sample_gue(spec: EnsembleSpec, rng, size: int | None = None) -> np.ndarray:
    """Draw ``H = H0 + G`` with ``G`` Hermitian Gaussian of entry variance tau/n.

    Every draw satisfies ``H == H^+`` exactly by construction.
    """
    if spec.kind != "gue":
        raise DomainError(f"sample_gue needs a gue spec, got {spec.kind!r}")
    g = _generator(rng)
    shape = _shape(spec.n, size)
    a = g.standard_normal(shape) + 1j * g.standard_normal(shape)
    a *= np.sqrt(spec.tau / (2.0 * spec.n))
    return spec.source + (a + a.conj().swapaxes(-1, -2)) / np.sqrt(2.0)


def sample_ginibre(spec: EnsembleSpec, rng, size: int | None = None) -> np.ndarray:
    """Draw ``X = X0 + G`` with iid complex Gaussian entries, E|G_ij|^2 = tau/n."""
    if spec.kind != "ginibre":
        raise DomainError(f"sample_ginibre needs a ginibre spec, got {spec.kind!r}")
    g = _generator(rng)
    shape = _shape(spec.n, size)
    a = g.standard_normal(shape) + 1j * g.standard_normal(shape)
    a *= np.sqrt(spec.tau / (2.0 * spec.n))
    return spec.source + a


def sample_crossover(spec: EnsembleSpec, rng, size: int | None = None) -> np.ndarray:
    """Draw ``X = X0 + G`` with Var(Re G_ij) = tau/(2n), Var(Im G_ij) = alpha^2 tau/(2n)."""
    if spec.kind != "crossover":
        raise DomainError(f"sample_crossover needs a crossover spec, got {spec.kind!r}")
    g = _generator(rng)
    shape = _shape(spec.n, size)
    scale = np.sqrt(spec.tau / (2.0 * spec.n))
    re = g.standard_normal(shape)
    im = g.standard_normal(shape)
    return spec.source + scale * re + 1j * (spec.alpha * scale) * im


def sample_two_ginibre(spec: EnsembleSpec, rng, size: int | None = None):
    """Draw an independent pair of ginibre matrices with their own sources."""
    if spec.kind != "two-ginibre":
        raise DomainError(f"sample_two_ginibre needs a two-ginibre spec, got {spec.kind!r}")
    g = _generator(rng)
    shape = _shape(spec.n, size)
    scale = np.sqrt(spec.tau / (2.0 * spec.n))
    a1 = (g.standard_normal(shape) + 1j * g.standard_normal(shape)) * scale
    a2 = (g.standard_normal(shape) + 1j * g.standard_normal(shape)) * scale
    return spec.source + a1, spec.source2 + a2


_SAMPLERS = {
    "gue": sample_gue,
    "ginibre": sample_ginibre,
    "crossover": sample_crossover,
    "two-ginibre": sample_two_ginibre,
}


def sample(spec: EnsembleSpec, rng, size: int | None = None):
    """Dispatch to the sampler matching ``spec.kind``."""
    return _SAMPLERS[spec.kind](spec, rng, size)


def ou_reparametrize(tau: float, source: np.ndarray):
    """Map (tau, source) so that plain heat flow realizes a diffusion in a
    harmonic well: returns ``((1 - exp(-2 tau))/2, source * exp(-tau))``.
    """
    if tau < 0:
        raise DomainError("tau must be >= 0")
    tau_eff = -np.expm1(-2.0 * tau) / 2.0
    return tau_eff, np.asarray(source, dtype=np.complex128) * np.exp(-tau)
