"""Streaming Monte Carlo estimation of complex-valued ensemble averages.

Estimates track the real and imaginary components separately with a
single-pass pooled-moments update, so partial results from independent
streams can be merged exactly.  Results are a pure function of
``(seed, streams, samples)``: sample counts are split deterministically
across stream ids, each stream uses its own generator, and chunks have a
fixed size, so reruns are bitwise identical regardless of worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import ensembles
from .errors import DomainError

__all__ = ["McEstimate", "RunningMoments", "estimate", "estimate_from_sampler", "merge", "z_score"]

_CHUNK = 16384


@dataclass(frozen=True)
class McEstimate:
    """Mean and componentwise standard error of a complex observable."""

    mean: complex
    stderr: tuple[float, float]
    count: int
    seed: int
    streams: int = 1

    def as_dict(self) -> dict:
        return {
            "mean": [self.mean.real, self.mean.imag],
            "stderr": list(self.stderr),
            "count": self.count,
            "seed": self.seed,
            "streams": self.streams,
        }


class RunningMoments:
    """Single-pass mean/M2 accumulator over complex samples, mergeable."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0 + 0.0j
        self.m2_re = 0.0
        self.m2_im = 0.0

    def update(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.complex128).ravel()
        nb = values.size
        if nb == 0:
            return
        mean_b = values.mean()
        m2b_re = float(((values.real - mean_b.real) ** 2).sum())
        m2b_im = float(((values.imag - mean_b.imag) ** 2).sum())
        self._combine(nb, mean_b, m2b_re, m2b_im)

    def merge_with(self, other: "RunningMoments") -> None:
        self._combine(other.count, other.mean, other.m2_re, other.m2_im)

    def _combine(self, nb: int, mean_b: complex, m2b_re: float, m2b_im: float) -> None:
        if nb == 0:
            return
        na = self.count
        nt = na + nb
        delta = mean_b - self.mean
        self.mean = self.mean + delta * (nb / nt)
        self.m2_re += m2b_re + delta.real**2 * na * nb / nt
        self.m2_im += m2b_im + delta.imag**2 * na * nb / nt
        self.count = nt

    def to_estimate(self, seed: int, streams: int) -> McEstimate:
        if self.count < 2:
            raise DomainError("at least 2 samples are required for a standard error")
        norm = self.count * (self.count - 1)
        return McEstimate(
            mean=complex(self.mean),
            stderr=(float(np.sqrt(self.m2_re / norm)), float(np.sqrt(self.m2_im / norm))),
            count=self.count,
            seed=seed,
            streams=streams,
        )


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("RMTDIFF_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _split(samples: int, streams: int) -> list[int]:
    base, rem = divmod(samples, streams)
    return [base + (1 if s < rem else 0) for s in range(streams)]


def estimate_from_sampler(
    observable,
    sampler,
    samples: int,
    seed: int,
    streams: int = 4,
    workers: int | None = None,
    chunk: int = _CHUNK,
) -> McEstimate:
    """Estimate the mean of ``observable(draws)`` over ``samples`` iid draws.

    ``sampler(generator, size)`` must return a batch of draws (an array or a
    tuple of arrays with a leading ``size`` axis); ``observable`` must map
    that batch to a 1-d array of complex values.
    """
    if samples < 2:
        raise DomainError("samples must be >= 2")
    streams = max(1, min(streams, samples // 2))
    plan = _split(samples, streams)

    def run_stream(stream_id: int) -> RunningMoments:
        gen = ensembles.RngStream(seed, stream_id).generator()
        acc = RunningMoments()
        left = plan[stream_id]
        while left > 0:
            size = min(chunk, left)
            draws = sampler(gen, size)
            acc.update(observable(draws))
            left -= size
        return acc

    nworkers = min(_worker_count(workers), streams)
    if nworkers > 1:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            accs = list(pool.map(run_stream, range(streams)))
    else:
        accs = [run_stream(s) for s in range(streams)]
    total = RunningMoments()
    for acc in accs:  # merged in stream order: deterministic for fixed streams
        total.merge_with(acc)
    return total.to_estimate(seed, streams)


def estimate(
    observable,
    spec: ensembles.EnsembleSpec,
    samples: int,
    seed: int,
    streams: int = 4,
    workers: int | None = None,
    chunk: int = _CHUNK,
) -> McEstimate:
    """Monte Carlo average of ``observable`` over draws from ``spec``.

    ``observable`` receives the batched output of the ensemble sampler (a
    stacked array, or a tuple of two stacked arrays for ``two-ginibre``).
    """
    def sampler(gen, size):
        return ensembles.sample(spec, gen, size)

    return estimate_from_sampler(observable, sampler, samples, seed, streams, workers, chunk)


def merge(a: McEstimate, b: McEstimate) -> McEstimate:
    """Pool two estimates of the same observable (associative, commutative)."""
    if a.count == 0:
        return b
    if b.count == 0:
        return a
    acc = RunningMoments()
    for est in (a, b):
        norm = est.count * (est.count - 1)
        part = RunningMoments()
        part.count = est.count
        part.mean = est.mean
        part.m2_re = est.stderr[0] ** 2 * norm
        part.m2_im = est.stderr[1] ** 2 * norm
        acc.merge_with(part)
    return acc.to_estimate(a.seed, a.streams + b.streams)


def z_score(value, est: McEstimate, other: McEstimate | None = None) -> float:
    """Componentwise separation of ``value`` (or a second estimate) from ``est``.

    Returns the max over real/imaginary parts of |difference| / stderr, with
    stderr combined in quadrature when both sides are stochastic.  A zero
    stderr with a nonzero difference yields ``inf``.
    """
    value = complex(value) if other is None else complex(other.mean)
    se_re, se_im = est.stderr
    if other is not None:
        se_re = float(np.hypot(se_re, other.stderr[0]))
        se_im = float(np.hypot(se_im, other.stderr[1]))
    zs = []
    for diff, se in ((value.real - est.mean.real, se_re), (value.imag - est.mean.imag, se_im)):
        if se == 0.0:
            zs.append(0.0 if diff == 0.0 else np.inf)
        else:
            zs.append(abs(diff) / se)
    return float(max(zs))
