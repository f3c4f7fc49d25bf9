"""Reproducible Monte Carlo estimation of triangle-class probabilities.

A run is split into shards of ``shard_size`` triples.  Shard ``i`` draws all
of its randomness from a substream seeded by ``(master_seed, i)``, so the
class counts are bit-identical for a fixed (sampler, samples, seed) no
matter how many workers process the shards.  Reduction is exact integer
addition and therefore order-independent.

Any object with a ``dim`` attribute and a ``sample(rng, n) -> (n, dim)``
method can be estimated; the distribution constructions in
:mod:`obtri.constructions` all qualify.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from obtri.geometry import DEFAULT_TOL, TriangleClass, classify_batch
from obtri.specfun import norm_ppf

DEFAULT_SHARD_SIZE = 1 << 16


class SamplerError(RuntimeError):
    """A sampler failed while producing points; records where."""

    def __init__(self, message: str, *, shard: int, sample_offset: int):
        super().__init__(message)
        self.shard = shard
        self.sample_offset = sample_offset


@dataclass(frozen=True)
class SeedPolicy:
    """Substream-per-shard seeding: sample i belongs to shard i // shard_size."""

    master_seed: int
    shard_size: int = DEFAULT_SHARD_SIZE

    def __post_init__(self):
        if self.shard_size < 1:
            raise ValueError(f"shard_size must be >= 1, got {self.shard_size}")
        if not (0 <= self.master_seed < 2 ** 64):
            raise ValueError("master seed must fit in 64 bits")

    def rng_for_shard(self, shard: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence((self.master_seed, shard))))


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not (0 <= successes <= trials):
        raise ValueError(f"successes must be in [0, trials], got {successes}/{trials}")
    if not (0.0 < confidence < 1.0):
        raise ValueError(f"confidence must be in (0, 1), got {confidence!r}")
    z = norm_ppf(0.5 + confidence / 2.0)
    n = float(trials)
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    # The score interval hits the boundary exactly at p = 0 and p = 1;
    # keep it there against rounding.
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo result for one distribution.

    ``p_hat`` is the obtuse fraction; ``ci95`` is its Wilson interval.
    """

    samples: int
    counts: dict
    p_hat: float
    ci95: tuple[float, float]
    seed: int
    shard_size: int
    tol: float
    spec: dict | None = None

    def __post_init__(self):
        total = sum(self.counts.values())
        if total != self.samples:
            raise ValueError(f"class counts sum to {total}, expected {self.samples}")

    def count(self, cls: TriangleClass) -> int:
        return self.counts[cls]

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "counts": {cls.value: cnt for cls, cnt in self.counts.items()},
            "p_hat": self.p_hat,
            "ci95": list(self.ci95),
            "seed": self.seed,
            "shard_size": self.shard_size,
            "tol": self.tol,
            "spec": self.spec,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _classify_shard(sampler, policy: SeedPolicy, shard: int, n_triples: int, tol: float) -> np.ndarray:
    rng = policy.rng_for_shard(shard)
    try:
        pts = sampler.sample(rng, 3 * n_triples)
    except Exception as exc:  # re-raise with position information
        raise SamplerError(
            f"sampler failed in shard {shard} (triples {shard * policy.shard_size}..): {exc}",
            shard=shard,
            sample_offset=shard * policy.shard_size,
        ) from exc
    pts = np.asarray(pts, dtype=float)
    if pts.shape != (3 * n_triples, sampler.dim):
        raise SamplerError(
            f"sampler returned shape {pts.shape}, expected {(3 * n_triples, sampler.dim)}",
            shard=shard,
            sample_offset=shard * policy.shard_size,
        )
    tri = pts.reshape(n_triples, 3, sampler.dim)
    codes = classify_batch(tri[:, 0], tri[:, 1], tri[:, 2], tol)
    return np.bincount(codes, minlength=4)


def estimate(sampler, samples: int, seed: int, tol: float = DEFAULT_TOL, *,
             workers: int = 1, shard_size: int = DEFAULT_SHARD_SIZE,
             spec: dict | None = None) -> Estimate:
    """Estimate triangle-class probabilities for a point sampler.

    Bit-identical results for fixed (sampler, samples, seed, shard_size)
    regardless of ``workers``.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    policy = SeedPolicy(master_seed=seed, shard_size=shard_size)
    n_shards = (samples + shard_size - 1) // shard_size
    sizes = [min(shard_size, samples - i * shard_size) for i in range(n_shards)]

    if workers == 1:
        parts = [_classify_shard(sampler, policy, i, sizes[i], tol) for i in range(n_shards)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda i: _classify_shard(sampler, policy, i, sizes[i], tol),
                range(n_shards),
            ))
    total = np.sum(np.stack(parts), axis=0)
    counts = {cls: int(total[i]) for i, cls in enumerate(
        (TriangleClass.ACUTE, TriangleClass.RIGHT, TriangleClass.OBTUSE, TriangleClass.DEGENERATE))}
    obtuse = counts[TriangleClass.OBTUSE]
    lo, hi = wilson_interval(obtuse, samples)
    return Estimate(
        samples=samples,
        counts=counts,
        p_hat=obtuse / samples,
        ci95=(lo, hi),
        seed=seed,
        shard_size=shard_size,
        tol=tol,
        spec=spec,
    )
