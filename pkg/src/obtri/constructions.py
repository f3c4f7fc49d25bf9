"""Extremal distributions: the planar three-arc construction and the
self-similar spherical-cap construction, plus the fixed-point analysis of
the latter's acute probability.

Planar three-arc construction
-----------------------------
Take an acute triangle A, B, C whose angles at A and B both equal
pi/2 - alpha (so the angle at C is 2*alpha), with A = (0,0), C = (1,0).
Put mass 1/3 on a short circular arc centered at each vertex, with arc
lengths delta, eps*delta, eps^2*delta at A, C, B.  Each arc is tangent to
the direction perpendicular to one triangle side (AC at A, CB at C, BA at
B) and curves toward the far endpoint of that side.

The defining trick is the choice of radii: by default the arc at a vertex
lies on the circle *centered at the vertex it pairs with* (the A-arc on the
circle centered at C, the C-arc on the circle centered at B, the B-arc on
the circle centered at A).  Two points of an arc are then equidistant from
the pairing vertex, so a triangle made of two same-arc points plus a point
near that vertex is isoceles with a tiny apex angle: its base angles sit
just under a right angle, and the curvature is exactly what keeps them
acute.  Triples on a single arc are always obtuse (three points on an arc
shorter than a semicircle), and in the small-parameter regime the acute
patterns are exactly: one point per arc, and the doubled patterns AAC, CCB,
BBA.  That accounting yields an acute probability of 5/9 - O(eps), i.e. an
obtuse probability approaching 4/9.

The small-parameter regime matters: the doubled-B pattern BBA survives only
while the angle deficit alpha is small compared to eps^2 (and delta small
compared to eps^2 as well), because the apex point at A wanders transverse
to BA by about delta*alpha/2 + delta^2/8, which must stay below the half
length eps^2*delta/2 of the B-arc.

Self-similar cap construction (R^3)
-----------------------------------
A point picks a level j with probability p*(1-p)^j and lands on a spherical
cap of radius rho^j around the origin (all caps share an axis); within the
cap it follows the planar three-arc layout mapped onto the sphere.  Because
any two points of a common level are exactly equidistant from the origin,
triples with two points at the shallowest level and one deeper are acute,
and the acute probability x solves

    x = 3(1-p)p^2 + (1-p)^3 x + (5/9) p^3.

Maximizing the closed-form solution over p gives p* = (22 - sqrt(133))/13
and x* = (2*sqrt(133) - 17)/9 ~ 0.673903, so obtuse triangles occur with
probability about 0.3261.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from obtri.geometry import (
    CLASS_ORDER,
    DEFAULT_TOL,
    TriangleClass,
    classify_batch,
    counts_from_codes,
)
from obtri.mc import SeedPolicy, wilson_interval
from obtri.sphere import sample_sphere

logger = logging.getLogger(__name__)

ACUTE_FRACTION_LIMIT = 5.0 / 9.0  # planar construction, small-parameter limit


@dataclass(frozen=True)
class ArcTripleParams:
    """Parameters of the planar three-arc distribution.

    alpha: angle deficit; the angles at A and B are pi/2 - alpha.
    delta: arc length at A (arcs at C and B have lengths eps*delta, eps^2*delta).
    eps: length ratio in (0, 1).
    radius_scale: arc radius as a multiple of the pairing distance
        (|AC| for the A-arc, |CB| for the C-arc, |BA| for the B-arc).
        1.0 puts each arc on the circle centered at its pairing vertex,
        which is what makes the doubled patterns acute.
    """

    alpha: float
    delta: float
    eps: float
    radius_scale: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha < math.pi / 8.0):
            raise ValueError(f"alpha must lie in (0, pi/8), got {self.alpha!r}")
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive, got {self.delta!r}")
        if not (0.0 < self.eps < 1.0):
            raise ValueError(f"eps must lie in (0, 1), got {self.eps!r}")
        if not (self.radius_scale > 0.0):
            raise ValueError(f"radius_scale must be positive, got {self.radius_scale!r}")
        for name, extent in (("A", self.delta / (self.radius_scale * 1.0)),
                             ("C", self.eps * self.delta / (self.radius_scale * 1.0)),
                             ("B", self.eps ** 2 * self.delta /
                              (self.radius_scale * 2.0 * math.sin(self.alpha)))):
            if extent >= math.pi / 8.0:
                raise ValueError(f"angular extent of the {name}-arc is {extent:.3g} >= pi/8")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "delta": self.delta, "eps": self.eps,
                "radius_scale": self.radius_scale}


@dataclass(frozen=True)
class Arc:
    """A circular arc: midpoint ``vertex`` on the circle (center, radius)."""

    vertex: tuple[float, float]
    center: tuple[float, float]
    radius: float
    base_angle: float  # polar angle of vertex as seen from center
    length: float

    @property
    def angular_extent(self) -> float:
        return self.length / self.radius

    def points(self, u: np.ndarray) -> np.ndarray:
        """Points at signed arc-length offsets u from the vertex, shape (n, 2).

        Evaluated as vertex + chord offset using the half-angle identity, so
        coordinates keep full relative precision even for tiny arcs.
        """
        psi = np.asarray(u, dtype=float) / self.radius
        half = 0.5 * psi
        two_r_sin = 2.0 * self.radius * np.sin(half)
        mid = self.base_angle + half
        dx = -two_r_sin * np.sin(mid)
        dy = two_r_sin * np.cos(mid)
        out = np.empty((psi.shape[0], 2))
        out[:, 0] = self.vertex[0] + dx
        out[:, 1] = self.vertex[1] + dy
        return out


@dataclass(frozen=True)
class ArcTripleGeometry:
    """Resolved geometry: triangle vertices and the three mass-bearing arcs."""

    params: ArcTripleParams
    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]
    arcs: dict  # keys "A", "C", "B"

    @property
    def vertices(self) -> dict:
        return {"A": self.a, "B": self.b, "C": self.c}


def arc_triple_geometry(params: ArcTripleParams) -> ArcTripleGeometry:
    """Construct vertices and arcs for the planar three-arc distribution.

    A = (0,0), C = (1,0); B is placed so the interior angles at A and B both
    equal pi/2 - alpha.  Arc tangents are perpendicular to AC at A, to CB at
    C, and to BA at B; each arc curves toward the far endpoint of that side,
    with radius radius_scale times the distance to it.
    """
    al = params.alpha
    sa, ca = math.sin(al), math.cos(al)
    a = (0.0, 0.0)
    c = (1.0, 0.0)
    b = (2.0 * sa * sa, 2.0 * sa * ca)  # |AB| = 2 sin(alpha), |BC| = |AC| = 1

    def make_arc(vertex, toward, dist, length):
        ux = (toward[0] - vertex[0]) / dist
        uy = (toward[1] - vertex[1]) / dist
        radius = params.radius_scale * dist
        center = (vertex[0] + radius * ux, vertex[1] + radius * uy)
        base_angle = math.atan2(-uy, -ux)
        return Arc(vertex=vertex, center=center, radius=radius,
                   base_angle=base_angle, length=length)

    arcs = {
        "A": make_arc(a, c, 1.0, params.delta),
        "C": make_arc(c, b, 1.0, params.eps * params.delta),
        "B": make_arc(b, a, 2.0 * sa, params.eps ** 2 * params.delta),
    }
    return ArcTripleGeometry(params=params, a=a, b=b, c=c, arcs=arcs)


ARC_NAMES = ("A", "C", "B")  # index order used by the sampler


class ArcTripleSampler:
    """Uniform mixture: arc chosen uniformly among A, C, B; position uniform
    in arc length."""

    dim = 2

    def __init__(self, params: ArcTripleParams):
        self.params = params
        self.geometry = arc_triple_geometry(params)

    def spec_dict(self) -> dict:
        return {"kind": "arc_triple", "params": self.params.to_dict()}

    def _points_on(self, name: str, rng: np.random.Generator, n: int) -> np.ndarray:
        arc = self.geometry.arcs[name]
        u = (rng.random(n) - 0.5) * arc.length
        return arc.points(u)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        which = rng.integers(0, 3, size=n)
        u = rng.random(n) - 0.5
        out = np.empty((n, 2))
        for i, name in enumerate(ARC_NAMES):
            mask = which == i
            if not np.any(mask):
                continue
            arc = self.geometry.arcs[name]
            out[mask] = arc.points(u[mask] * arc.length)
        return out

    def sample_pattern(self, rng: np.random.Generator, pattern: str, n: int) -> np.ndarray:
        """n triples with prescribed arcs per position, shape (n, 3, 2)."""
        if len(pattern) != 3 or any(ch not in ARC_NAMES for ch in pattern):
            raise ValueError(f"pattern must be three of A/B/C, got {pattern!r}")
        out = np.empty((n, 3, 2))
        for pos, name in enumerate(pattern):
            out[:, pos, :] = self._points_on(name, rng, n)
        return out


def pattern_label(arcs: tuple[str, str, str]) -> str:
    """Canonical multiset label: AAA, ABC, or doubled-letter-first (e.g. BBA)."""
    counts = {name: arcs.count(name) for name in set(arcs)}
    if len(counts) == 1:
        return arcs[0] * 3
    if len(counts) == 3:
        return "ABC"
    doubled = next(k for k, v in counts.items() if v == 2)
    single = next(k for k, v in counts.items() if v == 1)
    return doubled * 2 + single

# The ten multiset patterns with their probabilities under uniform arc choice.
PATTERNS = (
    ("AAA", 1.0 / 27.0), ("BBB", 1.0 / 27.0), ("CCC", 1.0 / 27.0),
    ("ABC", 6.0 / 27.0),
    ("AAB", 3.0 / 27.0), ("AAC", 3.0 / 27.0),
    ("BBA", 3.0 / 27.0), ("BBC", 3.0 / 27.0),
    ("CCA", 3.0 / 27.0), ("CCB", 3.0 / 27.0),
)


@dataclass(frozen=True)
class PatternRow:
    pattern: str
    weight: float
    samples: int
    counts: dict
    acute_rate: float
    obtuse_rate: float


@dataclass(frozen=True)
class PatternReport:
    """Stratified per-pattern class rates for the three-arc distribution."""

    params: ArcTripleParams
    seed: int
    rows: tuple[PatternRow, ...]

    @property
    def overall_acute(self) -> float:
        return sum(r.weight * r.acute_rate for r in self.rows)

    @property
    def overall_obtuse(self) -> float:
        return sum(r.weight * r.obtuse_rate for r in self.rows)

    @property
    def acute_limit_gap(self) -> float:
        return self.overall_acute - ACUTE_FRACTION_LIMIT

    def row(self, pattern: str) -> PatternRow:
        for r in self.rows:
            if r.pattern == pattern:
                return r
        raise KeyError(pattern)

    def to_csv(self) -> str:
        lines = ["pattern,weight,n,acute,right,obtuse,degenerate"]
        for r in self.rows:
            c = r.counts
            lines.append(
                f"{r.pattern},{r.weight!r},{r.samples},"
                f"{c[TriangleClass.ACUTE]},{c[TriangleClass.RIGHT]},"
                f"{c[TriangleClass.OBTUSE]},{c[TriangleClass.DEGENERATE]}"
            )
        return "\n".join(lines) + "\n"


def arc_triple_pattern_report(params: ArcTripleParams, samples_per_pattern: int,
                              seed: int, tol: float = DEFAULT_TOL) -> PatternReport:
    """Classify ``samples_per_pattern`` triples for each of the ten arc patterns.

    The weighted combination of per-pattern rates is a variance-reduced
    estimate of the overall acute/obtuse probability (stratification by
    pattern removes the multinomial noise of arc choice).
    """
    sampler = ArcTripleSampler(params)
    policy = SeedPolicy(master_seed=seed, shard_size=max(1, samples_per_pattern))
    rows = []
    for idx, (pattern, weight) in enumerate(PATTERNS):
        rng = policy.rng_for_shard(idx)
        tri = sampler.sample_pattern(rng, pattern, samples_per_pattern)
        codes = classify_batch(tri[:, 0], tri[:, 1], tri[:, 2], tol)
        counts = counts_from_codes(codes)
        rows.append(PatternRow(
            pattern=pattern,
            weight=weight,
            samples=samples_per_pattern,
            counts=counts,
            acute_rate=counts[TriangleClass.ACUTE] / samples_per_pattern,
            obtuse_rate=counts[TriangleClass.OBTUSE] / samples_per_pattern,
        ))
    return PatternReport(params=params, seed=seed, rows=tuple(rows))


# Fixed-point analysis of the self-similar construction.

def fixed_point_acute(p: float) -> float:
    """Acute probability x(p) solving x = 3(1-p)p^2 + (1-p)^3 x + (5/9)p^3."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    q = 1.0 - p
    return (3.0 * q * p * p + (5.0 / 9.0) * p ** 3) / (1.0 - q ** 3)


def fixed_point_residual(p: float, x: float) -> float:
    q = 1.0 - p
    return x - (3.0 * q * p * p + q ** 3 * x + (5.0 / 9.0) * p ** 3)


@dataclass(frozen=True)
class FixedPointResult:
    p: float
    acute: float
    obtuse: float
    residual: float

    def to_dict(self) -> dict:
        return {"p": self.p, "acute": self.acute, "obtuse": self.obtuse,
                "residual": self.residual}


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _acute_derivative_sign(p: float) -> float:
    """Sign surrogate for d/dp of x(p) = N/D: the value N'(p)D(p) - N(p)D'(p).

    Evaluating the derivative's sign directly sidesteps the flat-maximum
    problem: near the optimum x(p) itself varies quadratically and cannot
    locate p beyond ~1e-8 in doubles, while this expression crosses zero
    linearly and bisects down to full precision.
    """
    q = 1.0 - p
    n = 3.0 * q * p * p + (5.0 / 9.0) * p ** 3
    d = 1.0 - q ** 3
    n_prime = 6.0 * p * q - 3.0 * p * p + (5.0 / 3.0) * p * p
    d_prime = 3.0 * q * q
    return n_prime * d - n * d_prime


def maximize_acute(bracket_tol: float = 1e-12) -> FixedPointResult:
    """Maximize x(p) over (0, 1): golden-section bracket, then bisection on
    the sign of the derivative.

    The objective is unimodal on (0, 1); the optimum is
    p* = (22 - sqrt(133))/13 with x* = (2*sqrt(133) - 17)/9.
    """
    lo, hi = 1e-9, 1.0 - 1e-9
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = fixed_point_acute(x1), fixed_point_acute(x2)
    while hi - lo > 1e-4:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = fixed_point_acute(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = fixed_point_acute(x1)
    # Polish: the derivative sign changes exactly once inside the bracket.
    lo -= 1e-4
    hi += 1e-4
    while hi - lo > bracket_tol:
        mid = 0.5 * (lo + hi)
        if _acute_derivative_sign(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    p = 0.5 * (lo + hi)
    x = fixed_point_acute(p)
    return FixedPointResult(p=p, acute=x, obtuse=1.0 - x,
                            residual=fixed_point_residual(p, x))


def fixed_point_scan(n: int = 999) -> list[tuple[float, float]]:
    """Grid of (p, x(p)) pairs over (0, 1), for tables and unimodality checks."""
    return [((i + 1) / (n + 1), fixed_point_acute((i + 1) / (n + 1))) for i in range(n)]


# Self-similar spherical-cap construction.

def _default_cap_arc() -> ArcTripleParams:
    """In-cap layout defaults for the nested construction.

    Deliberately coarser than a free-standing planar run would use: every
    margin the level accounting relies on (in particular chords between two
    points of a common level seen from a point a factor rho deeper) must
    stay resolvable in double precision, which bounds the arc hierarchy
    from below.  The price is a visible O(eps) deficit in the within-cap
    acute rate; the trade is documented in SelfSimilarParams.
    """
    return ArcTripleParams(alpha=6.8e-3, delta=1.4e-3, eps=0.26)


@dataclass(frozen=True)
class SelfSimilarParams:
    """Nested-cap distribution in R^3.

    p: mass of the current level's cap; level j has probability p*(1-p)^j.
    rho: per-level shrink ratio of the sphere radius.
    cap_half_angle: angular radius of each cap (radians).
    arc: planar three-arc layout mapped onto each cap.
    max_depth: truncation level; the residual mass lands on max_depth and
        the true tail mass (1-p)^(max_depth+1) is reported.

    The defaults place every geometric margin the accounting relies on well
    clear of double-precision roundoff when classified at a relative
    tolerance of ~1e-15 (see mc_self_similar): rho is far below any in-cap
    feature, so deeper levels act as a point at the origin, while remaining
    large enough that the obtuse margins of one-shallow-two-deep triples
    (about rho * cap_half_angle^2 relative to the squared scale) stay above
    the tolerance.
    """

    p: float
    rho: float = 8e-9
    cap_half_angle: float = 0.02
    arc: ArcTripleParams = field(default_factory=_default_cap_arc)
    max_depth: int = 12

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"p must lie in (0, 1] (1 = single cap), got {self.p!r}")
        if not (0.0 < self.rho < 1.0):
            raise ValueError(f"rho must lie in (0, 1), got {self.rho!r}")
        if not (0.0 < self.cap_half_angle < math.pi / 4.0):
            raise ValueError(f"cap_half_angle must lie in (0, pi/4), got {self.cap_half_angle!r}")
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.rho ** self.max_depth < 1e-150:
            raise ValueError("rho**max_depth underflows the classifier; raise rho or lower max_depth")

    @property
    def tail_mass(self) -> float:
        return (1.0 - self.p) ** (self.max_depth + 1)

    def level_probabilities(self) -> np.ndarray:
        """P(level = j) for j = 0..max_depth, residual mass on max_depth."""
        j = np.arange(self.max_depth + 1)
        probs = self.p * (1.0 - self.p) ** j
        probs[-1] = (1.0 - self.p) ** self.max_depth
        return probs

    def to_dict(self) -> dict:
        return {"p": self.p, "rho": self.rho, "cap_half_angle": self.cap_half_angle,
                "arc": self.arc.to_dict(), "max_depth": self.max_depth}


class SelfSimilarSampler:
    """Point sampler for the nested-cap distribution (dim 3)."""

    dim = 3

    def __init__(self, params: SelfSimilarParams):
        self.params = params
        self._arc_sampler = ArcTripleSampler(params.arc)
        logger.debug("self-similar sampler: tail mass beyond depth %d is %.3e",
                     params.max_depth, params.tail_mass)

    def spec_dict(self) -> dict:
        return {"kind": "self_similar", "params": self.params.to_dict()}

    def sample_levels(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = self.params.p
        if p >= 1.0:
            return np.zeros(n, dtype=np.int64)
        u = rng.random(n)
        lev = np.floor(np.log1p(-u) / math.log1p(-p)).astype(np.int64)
        return np.minimum(lev, self.params.max_depth)

    # Azimuthal offset between consecutive levels (golden angle).  The caps
    # share an axis, but rotating each level's arc layout about it keeps
    # points of different levels from lining up with the origin to within
    # the arcs' own (tiny) widths, which would otherwise produce spurious
    # near-degenerate cross-level slivers.
    _LEVEL_SPIN = math.pi * (3.0 - math.sqrt(5.0))

    def _cap_points(self, rng: np.random.Generator, levels: np.ndarray) -> np.ndarray:
        """Map planar arc-triple draws onto the cap of each point's level."""
        n = levels.shape[0]
        planar = self._arc_sampler.sample(rng, n)
        theta = self.params.cap_half_angle
        # Tangent coordinates in radians, construction centered on the pole.
        tx = (planar[:, 0] - 0.5) * theta
        ty = planar[:, 1] * theta
        spin = self._LEVEL_SPIN * levels.astype(float)
        cs, sn = np.cos(spin), np.sin(spin)
        tx, ty = cs * tx - sn * ty, sn * tx + cs * ty
        psi = np.hypot(tx, ty)
        s = np.sinc(psi / math.pi)  # sin(psi)/psi, 1 at 0
        r = self.params.rho ** levels.astype(float)
        out = np.empty((n, 3))
        out[:, 0] = r * s * tx
        out[:, 1] = r * s * ty
        out[:, 2] = r * np.cos(psi)
        return out

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self._cap_points(rng, self.sample_levels(rng, n))

    def sample_with_levels(self, rng: np.random.Generator, n: int):
        levels = self.sample_levels(rng, n)
        return self._cap_points(rng, levels), levels


def _category_weights(params: SelfSimilarParams) -> np.ndarray:
    """P(count of points at the triple's shallowest level = 1, 2, 3)."""
    q = params.level_probabilities()
    deeper = np.concatenate([np.cumsum(q[::-1])[::-1][1:], [0.0]])  # P(level > j)
    w3 = float(np.sum(q ** 3))
    w2 = float(np.sum(3.0 * q ** 2 * deeper))
    w1 = float(np.sum(3.0 * q * deeper ** 2))
    return np.array([w1, w2, w3])


@dataclass(frozen=True)
class SelfSimilarReport:
    """MC estimate plus the shallow-level pattern decomposition."""

    params: SelfSimilarParams
    samples: int
    seed: int
    tol: float
    counts: dict
    obtuse_hat: float
    acute_hat: float
    ci95: tuple[float, float]
    category_weights: tuple[float, float, float]      # analytic, shallow-count 1,2,3
    category_frequencies: tuple[float, float, float]  # observed
    category_acute: tuple[float, float, float]        # observed acute rate per category
    fixed_point_acute: float | None                   # x(p) for p < 1
    accounting_gap: float                             # sum w_c*q_c - overall acute
    accounting_sigma: float

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "samples": self.samples,
            "seed": self.seed,
            "tol": self.tol,
            "counts": {cls.value: cnt for cls, cnt in self.counts.items()},
            "obtuse_hat": self.obtuse_hat,
            "acute_hat": self.acute_hat,
            "ci95": list(self.ci95),
            "tail_mass": self.params.tail_mass,
            "category_weights": list(self.category_weights),
            "category_frequencies": list(self.category_frequencies),
            "category_acute": list(self.category_acute),
            "fixed_point_acute": self.fixed_point_acute,
            "accounting_gap": self.accounting_gap,
            "accounting_sigma": self.accounting_sigma,
        }


SELF_SIMILAR_TOL = 1e-15


def mc_self_similar(params: SelfSimilarParams, samples: int, seed: int,
                    tol: float = SELF_SIMILAR_TOL, *, shard_size: int = 1 << 16) -> SelfSimilarReport:
    """Monte Carlo classification of self-similar triples with per-pattern
    accounting.

    The construction makes extremely thin triangles, so the classification
    tolerance matters and is exposed.  The default 1e-15 sits just above
    coordinate-level roundoff (~2e-16 relative) and below every geometric
    margin the accounting relies on: sub-roundoff cases land in the Right
    class instead of flipping randomly between acute and obtuse, which keeps
    the obtuse fraction clean.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    sampler = SelfSimilarSampler(params)
    policy = SeedPolicy(master_seed=seed, shard_size=shard_size)
    n_shards = (samples + shard_size - 1) // shard_size
    cat_class = np.zeros((3, 4), dtype=np.int64)  # rows: shallow-count 1,2,3
    for shard in range(n_shards):
        count = min(shard_size, samples - shard * shard_size)
        rng = policy.rng_for_shard(shard)
        pts, levels = sampler.sample_with_levels(rng, 3 * count)
        tri = pts.reshape(count, 3, 3)
        lev = levels.reshape(count, 3)
        codes = classify_batch(tri[:, 0], tri[:, 1], tri[:, 2], tol)
        shallow = lev.min(axis=1)
        n_at_shallow = (lev == shallow[:, None]).sum(axis=1)
        for cat in (1, 2, 3):
            mask = n_at_shallow == cat
            if np.any(mask):
                cat_class[cat - 1] += np.bincount(codes[mask], minlength=4)
    totals = cat_class.sum(axis=0)
    counts = {cls: int(totals[i]) for i, cls in enumerate(CLASS_ORDER)}
    acute = counts[TriangleClass.ACUTE]
    obtuse = counts[TriangleClass.OBTUSE]
    cat_n = cat_class.sum(axis=1)
    cat_freq = cat_n / samples
    with np.errstate(invalid="ignore"):
        cat_acute = np.where(cat_n > 0, cat_class[:, 0] / np.maximum(cat_n, 1), 0.0)
    weights = _category_weights(params)
    acute_pred = float(np.dot(weights, cat_acute))
    acute_hat = acute / samples
    # Noise of the decomposition residual: multinomial category frequencies
    # against fixed conditional rates.
    var = (np.dot(weights, cat_acute ** 2) - np.dot(weights, cat_acute) ** 2) / samples
    var += float(np.sum(weights ** 2 * cat_acute * (1.0 - cat_acute) / np.maximum(cat_n, 1)))
    sigma = math.sqrt(max(var, 0.0))
    lo, hi = wilson_interval(obtuse, samples)
    return SelfSimilarReport(
        params=params,
        samples=samples,
        seed=seed,
        tol=tol,
        counts=counts,
        obtuse_hat=obtuse / samples,
        acute_hat=acute_hat,
        ci95=(lo, hi),
        category_weights=tuple(weights.tolist()),
        category_frequencies=tuple(cat_freq.tolist()),
        category_acute=tuple(cat_acute.tolist()),
        fixed_point_acute=(fixed_point_acute(params.p) if params.p < 1.0 else None),
        accounting_gap=acute_pred - acute_hat,
        accounting_sigma=sigma,
    )


# Other samplers available through DistributionSpec.

class SphereSampler:
    """Uniform distribution on the unit sphere S^{d-1}."""

    def __init__(self, d: int):
        if d < 2:
            raise ValueError(f"dimension must be >= 2, got {d}")
        self.d = d

    @property
    def dim(self) -> int:
        return self.d

    def spec_dict(self) -> dict:
        return {"kind": "sphere", "params": {"d": self.d}}

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return sample_sphere(self.d, rng, n)


class SingleArcSampler:
    """Uniform distribution on one circular arc no longer than a semicircle.

    Every triple of points on such an arc forms an obtuse triangle, so this
    is the distribution with obtuse probability one.
    """

    dim = 2

    def __init__(self, arc_angle: float, radius: float = 1.0):
        if not (0.0 < arc_angle <= math.pi):
            raise ValueError(f"arc_angle must lie in (0, pi], got {arc_angle!r}")
        if radius <= 0.0:
            raise ValueError(f"radius must be positive, got {radius!r}")
        self.arc_angle = arc_angle
        self.radius = radius

    def spec_dict(self) -> dict:
        return {"kind": "single_arc",
                "params": {"arc_angle": self.arc_angle, "radius": self.radius}}

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        phi = (rng.random(n) - 0.5) * self.arc_angle
        return np.column_stack([self.radius * np.cos(phi), self.radius * np.sin(phi)])


class MixtureSampler:
    """Finite mixture of samplers of equal dimension; points are drawn iid
    from the mixture (each of a triple's three points picks its own
    component)."""

    def __init__(self, components: list[tuple[float, object]]):
        if not components:
            raise ValueError("mixture needs at least one component")
        dims = {s.dim for _, s in components}
        if len(dims) != 1:
            raise ValueError(f"mixture components must share a dimension, got {sorted(dims)}")
        weights = np.array([w for w, _ in components], dtype=float)
        if np.any(weights <= 0.0):
            raise ValueError("mixture weights must be positive")
        self.weights = weights / weights.sum()
        self.samplers = [s for _, s in components]
        self.dim = self.samplers[0].dim

    def spec_dict(self) -> dict:
        return {
            "kind": "mixture",
            "params": {"components": [
                {"weight": float(w), "spec": s.spec_dict()}
                for w, s in zip(self.weights, self.samplers)
            ]},
        }

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        edges = np.cumsum(self.weights)
        which = np.searchsorted(edges, rng.random(n), side="right")
        which = np.minimum(which, len(self.samplers) - 1)
        out = np.empty((n, self.dim))
        for k, sampler in enumerate(self.samplers):
            mask = which == k
            cnt = int(mask.sum())
            if cnt:
                out[mask] = sampler.sample(rng, cnt)
        return out


@dataclass(frozen=True)
class DistributionSpec:
    """Declarative sampler description, the unit of the mc wire format."""

    kind: str
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "params": self.params})

    @classmethod
    def from_json(cls, text: str) -> "DistributionSpec":
        obj = json.loads(text)
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError("distribution spec JSON needs a 'kind' field")
        return cls(kind=obj["kind"], params=obj.get("params", {}))


def estimate_spec(spec: DistributionSpec, samples: int, seed: int, tol: float = DEFAULT_TOL,
                  *, workers: int = 1):
    """Monte Carlo estimate for a declarative distribution spec.

    Convenience wrapper: builds the sampler and runs obtri.mc.estimate with
    the spec recorded in the result.
    """
    from obtri.mc import estimate
    return estimate(build_sampler(spec), samples, seed, tol, workers=workers,
                    spec=json.loads(spec.to_json()))


def build_sampler(spec: DistributionSpec):
    """Instantiate the sampler described by a DistributionSpec."""
    kind, params = spec.kind, spec.params
    if kind == "sphere":
        return SphereSampler(int(params["d"]))
    if kind == "arc_triple":
        return ArcTripleSampler(ArcTripleParams(**params))
    if kind == "self_similar":
        p = dict(params)
        arc = p.pop("arc", None)
        arc_params = ArcTripleParams(**arc) if arc else _default_cap_arc()
        return SelfSimilarSampler(SelfSimilarParams(arc=arc_params, **p))
    if kind == "single_arc":
        return SingleArcSampler(**params)
    if kind == "mixture":
        comps = []
        for entry in params["components"]:
            sub = DistributionSpec(kind=entry["spec"]["kind"],
                                   params=entry["spec"].get("params", {}))
            comps.append((float(entry["weight"]), build_sampler(sub)))
        return MixtureSampler(comps)
    raise ValueError(f"unknown distribution kind {kind!r}")
