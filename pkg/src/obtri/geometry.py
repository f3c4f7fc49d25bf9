"""Triangle classification and obtuse-triangle counting in R^d.

Classification works purely on dot-product signs at the three vertices: a
triangle is obtuse iff exactly one vertex sees the other two along edge
vectors with a negative dot product.  No inverse trigonometry is involved,
so the test is cheap, vectorizes, and has an exact-rational twin for
certifying named configurations.

The tolerance ``tol`` is relative to the maximum squared edge length of the
triangle under test.  A dot product within ``tol * scale`` of zero is called
Right; a triangle whose area is at most ``tol * scale`` is Degenerate
(coincident or collinear points).  Degenerate wins over Right wins over
Obtuse, so every triangle lands in exactly one class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-12


class TriangleClass(Enum):
    ACUTE = "acute"
    RIGHT = "right"
    OBTUSE = "obtuse"
    DEGENERATE = "degenerate"


def _as_point(p: Sequence[float]) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.ndim != 1 or a.shape[0] < 2:
        raise ValueError(f"a point needs at least 2 coordinates, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite coordinate in point {p!r}")
    return a


@dataclass(frozen=True)
class Configuration:
    """A finite set of distinct points of equal dimension d >= 2."""

    points: np.ndarray  # shape (n, d)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {pts.shape}")
        n, d = pts.shape
        if n < 3:
            raise ValueError(f"a configuration needs at least 3 points, got {n}")
        if d < 2:
            raise ValueError(f"dimension must be >= 2, got {d}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite coordinate in configuration")
        # Exact duplicate detection; tolerance-near duplicates are legal.
        seen = set()
        for row in pts:
            key = row.tobytes()
            if key in seen:
                raise ValueError("configuration contains two identical points")
            seen.add(key)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def to_json(self) -> str:
        return json.dumps({"dim": self.dim, "points": self.points.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "Configuration":
        obj = json.loads(text)
        pts = np.asarray(obj["points"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != obj["dim"]:
            raise ValueError("configuration JSON: points do not match declared dim")
        return cls(points=pts)


def _vertex_dots(a: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Edge-vector dot products at vertices a, b, c plus squared edge lengths.

    Accepts stacked arrays of shape (..., d); returns arrays of shape (...,).
    """
    ab = b - a
    ac = c - a
    bc = c - b
    dot_a = np.einsum("...i,...i->...", ab, ac)
    dot_b = -np.einsum("...i,...i->...", ab, bc)
    dot_c = np.einsum("...i,...i->...", ac, bc)
    l_ab = np.einsum("...i,...i->...", ab, ab)
    l_ac = np.einsum("...i,...i->...", ac, ac)
    l_bc = np.einsum("...i,...i->...", bc, bc)
    return dot_a, dot_b, dot_c, l_ab, l_ac, l_bc


def _triangle_area(a: np.ndarray, b: np.ndarray, c: np.ndarray,
                   l_ab: np.ndarray, l_ac: np.ndarray, l_bc: np.ndarray,
                   dot_a: np.ndarray) -> np.ndarray:
    """Triangle areas, stable for needles.

    In 2 and 3 dimensions the cross product of the edge-difference vectors is
    used: the differences are computed first, so large common coordinates
    cancel exactly and the area keeps full relative accuracy even when it is
    tens of orders of magnitude below the edge lengths.  In higher dimension
    there is no cross product; Kahan's ordered Heron formula on the three
    edge lengths is the best length-only fallback.
    """
    d = a.shape[-1]
    u = b - a
    v = c - a
    if d == 2:
        return 0.5 * np.abs(u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0])
    if d == 3:
        cx = u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1]
        cy = u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2]
        cz = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
        return 0.5 * np.sqrt(cx * cx + cy * cy + cz * cz)
    sides = np.sort(np.stack([np.sqrt(l_ab), np.sqrt(l_ac), np.sqrt(l_bc)], axis=-1), axis=-1)
    sc, sb, sa = sides[..., 0], sides[..., 1], sides[..., 2]
    prod = (sa + (sb + sc)) * np.maximum(sc - (sa - sb), 0.0) * (sc + (sa - sb)) * (sa + (sb - sc))
    return 0.25 * np.sqrt(prod)


def classify_batch(a: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Classify stacked triangles; returns an int array (see ``CLASS_ORDER``).

    0 = acute, 1 = right, 2 = obtuse, 3 = degenerate.
    """
    if tol < 0:
        raise ValueError(f"tol must be >= 0, got {tol!r}")
    dot_a, dot_b, dot_c, l_ab, l_ac, l_bc = _vertex_dots(a, b, c)
    scale = np.maximum(l_ab, np.maximum(l_ac, l_bc))
    thresh = tol * scale
    area = _triangle_area(np.asarray(a, dtype=float), np.asarray(b, dtype=float),
                          np.asarray(c, dtype=float), l_ab, l_ac, l_bc, dot_a)

    min_dot = np.minimum(dot_a, np.minimum(dot_b, dot_c))
    min_abs = np.minimum(np.abs(dot_a), np.minimum(np.abs(dot_b), np.abs(dot_c)))

    out = np.zeros(np.shape(scale), dtype=np.int8)  # acute by default
    out[min_dot < -thresh] = 2
    out[min_abs <= thresh] = 1
    out[area <= thresh] = 3
    return out


CLASS_ORDER = (TriangleClass.ACUTE, TriangleClass.RIGHT, TriangleClass.OBTUSE, TriangleClass.DEGENERATE)


def classify_triangle(a: Sequence[float], b: Sequence[float], c: Sequence[float],
                      tol: float = DEFAULT_TOL) -> TriangleClass:
    """Classify the triangle abc as Acute, Right, Obtuse or Degenerate."""
    pa, pb, pc = _as_point(a), _as_point(b), _as_point(c)
    if not (pa.shape == pb.shape == pc.shape):
        raise ValueError(
            f"dimension mismatch: {pa.shape[0]}, {pb.shape[0]}, {pc.shape[0]}"
        )
    code = int(classify_batch(pa[None, :], pb[None, :], pc[None, :], tol)[0])
    return CLASS_ORDER[code]


def counts_from_codes(codes: np.ndarray) -> dict[TriangleClass, int]:
    binc = np.bincount(codes.ravel(), minlength=4)
    return {cls: int(binc[i]) for i, cls in enumerate(CLASS_ORDER)}


def count_classes(config: Configuration, tol: float = DEFAULT_TOL) -> dict[TriangleClass, int]:
    """Class counts over all C(n, 3) triples of a configuration.

    Counts are exact Python ints and always sum to C(n, 3).
    """
    idx = np.array(list(combinations(range(config.n), 3)), dtype=np.intp)
    pts = config.points
    codes = classify_batch(pts[idx[:, 0]], pts[idx[:, 1]], pts[idx[:, 2]], tol)
    return counts_from_codes(codes)


def count_nonacute(config: Configuration, tol: float = DEFAULT_TOL) -> int:
    """Number of triples classified Right, Obtuse or Degenerate."""
    counts = count_classes(config, tol)
    return counts[TriangleClass.RIGHT] + counts[TriangleClass.OBTUSE] + counts[TriangleClass.DEGENERATE]


def triple_count(n: int) -> int:
    """C(n, 3) as an exact integer."""
    return n * (n - 1) * (n - 2) // 6


# Exact-rational classification, used to certify counts for configurations
# given with rational coordinates (no tolerance involved).

def _exact_dots(a, b, c):
    ab = [Fraction(y) - Fraction(x) for x, y in zip(a, b)]
    ac = [Fraction(y) - Fraction(x) for x, y in zip(a, c)]
    bc = [Fraction(y) - Fraction(x) for x, y in zip(b, c)]
    dot = lambda u, v: sum(ui * vi for ui, vi in zip(u, v))
    dot_a = dot(ab, ac)
    dot_b = -dot(ab, bc)
    dot_c = dot(ac, bc)
    area4_sq = dot(ab, ab) * dot(ac, ac) - dot_a * dot_a  # 4 * area^2, exact
    return dot_a, dot_b, dot_c, area4_sq


def classify_exact(a: Iterable, b: Iterable, c: Iterable) -> TriangleClass:
    """Tolerance-free classification from exact rational coordinates.

    Coordinates may be ints, Fractions, or floats (floats are binary
    rationals and convert exactly).
    """
    dot_a, dot_b, dot_c, area4_sq = _exact_dots(a, b, c)
    if area4_sq == 0:
        return TriangleClass.DEGENERATE
    dots = (dot_a, dot_b, dot_c)
    if any(d == 0 for d in dots):
        return TriangleClass.RIGHT
    if any(d < 0 for d in dots):
        return TriangleClass.OBTUSE
    return TriangleClass.ACUTE


def save_configuration(config: Configuration, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config.to_json())


def load_configuration(path: str) -> Configuration:
    with open(path, "r", encoding="utf-8") as fh:
        return Configuration.from_json(fh.read())
