"""Obtuse probability for three uniform points on the unit (d-1)-sphere.

Condition on the angle theta between two of the points.  The third point
lands in an obtuse-forcing region consisting of three spherical caps whose
total mass is

    P(theta, d) = 1/2 * I_{sin^2(theta/2)}((d-1)/2, 1/2)
                  + I_{cos^2(theta/2)}((d-1)/2, 1/2),

where I is the regularized incomplete beta function.  The angle itself has
density proportional to sin^{d-2}(theta) on (0, pi), so the obtuse
probability is the quadrature of P against that density.  At d = 3 the
integral is exactly 1/2; at d = 2 (uniform on a circle) the density is flat
and the classic value 3/4 drops out.

For large d the angle density concentrates at pi/2, suggesting the
plug-in value (3/2) * I_{1/2}((d-1)/2, 1/2); both it and the quadrature
are exposed so the quality of that approximation can be measured.
"""

from __future__ import annotations

import math

import numpy as np

from obtri.specfun import QuadratureResult, betainc, integrate, log_gamma


def _three_caps(theta: float, d: int) -> float:
    """Cap-mass sum, continuous extension to the closed interval [0, pi]."""
    a = (d - 1) / 2.0
    s = math.sin(theta / 2.0) ** 2
    c = math.cos(theta / 2.0) ** 2
    return 0.5 * betainc(s, a, 0.5) + betainc(c, a, 0.5)


def obtuse_given_angle(theta: float, d: int) -> float:
    """Three-cap probability that the third point makes the triangle obtuse."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not (0.0 < theta < math.pi):
        raise ValueError(f"theta must lie in (0, pi), got {theta!r}")
    return _three_caps(theta, d)


def sin_power_norm(d: int) -> float:
    """Normalizer of the angle density: integral of sin^{d-2} over (0, pi).

    Wallis closed form sqrt(pi) * Gamma((d-1)/2) / Gamma(d/2).
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return math.exp(0.5 * math.log(math.pi) + log_gamma((d - 1) / 2.0) - log_gamma(d / 2.0))


def obtuse_prob_sphere(d: int, tol: float = 1e-10) -> float:
    """Quadrature of the three-cap probability against the angle density.

    ``tol`` is interpreted relative to the size of the result (the plug-in
    value at theta = pi/2 sets the scale), so small high-dimension
    probabilities come back with full relative accuracy.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    log_norm = 0.5 * math.log(math.pi) + log_gamma((d - 1) / 2.0) - log_gamma(d / 2.0)
    p = d - 2

    def integrand(theta: float) -> float:
        s = math.sin(theta)
        if p > 0 and s <= 0.0:
            return 0.0
        log_w = p * math.log(s) - log_norm if p > 0 else -log_norm
        return _three_caps(theta, d) * math.exp(log_w)

    scale = max(asymptotic_sphere(d), 1e-300)
    result: QuadratureResult = integrate(integrand, 0.0, math.pi, tol * min(1.0, scale))
    return result.value


def asymptotic_sphere(d: int) -> float:
    """Plug-in value at theta = pi/2: (3/2) * I_{1/2}((d-1)/2, 1/2)."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    return 1.5 * betainc(0.5, (d - 1) / 2.0, 0.5)


def sample_sphere(d: int, rng: np.random.Generator, n: int = 1) -> np.ndarray:
    """n uniform points on the unit sphere S^{d-1}, shape (n, d).

    Normalized standard normal deviates; the measure-zero zero-norm draw is
    redrawn.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    pts = rng.standard_normal((n, d))
    norms = np.linalg.norm(pts, axis=1)
    while True:
        bad = norms == 0.0
        if not np.any(bad):
            break
        k = int(bad.sum())
        pts[bad] = rng.standard_normal((k, d))
        norms[bad] = np.linalg.norm(pts[bad], axis=1)
    return pts / norms[:, None]
