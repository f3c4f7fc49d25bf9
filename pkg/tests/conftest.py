import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_rotation(rng, d):
    """Haar-ish random orthogonal matrix via QR."""
    m = rng.standard_normal((d, d))
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diag(r))


UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]

# Exact integer coordinates for the square and the octahedron (cross-polytope)
# let the rational classifier certify their counts with no tolerance at all.
UNIT_SQUARE_EXACT = [(0, 0), (1, 0), (1, 1), (0, 1)]
OCTAHEDRON_EXACT = [
    (1, 0, 0), (-1, 0, 0),
    (0, 1, 0), (0, -1, 0),
    (0, 0, 1), (0, 0, -1),
]


def regular_ngon(n):
    ang = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(ang), np.sin(ang)])
