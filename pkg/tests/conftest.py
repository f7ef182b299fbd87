import cmath
import math

import numpy as np
import pytest

from symbidisc.gdomain import SymPoint, Tangent, sample_G
from symbidisc.geodesics import flat_tangent, pb_tangent, royal_tangent
from symbidisc.mobius import MobiusMap


def rand_disk(rng, radius=0.9):
    return complex(radius * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform()))


def rand_nonzero(rng):
    c = complex(rng.standard_normal(), rng.standard_normal())
    return c if abs(c) > 0.05 else c + 0.5


def rand_royal(rng):
    z, c = rand_disk(rng), rand_nonzero(rng)
    return royal_tangent(z, c), z, c


def rand_flat(rng):
    beta, z, c = rand_disk(rng), rand_disk(rng), rand_nonzero(rng)
    return flat_tangent(beta, z, c), beta, z, c


def rand_hyperbolic(rng):
    a1 = rng.uniform(0, 2 * math.pi)
    a2 = a1 + rng.uniform(0.5, 2 * math.pi - 0.5)
    k = math.exp(rng.choice([-1, 1]) * rng.uniform(0.3, 1.5))
    return MobiusMap.hyperbolic(cmath.exp(1j * a1), cmath.exp(1j * a2), k), (a1 % (2 * math.pi), a2 % (2 * math.pi))


def rand_pb(rng):
    m, angles = rand_hyperbolic(rng)
    z, c = rand_disk(rng, 0.8), rand_nonzero(rng)
    return pb_tangent(m, z, c), m, angles


def rand_tangent(rng):
    s, p = sample_G(int(rng.integers(2**31)), 1)
    v = (rand_nonzero(rng), rand_nonzero(rng))
    return Tangent(SymPoint(complex(s[0]), complex(p[0])), v)


def circ_dist(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ROYAL = Tangent(SymPoint(1, 0.25), (2, 1))
FLAT = Tangent(SymPoint(0.5, 0), (0.5, 1))
PB = Tangent(SymPoint(0.5, 0), (1.75, 0.5))
SINGLE = Tangent(SymPoint(0, 0), (1, 0.5))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
