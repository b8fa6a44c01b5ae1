"""Shared fixtures: solved reference words and the flattening search."""

import numpy as np
import pytest

import twistloop as tl

# Regression values for the word RRLLL, quoted to five decimals.
R2L3_SHAPES = np.array(
    [
        -0.19373 + 0.90574j,
        0.80627 + 0.90574j,
        -0.19373 + 0.90574j,
        0.35508 + 0.35232j,
        0.35508 + 0.35232j,
    ]
)
R2L3_VOLUME = 4.17775
R2L3_ALPHA = 31.45667 + 9.44217j
R2L3_INITIALS = (1.00000 + 0j, 0.26938 - 0.65395j, 0.64492 - 0.35232j)
R2L3_EDGE_VALUES = (
    -0.06329 - 0.80677j,
    0.26938 - 0.65395j,
    1.00000 + 0j,
    1.00000 + 0j,
    0.64492 - 0.35232j,
)

# Volume of the RLL bundle, frozen from a 50-digit Newton/dilogarithm run.
RLL_VOLUME = 2.66674478344905979079671246261

# Value of the single-valued dilogarithm at exp(i pi / 3), frozen from a
# 25-digit series evaluation.
D_REGULAR = 1.014941606409653625021203

# Pass/fail lines registered by the acceptance tests, echoed at the end of
# the run so they survive output capture.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def r2l3():
    w = tl.parse_word("R2L3")
    return w, tl.solve_geometric(w)


@pytest.fixture(scope="session")
def r2l3_assignment(r2l3):
    w, s = r2l3
    return tl.solve_ptolemy(w, s)


@pytest.fixture(scope="session")
def rll():
    w = tl.parse_word("RLL")
    return w, tl.solve_geometric(w)


@pytest.fixture(scope="session")
def rll_assignment(rll):
    w, s = rll
    return tl.solve_ptolemy(w, s)


def _primitive(vec):
    from math import gcd

    g = 0
    for v in vec:
        g = gcd(g, abs(v))
    return tuple(v // g for v in vec) if g else tuple(vec)


def alternative_flattenings(w, limit=24):
    """Valid flattenings of the word's gluing data, canonical one first.

    The two required conditions leave the affine space f = 1 - fp - fpp
    with (G' - G) fp + (G'' - G) fpp = 0, so alternatives come from the
    integer kernel of that combined matrix: basis vectors, their
    negatives and pairwise sums, up to limit.
    """
    import sympy

    ge = tl.gluing_exponents(w)
    N = w.size
    m = sympy.Matrix(np.hstack([ge.gp - ge.g, ge.gpp - ge.g]).tolist())
    basis = []
    for v in m.nullspace():
        denom = sympy.lcm([sympy.fraction(sympy.nsimplify(x))[1] for x in v])
        basis.append(_primitive([int(x * denom) for x in v]))
    candidates = [tuple([0] * (2 * N))]
    for i, b in enumerate(basis):
        candidates.append(b)
        candidates.append(tuple(-x for x in b))
        for b2 in basis[i + 1 :]:
            candidates.append(tuple(x + y for x, y in zip(b, b2)))
    out = []
    seen = set()
    for vec in candidates[:limit]:
        if vec in seen:
            continue
        seen.add(vec)
        fp = vec[:N]
        fpp = vec[N:]
        f = tuple(1 - a - b for a, b in zip(fp, fpp))
        out.append((f, tuple(fp), tuple(fpp)))
    return out
