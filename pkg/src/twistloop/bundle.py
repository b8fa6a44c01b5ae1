"""Monodromy words over {R, L} and the combinatorics of the associated
layered triangulation of a hyperbolic once-punctured torus bundle.

A word with R-block and L-block lengths s_1, t_1, ..., s_n, t_n describes
the monodromy as a product of the positive mapping classes

    R = [[1, 1], [0, 1]]      L = [[1, 0], [1, 1]]

and the triangulation has one tetrahedron and one edge per letter.  The
functions here produce, for a validated word, the edge equation exponents,
their lift to the infinite cyclic cover (a power of t records the deck
level), the peripheral curve exponents, and the recursion schedule for the
edge coordinates of the fiber surface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

# Shape companion selectors: z, 1/(1-z), 1 - 1/z.
PLAIN, PRIMED, DOUBLE_PRIMED = 0, 1, 2


class InvalidWordError(ValueError):
    """Raised when a string cannot be used as a monodromy word."""


@dataclass(frozen=True)
class RLWord:
    """Validated monodromy word in canonical cyclic position.

    letters starts with R and ends with an L-block of length at least two;
    rotation records how far the input was rotated left to get there.
    """

    letters: str
    rotation: int = 0

    @property
    def size(self):
        return len(self.letters)

    @property
    def blocks(self):
        """Block lengths ((s_1, t_1), ..., (s_n, t_n))."""
        runs = [(m.group(0)[0], len(m.group(0))) for m in re.finditer(r"R+|L+", self.letters)]
        return tuple((runs[k][1], runs[k + 1][1]) for k in range(0, len(runs), 2))

    @property
    def final_l_block(self):
        return self.blocks[-1][1]

    def letter(self, i):
        """Cyclic letter lookup, 1-based; letter(0) is the last letter."""
        return self.letters[(i - 1) % len(self.letters)]

    def __str__(self):
        return self.letters


def _expand_shorthand(text):
    out = []
    for ch, digits in re.findall(r"([A-Za-z])(\d*)", text):
        out.append(ch.upper() * (int(digits) if digits else 1))
    expanded = "".join(out)
    if "".join(re.findall(r"[A-Za-z]\d*", text)) != text:
        raise InvalidWordError(f"cannot parse word {text!r}")
    return expanded


def parse_word(text):
    """Parse and canonicalize a monodromy word.

    Accepts literal strings over {R, L} (case-insensitive) and exponent
    shorthand such as R2L3.  The word is rotated to start with R and end
    with an L-block of length >= 2; the applied rotation is recorded so
    edge indices can be mapped back to the input.
    """
    if not isinstance(text, str) or not text.strip():
        raise InvalidWordError("empty word")
    letters = _expand_shorthand(text.strip())
    if set(letters) - {"R", "L"}:
        bad = sorted(set(letters) - {"R", "L"})
        raise InvalidWordError(f"invalid characters {bad} in word {text!r}")
    if "R" not in letters or "L" not in letters:
        raise InvalidWordError(f"word {letters!r} is not hyperbolic: it needs both R and L")
    n = len(letters)
    for k in range(n):
        rot = letters[k:] + letters[:k]
        if rot[0] == "R" and rot.endswith("LL"):
            return RLWord(letters=rot, rotation=k)
    raise InvalidWordError(
        f"word {letters!r} is unsupported: no cyclic rotation ends with an L-block of length >= 2"
    )


def monodromy_matrix(w):
    """Ordered product of the letter matrices, as a 2x2 integer array."""
    R = np.array([[1, 1], [0, 1]], dtype=np.int64)
    L = np.array([[1, 0], [1, 1]], dtype=np.int64)
    m = np.eye(2, dtype=np.int64)
    for ch in w.letters:
        m = m @ (R if ch == "R" else L)
    return m


@dataclass(frozen=True)
class TwistedRowPattern:
    """Per-edge entry lists (column, shape companion selector, t power).

    Columns are 0-based.  Selector PLAIN carries weight 1, the other two
    weight 2 (they come from squared factors in the edge equations).
    Setting t=0 leaves an upper-triangular pattern with unit diagonal;
    exactly the rows N - t_n, N - 1 and N (1-based) contain t^1 entries.
    """

    size: int
    rows: tuple  # rows[i] = tuple of (col, kind, tpow)


def twisted_row_pattern(w):
    """Walk each edge equation around the word, recording deck levels.

    For edge i the walk finds the smallest j >= 1 with letter(i+j) equal
    to letter(i).  The equation reads

        z_i * (z?_{i+1})^2 ... (z?_{i+j})^2 * z_{i+j+1}

    with ? = primed for an R letter and double-primed for an L letter, all
    indices cyclic.  A factor whose unwrapped position exceeds N lives one
    deck level up and is recorded with t power 1.
    """
    N = w.size
    rows = []
    for i in range(1, N + 1):
        li = w.letter(i)
        j = 1
        while w.letter(i + j) != li:
            j += 1
        kind = PRIMED if li == "R" else DOUBLE_PRIMED
        row = []

        def visit(k, which):
            col = (k - 1) % N
            row.append((col, which, 1 if k > N else 0))

        visit(i, PLAIN)
        for k in range(i + 1, i + j + 1):
            visit(k, kind)
        visit(i + j + 1, PLAIN)
        rows.append(tuple(row))
    return TwistedRowPattern(size=N, rows=tuple(rows))


@dataclass(frozen=True)
class GluingExponents:
    """Integer exponent matrices of the edge equations (deck levels summed
    out).  Row i of (g, gp, gpp) gives the exponents of z_j, 1/(1-z_j),
    1 - 1/z_j in the equation of edge i."""

    g: np.ndarray
    gp: np.ndarray
    gpp: np.ndarray


def gluing_exponents(w):
    pat = twisted_row_pattern(w)
    N = pat.size
    mats = [np.zeros((N, N), dtype=np.int64) for _ in range(3)]
    for i, row in enumerate(pat.rows):
        for col, kind, _tpow in row:
            mats[kind][i, col] += 1 if kind == PLAIN else 2
    return GluingExponents(g=mats[0], gp=mats[1], gpp=mats[2])


def meridian_exponents(w):
    """Exponent vectors of the meridian-like peripheral equation.

    Each R letter contributes (1 - 1/z)^-1 and each L letter contributes
    1/(1-z); the plain-z vector is zero.  Returns (c, cp, cpp).
    """
    N = w.size
    c = np.zeros(N, dtype=np.int64)
    cp = np.zeros(N, dtype=np.int64)
    cpp = np.zeros(N, dtype=np.int64)
    for idx, ch in enumerate(w.letters):
        if ch == "R":
            cpp[idx] = -1
        else:
            cp[idx] = 1
    return c, cp, cpp


@dataclass(frozen=True)
class ScheduleStep:
    """One step of the edge coordinate recursion: new edge index (1-based),
    the governing letter, and the boundary triple (alpha, beta, gamma)
    of edge indices before the step."""

    index: int
    letter: str
    triple: tuple


@dataclass(frozen=True)
class PtolemySchedule:
    """Full recursion schedule for a word of size N.

    Edges N+1, N+2, N+3 are the initial fiber edges; step i computes edge
    i from the current triple and updates it (R keeps alpha, L keeps
    beta, the new edge always enters as gamma).  closing maps each
    initial edge to the interior edge it is identified with.
    """

    size: int
    steps: tuple
    final_triple: tuple
    closing: tuple  # ((N+1, N-1), (N+2, N-t_n), (N+3, N))


def ptolemy_schedule(w):
    N = w.size
    triple = (N + 1, N + 2, N + 3)
    steps = []
    for i in range(1, N + 1):
        let = w.letter(i - 1)  # the step letter trails the edge index by one
        steps.append(ScheduleStep(index=i, letter=let, triple=triple))
        a, b, g = triple
        triple = (a, g, i) if let == "R" else (g, b, i)
    tn = w.final_l_block
    closing = ((N + 1, N - 1), (N + 2, N - tn), (N + 3, N))
    return PtolemySchedule(size=N, steps=tuple(steps), final_triple=triple, closing=closing)
