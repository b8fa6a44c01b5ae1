"""Complex Laurent polynomials in one variable t, matrices of them, and
determinants by evaluation-interpolation.

A Laurent polynomial is stored as a finitely supported map from integer
exponents to complex coefficients.  Results of the invariant computations
live in this ring and are only well defined up to a unit +-t^k, so the
module also provides unit normalization and comparison up to units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative threshold below which determinant coefficients are treated as
# interpolation noise and dropped.
DEFAULT_PRUNE = 1e-10


class LaurentPoly:
    """Finitely supported map exponent -> complex coefficient.

    Immutable by convention: no method mutates self, arithmetic returns new
    objects.  Coefficients that are exactly zero are never stored; use
    pruned() to drop coefficients that are merely small relative to the
    largest one.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for e, v in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                v = complex(v)
                if v != 0:
                    c[int(e)] = c.get(int(e), 0j) + v
        self._c = {e: v for e, v in c.items() if v != 0}

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1.0})

    @classmethod
    def constant(cls, value):
        return cls({0: value})

    @classmethod
    def t_power(cls, k, coeff=1.0):
        return cls({k: coeff})

    # -- inspection

    @property
    def coeffs(self):
        return dict(self._c)

    @property
    def is_zero(self):
        return not self._c

    @property
    def min_exp(self):
        if not self._c:
            raise ValueError("zero polynomial has no support")
        return min(self._c)

    @property
    def max_exp(self):
        if not self._c:
            raise ValueError("zero polynomial has no support")
        return max(self._c)

    @property
    def span(self):
        """max_exp - min_exp, the width of the support."""
        return self.max_exp - self.min_exp

    def coeff(self, e):
        return self._c.get(e, 0j)

    def support(self):
        return sorted(self._c)

    # -- arithmetic

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, 0j) + v
        return LaurentPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, LaurentPoly) else LaurentPoly.constant(-complex(other)))

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            s = complex(other)
            return LaurentPoly({e: v * s for e, v in self._c.items()})
        c = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                c[e1 + e2] = c.get(e1 + e2, 0j) + v1 * v2
        return LaurentPoly(c)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = complex(scalar)
        return LaurentPoly({e: v / s for e, v in self._c.items()})

    def shifted(self, k):
        """Multiply by t^k."""
        return LaurentPoly({e + k: v for e, v in self._c.items()})

    def derivative_at_one(self):
        """d/dt at t=1, directly from coefficients."""
        return sum(e * v for e, v in self._c.items())

    def pruned(self, rel=DEFAULT_PRUNE):
        """Drop coefficients smaller than rel times the largest modulus."""
        if not self._c:
            return self
        m = max(abs(v) for v in self._c.values())
        return LaurentPoly({e: v for e, v in self._c.items() if abs(v) > rel * m})

    # -- misc

    def __call__(self, t0):
        return lp_eval(self, t0)

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "LaurentPoly(0)"
        terms = ", ".join(f"{e}: {v:.6g}" for e, v in sorted(self._c.items()))
        return f"LaurentPoly({{{terms}}})"


def lp_eval(p, t0):
    """Evaluate p at the nonzero point t0."""
    t0 = complex(t0)
    if t0 == 0:
        raise ValueError("evaluation point must be nonzero")
    return sum(v * t0 ** e for e, v in p.coeffs.items())


@dataclass(frozen=True)
class LaurentMatrix:
    """Square matrix of Laurent polynomials with per-row degree bounds."""

    n: int
    entries: tuple
    degree_bounds: tuple  # per row: (min exponent, max exponent), (0, 0) for zero rows

    @classmethod
    def from_rows(cls, rows):
        n = len(rows)
        ents = tuple(tuple(row) for row in rows)
        for row in ents:
            if len(row) != n:
                raise ValueError("matrix must be square")
        bounds = []
        for row in ents:
            mins = [p.min_exp for p in row if not p.is_zero]
            maxs = [p.max_exp for p in row if not p.is_zero]
            bounds.append((min(mins), max(maxs)) if mins else (0, 0))
        return cls(n=n, entries=ents, degree_bounds=tuple(bounds))

    def evaluated(self, t0):
        """Entrywise evaluation, as a dense numpy array."""
        t0 = complex(t0)
        out = np.zeros((self.n, self.n), dtype=complex)
        for i in range(self.n):
            for j in range(self.n):
                p = self.entries[i][j]
                if not p.is_zero:
                    out[i, j] = lp_eval(p, t0)
        return out


@dataclass(frozen=True)
class UnitAlignment:
    """Unit +-t^shift aligning one polynomial with another.

    relative_deviation is the largest coefficient deviation divided by the
    largest coefficient modulus of the reference polynomial.
    """

    shift: int
    sign: int
    relative_deviation: float


def poly_det(m, radius=1.0, prune=DEFAULT_PRUNE):
    """Determinant of a LaurentMatrix by sampling on a circle.

    Each row is shifted so its minimal exponent is zero, the shifted matrix
    is evaluated at D+1 points radius * (root of unity) where D is the sum
    of the row degree spreads, and the coefficients are recovered with an
    FFT.  The row shifts are folded back into the result.
    """
    row_min = []
    D = 0
    for i, (lo, hi) in enumerate(m.degree_bounds):
        if all(p.is_zero for p in m.entries[i]):
            return LaurentPoly.zero()
        row_min.append(lo)
        D += hi - lo
    total_shift = sum(row_min)
    count = D + 1
    nodes = radius * np.exp(2j * np.pi * np.arange(count) / count)
    vals = np.empty(count, dtype=complex)
    for k, t0 in enumerate(nodes):
        M = m.evaluated(t0)
        for i, lo in enumerate(row_min):
            if lo:
                M[i, :] *= t0 ** (-lo)
        vals[k] = np.linalg.det(M)
    # vals[k] = sum_d c_d node_k^d with c_d = a_d * radius^d
    cs = np.fft.fft(vals) / count
    p = LaurentPoly({d + total_shift: cs[d] / radius ** d for d in range(count)})
    return p.pruned(prune)


def normalize_unit(p):
    """Scale p by a unit +-t^k so the minimal exponent is 0 and the constant
    coefficient has positive real part (ties broken toward positive
    imaginary part)."""
    if p.is_zero:
        raise ValueError("cannot normalize the zero polynomial")
    q = p.shifted(-p.min_exp)
    a0 = q.coeff(0)
    if a0.real < 0 or (a0.real == 0 and a0.imag < 0):
        q = -q
    return q


def compare_up_to_unit(p, q, tol=1e-8):
    """Find a unit sign * t^shift with sign * t^shift * q matching p.

    Returns a UnitAlignment, or None when the degree spans differ or no
    sign brings the maximal coefficient deviation below tol relative to
    the largest coefficient of p.
    """
    if p.is_zero or q.is_zero:
        raise ValueError("cannot compare zero polynomials")
    if p.span != q.span:
        return None
    shift = p.min_exp - q.min_exp
    qs = q.shifted(shift)
    scale = max(abs(v) for v in p.coeffs.values())
    best = None
    for sign in (1, -1):
        dev = 0.0
        for e in set(p.support()) | set(qs.support()):
            dev = max(dev, abs(p.coeff(e) - sign * qs.coeff(e)))
        rel = dev / scale
        if best is None or rel < best[1]:
            best = (sign, rel)
    sign, rel = best
    if rel > tol:
        return None
    return UnitAlignment(shift=shift, sign=sign, relative_deviation=rel)
