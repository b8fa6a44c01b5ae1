"""Edge coordinates of the fiber surface: the sign-twisted Ptolemy
recursion, its fixed points, and the 3x3 monodromy Jacobian route to the
invariant.

Edges N+1, N+2, N+3 carry the initial coordinates (x, y, z); each letter
of the word computes one interior edge value from the current boundary
triple, and the three initial edges are finally identified with interior
edges N-1, N-t_n and N.  A fixed point of that identification with the
gauge x = 1 determines the shapes, the fiber character coordinates and,
by differentiating the recursion in the three initials, a 3x3 matrix J
whose characteristic polynomial det(tI - J) is the invariant once more.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from . import bundle, geometry


class PtolemySolveError(RuntimeError):
    """Raised when no sign branch yields a usable fixed point."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class AssignmentMismatchError(ValueError):
    """Raised when edge values do not satisfy a word's recursion."""


_BRANCHES = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_CLOSING_TOL = 1e-10
_SHAPE_TOL = 1e-9


class Dual3:
    """Complex value carrying three partial derivatives.

    The gradient slots are the partials with respect to the three initial
    edge coordinates; plain numbers entering the arithmetic are treated
    as constants.
    """

    __slots__ = ("value", "grad")

    def __init__(self, value, grad=(0.0, 0.0, 0.0)):
        self.value = complex(value)
        self.grad = np.array(grad, dtype=complex)

    @staticmethod
    def _lift(other):
        if isinstance(other, Dual3):
            return other
        return Dual3(other)

    def __add__(self, other):
        o = self._lift(other)
        return Dual3(self.value + o.value, self.grad + o.grad)

    __radd__ = __add__

    def __neg__(self):
        return Dual3(-self.value, -self.grad)

    def __sub__(self, other):
        o = self._lift(other)
        return Dual3(self.value - o.value, self.grad - o.grad)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Dual3(self.value * o.value, self.grad * o.value + self.value * o.grad)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        return Dual3(
            self.value / o.value,
            (self.grad * o.value - self.value * o.grad) / (o.value * o.value),
        )

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __repr__(self):
        return f"Dual3({self.value!r}, grad={tuple(self.grad)!r})"


@dataclass(frozen=True)
class PtolemyAssignment:
    """Solved edge coordinates for a word, gauge-fixed to x = 1.

    c holds the values of edges 1..N+3 in order; value(i) looks up a
    1-based edge index.  branch records the square-root sign pair the
    accepted seed came from, accepted_branches every pair that closed up
    with matching shapes.
    """

    word: bundle.RLWord
    c: tuple
    branch: tuple
    accepted_branches: tuple
    step_residual: float
    closing_residual: float
    shape_residual: float

    def value(self, i):
        return self.c[i - 1]

    @property
    def size(self):
        return self.word.size

    @property
    def initials(self):
        n = self.word.size
        return (self.c[n], self.c[n + 1], self.c[n + 2])


def _replay(sched, x, y, z):
    """Run the recursion from initial values; index 0 of the result is
    unused so edges can be addressed 1-based."""
    n = sched.size
    c = [None] * (n + 4)
    c[n + 1], c[n + 2], c[n + 3] = x, y, z
    for step in sched.steps:
        a, b, g = step.triple
        ca, cb, cg = c[a], c[b], c[g]
        if step.letter == "R":
            c[step.index] = (ca * ca + cg * cg) / cb
        else:
            c[step.index] = (cb * cb + cg * cg) / ca
    return c


def _extract_shapes(sched, c):
    zs = []
    for step in sched.steps:
        a, b, g = step.triple
        if step.letter == "R":
            zs.append(-(c[g] * c[g]) / (c[a] * c[a]))
        else:
            zs.append(-(c[b] * c[b]) / (c[g] * c[g]))
    return np.array(zs, dtype=complex)


def _closing_residuals(sched, c):
    x, y, z = c[sched.size + 1], c[sched.size + 2], c[sched.size + 3]
    (o1, i1), (o2, i2), (o3, i3) = sched.closing
    return np.array([c[i1] - x, c[i2] - y, c[i3] - z], dtype=complex)


def _step_residual(sched, c):
    worst = 0.0
    for step in sched.steps:
        ca, cb, cg = c[step.triple[0]], c[step.triple[1]], c[step.triple[2]]
        ci = c[step.index]
        if step.letter == "R":
            lhs, rhs = ci * cb, ca * ca + cg * cg
        else:
            lhs, rhs = ci * ca, cb * cb + cg * cg
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


def validate_assignment(w, p):
    """Raise AssignmentMismatchError unless p's values satisfy w's step
    and closing equations."""
    if p.word.letters != w.letters:
        raise AssignmentMismatchError("assignment was solved for a different word")
    if len(p.c) != w.size + 3:
        raise AssignmentMismatchError("assignment has the wrong number of edge values")
    if any(v == 0 for v in p.c):
        raise AssignmentMismatchError("assignment contains a zero edge value")
    sched = bundle.ptolemy_schedule(w)
    c = [None] + [complex(v) for v in p.c]
    worst = max(_step_residual(sched, c), float(np.max(np.abs(_closing_residuals(sched, c)))))
    if worst > 1e-8:
        raise AssignmentMismatchError(f"edge values violate the recursion (residual {worst:.3e})")


def _polish(sched, y, z, tol, max_iter):
    """Gauss-Newton on the closing residuals in the two free initials.

    Three equations, two unknowns; the system is consistent at a true
    fixed point, so least squares drives the residual to rounding level.
    """
    best = (np.inf, y, z)
    for _ in range(max_iter):
        duals = _replay(sched, Dual3(1.0), Dual3(y, (0, 1, 0)), Dual3(z, (0, 0, 1)))
        (o1, i1), (o2, i2), (o3, i3) = sched.closing
        r = np.array(
            [duals[i1].value - 1.0, duals[i2].value - y, duals[i3].value - z],
            dtype=complex,
        )
        rm = float(np.max(np.abs(r)))
        if not np.isfinite(rm):
            break
        if rm < best[0]:
            best = (rm, y, z)
        if rm < tol:
            break
        J = np.array(
            [
                duals[i1].grad[1:],
                duals[i2].grad[1:] - np.array([1.0, 0.0]),
                duals[i3].grad[1:] - np.array([0.0, 1.0]),
            ],
            dtype=complex,
        )
        if not np.all(np.isfinite(J)):
            break
        try:
            delta, *_ = np.linalg.lstsq(J, -r, rcond=None)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(delta)):
            break
        y = y + delta[0]
        z = z + delta[1]
    return best


def solve_ptolemy(w, s, opts=None):
    """Find edge coordinates matching the geometric solution of w.

    Seeds come from the shape relations of the first two steps: with the
    gauge x = 1 they force z = e2 sqrt(-z_2)/(1 - z_1) and
    y = e1 sqrt(-z_1) z up to the two square-root signs (e1, e2).  Each of
    the four branches is polished on the closing system; a branch is
    accepted when closing holds and the extracted shapes match s.  The
    first accepted branch in the fixed enumeration order wins, so the
    result is deterministic.
    """
    opts = opts or geometry.SolverOptions()
    sched = bundle.ptolemy_schedule(w)
    z1, z2 = complex(s.z[0]), complex(s.z[1])
    target = np.asarray(s.z, dtype=complex)
    accepted = []
    results = {}
    diagnostics = {}
    for e1, e2 in _BRANCHES:
        z0 = e2 * cmath.sqrt(-z2) / (1.0 - z1)
        y0 = e1 * cmath.sqrt(-z1) * z0
        with np.errstate(all="ignore"):
            rm, y, z = _polish(sched, y0, z0, opts.tolerance, opts.max_iterations)
        if not np.isfinite(rm):
            diagnostics[(e1, e2)] = {"closing": float("inf")}
            continue
        c = _replay(sched, 1.0 + 0j, y, z)
        closing = float(np.max(np.abs(_closing_residuals(sched, c))))
        shapes = _extract_shapes(sched, c)
        shape_dev = float(np.max(np.abs(shapes - target)))
        diagnostics[(e1, e2)] = {"closing": closing, "shape_deviation": shape_dev}
        if closing < _CLOSING_TOL and shape_dev < _SHAPE_TOL:
            accepted.append((e1, e2))
            results[(e1, e2)] = (c, closing, shape_dev)
    if not accepted:
        raise PtolemySolveError(
            f"no sign branch closes up for {w.letters}", {"branches": diagnostics}
        )
    branch = accepted[0]
    c, closing, shape_dev = results[branch]
    return PtolemyAssignment(
        word=w,
        c=tuple(c[1:]),
        branch=branch,
        accepted_branches=tuple(accepted),
        step_residual=_step_residual(sched, c),
        closing_residual=closing,
        shape_residual=shape_dev,
    )


def shapes_from_ptolemy(p):
    """Shape parameters carried by an assignment, as a ShapeSolution.

    The reported residual is the multiplicative edge/completeness
    residual of the extracted shapes, computed through the word's
    equation exponents.
    """
    sched = bundle.ptolemy_schedule(p.word)
    c = [None] + list(p.c)
    z = _extract_shapes(sched, c)
    resid = geometry.multiplicative_residual(p.word, z)
    return geometry.ShapeSolution.from_shapes(z, resid)


def character_coords(x, y, z):
    """Trace coordinates of the fiber representation attached to the
    initial triple; homogeneous of degree 0."""
    x, y, z = complex(x), complex(y), complex(z)
    if x == 0 or y == 0 or z == 0:
        raise ValueError("trace coordinates need nonzero inputs")
    ss = x * x + y * y + z * z
    return (ss / (x * z), -ss / (y * z), -ss / (x * y))


@dataclass(frozen=True)
class AlexanderResult:
    """Monic cubic det(tI - J) with the 3x3 Jacobian J and its spectrum.

    J always has eigenvalue 1 (the scaling direction); the other two
    eigenvalues form a reciprocal pair, so det J = 1.
    """

    tau: object  # LaurentPoly
    jacobian: np.ndarray
    det_j: complex
    det_i_minus_j: complex
    eigenvalues: tuple


def alexander_polynomial(w, p):
    """Route C: characteristic polynomial of the recursion's Jacobian in
    the three initial coordinates, evaluated at the fixed point."""
    from .laurent import LaurentPoly

    validate_assignment(w, p)
    sched = bundle.ptolemy_schedule(w)
    x0, y0, z0 = p.initials
    duals = _replay(
        sched,
        Dual3(x0, (1, 0, 0)),
        Dual3(y0, (0, 1, 0)),
        Dual3(z0, (0, 0, 1)),
    )
    J = np.array([duals[inner].grad for _outer, inner in sched.closing])
    tr = complex(np.trace(J))
    det = complex(np.linalg.det(J))
    e2 = (tr * tr - complex(np.trace(J @ J))) / 2.0
    tau = LaurentPoly({3: 1.0, 2: -tr, 1: e2, 0: -det})
    return AlexanderResult(
        tau=tau,
        jacobian=J,
        det_j=det,
        det_i_minus_j=complex(np.linalg.det(np.eye(3) - J)),
        eigenvalues=tuple(np.linalg.eigvals(J)),
    )


@dataclass(frozen=True)
class HomogeneityReport:
    """Deviations observed when the initial triple is rescaled by k.

    scale_deviation: interior values against k times the originals.
    jacobian_deviation: J recomputed at the rescaled point against J.
    tau_deviation: coefficientwise change of det(tI - J).
    euler_deviation: J applied to the initials against the initials.
    """

    scale_deviation: float
    jacobian_deviation: float
    tau_deviation: float
    euler_deviation: float

    def ok(self, tol=1e-9):
        return (
            max(
                self.scale_deviation,
                self.jacobian_deviation,
                self.tau_deviation,
                self.euler_deviation,
            )
            < tol
        )


def homogeneity_check(w, p, k):
    """Verify degree-1 homogeneity of the recursion at an assignment.

    Rescaling the initials by k rescales every edge value by k, leaves J
    and det(tI - J) unchanged, and makes the initial triple a fixed
    vector of J.
    """
    k = complex(k)
    if k == 0:
        raise ValueError("rescaling factor must be nonzero")
    validate_assignment(w, p)
    sched = bundle.ptolemy_schedule(w)
    x0, y0, z0 = p.initials
    base = _replay(sched, x0, y0, z0)
    scaled = _replay(sched, k * x0, k * y0, k * z0)
    scale_dev = max(
        abs(scaled[i] - k * base[i]) / max(1.0, abs(k * base[i]))
        for i in range(1, sched.size + 4)
    )
    res = alexander_polynomial(w, p)
    duals = _replay(
        sched,
        Dual3(k * x0, (1, 0, 0)),
        Dual3(k * y0, (0, 1, 0)),
        Dual3(k * z0, (0, 0, 1)),
    )
    J2 = np.array([duals[inner].grad for _outer, inner in sched.closing])
    jac_dev = float(np.max(np.abs(J2 - res.jacobian)))
    tr = complex(np.trace(J2))
    det = complex(np.linalg.det(J2))
    e2 = (tr * tr - complex(np.trace(J2 @ J2))) / 2.0
    tau_dev = max(
        abs(res.tau.coeff(3) - 1.0),
        abs(res.tau.coeff(2) + tr),
        abs(res.tau.coeff(1) - e2),
        abs(res.tau.coeff(0) + det),
    )
    v = np.array([x0, y0, z0], dtype=complex)
    euler_dev = float(np.max(np.abs(res.jacobian @ v - v)))
    return HomogeneityReport(
        scale_deviation=float(scale_dev),
        jacobian_deviation=jac_dev,
        tau_deviation=float(tau_dev),
        euler_deviation=euler_dev,
    )
