"""Twisted 1-loop invariant of a once-punctured torus bundle.

Two computation routes live here.  Route A builds the twisted edge
equation matrices from the letter walk, combines them with the shape
log-derivatives and takes a Laurent determinant, normalized by a
combinatorial flattening.  Route C-big differentiates the edge coordinate
recursion together with its three closing identifications, giving an
(N+3) x (N+3) Jacobian whose determinant is the same polynomial up to a
unit.  A general engine accepts user-supplied twisted gluing data so the
same determinant can be evaluated outside the bundle setting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bundle
from .laurent import LaurentMatrix, LaurentPoly, lp_eval, normalize_unit, poly_det


class FlatteningError(ValueError):
    """Raised when a flattening fails one of its required conditions."""


class DegenerateShapeError(ValueError):
    """Raised when a shape sits on a multiplier pole (z in {0, 1})."""


@dataclass(frozen=True)
class TwistedGluingData:
    """Twisted edge equation exponent matrices with flattening data.

    g, gp, gpp hold the t-graded exponents of z, 1/(1-z) and 1 - 1/z in
    each edge equation.  completeness optionally carries plain integer
    exponent vector triples for peripheral equations; they are not used by
    the determinant, only reported on.
    """

    size: int
    g: LaurentMatrix
    gp: LaurentMatrix
    gpp: LaurentMatrix
    flattening: tuple  # (f, fp, fpp) integer vectors
    completeness: tuple = ()  # ((c, cp, cpp), ...) integer vector triples

    def __post_init__(self):
        n = self.size
        for m in (self.g, self.gp, self.gpp):
            if m.n != n:
                raise ValueError("matrix size disagrees with declared size")
        if len(self.flattening) != 3 or any(len(v) != n for v in self.flattening):
            raise ValueError("flattening must be three length-N integer vectors")
        for m in (self.g, self.gp, self.gpp):
            for row in m.entries:
                for p in row:
                    for v in p.coeffs.values():
                        if abs(v.imag) > 1e-9 or abs(v.real - round(v.real)) > 1e-9:
                            raise ValueError("exponent matrices must have integer coefficients")
                    if not p.is_zero and lp_eval(p, 1.0).real < -1e-9:
                        raise ValueError("exponent matrices must be nonnegative at t=1")

    def at_one(self):
        """The three matrices evaluated at t=1, as integer arrays."""
        out = []
        for m in (self.g, self.gp, self.gpp):
            out.append(np.round(m.evaluated(1.0).real).astype(np.int64))
        return tuple(out)


@dataclass(frozen=True)
class FlatteningReport:
    """Outcome of the flattening condition checks.

    sum_ok: f + fp + fpp is the all-ones vector.
    combination_ok: G f + G' fp + G'' fpp at t=1 is the all-twos vector.
    completeness_values: the (informational) pairings with any supplied
    peripheral vectors; zero for a flattening adapted to those curves.
    """

    sum_ok: bool
    combination_ok: bool
    completeness_values: tuple

    @property
    def ok(self):
        return self.sum_ok and self.combination_ok


@dataclass(frozen=True)
class OneLoopResult:
    """A computed invariant polynomial plus bookkeeping.

    tau is raw (as produced by the determinant); normalized() applies the
    unit convention.  route identifies the computation path.
    """

    tau: LaurentPoly
    route: str
    diagnostics: dict

    def normalized(self):
        return normalize_unit(self.tau)

    def tau_at_one(self):
        return lp_eval(self.tau, 1.0)


def bundle_gluing_data(w):
    """Twisted gluing data of the word's layered triangulation.

    Uses the canonical flattening (1,...,1), (0,...,0), (0,...,0) and
    attaches the peripheral completeness vectors.
    """
    pat = bundle.twisted_row_pattern(w)
    N = pat.size
    cells = [[[{}, {}, {}] for _ in range(N)] for _ in range(N)]
    for i, row in enumerate(pat.rows):
        for col, kind, tpow in row:
            cell = cells[i][col][kind]
            cell[tpow] = cell.get(tpow, 0) + (1 if kind == bundle.PLAIN else 2)
    mats = []
    for kind in (bundle.PLAIN, bundle.PRIMED, bundle.DOUBLE_PRIMED):
        rows = [[LaurentPoly(cells[i][j][kind]) for j in range(N)] for i in range(N)]
        mats.append(LaurentMatrix.from_rows(rows))
    f = tuple([1] * N)
    zero = tuple([0] * N)
    c, cp, cpp = bundle.meridian_exponents(w)
    return TwistedGluingData(
        size=N,
        g=mats[0],
        gp=mats[1],
        gpp=mats[2],
        flattening=(f, zero, zero),
        completeness=((tuple(int(v) for v in c), tuple(int(v) for v in cp), tuple(int(v) for v in cpp)),),
    )


def validate_flattening(d):
    """Check the two required flattening conditions; report-valued.

    The pairing against supplied peripheral vectors is computed for
    information only, it is not part of the pass/fail outcome.
    """
    f, fp, fpp = (np.asarray(v, dtype=np.int64) for v in d.flattening)
    sum_ok = bool(np.all(f + fp + fpp == 1))
    g1, gp1, gpp1 = d.at_one()
    combo = g1 @ f + gp1 @ fp + gpp1 @ fpp
    combination_ok = bool(np.all(combo == 2))
    pairings = []
    for c, cp, cpp in d.completeness:
        pairings.append(int(np.asarray(c) @ f + np.asarray(cp) @ fp + np.asarray(cpp) @ fpp))
    return FlatteningReport(
        sum_ok=sum_ok,
        combination_ok=combination_ok,
        completeness_values=tuple(pairings),
    )


def _zetas(s, n):
    if s.size != n:
        raise ValueError("shape count disagrees with data size")
    zs = (s.zeta, s.zeta_p, s.zeta_pp)
    for v in zs:
        if not np.all(np.isfinite(v)):
            raise DegenerateShapeError("a shape lies on a multiplier pole")
    return zs


def _combined_matrix(d, s):
    """G(t) diag(zeta) + G'(t) diag(zeta') + G''(t) diag(zeta'')."""
    zeta, zeta_p, zeta_pp = _zetas(s, d.size)
    rows = []
    for i in range(d.size):
        row = []
        for j in range(d.size):
            p = (
                d.g.entries[i][j] * zeta[j]
                + d.gp.entries[i][j] * zeta_p[j]
                + d.gpp.entries[i][j] * zeta_pp[j]
            )
            row.append(p)
        rows.append(row)
    return LaurentMatrix.from_rows(rows)


def one_loop_general(d, s, route="general"):
    """Invariant from explicit twisted gluing data and shapes.

    det of the combined matrix divided by the product of the shape
    log-derivatives raised to the flattening exponents.
    """
    report = validate_flattening(d)
    if not report.sum_ok:
        raise FlatteningError("flattening violates the vector-sum condition")
    if not report.combination_ok:
        raise FlatteningError("flattening violates the matrix-combination condition")
    zeta, zeta_p, zeta_pp = _zetas(s, d.size)
    f, fp, fpp = (np.asarray(v, dtype=np.int64) for v in d.flattening)
    prefactor = complex(np.prod(zeta ** f) * np.prod(zeta_p ** fp) * np.prod(zeta_pp ** fpp))
    m = _combined_matrix(d, s)
    det = poly_det(m)
    tau = det / prefactor
    return OneLoopResult(
        tau=tau,
        route=route,
        diagnostics={
            "tau_at_one": abs(lp_eval(tau, 1.0)),
            "min_exp": tau.min_exp,
            "max_exp": tau.max_exp,
            "prefactor": prefactor,
            "flattening_report": report,
        },
    )


def one_loop_det_x(w, s):
    """Route A: the invariant of a word from its twisted gluing data.

    Shares the general engine's arithmetic path so that exported data
    reproduces this result identically.
    """
    return one_loop_general(bundle_gluing_data(w), s, route="A")


def x_matrix(w, s):
    """The determinant matrix in multiplier form.

    Each walk entry contributes t^power times one of the multipliers
    1 (plain), 2 z/(1-z) (primed) or 2/(z-1) (double primed), so the
    matrix equals the combined matrix scaled by diag(z) on the right.
    Its determinant is route A's polynomial; at t=0 the matrix is upper
    triangular with unit diagonal.
    """
    pat = bundle.twisted_row_pattern(w)
    N = pat.size
    z = s.z
    _zetas(s, N)
    mult = {
        bundle.PLAIN: np.ones(N, dtype=complex),
        bundle.PRIMED: 2.0 * z / (1.0 - z),
        bundle.DOUBLE_PRIMED: 2.0 / (z - 1.0),
    }
    cells = [[{} for _ in range(N)] for _ in range(N)]
    for i, row in enumerate(pat.rows):
        for col, kind, tpow in row:
            cells[i][col][tpow] = cells[i][col].get(tpow, 0j) + mult[kind][col]
    rows = [[LaurentPoly(cells[i][j]) for j in range(N)] for i in range(N)]
    return LaurentMatrix.from_rows(rows)


def big_jacobian_matrix(w, p):
    """(N+3) x (N+3) Jacobian of all solved step residuals and the three
    t-twisted closing rows, in the N+3 edge variables.

    Step residual i is c_i minus the rational step expression; closing row
    N+k is c_{N+k} minus t times the interior edge it closes onto.  Only
    the closing rows involve t.
    """
    from .ptolemy import validate_assignment

    validate_assignment(w, p)
    N = w.size
    sched = bundle.ptolemy_schedule(w)
    one = LaurentPoly.one()
    rows = [[LaurentPoly.zero() for _ in range(N + 3)] for _ in range(N + 3)]
    for step in sched.steps:
        i = step.index
        a_i, b_i, g_i = step.triple
        ca, cb, cg = (p.value(k) for k in step.triple)
        row = rows[i - 1]
        row[i - 1] = row[i - 1] + one
        if step.letter == "R":
            # d/dc of  c_i - (ca^2 + cg^2) / cb
            row[a_i - 1] = row[a_i - 1] + LaurentPoly.constant(-2.0 * ca / cb)
            row[g_i - 1] = row[g_i - 1] + LaurentPoly.constant(-2.0 * cg / cb)
            row[b_i - 1] = row[b_i - 1] + LaurentPoly.constant((ca * ca + cg * cg) / (cb * cb))
        else:
            # d/dc of  c_i - (cb^2 + cg^2) / ca
            row[b_i - 1] = row[b_i - 1] + LaurentPoly.constant(-2.0 * cb / ca)
            row[g_i - 1] = row[g_i - 1] + LaurentPoly.constant(-2.0 * cg / ca)
            row[a_i - 1] = row[a_i - 1] + LaurentPoly.constant((cb * cb + cg * cg) / (ca * ca))
    for outer, inner in sched.closing:
        rows[outer - 1][outer - 1] = one
        rows[outer - 1][inner - 1] = LaurentPoly.t_power(1, -1.0)
    return LaurentMatrix.from_rows(rows)


def one_loop_big_jacobian(w, p):
    """Route C-big: determinant of the full recursion Jacobian.

    Defined up to sign; comparisons go through unit alignment.
    """
    m = big_jacobian_matrix(w, p)
    tau = poly_det(m)
    return OneLoopResult(
        tau=tau,
        route="C-big",
        diagnostics={
            "tau_at_one": abs(lp_eval(tau, 1.0)),
            "min_exp": tau.min_exp,
            "max_exp": tau.max_exp,
            "matrix_size": m.n,
        },
    )


def one_loop_at_lambda(w, p):
    """Derivative at t=1 of the route C-big polynomial.

    This is the invariant twisted along the fiber boundary curve instead
    of t; it is well defined up to sign because the polynomial vanishes
    at t=1.
    """
    return one_loop_big_jacobian(w, p).tau.derivative_at_one()
