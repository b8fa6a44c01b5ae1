"""Solve the edge and completeness equations of a once-punctured torus
bundle for its geometric shape parameters, and compute hyperbolic volume.

The solved system consists of N-1 edge equations (the product of all N
edge equations is identically 1, so the last is dropped) plus the
meridian-like completeness equation.  Newton iteration runs on the
logarithmic residual with fixed targets, 2 pi i for each edge row and 0
for the completeness row, using principal logarithms of z, 1/(1-z) and
1 - 1/z.  Those targets hold exactly at the positively oriented complete
solution and exclude the spurious flat solutions that make the plain
multiplicative residual nearly unusable for root finding.  Convergence is
always certified on the multiplicative residual max|equation - 1|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import spence

_REGULAR_SHAPE = cmath.exp(1j * math.pi / 3)


class SolveError(RuntimeError):
    """Raised when no geometric solution is found; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class SolverOptions:
    tolerance: float = 1e-12
    max_iterations: int = 60
    max_restarts: int = 8
    damping: float = 1.0       # initial step scale for the line search
    rng_seed: int = 1729
    restart_radius: float = 0.3


@dataclass(frozen=True)
class ShapeSolution:
    """Shape parameters with their logarithmic derivatives.

    residual is max|equation - 1| over all N edge equations and the
    completeness equation.  degenerate lists indices (0-based) of real
    shapes, whose tetrahedra contribute zero volume.
    """

    z: np.ndarray
    zeta: np.ndarray      # 1/z
    zeta_p: np.ndarray    # 1/(1-z)
    zeta_pp: np.ndarray   # 1/(z(z-1))
    residual: float
    volume: float
    degenerate: tuple = ()
    history: tuple = field(default=(), compare=False)

    @classmethod
    def from_shapes(cls, z, residual, history=()):
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0) or np.any(z == 1):
            raise ValueError("shapes 0 and 1 are degenerate")
        degenerate = tuple(int(i) for i in np.nonzero(z.imag == 0)[0])
        vol = float(sum(bloch_wigner(zz) for zz in z))
        return cls(
            z=z,
            zeta=1.0 / z,
            zeta_p=1.0 / (1.0 - z),
            zeta_pp=1.0 / (z * (z - 1.0)),
            residual=float(residual),
            volume=vol,
            degenerate=degenerate,
            history=tuple(history),
        )

    @property
    def size(self):
        return len(self.z)


def bloch_wigner(z):
    """Single-valued dilogarithm D(z) = Im Li2(z) + arg(1-z) log|z|.

    Vanishes on the real line (degenerate tetrahedra).
    """
    z = complex(z)
    if z in (0.0, 1.0):
        return 0.0
    if z.imag == 0:
        return 0.0
    li2 = complex(spence(1.0 - z))
    return li2.imag + cmath.phase(1.0 - z) * math.log(abs(z))


def volume(solution):
    """Sum of the per-tetrahedron dilogarithm volumes."""
    return float(sum(bloch_wigner(zz) for zz in solution.z))


def _equation_exponents(w):
    """Rows: all N edge equations followed by the completeness equation."""
    from . import bundle

    ge = bundle.gluing_exponents(w)
    c, cp, cpp = bundle.meridian_exponents(w)
    A = np.vstack([ge.g, c[None, :]])
    B = np.vstack([ge.gp, cp[None, :]])
    C = np.vstack([ge.gpp, cpp[None, :]])
    return A, B, C


def multiplicative_residual(w, z):
    """max|equation - 1| over all edge equations and the completeness
    equation, evaluated at shapes z."""
    A, B, C = _equation_exponents(w)
    vals = _equation_values(z, A, B, C)
    return float(np.max(np.abs(vals - 1.0)))


def _equation_values(z, A, B, C):
    zp = 1.0 / (1.0 - z)
    zpp = (z - 1.0) / z
    return (
        np.prod(z[None, :] ** A, axis=1)
        * np.prod(zp[None, :] ** B, axis=1)
        * np.prod(zpp[None, :] ** C, axis=1)
    )


def _log_residual(z, A, B, C, targets):
    lz = np.log(z)
    lp = np.log(1.0 / (1.0 - z))
    lpp = np.log(1.0 - 1.0 / z)
    return A @ lz + B @ lp + C @ lpp - targets


def _shapes_ok(z):
    return bool(np.all(np.isfinite(z)) and np.all(np.abs(z) > 1e-14) and np.all(np.abs(z - 1.0) > 1e-14))


def _jacobian(z, A, B, C):
    return (
        A * (1.0 / z)[None, :]
        + B * (1.0 / (1.0 - z))[None, :]
        + C * (1.0 / (z * (z - 1.0)))[None, :]
    )


def _polish(z, A, B, C, targets):
    """A few undamped steps to push a converged iterate to the rounding
    floor; keeps only strict improvements."""
    r = float(np.max(np.abs(_log_residual(z, A, B, C, targets))))
    for _ in range(3):
        F = _log_residual(z, A, B, C, targets)
        try:
            delta = np.linalg.solve(_jacobian(z, A, B, C), -F)
        except np.linalg.LinAlgError:
            break
        zn = z + delta
        if not _shapes_ok(zn):
            break
        rn = float(np.max(np.abs(_log_residual(zn, A, B, C, targets))))
        if rn < r:
            z, r = zn, rn
        else:
            break
    return z


def _newton_attempt(z0, A, B, C, targets, opts):
    """Damped Newton on the log residual.  Returns (z or None, history)."""
    z = z0.copy()
    history = []
    for _ in range(opts.max_iterations):
        if not _shapes_ok(z):
            return None, history
        F = _log_residual(z, A, B, C, targets)
        r = float(np.max(np.abs(F)))
        history.append(r)
        if not math.isfinite(r):
            return None, history
        if r < opts.tolerance:
            return _polish(z, A, B, C, targets), history
        try:
            delta = np.linalg.solve(_jacobian(z, A, B, C), -F)
        except np.linalg.LinAlgError:
            return None, history
        step = float(np.max(np.abs(delta)))
        if step > 1.0:
            delta = delta / step
        s = opts.damping
        for _ in range(21):
            zn = z + s * delta
            if _shapes_ok(zn):
                rn = float(np.max(np.abs(_log_residual(zn, A, B, C, targets))))
                if rn < r or r < 1e-10:
                    z = zn
                    break
            s *= 0.5
        else:
            return None, history
    return None, history


def solve_geometric(w, opts=None):
    """Find the geometric solution for the word w.

    The first attempt starts from the regular shape exp(i pi / 3) for
    every tetrahedron; each restart perturbs that start inside a disc of
    radius restart_radius with a seeded generator.  Converged candidates
    are kept only when every shape has positive imaginary part, and the
    candidate of maximal volume wins.  Deterministic for a fixed seed.
    """
    opts = opts or SolverOptions()
    N = w.size
    A_all, B_all, C_all = _equation_exponents(w)
    # drop the last edge row (dependent), keep the completeness row
    keep = list(range(N - 1)) + [N]
    A, B, C = A_all[keep], B_all[keep], C_all[keep]
    targets = np.zeros(N, dtype=complex)
    targets[: N - 1] = 2j * math.pi
    base = np.full(N, _REGULAR_SHAPE)
    rng = np.random.default_rng(opts.rng_seed)
    best = None
    diagnostics = {"attempts": 0, "converged": 0, "best_residual": math.inf}
    with np.errstate(all="ignore"):
        for attempt in range(opts.max_restarts + 1):
            if attempt == 0:
                z0 = base.copy()
            else:
                radius = opts.restart_radius * np.sqrt(rng.uniform(0.0, 1.0, N))
                angle = rng.uniform(0.0, 2.0 * math.pi, N)
                z0 = base + radius * np.exp(1j * angle)
            diagnostics["attempts"] += 1
            z, history = _newton_attempt(z0, A, B, C, targets, opts)
            if z is None:
                if history:
                    diagnostics["best_residual"] = min(diagnostics["best_residual"], history[-1])
                continue
            resid = float(np.max(np.abs(_equation_values(z, A_all, B_all, C_all) - 1.0)))
            diagnostics["best_residual"] = min(diagnostics["best_residual"], resid)
            if resid >= opts.tolerance * 10:
                continue
            diagnostics["converged"] += 1
            if not np.all(z.imag > 0):
                continue
            vol = float(sum(bloch_wigner(zz) for zz in z))
            if best is None or vol > best[0] + 1e-12:
                best = (vol, z, resid, history)
    if best is None:
        raise SolveError(f"no geometric solution found for {w.letters}", diagnostics)
    _, z, resid, history = best
    return ShapeSolution.from_shapes(z, resid, history)
