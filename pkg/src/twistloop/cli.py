"""Command line front end.

Subcommands cover solving a word's shapes, computing the invariant by
each route, cross-verifying the routes on one word or a batch, and
exporting/importing the twisted gluing data as JSON so the general
engine can be driven from a file.  Reports render as text, JSON or CSV;
exit codes are 0 (success/pass), 1 (input error), 2 (numerical failure),
3 (verification mismatch).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import bundle, geometry, oneloop, ptolemy
from .laurent import LaurentMatrix, LaurentPoly, compare_up_to_unit, lp_eval, normalize_unit

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_MISMATCH = 3

TAU_TOL = 1e-8
FRICKE_TOL = 1e-10
GLUING_TOL = 1e-12


class GeneralFileError(ValueError):
    """Raised when a gluing-data file does not match the schema."""


# -- serialization helpers


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _poly_payload(p):
    if p.is_zero:
        return {"min_exp": 0, "coefficients": []}
    lo = p.min_exp
    return {
        "min_exp": lo,
        "coefficients": [_pair(p.coeff(e)) for e in range(lo, p.max_exp + 1)],
    }


def _poly_text(p):
    if p.is_zero:
        return "0"
    parts = []
    for e in p.support():
        v = p.coeff(e)
        mono = "1" if e == 0 else ("t" if e == 1 else f"t^{e}")
        parts.append(f"({v.real:.6g}{v.imag:+.6g}i)*{mono}")
    return " + ".join(parts)


def _matrix_payload(m):
    return [
        [{str(e): int(round(v.real)) for e, v in p.coeffs.items()} for p in row]
        for row in m.entries
    ]


def _matrix_from_payload(rows, n):
    try:
        out = []
        for row in rows:
            if len(row) != n:
                raise GeneralFileError("matrix rows must have length n")
            out.append([LaurentPoly({int(e): int(v) for e, v in cell.items()}) for cell in row])
        if len(out) != n:
            raise GeneralFileError("matrices must have n rows")
        return LaurentMatrix.from_rows(out)
    except (TypeError, ValueError, AttributeError) as exc:
        raise GeneralFileError(f"bad matrix entry: {exc}") from exc


def export_payload(d, s):
    """JSON-safe dict describing twisted gluing data plus shapes."""
    payload = {
        "n": d.size,
        "g": _matrix_payload(d.g),
        "gp": _matrix_payload(d.gp),
        "gpp": _matrix_payload(d.gpp),
        "flattening": {
            "f": [int(v) for v in d.flattening[0]],
            "fp": [int(v) for v in d.flattening[1]],
            "fpp": [int(v) for v in d.flattening[2]],
        },
        "shapes": [_pair(z) for z in s.z],
    }
    if d.completeness:
        payload["completeness"] = [
            {"c": [int(v) for v in c], "cp": [int(v) for v in cp], "cpp": [int(v) for v in cpp]}
            for (c, cp, cpp) in d.completeness
        ]
    return payload


@dataclass(frozen=True)
class GeneralInputFile:
    """Parsed gluing-data file: the data, the shapes, and any warnings
    raised while checking the shapes against the data."""

    data: oneloop.TwistedGluingData
    shapes: geometry.ShapeSolution
    warnings: tuple

    @classmethod
    def from_payload(cls, payload):
        try:
            n = int(payload["n"])
            g = _matrix_from_payload(payload["g"], n)
            gp = _matrix_from_payload(payload["gp"], n)
            gpp = _matrix_from_payload(payload["gpp"], n)
            flat = payload["flattening"]
            flattening = (
                tuple(int(v) for v in flat["f"]),
                tuple(int(v) for v in flat["fp"]),
                tuple(int(v) for v in flat["fpp"]),
            )
            completeness = tuple(
                (
                    tuple(int(v) for v in entry["c"]),
                    tuple(int(v) for v in entry["cp"]),
                    tuple(int(v) for v in entry["cpp"]),
                )
                for entry in payload.get("completeness", [])
            )
            shapes = np.array([complex(re, im) for re, im in payload["shapes"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise GeneralFileError(f"bad gluing-data file: {exc}") from exc
        if len(shapes) != n:
            raise GeneralFileError("shape count must equal n")
        try:
            data = oneloop.TwistedGluingData(
                size=n, g=g, gp=gp, gpp=gpp, flattening=flattening, completeness=completeness
            )
        except ValueError as exc:
            raise GeneralFileError(str(exc)) from exc
        warnings = []
        g1, gp1, gpp1 = data.at_one()
        with np.errstate(all="ignore"):
            vals = (
                np.prod(shapes[None, :] ** g1, axis=1)
                * np.prod((1.0 / (1.0 - shapes))[None, :] ** gp1, axis=1)
                * np.prod((1.0 - 1.0 / shapes)[None, :] ** gpp1, axis=1)
            )
        resid = float(np.max(np.abs(vals - 1.0)))
        if not np.isfinite(resid) or resid > 1e-9:
            warnings.append("shapes fail gluing residual check")
        try:
            sol = geometry.ShapeSolution.from_shapes(shapes, resid)
        except ValueError as exc:
            raise GeneralFileError(str(exc)) from exc
        return cls(data=data, shapes=sol, warnings=tuple(warnings))

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise GeneralFileError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise GeneralFileError(f"{path} is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise GeneralFileError("gluing-data file must hold a JSON object")
        return cls.from_payload(payload)


# -- cross-route comparison


@dataclass(frozen=True)
class ComparisonReport:
    """All three routes on one word, with alignments and invariant checks.

    Deviations are stored raw; flags apply the documented tolerances.
    passed requires both unit alignments and every flag.
    """

    word: str
    rotation: int
    n: int
    shapes: tuple
    volume: float
    residuals: dict
    tau_a: object
    tau_cbig: object
    tau_c: object
    alignment_a_cbig: object
    alignment_a_c: object
    invariant_values: dict
    invariant_flags: dict
    passed: bool

    def to_dict(self):
        def align(a):
            if a is None:
                return None
            return {
                "shift": a.shift,
                "sign": a.sign,
                "relative_deviation": a.relative_deviation,
            }

        return {
            "word": self.word,
            "rotation": self.rotation,
            "n": self.n,
            "shapes": [_pair(z) for z in self.shapes],
            "volume": self.volume,
            "residuals": dict(self.residuals),
            "tau_a": _poly_payload(self.tau_a),
            "tau_cbig": _poly_payload(self.tau_cbig),
            "tau_c": _poly_payload(self.tau_c),
            "alignments": {
                "a_vs_cbig": align(self.alignment_a_cbig),
                "a_vs_c": align(self.alignment_a_c),
            },
            "invariant_values": dict(self.invariant_values),
            "invariant_flags": dict(self.invariant_flags),
            "pass": self.passed,
        }


def build_comparison(w, opts=None, tol_compare=TAU_TOL):
    """Run routes A, C-big and C on a word and assemble the report."""
    opts = opts or geometry.SolverOptions()
    s = geometry.solve_geometric(w, opts)
    res_a = oneloop.one_loop_det_x(w, s)
    p = ptolemy.solve_ptolemy(w, s, opts)
    res_big = oneloop.one_loop_big_jacobian(w, p)
    alex = ptolemy.alexander_polynomial(w, p)

    na = normalize_unit(res_a.tau)
    nbig = normalize_unit(res_big.tau)
    nc = normalize_unit(alex.tau)
    align_big = compare_up_to_unit(res_a.tau, res_big.tau, tol_compare)
    align_c = compare_up_to_unit(res_a.tau, alex.tau, tol_compare)

    scale = max(abs(v) for v in na.coeffs.values())
    span = na.span
    anti = max(abs(na.coeff(k) + na.coeff(span - k)) for k in range(span + 1))
    a, b, c = ptolemy.character_coords(*p.initials)
    fricke = abs(a * a + b * b + c * c - a * b * c)
    alpha_a = -na.coeff(1)
    tr_j = complex(np.trace(alex.jacobian))
    values = {
        "tau_at_one": abs(lp_eval(na, 1.0)),
        "constant_coefficient": abs(na.coeff(0) - 1.0),
        "anti_palindromic": anti,
        "det_j": abs(alex.det_j - 1.0),
        "eigenvalue_one": abs(alex.det_i_minus_j),
        "fricke": fricke,
        "trace_field": abs(alpha_a - tr_j) / max(1.0, abs(tr_j)),
        "gluing": s.residual,
    }
    # scale-aware thresholds: coefficient checks are relative to the
    # largest coefficient once that exceeds 1
    rel = max(1.0, scale)
    flags = {
        "tau_at_one": values["tau_at_one"] <= TAU_TOL * rel,
        "constant_coefficient": values["constant_coefficient"] <= TAU_TOL * rel,
        "anti_palindromic": values["anti_palindromic"] <= TAU_TOL * rel,
        "det_j": values["det_j"] <= TAU_TOL * rel,
        "eigenvalue_one": values["eigenvalue_one"] <= TAU_TOL * rel,
        "fricke": values["fricke"] <= FRICKE_TOL * max(1.0, abs(a) ** 3),
        "trace_field": values["trace_field"] <= TAU_TOL,
        "gluing": values["gluing"] < GLUING_TOL,
    }
    passed = align_big is not None and align_c is not None and all(flags.values())
    return ComparisonReport(
        word=w.letters,
        rotation=w.rotation,
        n=w.size,
        shapes=tuple(s.z),
        volume=s.volume,
        residuals={
            "gluing": s.residual,
            "ptolemy_step": p.step_residual,
            "ptolemy_closing": p.closing_residual,
            "ptolemy_shape": p.shape_residual,
        },
        tau_a=na,
        tau_cbig=nbig,
        tau_c=nc,
        alignment_a_cbig=align_big,
        alignment_a_c=align_c,
        invariant_values=values,
        invariant_flags=flags,
        passed=passed,
    )


# -- rendering


def _flatten(obj, prefix, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(v, f"{prefix}{k}.", out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}{i}.", out)
    else:
        out.append((prefix[:-1], obj))


def _render_csv(report):
    out = []
    _flatten(report, "", out)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["key", "value"])
    for key, value in out:
        writer.writerow([key, "" if value is None else value])
    return buf.getvalue().rstrip("\n")


def _is_scalar_list(v):
    return isinstance(v, (list, tuple)) and all(
        not isinstance(x, (list, dict, tuple)) for x in v
    )


def _text_lines(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, dict) or (isinstance(v, (list, tuple)) and not _is_scalar_list(v)):
                lines.append(f"{pad}{k}:")
                lines.extend(_text_lines(v, indent + 1))
            elif _is_scalar_list(v):
                lines.append(f"{pad}{k}: [{', '.join(str(x) for x in v)}]")
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            if isinstance(v, dict) or (isinstance(v, (list, tuple)) and not _is_scalar_list(v)):
                lines.append(f"{pad}- [{i}]")
                lines.extend(_text_lines(v, indent + 1))
            elif _is_scalar_list(v):
                lines.append(f"{pad}- [{', '.join(str(x) for x in v)}]")
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2)
    if fmt == "csv":
        return _render_csv(report)
    return "\n".join(_text_lines(report))


def _emit(report, args):
    print(render(report, args.format))


# -- command implementations


def _options(args):
    return geometry.SolverOptions(
        tolerance=args.tol_newton,
        max_restarts=args.max_restarts,
        rng_seed=args.seed,
        restart_radius=args.radius,
    )


def _word_header(w):
    return {"word": w.letters, "rotation": w.rotation, "n": w.size}


def cmd_solve(args):
    w = bundle.parse_word(args.word)
    s = geometry.solve_geometric(w, _options(args))
    report = {
        **_word_header(w),
        "shapes": [_pair(z) for z in s.z],
        "volume": s.volume,
        "residual": s.residual,
        "degenerate": list(s.degenerate),
    }
    _emit(report, args)
    return EXIT_OK


def cmd_one_loop(args):
    w = bundle.parse_word(args.word)
    s = geometry.solve_geometric(w, _options(args))
    res = oneloop.one_loop_det_x(w, s)
    report = {
        **_word_header(w),
        "volume": s.volume,
        "residual": s.residual,
        "route": res.route,
        "tau": _poly_payload(res.tau),
        "tau_normalized": _poly_payload(res.normalized()),
        "tau_pretty": _poly_text(res.normalized()),
        "tau_at_one": abs(res.tau_at_one()),
    }
    _emit(report, args)
    return EXIT_OK


def cmd_alexander(args):
    w = bundle.parse_word(args.word)
    opts = _options(args)
    s = geometry.solve_geometric(w, opts)
    p = ptolemy.solve_ptolemy(w, s, opts)
    res = ptolemy.alexander_polynomial(w, p)
    a, b, c = ptolemy.character_coords(*p.initials)
    report = {
        **_word_header(w),
        "initials": [_pair(v) for v in p.initials],
        "edge_values": [_pair(v) for v in p.c],
        "branch": list(p.branch),
        "accepted_branches": [list(br) for br in p.accepted_branches],
        "step_residual": p.step_residual,
        "closing_residual": p.closing_residual,
        "shape_residual": p.shape_residual,
        "route": "C",
        "tau": _poly_payload(res.tau),
        "tau_normalized": _poly_payload(normalize_unit(res.tau)),
        "tau_pretty": _poly_text(normalize_unit(res.tau)),
        "det_j": _pair(res.det_j),
        "det_i_minus_j": _pair(res.det_i_minus_j),
        "eigenvalues": [_pair(v) for v in res.eigenvalues],
        "trace_coords": [_pair(a), _pair(b), _pair(c)],
        "fricke_deviation": abs(a * a + b * b + c * c - a * b * c),
    }
    _emit(report, args)
    return EXIT_OK


def cmd_big_jacobian(args):
    w = bundle.parse_word(args.word)
    opts = _options(args)
    s = geometry.solve_geometric(w, opts)
    p = ptolemy.solve_ptolemy(w, s, opts)
    res = oneloop.one_loop_big_jacobian(w, p)
    report = {
        **_word_header(w),
        "route": res.route,
        "matrix_size": res.diagnostics["matrix_size"],
        "tau": _poly_payload(res.tau),
        "tau_normalized": _poly_payload(res.normalized()),
        "tau_pretty": _poly_text(res.normalized()),
        "tau_at_one": abs(res.tau_at_one()),
        "derivative_at_one": _pair(res.tau.derivative_at_one()),
    }
    _emit(report, args)
    return EXIT_OK


def cmd_verify(args):
    w = bundle.parse_word(args.word)
    report = build_comparison(w, _options(args), args.tol_compare)
    _emit(report.to_dict(), args)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_verify_batch(args):
    try:
        with open(args.file, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    words = [ln for ln in lines if ln and not ln.startswith("#")]
    opts = _options(args)
    entries = []
    worst = EXIT_OK
    for text in words:
        try:
            w = bundle.parse_word(text)
            rep = build_comparison(w, opts, args.tol_compare)
        except bundle.InvalidWordError as exc:
            entries.append({"word": text, "pass": False, "error": f"input: {exc}"})
            worst = max(worst, EXIT_INPUT)
            continue
        except (geometry.SolveError, ptolemy.PtolemySolveError) as exc:
            entries.append({"word": text, "pass": False, "error": f"numerical: {exc}"})
            worst = max(worst, EXIT_NUMERIC)
            continue
        entry = {
            "word": rep.word,
            "pass": rep.passed,
            "volume": rep.volume,
            "deviation_a_vs_cbig": (
                rep.alignment_a_cbig.relative_deviation if rep.alignment_a_cbig else None
            ),
            "deviation_a_vs_c": (
                rep.alignment_a_c.relative_deviation if rep.alignment_a_c else None
            ),
        }
        if not rep.passed:
            entry["invariant_flags"] = dict(rep.invariant_flags)
            worst = max(worst, EXIT_MISMATCH)
        entries.append(entry)
    report = {
        "total": len(entries),
        "passed": sum(1 for e in entries if e["pass"]),
        "pass": bool(entries) and all(e["pass"] for e in entries),
        "words": entries,
    }
    _emit(report, args)
    if not entries:
        print("error: no words in input file", file=sys.stderr)
        return EXIT_INPUT
    return worst


def cmd_general(args):
    loaded = GeneralInputFile.load(args.file)
    res = oneloop.one_loop_general(loaded.data, loaded.shapes)
    flat = res.diagnostics["flattening_report"]
    report = {
        "n": loaded.data.size,
        "warnings": list(loaded.warnings),
        "route": res.route,
        "flattening": {
            "sum_ok": flat.sum_ok,
            "combination_ok": flat.combination_ok,
            "completeness_values": list(flat.completeness_values),
        },
        "tau": _poly_payload(res.tau),
        "tau_normalized": _poly_payload(res.normalized()),
        "tau_pretty": _poly_text(res.normalized()),
        "tau_at_one": abs(res.tau_at_one()),
    }
    _emit(report, args)
    return EXIT_OK


def cmd_export_general(args):
    w = bundle.parse_word(args.word)
    s = geometry.solve_geometric(w, _options(args))
    d = oneloop.bundle_gluing_data(w)
    payload = export_payload(d, s)
    text = json.dumps(payload, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.output}")
    else:
        print(text)
    return EXIT_OK


# -- argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("text", "json", "csv"), default="text", help="output format"
    )
    common.add_argument(
        "--tol-newton", type=float, default=1e-12, help="shape solver convergence target"
    )
    common.add_argument(
        "--tol-compare", type=float, default=1e-8, help="cross-route comparison tolerance"
    )
    common.add_argument(
        "--max-restarts", type=int, default=8, help="extra perturbed solver starts"
    )
    common.add_argument("--seed", type=int, default=1729, help="restart generator seed")
    common.add_argument(
        "--radius", type=float, default=0.3, help="restart perturbation radius"
    )

    parser = argparse.ArgumentParser(
        prog="twistloop",
        description="Twisted 1-loop invariants of once-punctured torus bundles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve the shape equations")
    p.add_argument("word")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("one-loop", parents=[common], help="invariant via the edge equation determinant")
    p.add_argument("word")
    p.set_defaults(func=cmd_one_loop)

    p = sub.add_parser("alexander", parents=[common], help="invariant via the 3x3 recursion Jacobian")
    p.add_argument("word")
    p.set_defaults(func=cmd_alexander)

    p = sub.add_parser("big-jacobian", parents=[common], help="invariant via the full recursion Jacobian")
    p.add_argument("word")
    p.set_defaults(func=cmd_big_jacobian)

    p = sub.add_parser("verify", parents=[common], help="run all three routes and compare")
    p.add_argument("word")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-batch", parents=[common], help="verify every word in a file")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify_batch)

    p = sub.add_parser("general", parents=[common], help="run the general engine on a gluing-data file")
    p.add_argument("file")
    p.set_defaults(func=cmd_general)

    p = sub.add_parser("export-general", parents=[common], help="export a word's gluing data as JSON")
    p.add_argument("word")
    p.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_export_general)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (bundle.InvalidWordError, GeneralFileError, oneloop.FlatteningError,
            ptolemy.AssignmentMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (geometry.SolveError, ptolemy.PtolemySolveError, oneloop.DegenerateShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
