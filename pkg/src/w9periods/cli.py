"""Command-line front end: periods, theta, trace, verify, classify.

Exit codes: 0 success, 1 usage error, 2 numerical failure.  Complex
numbers serialize as {"re": ..., "im": ...}; matrices as nested arrays.
Irrational parameters are accepted through a small expression parser
(numbers, + - * /, parentheses, sqrt(), the imaginary unit i), so exact
fixtures like 2-sqrt(3) can be passed without decimal truncation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import geodesic, periods, w9
from .errors import ParameterError, W9Error
from .quadrature import QuadConfig
from .siegel import min_eig_im
from .theta import (DEFAULT_POLICY, ThetaCharacteristic, parity, theta_char,
                    truncation_radius)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# expression mini-parser


class _ExprParser:
    """Recursive-descent parser for numeric expressions over the complex
    numbers: literals, + - * / and unary minus, parentheses, sqrt(x), i."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> complex:
        val = self._expr()
        self._skip()
        if self.pos != len(self.text):
            raise UsageError(f"trailing input at column {self.pos}: "
                             f"{self.text[self.pos:]!r}")
        return val

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expr(self) -> complex:
        val = self._term()
        while self._peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self._term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def _term(self) -> complex:
        val = self._factor()
        while self._peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self._factor()
            if op == "/":
                if rhs == 0:
                    raise UsageError("division by zero in expression")
                val = val / rhs
            else:
                val = val * rhs
        return val

    def _factor(self) -> complex:
        ch = self._peek()
        if ch == "-":
            self.pos += 1
            return -self._factor()
        if ch == "+":
            self.pos += 1
            return self._factor()
        if ch == "(":
            self.pos += 1
            val = self._expr()
            if self._peek() != ")":
                raise UsageError("missing closing parenthesis")
            self.pos += 1
            return val
        if ch.isdigit() or ch == ".":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isdigit()
                                                 or self.text[self.pos] == "."):
                self.pos += 1
            num = complex(float(self.text[start:self.pos]))
            if self._peek() == "i":
                self.pos += 1
                num *= 1j
            return num
        if self.text.startswith("sqrt", self.pos):
            self.pos += 4
            if self._peek() != "(":
                raise UsageError("sqrt needs parentheses")
            self.pos += 1
            val = self._expr()
            if self._peek() != ")":
                raise UsageError("missing closing parenthesis after sqrt")
            self.pos += 1
            if val.imag == 0 and val.real >= 0:
                return complex(math.sqrt(val.real))
            return complex(val) ** 0.5
        if ch == "i":
            self.pos += 1
            return 1j
        raise UsageError(f"cannot parse expression at column {self.pos}: "
                         f"{self.text[self.pos:]!r}")


def parse_expr(text: str) -> complex:
    return _ExprParser(text).parse()


def parse_real(text: str, what: str) -> float:
    val = parse_expr(text)
    if abs(val.imag) > 1e-15:
        raise UsageError(f"{what} must be real, got {text!r}")
    return val.real


def parse_matrix(text: str, prefer_g: int | None = None) -> np.ndarray:
    """A matrix given inline ([[...],[...]] with expression entries) or as
    a path to a JSON file using the {"re": ..., "im": ...} convention.

    A file written by the periods command may hold both Z and Zhat; when
    prefer_g is given the one with matching size wins.
    """
    text = text.strip()
    if not text.startswith("["):
        try:
            with open(text) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read matrix file {text!r}: {exc}") from exc
        if isinstance(data, dict):
            options = [decode_matrix(data[k]) for k in ("Z", "Zhat") if k in data]
            if not options:
                raise UsageError(f"no matrix found in {text!r}")
            for M in options:
                if prefer_g is not None and M.shape == (prefer_g, prefer_g):
                    return M
            return options[0]
        return decode_matrix(data)
    rows, depth, start = [], 0, None
    row_texts = []
    inner = text[1:-1] if text.endswith("]") else None
    if inner is None:
        raise UsageError("matrix literal must be wrapped in [...]")
    for idx, ch in enumerate(inner):
        if ch == "[":
            if depth == 0:
                start = idx + 1
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                row_texts.append(inner[start:idx])
        elif depth == 0 and not (ch.isspace() or ch == ","):
            raise UsageError("malformed matrix literal")
    for row in row_texts:
        rows.append([parse_expr(cell) for cell in row.split(",") if cell.strip()])
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise UsageError("matrix rows must be nonempty and equally long")
    return np.array(rows, dtype=complex)


# ---------------------------------------------------------------------------
# serialization


def encode_value(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, np.ndarray):
        return [[encode_value(complex(x)) for x in row] for row in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def decode_matrix(data) -> np.ndarray:
    def cell(c):
        if isinstance(c, dict):
            return complex(c.get("re", 0.0), c.get("im", 0.0))
        return complex(c)
    return np.array([[cell(c) for c in row] for row in data], dtype=complex)


def matrix_csv(M: np.ndarray) -> str:
    lines = ["row,col,re,im"]
    for i, row in enumerate(M):
        for j, v in enumerate(row):
            lines.append(f"{i},{j},{v.real!r},{v.imag!r}")
    return "\n".join(lines) + "\n"


def emit(args, payload: dict, csv_text: str | None = None) -> None:
    if args.format == "csv":
        if csv_text is None:
            raise UsageError("this command has no CSV form; use --format json")
        out = csv_text
    else:
        out = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


# ---------------------------------------------------------------------------
# subcommands


def _quad(args) -> QuadConfig:
    return QuadConfig(tol=args.quad_tol)


def _meta(args) -> dict:
    return {
        "quad_tol": args.quad_tol,
        "series_tol": args.series_tol,
        "root_tol": args.root_tol,
        "calibration": periods.CALIBRATION_SHA256,
    }


def _base_curve_from_args(args) -> periods.HyperellipticCurve:
    if args.s is not None:
        return w9.curve_Qs(parse_real(args.s, "--s"))
    if args.u is not None:
        shifted = [p - 1.0 for p
                   in w9.curve_Pu(parse_real(args.u, "--u")).branch_points]
        return periods.HyperellipticCurve(tuple(shifted))
    roots = [parse_expr(r) for r in args.roots.split(",") if r.strip()]
    return periods.HyperellipticCurve(tuple(roots))


def cmd_periods(args) -> int:
    forms = [f for f in ("roots", "s", "u", "lam") if getattr(args, f) is not None]
    if len(forms) != 1:
        raise UsageError("give exactly one of --roots, --s, --u, --lambda")
    if args.lam is not None:
        if args.basis != "genus2_w9":
            raise UsageError("--lambda only defines a genus2_w9 period matrix")
        Z = w9.silhol_order4_period(parse_real(args.lam, "--lambda"))
        emit(args, {"Z": encode_value(Z), "metadata": _meta(args)}, matrix_csv(Z))
        return 0
    curve = _base_curve_from_args(args)
    quad = _quad(args)
    if args.basis == "elliptic":
        if len(curve.branch_points) != 3:
            raise UsageError("elliptic basis needs exactly 3 roots")
        plan = periods.build_cycles(curve, periods.LAYOUT_ELLIPTIC)
        Z = periods.period_matrix(curve, plan, quad)
        emit(args, {"Z": encode_value(Z), "metadata": _meta(args)}, matrix_csv(Z))
        return 0
    if len(curve.branch_points) != 5:
        raise UsageError(f"{args.basis} basis needs exactly 5 base roots")
    if args.basis == "genus2_w9":
        plan = periods.build_cycles(curve, periods.LAYOUT_GENUS2)
        Z = periods.period_matrix(curve, plan, quad)
        emit(args, {"Z": encode_value(Z), "metadata": _meta(args)}, matrix_csv(Z))
        return 0
    cover = w9.double_cover(curve)
    plan = periods.build_cycles(cover, periods.LAYOUT_COVER)
    Zhat = periods.period_matrix(cover, plan, quad)
    Z = w9.base_from_cover(Zhat)
    emit(args, {"Z": encode_value(Z), "Zhat": encode_value(Zhat),
                "metadata": _meta(args)}, matrix_csv(Zhat))
    return 0


def _parse_char(text: str) -> ThetaCharacteristic:
    parts = text.split(";")
    if len(parts) != 2:
        raise UsageError('characteristic must look like "111;101"')
    try:
        m = tuple(int(c) for c in parts[0].strip())
        n = tuple(int(c) for c in parts[1].strip())
        return ThetaCharacteristic(m, n)
    except (ValueError, W9Error) as exc:
        raise UsageError(f"bad characteristic {text!r}: {exc}") from exc


def cmd_theta(args) -> int:
    ch = _parse_char(args.char)
    Z = parse_matrix(args.matrix, prefer_g=ch.g)
    if Z.shape != (ch.g, ch.g):
        raise UsageError(f"matrix shape {Z.shape} does not match g = {ch.g}")
    lam = min_eig_im(Z)
    radius = truncation_radius(lam, ch.g, DEFAULT_POLICY)
    value = theta_char(ch, np.zeros(ch.g), Z, DEFAULT_POLICY)
    payload = {
        "value": encode_value(value),
        "abs": abs(value),
        "parity": parity(ch),
        "truncation_radius": radius,
        "tail_bound": DEFAULT_POLICY.tail_tol,
        "metadata": _meta(args),
    }
    emit(args, payload)
    return 0


TRACE_HEADER = "t,y,re_z11,im_z11,re_z12,im_z12,re_z22,im_z22,residual,flags"


def cmd_trace(args) -> int:
    cfg = geodesic.SolverConfig(series_tol=args.series_tol,
                                root_tol=args.root_tol)
    pts = geodesic.trace(args.t_start, args.t_end, args.steps, cfg)
    rows = []
    for p in pts:
        z11, z12, z22 = p.Z[0, 0], p.Z[0, 1], p.Z[1, 1]
        rows.append({
            "t": p.t, "y": p.y,
            "re_z11": z11.real, "im_z11": z11.imag,
            "re_z12": z12.real, "im_z12": z12.imag,
            "re_z22": z22.real, "im_z22": z22.imag,
            "residual": p.residual, "flags": ";".join(p.flags),
        })
    lines = [TRACE_HEADER]
    for r in rows:
        lines.append(",".join(
            (r[k] if k == "flags" else repr(float(r[k])))
            for k in TRACE_HEADER.split(",")))
    emit(args, {"points": rows, "metadata": _meta(args)},
         "\n".join(lines) + "\n")
    return 2 if any(p.flags and p.flags[0].startswith("error:") for p in pts) else 0


def _verify_one(s: float, args) -> tuple[list[dict], bool]:
    quad = _quad(args)
    tol = 1e-6
    checks = []

    def record(name, residual, ok=None):
        ok = residual < tol if ok is None else ok
        checks.append({"s": s, "check": name, "residual": residual, "pass": ok})
        return ok

    curve = w9.curve_Qs(s)
    cover = w9.double_cover(curve)
    Zhat = periods.period_matrix(
        cover, periods.build_cycles(cover, periods.LAYOUT_COVER), quad)
    Z2 = periods.period_matrix(
        curve, periods.build_cycles(curve, periods.LAYOUT_GENUS2), quad)
    shape = w9.cover_shape_extract(Zhat, tol)
    record("cover_shape", float(np.abs(Zhat - shape.matrix()).max()))
    record("theta_membership",
           w9.theta_membership_check(Zhat, shape_tol=tol))
    t, y = geodesic.extract_ty_from_cover(Zhat, shape_tol=tol)
    record("main_series", abs(geodesic.main_series(t, y)))
    record("base_from_cover_vs_direct",
           float(np.abs(Z2 - w9.base_from_cover(Zhat)).max()))
    checks.append({"s": s, "check": "extracted_point", "t": t, "y": y,
                   "pass": True})
    return checks, all(c["pass"] for c in checks)


def cmd_verify(args) -> int:
    periods.load_calibration()
    if (args.s is None) == (args.grid is None):
        raise UsageError("give exactly one of --s or --grid")
    if args.s is not None:
        s_values = [parse_real(args.s, "--s")]
    else:
        if args.grid < 1:
            raise UsageError("--grid must be at least 1")
        s_values = list(np.linspace(0.05, 0.5, args.grid))
    all_checks, ok = [], True
    for s in s_values:
        if not 0.0 < s < w9.SQRT3 / 3.0:
            raise ParameterError(f"s = {s} outside (0, sqrt(3)/3)")
        checks, good = _verify_one(float(s), args)
        all_checks.extend(checks)
        ok = ok and good
    emit(args, {"pass": ok, "checks": all_checks, "metadata": _meta(args)})
    return 0 if ok else 2


def cmd_classify(args) -> int:
    if (args.abc is None) == (args.s is None):
        raise UsageError("give exactly one of --abc or --s")
    if args.abc is not None:
        parts = [parse_real(p, "--abc") for p in args.abc.split(",")]
        if len(parts) != 3:
            raise UsageError("--abc needs three comma-separated values")
        report = w9.cirre_classify(*parts)
        payload = {
            "real_group": report.real_group,
            "complex_group": report.complex_group,
            "matched_conditions": [
                {"condition": name, "residual": r}
                for name, r in report.matched_conditions
            ],
        }
    else:
        s = parse_real(args.s, "--s")
        residuals = w9.involution_residuals(s)
        satisfied = [name for name, _ in w9.w9_involution_conditions(s)]
        payload = {
            "s": s,
            "satisfied": satisfied,
            "residuals": residuals,
        }
    emit(args, payload)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _apply_config(argv: list[str]) -> list[str]:
    """Prepend defaults from a flat key=value config file, if given."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config needs a file path")
    path = argv[idx + 1]
    rest = argv[:idx] + argv[idx + 2:]
    extra = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"bad config line: {line!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                extra.extend([f"--{key}", value])
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    # config keys are global flags; they go first so the command line wins
    return extra + rest


def _add_global_flags(parser, suppress: bool) -> None:
    def default(v):
        return argparse.SUPPRESS if suppress else v

    parser.add_argument("--quad-tol", type=float, default=default(1e-11))
    parser.add_argument("--series-tol", type=float, default=default(1e-12))
    parser.add_argument("--root-tol", type=float, default=default(1e-10))
    parser.add_argument("--membership-tol", type=float, default=default(1e-8))
    parser.add_argument("--format", choices=("json", "csv"),
                        default=default("json"))
    parser.add_argument("--out", default=default(None))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="w9periods", description=__doc__)
    _add_global_flags(parser, suppress=False)
    # the same flags are accepted after the subcommand; the shared
    # namespace lets them override the top-level defaults
    common = _Parser(add_help=False)
    _add_global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("periods", parents=[common],
                       help="period matrix of a family curve")
    p.add_argument("--roots", default=None)
    p.add_argument("--s", default=None)
    p.add_argument("--u", default=None)
    p.add_argument("--lambda", dest="lam", default=None)
    p.add_argument("--basis", choices=("genus2_w9", "cover", "elliptic"),
                   default="genus2_w9")
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("theta", parents=[common], help="theta constant with a characteristic")
    p.add_argument("--char", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--g", type=int, default=None,
                   help="expected genus (consistency check only)")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("trace", parents=[common], help="trace the geodesic over a t grid")
    p.add_argument("--from", dest="t_start", type=float, required=True)
    p.add_argument("--to", dest="t_end", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", parents=[common], help="end-to-end family checks at s")
    p.add_argument("--s", default=None)
    p.add_argument("--grid", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common], help="automorphism classification")
    p.add_argument("--abc", default=None)
    p.add_argument("--s", default=None)
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.command == "theta" and args.g is not None:
            ch = _parse_char(args.char)
            if ch.g != args.g:
                raise UsageError(f"--g {args.g} does not match characteristic "
                                 f"genus {ch.g}")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except W9Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
