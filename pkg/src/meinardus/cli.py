"""Command-line entry point.

Weights spec grammar::

    spec    := family [":" params] | "@" path
    family  := "power-law" | "forest" | "example2" | "example3"
    params  := key "=" value ("," key "=" value)*

``power-law`` takes ``rho`` (default 1, may be a fraction such as 1/2)
and ``r``.  ``@path`` reads a tabulated file (JSON array or one value per
line); tabulated weights carry no Dirichlet data, so the asymptotic
commands reject them.

Exit status: 0 success, 2 usage or configuration error, 3 failed domain
precondition, 4 indeterminate numerical verdict.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Optional

from . import asymptotics, exact, khintchine, specialfn, verify
from .errors import PreconditionError
from .weights import StructureKind, WeightSequence, load_tabulated, make_example2, make_example3, \
    make_forest, make_power_law

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_INDETERMINATE = 4

FORMATS = ("csv", "json", "table")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# weights specs

def _number(text: str):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


def _canon_number(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else str(x)


def parse_weights_spec(text: str) -> tuple[str, WeightSequence]:
    """Return (canonical spec text, weights)."""
    text = text.strip()
    if text.startswith("@"):
        path = text[1:]
        try:
            return text, load_tabulated(path)
        except OSError as exc:
            raise ConfigError(f"cannot read weights file {path!r}: {exc}") from None
        except (ValueError, ArithmeticError) as exc:
            raise ConfigError(f"bad weights file {path!r}: {exc}") from None
    family, _, rest = text.partition(":")
    family = family.strip().lower()
    params = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise ConfigError(f"expected key=value in weights spec, got {item!r}")
            params[key.strip().lower()] = _number(val)
    if family in ("power-law", "powerlaw", "power_law"):
        unknown = set(params) - {"rho", "r"}
        if unknown:
            raise ConfigError(f"unknown power-law parameter(s): {', '.join(sorted(unknown))}")
        if "r" not in params:
            raise ConfigError("power-law needs r=...")
        rho, r = params.get("rho", Fraction(1)), params["r"]
        if rho <= 0 or r <= 0:
            raise ConfigError("power-law needs rho > 0 and r > 0")
        rho_arg = rho if rho.denominator != 1 else int(rho)
        w = make_power_law(rho_arg, float(r))
        return f"power-law:rho={_canon_number(rho)},r={_canon_number(r)}", w
    makers = {"forest": make_forest, "example2": make_example2, "example3": make_example3}
    if family in makers:
        if params:
            raise ConfigError(f"{family} takes no parameters")
        return family, makers[family]()
    raise ConfigError(f"unknown weights family {family!r}")


# ---------------------------------------------------------------------------
# run configuration

def parse_n_range(text: str) -> tuple[int, ...]:
    """'10', '100,500,1000' or 'start:stop[:step]' (stop inclusive)."""
    out = []
    try:
        for part in str(text).split(","):
            part = part.strip()
            if ":" in part:
                bits = [int(b) for b in part.split(":")]
                if len(bits) not in (2, 3):
                    raise ValueError
                start, stop = bits[0], bits[1]
                step = bits[2] if len(bits) == 3 else 1
                if step <= 0:
                    raise ValueError
                out.extend(range(start, stop + 1, step))
            else:
                out.append(int(part))
    except ValueError:
        raise ConfigError(f"bad n or n-range {text!r}") from None
    if not out or min(out) < 0:
        raise ConfigError(f"n values must be nonnegative, got {text!r}")
    return tuple(out)


@dataclass(frozen=True)
class RunConfig:
    command: str
    weights_spec: str = "power-law:rho=1,r=1"
    kind: StructureKind = StructureKind.MULTISET
    n: tuple = ()
    output_format: str = "csv"
    rel_tol: float = specialfn.DEFAULT_PRECISION.rel_tol
    options: tuple = field(default=())  # sorted (key, text) pairs

    def option(self, key: str, default=None):
        return dict(self.options).get(key, default)

    def to_text(self) -> str:
        parts = [
            f"command={self.command}",
            f"weights={self.weights_spec}",
            f"kind={self.kind.name.lower()}",
            f"n={','.join(str(v) for v in self.n)}",
            f"format={self.output_format}",
            f"rel_tol={self.rel_tol!r}",
        ]
        parts += [f"{k}={v}" for k, v in self.options]
        return ";".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        items = {}
        for chunk in text.split(";"):
            key, eq, val = chunk.partition("=")
            if not eq:
                raise ConfigError(f"bad config item {chunk!r}")
            items[key] = val
        core = {f.name for f in fields(cls)}
        try:
            return cls.build(
                command=items.pop("command"),
                weights_spec=items.pop("weights"),
                kind=items.pop("kind"),
                n=items.pop("n"),
                output_format=items.pop("format"),
                rel_tol=float(items.pop("rel_tol")),
                options={k: v for k, v in items.items() if k not in core},
            )
        except KeyError as exc:
            raise ConfigError(f"config text lacks {exc.args[0]!r}") from None

    @classmethod
    def build(cls, command, weights_spec, kind, n, output_format="csv",
              rel_tol=specialfn.DEFAULT_PRECISION.rel_tol, options=None) -> "RunConfig":
        canon, _ = parse_weights_spec(weights_spec)
        try:
            kind = StructureKind.parse(kind)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if output_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {output_format!r}")
        try:
            specialfn.Precision(rel_tol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        n_vals = parse_n_range(n) if isinstance(n, str) and n else tuple(int(v) for v in (n or ()))
        opts = tuple(sorted((str(k), str(v)) for k, v in (options or {}).items() if v is not None))
        return cls(command, canon, kind, n_vals, output_format, float(rel_tol), opts)

    def weights(self) -> WeightSequence:
        return parse_weights_spec(self.weights_spec)[1]


# ---------------------------------------------------------------------------
# output

def fmt_value(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if x is None:
        return ""
    return str(x)


def _json_value(x):
    if isinstance(x, Fraction):
        return fmt_value(x) if x.denominator != 1 else int(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return fmt_value(x)
        return float(format(x, ".17g"))
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    return x


def render(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        objs = [dict(zip(header, (_json_value(v) for v in row))) for row in rows]
        return json.dumps(objs, indent=2, ensure_ascii=False) + "\n"
    text_rows = [[fmt_value(v) for v in row] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(text_rows)
        return buf.getvalue()
    widths = [max([len(h)] + [len(r[i]) for r in text_rows]) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(wd) for h, wd in zip(header, widths)),
             "  ".join("-" * wd for wd in widths)]
    lines += ["  ".join(v.rjust(wd) for v, wd in zip(r, widths)) for r in text_rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands; each returns (text, exit status)

def cmd_count(cfg: RunConfig) -> tuple[str, int]:
    w = cfg.weights()
    if not cfg.n:
        raise ConfigError("count needs --n")
    N = max(cfg.n)
    labelled = cfg.option("labelled") == "true"
    with_log = cfg.option("log") == "true"
    if labelled and cfg.kind is not StructureKind.ASSEMBLY:
        raise ConfigError("--labelled applies to assemblies only")
    table = exact.count_exact(w, cfg.kind, N)
    ns = range(N + 1) if len(cfg.n) == 1 else cfg.n
    header = ["n", "c_n"] + (["s_n"] if labelled else []) + (["log_c_n"] if with_log else [])
    rows = []
    for n in ns:
        row = [n, table[n]]
        if labelled:
            row.append(table.labelled[n])
        if with_log:
            row.append(exact.log_count(table, n) if table[n] != 0 else -math.inf)
        rows.append(row)
    return render(header, rows, cfg.output_format), EXIT_OK


def cmd_compare(cfg: RunConfig) -> tuple[str, int]:
    w = cfg.weights()
    w.require_meta()
    if not cfg.n:
        raise ConfigError("compare needs --n")
    table = exact.count_exact(w, cfg.kind, max(cfg.n))
    header = ["n", "log_exact", "log_meinardus", "log_khintchine",
              "ratio_meinardus", "ratio_khintchine"]
    rows = []
    for n in cfg.n:
        if n < 1:
            raise ConfigError("compare needs n >= 1")
        le = exact.log_count(table, n)
        lm = asymptotics.meinardus_estimate(w, cfg.kind, n).log_value
        lk = asymptotics.khintchine_estimate(w, cfg.kind, n).log_value
        rows.append([n, le, lm, lk, math.exp(lm - le), math.exp(lk - le)])
    return render(header, rows, cfg.output_format), EXIT_OK


def cmd_asymptote(cfg: RunConfig) -> tuple[str, int]:
    w = cfg.weights()
    header = ["n", "log_meinardus", "mantissa", "exponent10", "log_khintchine"]
    rows = []
    for n in cfg.n or ():
        est = asymptotics.meinardus_estimate(w, cfg.kind, n)
        m, e = est.mantissa_exponent()
        rows.append([n, est.log_value, m, e, asymptotics.khintchine_estimate(w, cfg.kind, n).log_value])
    return render(header, rows, cfg.output_format), EXIT_OK


def cmd_delta(cfg: RunConfig) -> tuple[str, int]:
    w = cfg.weights()
    header = ["n", "delta_n", "residual", "relative_residual", "delta_asymptotic", "variance"]
    rows = []
    for n in cfg.n or ():
        sp = khintchine.solve_saddle(w, cfg.kind, n)
        asym = asymptotics.delta_asymptotic(w, cfg.kind, n) if w.meta is not None else math.nan
        rows.append([n, sp.delta_n, sp.residual, sp.residual / n, asym, sp.variance])
    return render(header, rows, cfg.output_format), EXIT_OK


def cmd_llt(cfg: RunConfig) -> tuple[str, int]:
    w = cfg.weights()
    header = ["n", "delta_n", "B2", "P_convolution", "P_quadrature", "relative_difference",
              "gauss_ratio"]
    rows = []
    for n in cfg.n or ():
        sp = khintchine.solve_saddle(w, cfg.kind, n)
        e = khintchine.TiltedEnsemble(w, cfg.kind, n, sp.delta_n)
        quad = khintchine.point_prob_quadrature(e)
        conv = khintchine.point_prob_convolution(e) if n <= khintchine.CONVOLUTION_MAX_N else None
        pc = conv.value if conv is not None else math.nan
        rel = abs(quad.value - pc) / pc if conv is not None and pc > 0 else math.nan
        ref = conv if conv is not None else quad
        gauss = math.exp(ref.log_value + 0.5 * math.log(2.0 * math.pi * sp.variance))
        rows.append([n, sp.delta_n, sp.variance, pc, quad.value, rel, gauss])
    return render(header, rows, cfg.output_format), EXIT_OK


def cmd_check(cfg: RunConfig) -> tuple[str, int]:
    w = cfg.weights()
    condition = cfg.option("condition", "iii")
    deltas = [float(d) for d in cfg.option("delta_grid", "0.01,0.001,0.0001").split(",")]
    eps = cfg.option("epsilon")
    if condition == "iii":
        rep = verify.check_condition_iii(w, deltas, float(eps) if eps else 1.0)
    elif condition == "iii-prime":
        rep = verify.check_condition_iii_prime(w, cfg.kind, deltas, float(eps) if eps else 0.1)
    else:
        raise ConfigError(f"unknown condition {condition!r}")
    status = EXIT_INDETERMINATE if rep.verdict is verify.Verdict.INDETERMINATE else EXIT_OK
    summary = rep.summary()
    if cfg.output_format == "json":
        obj = {
            "condition": rep.condition.value,
            "kind": rep.kind.name.lower() if rep.kind is not None else None,
            "verdict": rep.verdict.value,
            "witness_alpha": rep.witness_alpha,
            "epsilon": rep.epsilon,
            "truncation_K": rep.truncation_K,
            "growth_constant": rep.growth_constant,
            "alpha_grid": rep.alpha_grid_spec,
            "stable": rep.stable,
            "note": rep.note,
            "deltas": summary,
        }
        return json.dumps(_json_value(obj), indent=2) + "\n", status
    header = ["delta", "points", "min_margin", "witness_alpha", "K", "tail_bound", "verdict"]
    rows = [[s["delta"], s["points"], s["min_margin"], s["witness_alpha"], s["K"],
             s["tail_bound"], rep.verdict.value] for s in summary]
    text = render(header, rows, cfg.output_format)
    if cfg.output_format == "table":
        wit = fmt_value(rep.witness_alpha) if rep.witness_alpha is not None else "-"
        text += (f"verdict: {rep.verdict.value}  witness alpha: {wit}  ({rep.note}; "
                 "grid evidence, not a proof)\n")
    return text, status


SPECIAL = {
    "gamma": specialfn.gamma,
    "digamma": specialfn.digamma,
    "zeta": specialfn.zeta,
    "zeta-prime": specialfn.zeta_prime,
    "bose-log": specialfn.bose_log_integral,
}


def cmd_special(cfg: RunConfig) -> tuple[str, int]:
    name = cfg.option("function", "zeta")
    if name not in SPECIAL:
        raise ConfigError(f"unknown function {name!r}; choose from {', '.join(SPECIAL)}")
    xs = [float(_number(x)) for x in cfg.option("x", "0").split(",")]
    prec = specialfn.Precision(cfg.rel_tol)
    rows = []
    for x in xs:
        if name in ("zeta", "zeta-prime"):
            val = SPECIAL[name](x, prec)
        else:
            val = SPECIAL[name](x)
        rows.append([name, x, val])
    return render(["function", "x", "value"], rows, cfg.output_format), EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "compare": cmd_compare,
    "asymptote": cmd_asymptote,
    "delta": cmd_delta,
    "llt": cmd_llt,
    "check": cmd_check,
    "special": cmd_special,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meinardus",
                                     description="Exact and asymptotic counts of weighted partitions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_required=True, default_format="csv"):
        p.add_argument("--weights", default="power-law:rho=1,r=1",
                       help="weights spec, e.g. power-law:rho=1,r=1, forest, example2, @file")
        p.add_argument("--kind", default="multiset", help="multiset, selection or assembly")
        p.add_argument("--n", required=n_required, default="",
                       help="n, a list 100,500 or a range start:stop[:step]")
        p.add_argument("--format", dest="output_format", choices=FORMATS, default=default_format)
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--rel-tol", type=float, default=specialfn.DEFAULT_PRECISION.rel_tol)

    p = sub.add_parser("count", help="exact counts c_0..c_n")
    common(p)
    p.add_argument("--labelled", action="store_true", help="add s_n = n! c_n (assemblies)")
    p.add_argument("--log", action="store_true", help="add log c_n")
    common(sub.add_parser("compare", help="exact vs asymptotic log counts"))
    common(sub.add_parser("asymptote", help="closed-form estimate of c_n"))
    common(sub.add_parser("delta", help="solve the saddle equation"))
    common(sub.add_parser("llt", help="point probability P(Z_n = n) two ways"))
    p = sub.add_parser("check", help="grid check of the decay conditions")
    common(p, n_required=False, default_format="table")
    p.add_argument("--condition", choices=("iii", "iii-prime"), default="iii")
    p.add_argument("--delta-grid", default="0.01,0.001,0.0001")
    p.add_argument("--epsilon", default=None)
    p = sub.add_parser("special", help="evaluate a special function")
    common(p, n_required=False)
    p.add_argument("--function", choices=sorted(SPECIAL), default="zeta")
    p.add_argument("--x", default="0", help="argument or comma-separated arguments")
    return parser


def _options(args) -> dict:
    if args.command == "count":
        return {"labelled": str(args.labelled).lower(), "log": str(args.log).lower()}
    if args.command == "check":
        return {"condition": args.condition, "delta_grid": args.delta_grid, "epsilon": args.epsilon}
    if args.command == "special":
        return {"function": args.function, "x": args.x}
    return {}


def run(cfg: RunConfig) -> tuple[str, int]:
    return COMMANDS[cfg.command](cfg)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.build(args.command, args.weights, args.kind, args.n,
                              args.output_format, args.rel_tol, _options(args))
        text, status = run(cfg)
    except ConfigError as exc:
        print(f"meinardus: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"meinardus: precondition failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"meinardus: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status
