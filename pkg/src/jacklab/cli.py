"""Command line front end.

    jacklab eval --lambda [2,1,0] --vars 1,2,3 --theta 1/2
    jacklab char --lambda [2,1,0] --vars 2,1 --N 3 --theta 1 --exact
    jacklab verify residue --theta 2 --N 3
    jacklab pieri-check --nu [1,0,0] --m 1 --theta 1 --xs 0.3 --x 0.6
    jacklab vk-limit --recipe '{"gamma_plus": 1}' --theta 1 --m 1 --Ns 20,40,80

Exit codes: 0 success / all checks passed, 1 a check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence, TextIO

from .asymptotics import VKRecipe, convergence_experiment, vk_sequence
from .errors import AccuracyError, CapacityError, DomainError
from .jack_core import as_theta, jack_character, jack_eval
from .partitions import format_signature, parse_signature
from .pieri import M_MAX, PieriInstance, pieri_check
from .suites import SUITES, CheckReport, build_suite, run_cases

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# ------------------------------------------------------------------ parsing


def parse_scalar(text: str, exact: bool | None = None):
    """Rational literal -> Fraction, otherwise float or complex.

    exact=True rejects anything that is not rational; exact=False always
    returns a float/complex.
    """
    text = text.strip()
    if exact is not False:
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            if exact:
                raise InputError(f"{text!r} is not a rational number") from None
    try:
        v = complex(text.replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse number {text!r}") from None
    return v.real if v.imag == 0 else v


def parse_list(text: str, exact: bool | None = None) -> list:
    text = text.strip().strip("[]")
    if not text:
        return []
    return [parse_scalar(t, exact) for t in text.split(",")]


def parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.strip().strip("[]").split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected a comma separated list of integers, got {text!r}") from None


def format_value(v: Any) -> str:
    """Exact p/q for rationals, 17 significant digits otherwise."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, complex):
        if v.imag == 0:
            return format_value(v.real)
        sign = "+" if v.imag >= 0 else "-"
        return f"{v.real:.17g}{sign}{abs(v.imag):.17g}j"
    return f"{float(v):.17g}"


@dataclass
class RunConfig:
    """Parsed and validated arguments of one invocation."""

    command: str
    inputs: dict = field(default_factory=dict)
    tol: float | None = None
    out: str | None = None


def _mode(args) -> bool | None:
    if args.exact and args.float:
        raise InputError("--exact and --float are mutually exclusive")
    return True if args.exact else (False if args.float else None)


def _theta(text: str, exact: bool | None):
    t = parse_scalar(text, exact)
    if isinstance(t, complex):
        raise InputError("theta must be real")
    return as_theta(t if isinstance(t, Fraction) else float(t))


def build_config(args) -> RunConfig:
    cmd = args.command
    if cmd in ("eval", "char"):
        exact = _mode(args)
        lam = parse_signature(args.lam)
        xs = parse_list(args.vars, exact)
        theta = _theta(args.theta, exact)
        inputs = {"lambda": lam, "vars": xs, "theta": theta}
        if cmd == "eval":
            if len(xs) != len(lam):
                raise InputError(f"eval needs {len(lam)} variables, got {len(xs)}")
        else:
            N = args.N if args.N is not None else len(lam)
            if N != len(lam):
                raise InputError(f"--N {N} differs from the signature length {len(lam)}")
            if not 1 <= len(xs) <= N:
                raise InputError(f"need between 1 and {N} variables")
            inputs["N"] = N
        return RunConfig(cmd, inputs)
    if cmd == "verify":
        thetas = None if args.theta is None else [_theta(t, None) for t in args.theta.split(",")]
        Ns = None if args.N is None else parse_ints(args.N)
        if args.suite == "residue" and thetas and any(not float(t).is_integer() for t in thetas):
            raise InputError("the residue suite needs integer theta")
        return RunConfig(cmd, {"suite": args.suite, "thetas": thetas, "Ns": Ns, "m": args.m}, args.tol, args.out)
    if cmd == "pieri-check":
        nu = parse_signature(args.nu)
        xs = [float(v) for v in parse_list(args.xs, False)]
        inst_args = {"nu": nu, "m": args.m, "theta": _theta(args.theta, False), "xs": xs, "x": float(args.x)}
        if args.m <= M_MAX:
            PieriInstance(**inst_args)  # validates the domain before dispatch
        return RunConfig(cmd, inst_args, args.tol, args.out)
    if cmd == "vk-limit":
        recipe = VKRecipe.from_json(args.recipe)
        Ns = parse_ints(args.Ns)
        if not Ns:
            raise InputError("--Ns needs at least one value")
        for N in Ns:
            vk_sequence(recipe, N)  # unrealizable recipes fail here
        return RunConfig(cmd, {"recipe": recipe, "theta": _theta(args.theta, False), "m": args.m, "Ns": Ns,
                               "engine": args.engine, "csv": args.csv}, out=args.out)
    raise InputError(f"unknown command {cmd!r}")


# ------------------------------------------------------------------ commands


def cmd_eval(cfg: RunConfig, out: TextIO) -> int:
    i = cfg.inputs
    if cfg.command == "eval":
        val = jack_eval(i["lambda"], i["vars"], i["theta"])
    else:
        val = jack_character(i["lambda"], i["vars"], i["theta"], i["N"])
    out.write(format_value(val) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: TextIO) -> int:
    i = cfg.inputs
    cases = build_suite(i["suite"], i["thetas"], i["Ns"], i["m"], cfg.tol)
    ok = True
    for rep in run_cases(cases):
        out.write(rep.to_json() + "\n")
        out.flush()
        ok &= rep.passed
    return EXIT_OK if ok else EXIT_FAIL


def cmd_pieri_check(cfg: RunConfig, out: TextIO) -> int:
    i = cfg.inputs
    inputs = {"nu": format_signature(i["nu"]), "m": i["m"], "theta": float(i["theta"]),
              "xs": i["xs"], "x": i["x"]}
    try:
        if i["m"] > M_MAX:
            raise CapacityError(f"Pieri quadrature supports m <= {M_MAX}, got m={i['m']}")
        rep = pieri_check(PieriInstance(**i), tol=cfg.tol)
        rec = CheckReport("pieri", inputs, rep.lhs, rep.rhs, rep.rel_err, rep.passed)
    except (CapacityError, AccuracyError) as exc:
        rec = CheckReport("pieri", inputs, None, None, float("inf"), False, f"{type(exc).__name__}: {exc}")
    out.write(rec.to_json() + "\n")
    return EXIT_OK if rec.passed else EXIT_FAIL


def cmd_vklimit(cfg: RunConfig, out: TextIO) -> int:
    i = cfg.inputs
    rep = convergence_experiment(i["recipe"], i["theta"], i["m"], i["Ns"], engine=i["engine"])
    out.write(json.dumps(rep.to_dict()) + "\n")
    if i["csv"] == "-":
        out.write(rep.csv())
    elif i["csv"]:
        with open(i["csv"], "w", encoding="utf-8") as fh:
            fh.write(rep.csv())
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "char": cmd_eval, "verify": cmd_verify,
            "pieri-check": cmd_pieri_check, "vk-limit": cmd_vklimit}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jacklab", description="Jack characters: evaluation and identity checks.")
    sub = p.add_subparsers(dest="command", required=True)

    for name, helptext in (("eval", "evaluate J_lambda(x_1..x_N)"),
                           ("char", "evaluate the normalised character J_lambda(x_1..x_m, 1^(N-m)) / J_lambda(1^N)")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--lambda", dest="lam", required=True, help="signature, e.g. [3,1,0,-2]")
        s.add_argument("--vars", required=True, help="comma separated values; rationals like 1/2 stay exact")
        s.add_argument("--theta", required=True)
        if name == "char":
            s.add_argument("--N", type=int, default=None)
        s.add_argument("--exact", action="store_true", help="require rational inputs and an exact result")
        s.add_argument("--float", action="store_true", help="force floating point evaluation")

    s = sub.add_parser("verify", help="run a verification suite, one JSON record per grid point")
    s.add_argument("suite", choices=SUITES)
    s.add_argument("--theta", default=None, help="comma separated theta values (default: suite grid)")
    s.add_argument("--N", default=None, help="comma separated N values (default: suite grid)")
    s.add_argument("--m", type=int, default=1, help="number of variables for the pieri suite")
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--out", default=None, help="write records here instead of stdout")

    s = sub.add_parser("pieri-check", help="check the Pieri integral formula at one point")
    s.add_argument("--nu", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--theta", required=True)
    s.add_argument("--xs", required=True)
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--out", default=None)

    s = sub.add_parser("vk-limit", help="convergence of characters along a Vershik-Kerov sequence")
    s.add_argument("--recipe", required=True, help='JSON, e.g. {"alpha_plus": [0.3], "gamma_plus": 1}')
    s.add_argument("--theta", required=True)
    s.add_argument("--m", type=int, default=1, choices=(1, 2))
    s.add_argument("--Ns", required=True, help="comma separated, e.g. 20,40,80")
    s.add_argument("--engine", default="auto", choices=("auto", "residue", "contour", "integral", "branching"))
    s.add_argument("--csv", default=None, help="also write an N,sup_error table to this path ('-' for stdout)")
    s.add_argument("--out", default=None)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
    except (InputError, DomainError) as exc:
        print(f"jacklab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = open(cfg.out, "w", encoding="utf-8") if cfg.out else sys.stdout
    try:
        return COMMANDS[cfg.command](cfg, out)
    except (InputError, DomainError) as exc:
        print(f"jacklab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CapacityError, AccuracyError) as exc:
        print(f"jacklab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_FAIL
    finally:
        if cfg.out:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
