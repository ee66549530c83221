"""Verification suites: fixed grids, check records and a deterministic runner.

Each suite is a list of zero-argument cases; running a case yields a
``CheckReport``.  Numerical failures (capacity or accuracy limits) become
failed records instead of exceptions so a long stream is never cut short.
"""
from __future__ import annotations

import cmath
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterator, Sequence

from .errors import AccuracyError, CapacityError, DomainError
from .integral_reps import contour_character_inside, contour_character_outside, residue_character
from .jack_core import as_theta, jack_character, jack_eval_ones, jack_eval_ones_branching
from .partitions import format_signature, partitions_of, signatures_in_box
from .pieri import M_MAX, PieriInstance, pieri_check

__all__ = [
    "CheckReport",
    "encode_number",
    "decode_number",
    "relative_error",
    "RESIDUE_GRID",
    "CONTOUR_INSIDE_GRID",
    "CONTOUR_OUTSIDE_GRID",
    "CONTOUR_SIGNATURES",
    "EXACT_THETAS",
    "pieri_nus",
    "pieri_points",
    "SUITES",
    "build_suite",
    "run_cases",
    "thread_count",
]

# 12 points, real and complex, away from 0, 1 and from zeros of small characters
RESIDUE_GRID: tuple[complex | float, ...] = (
    0.5, 2.0, -1.3, 0.9, 1.1, 3.0, -0.3,
    0.97 * cmath.exp(0.1j), cmath.exp(2j), 1.5j, 0.4 + 0.4j, 2 * cmath.exp(-2.5j),
)
CONTOUR_INSIDE_GRID: tuple[complex | float, ...] = (0.3, 0.7, 0.9 * cmath.exp(2j * math.pi / 7))
CONTOUR_OUTSIDE_GRID: tuple[complex | float, ...] = (1.1, 1.5, 3.0)

# parts in [-2, 3], N <= 5; negative parts, repeated parts and the zero signature
CONTOUR_SIGNATURES: tuple[tuple[int, ...], ...] = (
    (0,), (3,), (-2,),
    (1, 0), (3, -2), (2, 2),
    (2, 0, -1), (3, 1, 1), (0, 0, 0), (1, 1, -2),
    (3, 2, 0, -2), (1, 0, 0, 0),
    (3, 1, 0, -2, -2), (3, 3, 2, 1, 0), (2, 1, 0, -1, -2),
)

EXACT_THETAS = (Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(7, 2))


def pieri_nus(N: int) -> list[tuple[int, ...]]:
    """Eight test signatures of length N >= 3, four of them with negative parts."""
    z = [0] * N
    return [
        tuple([1] + z[1:]),
        tuple([2, 1] + z[2:]),
        tuple(z[:-1] + [-1]),
        tuple([2] + z[2:] + [-1]),
        tuple([3, 1, 1] + z[3:]),
        tuple([1] * N),
        tuple(z[:-2] + [-2, -2]),
        tuple([2, 2] + z[2:-1] + [-3]),
    ]


def pieri_points(m: int) -> list[tuple[tuple[float, ...], float]]:
    """Admissible (x-list, x) pairs for the Pieri suite."""
    if m == 1:
        return [((0.3,), 0.6), ((0.5,), 0.8), ((0.2,), 0.9)]
    if m == 2:
        return [((0.3, 0.5), 0.7), ((0.6, 0.8), 0.9)]
    # geometric x-list: consecutive ratios q < x
    q, x = 0.8, 0.9
    return [(tuple(q ** (m - i) for i in range(m)), x)]


# ------------------------------------------------------------------ records


def encode_number(v: Any) -> Any:
    """JSON form of a scalar: p/q strings for rationals, [re, im] for complex."""
    if v is None or isinstance(v, bool):
        return v
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, int):
        return v
    if isinstance(v, complex):
        if v.imag == 0:
            return encode_number(v.real)
        return [encode_number(v.real), encode_number(v.imag)]
    v = float(v)
    if not math.isfinite(v):
        return str(v)
    return float(f"{v:.17g}")


def decode_number(v: Any) -> Any:
    if isinstance(v, list):
        return complex(decode_number(v[0]), decode_number(v[1]))
    if isinstance(v, str):
        if "/" in v:
            return Fraction(v)
        return float(v)
    return v


def relative_error(lhs, rhs) -> float:
    """|lhs - rhs| / |rhs|; falls back to the absolute error when rhs = 0."""
    diff = abs(lhs - rhs)
    scale = abs(rhs)
    return float(diff / scale) if scale else float(diff)


@dataclass
class CheckReport:
    suite: str
    inputs: dict
    lhs: Any
    rhs: Any
    rel_err: float
    passed: bool
    error: str | None = None

    def to_dict(self) -> dict:
        d = {
            "suite": self.suite,
            "inputs": self.inputs,
            "lhs": encode_number(self.lhs),
            "rhs": encode_number(self.rhs),
            "rel_err": encode_number(self.rel_err),
            "pass": bool(self.passed),
        }
        if self.error is not None:
            d["error"] = self.error
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(suite=d["suite"], inputs=dict(d["inputs"]), lhs=decode_number(d["lhs"]),
                   rhs=decode_number(d["rhs"]), rel_err=decode_number(d["rel_err"]),
                   passed=bool(d["pass"]), error=d.get("error"))

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        return cls.from_dict(json.loads(text))


def _failed(suite: str, inputs: dict, exc: Exception) -> CheckReport:
    kind = type(exc).__name__
    return CheckReport(suite, inputs, None, None, math.inf, False, f"{kind}: {exc}")


def _compare(suite: str, inputs: dict, lhs_fn: Callable[[], Any], rhs_fn: Callable[[], Any],
             tol: float) -> CheckReport:
    try:
        lhs, rhs = lhs_fn(), rhs_fn()
    except (CapacityError, AccuracyError) as exc:
        return _failed(suite, inputs, exc)
    err = relative_error(lhs, rhs)
    return CheckReport(suite, inputs, lhs, rhs, err, err <= tol)


def _theta_json(t) -> Any:
    return encode_number(t)


# ------------------------------------------------------------------ suites


Case = Callable[[], CheckReport]


def _residue_cases(thetas: Sequence[int], Ns: Sequence[int], tol: float) -> Iterator[Case]:
    for t in thetas:
        if not float(t).is_integer():
            raise DomainError("the residue suite needs integer theta")
        t = int(t)
        for N in Ns:
            for lam in signatures_in_box(N, -3, 4):
                for x in RESIDUE_GRID:
                    inputs = {"lambda": format_signature(lam), "N": N, "theta": t, "x": encode_number(complex(x))}
                    yield lambda lam=lam, N=N, t=t, x=x, inputs=inputs: _compare(
                        "residue", inputs,
                        lambda: complex(residue_character(lam, N, t, x)),
                        lambda: complex(jack_character(lam, [complex(x)], float(t))),
                        tol)


def _contour_signatures(Ns: Sequence[int] | None) -> list[tuple[int, ...]]:
    if Ns is None:
        return list(CONTOUR_SIGNATURES)
    return [lam for N in Ns for lam in signatures_in_box(N, -2, 3)]


def _contour_cases(variant: str, thetas: Sequence[float], Ns: Sequence[int] | None, tol: float) -> Iterator[Case]:
    fn = contour_character_inside if variant == "inside" else contour_character_outside
    grid = CONTOUR_INSIDE_GRID if variant == "inside" else CONTOUR_OUTSIDE_GRID
    suite = "contour-in" if variant == "inside" else "contour-out"
    for t in thetas:
        t = float(t)
        for lam in _contour_signatures(Ns):
            N = len(lam)
            for x in grid:
                inputs = {"lambda": format_signature(lam), "N": N, "theta": t, "x": encode_number(complex(x))}
                yield lambda lam=lam, N=N, t=t, x=x, inputs=inputs: _compare(
                    suite, inputs,
                    lambda: complex(fn(lam, N, t, x)),
                    lambda: complex(jack_character(lam, [complex(x)], t)),
                    tol)


def _pieri_case(nu, m, t, xs, x, tol) -> CheckReport:
    inputs = {"nu": format_signature(nu), "m": m, "theta": t, "xs": list(xs), "x": x}
    if m > M_MAX:
        return _failed("pieri", inputs, CapacityError(f"Pieri quadrature supports m <= {M_MAX}, got m={m}"))
    try:
        rep = pieri_check(PieriInstance(nu, m, t, xs, x), tol=tol)
    except (CapacityError, AccuracyError) as exc:
        return _failed("pieri", inputs, exc)
    return CheckReport("pieri", inputs, rep.lhs, rep.rhs, rep.rel_err, rep.passed)


def _pieri_cases(m: int, thetas: Sequence[float], Ns: Sequence[int] | None, tol: float | None) -> Iterator[Case]:
    if m < 1:
        raise DomainError("m must be >= 1")
    Ns = Ns or range(max(3, m + 1), max(7, m + 2))
    for t in thetas:
        t = float(t)
        tt = tol if tol is not None else (1e-6 if t >= 1 else 1e-4)
        for N in Ns:
            if N <= m:
                raise DomainError(f"Pieri suite needs N > m, got N={N}, m={m}")
            for nu in pieri_nus(N):
                for xs, x in pieri_points(m):
                    yield lambda nu=nu, t=t, xs=xs, x=x: _pieri_case(nu, m, t, xs, x, tt)


def _branching_ones_cases(thetas: Sequence[Any], Ns: Sequence[int], max_size: int) -> Iterator[Case]:
    for t in thetas:
        t = as_theta(t)
        for N in Ns:
            for n in range(max_size + 1):
                for p in partitions_of(n, max_len=N):
                    lam = tuple(p) + (0,) * (N - len(p))
                    inputs = {"lambda": format_signature(lam), "N": N, "theta": _theta_json(t)}
                    yield lambda lam=lam, N=N, t=t, inputs=inputs: _compare(
                        "branching-ones", inputs,
                        lambda: jack_eval_ones(lam, N, t),
                        lambda: jack_eval_ones_branching(lam, t),
                        0.0 if isinstance(t, Fraction) else 1e-12)


SUITES = ("residue", "contour-in", "contour-out", "pieri", "branching-ones")


def build_suite(name: str, thetas: Sequence[Any] | None = None, Ns: Sequence[int] | None = None,
                m: int = 1, tol: float | None = None) -> list[Case]:
    """Cases of a named suite; None arguments select the default grid."""
    if name == "residue":
        return list(_residue_cases(thetas or (1, 2, 3), Ns or range(1, 6), 1e-9 if tol is None else tol))
    if name in ("contour-in", "contour-out"):
        variant = "inside" if name == "contour-in" else "outside"
        return list(_contour_cases(variant, thetas or (0.5, 1.0, 2.75), Ns, 1e-6 if tol is None else tol))
    if name == "pieri":
        return list(_pieri_cases(m, thetas or (0.5, 1.0, 2.0), Ns, tol))
    if name == "branching-ones":
        return list(_branching_ones_cases(thetas or EXACT_THETAS, Ns or range(1, 6), 5))
    raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


def thread_count() -> int:
    raw = os.environ.get("JACKLAB_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"JACKLAB_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def run_cases(cases: Sequence[Case], threads: int | None = None) -> Iterator[CheckReport]:
    """Run cases, yielding reports in case order whatever the thread count."""
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1:
        for case in cases:
            yield case()
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map() returns results in submission order
        yield from pool.map(lambda c: c(), cases)
