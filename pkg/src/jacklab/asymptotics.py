"""Boundary points, the limit function Psi and Vershik-Kerov experiments.

A boundary point omega = (alpha+, beta+, gamma+, alpha-, beta-, gamma-) is
the limit of scaled Frobenius data of a growing family of signatures.  Along
such a family the Jack characters converge to

    Psi(z_1) ... Psi(z_m).

This module builds concrete families (``VKRecipe``), evaluates Psi and the
prelimit functions, and measures the convergence numerically.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.special import loggamma

from .errors import CapacityError, DomainError
from .integral_reps import contour_character_inside, contour_character_outside, residue_character
from .jack_core import as_theta, jack_character
from .partitions import Signature, frobenius, split_signature

__all__ = [
    "BoundaryPoint",
    "VKRecipe",
    "ConvergenceReport",
    "MomentReport",
    "psi_limit",
    "psi_tilde",
    "psi_prelimit",
    "phi1_limit",
    "vk_sequence",
    "convergence_experiment",
    "moment_convergence_check",
    "default_grid",
    "BRANCHING_N_CAP",
]

BRANCHING_N_CAP = 64


def _nonincreasing(v: Sequence[float], name: str) -> tuple[float, ...]:
    out = tuple(float(a) for a in v)
    if any(a < 0 or not math.isfinite(a) for a in out):
        raise DomainError(f"{name} entries must be finite and >= 0")
    if any(out[i] < out[i + 1] for i in range(len(out) - 1)):
        raise DomainError(f"{name} must be nonincreasing")
    return tuple(a for a in out if a > 0)


@dataclass(frozen=True)
class BoundaryPoint:
    alpha_plus: tuple[float, ...] = ()
    beta_plus: tuple[float, ...] = ()
    gamma_plus: float = 0.0
    alpha_minus: tuple[float, ...] = ()
    beta_minus: tuple[float, ...] = ()
    gamma_minus: float = 0.0

    def __post_init__(self):
        for name in ("alpha_plus", "beta_plus", "alpha_minus", "beta_minus"):
            object.__setattr__(self, name, _nonincreasing(getattr(self, name), name))
        for name in ("gamma_plus", "gamma_minus"):
            g = float(getattr(self, name))
            if g < 0 or not math.isfinite(g):
                raise DomainError(f"{name} must be finite and >= 0")
            object.__setattr__(self, name, g)
        b1 = (self.beta_plus[0] if self.beta_plus else 0.0) + (self.beta_minus[0] if self.beta_minus else 0.0)
        if b1 > 1:
            raise DomainError("need beta_1^+ + beta_1^- <= 1")

    @property
    def delta_plus(self) -> float:
        return self.gamma_plus + sum(self.alpha_plus) + sum(self.beta_plus)

    @property
    def delta_minus(self) -> float:
        return self.gamma_minus + sum(self.alpha_minus) + sum(self.beta_minus)

    def to_json(self) -> str:
        return json.dumps({k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()})

    @classmethod
    def from_dict(cls, d: dict) -> "BoundaryPoint":
        known = {"alpha_plus", "beta_plus", "gamma_plus", "alpha_minus", "beta_minus", "gamma_minus"}
        extra = set(d) - known
        if extra:
            raise DomainError(f"unknown boundary-point keys: {sorted(extra)}")
        kw: dict[str, Any] = {}
        for k, v in d.items():
            if k.startswith("gamma"):
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise DomainError(f"{k} must be a number")
                kw[k] = float(v)
            else:
                if isinstance(v, (int, float)) and not isinstance(v, bool):
                    v = [v]
                if not isinstance(v, list) or any(isinstance(a, bool) or not isinstance(a, (int, float)) for a in v):
                    raise DomainError(f"{k} must be a list of numbers")
                kw[k] = tuple(sorted((float(a) for a in v), reverse=True))
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "BoundaryPoint":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed recipe JSON: {exc}") from None
        if not isinstance(d, dict):
            raise DomainError("recipe JSON must be an object")
        return cls.from_dict(d)


# ------------------------------------------------------------------ limit functions


def _cpow(base: complex, p: float) -> complex:
    if base == 0:
        raise DomainError("singular point of Psi")
    return complex(base) ** p


def psi_limit(z: complex, omega: BoundaryPoint, theta) -> complex:
    """Psi(z; omega, theta), principal powers."""
    t = float(as_theta(theta))
    z = complex(z)
    if z == 0:
        raise DomainError("Psi is undefined at z = 0")
    u, v = z - 1, 1 / z - 1
    out = cmath.exp(omega.gamma_plus * u + omega.gamma_minus * v)
    for b in omega.beta_plus:
        out *= 1 + b * u
    for b in omega.beta_minus:
        out *= 1 + b * v
    for a in omega.alpha_plus:
        out /= _cpow(1 - a * u / t, t)
    for a in omega.alpha_minus:
        out /= _cpow(1 - a * v / t, t)
    return out


def psi_tilde(z: complex, omega: BoundaryPoint, theta) -> complex:
    """Companion of Psi in the variable z = theta / (1 - e^{-y})."""
    t = float(as_theta(theta))
    z = complex(z)
    if z.imag == 0 and z.real <= t:
        raise DomainError("psi_tilde is defined off the cut (-inf, theta]")
    out = cmath.exp(t * omega.gamma_plus / (z - t) - t * omega.gamma_minus / z)
    for b in omega.beta_plus:
        out *= 1 + t * b / (z - t)
    for b in omega.beta_minus:
        out *= 1 - t * b / z
    for a in omega.alpha_plus:
        out /= _cpow(1 - a / (z - t), t)
    for a in omega.alpha_minus:
        out /= _cpow(1 + a / z, t)
    return out


def phi1_limit(z: complex, theta) -> complex:
    """sqrt((z - theta)/z), the limit of the prelimit at the zero signature."""
    t = float(as_theta(theta))
    return cmath.sqrt((complex(z) - t) / complex(z))


def psi_prelimit(z: complex, lam, theta) -> complex:
    """exp(N H(z)) N^(theta N) prod Gamma(Nz+1-lam_i-theta(N-i+1)) / Gamma(Nz+1-lam_i-theta(N-i))."""
    t = float(as_theta(theta))
    lam = tuple(Signature(lam).parts)
    N = len(lam)
    z = complex(z)
    if z.imag == 0 and z.real <= t:
        raise DomainError("psi_prelimit needs z off (-inf, theta]")
    i = np.arange(1, N + 1)
    lam_a = np.asarray(lam, dtype=float)
    top = N * z + 1 - (lam_a + t * (N - i + 1))
    bot = N * z + 1 - (lam_a + t * (N - i))
    for arr in (top, bot):
        if np.any((arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))):
            raise DomainError("Gamma pole in psi_prelimit")
    H = z * cmath.log(z) - (z - t) * cmath.log(z - t) - t
    log_val = N * H + t * N * math.log(N) + np.sum(loggamma(top) - loggamma(bot))
    return complex(np.exp(log_val))


# ------------------------------------------------------------------ VK sequences


def _block_rows(area: int) -> list[int]:
    """Self-conjugate near-square Young diagram with the given area.

    Starts from the s x s square (s = isqrt(area)) and puts the remainder on
    the outer diagonal hook, so arm = leg on every diagonal cell and the
    content sum vanishes.  Area 2 has no self-conjugate diagram; it gets (2,).
    """
    if area <= 0:
        return []
    if area == 2:
        return [2]
    s = math.isqrt(area)
    r = area - s * s
    if r % 2 == 0:
        arms = list(range(s - 1, -1, -1))
        arms[0] += r // 2
    else:
        # one diagonal cell fewer keeps the hook-length parity right
        arms = list(range(s - 1, 0, -1))
        arms[0] += (r + 1) // 2
    d = len(arms)
    ends = [a + i + 1 for i, a in enumerate(arms)]
    return ends + [sum(1 for e in ends if e > i) for i in range(d, ends[0])]


@dataclass(frozen=True)
class VKRecipe:
    """Rows of length floor(alpha_i N), columns of depth floor(beta_i N) and a
    self-conjugate near-square block of area floor(gamma N), on each side."""

    target: BoundaryPoint

    def _side(self, alpha, beta, gamma, N: int) -> list[int]:
        R = [math.floor(a * N) for a in alpha]
        C = [math.floor(b * N) for b in beta]
        B = _block_rows(math.floor(gamma * N))
        p, q = len(R), len(C)
        w = B[0] if B else 0
        rows = [r + q + w for r in R] + [q + b for b in B]
        depth = max(C, default=0)
        rows += [sum(1 for c in C if c > j) for j in range(depth)]
        return [v for v in rows if v > 0]

    def parts(self, N: int) -> tuple[list[int], list[int]]:
        om = self.target
        plus = self._side(om.alpha_plus, om.beta_plus, om.gamma_plus, N)
        minus = self._side(om.alpha_minus, om.beta_minus, om.gamma_minus, N)
        return plus, minus

    def realizable(self, N: int) -> bool:
        plus, minus = self.parts(N)
        return N >= 1 and len(plus) + len(minus) <= N

    def to_json(self) -> str:
        return self.target.to_json()

    @classmethod
    def from_json(cls, text: str) -> "VKRecipe":
        return cls(BoundaryPoint.from_json(text))


def vk_sequence(recipe: VKRecipe, N: int) -> Signature:
    if N < 1:
        raise DomainError("N must be >= 1")
    plus, minus = recipe.parts(N)
    if len(plus) + len(minus) > N:
        raise DomainError(f"recipe needs {len(plus) + len(minus)} rows, more than N={N}")
    zeros = N - len(plus) - len(minus)
    return Signature(plus + [0] * zeros + [-v for v in reversed(minus)])


# ------------------------------------------------------------------ experiments


def default_grid(m: int = 1) -> list[tuple[complex, ...]]:
    """16 points: 6 on |z| = 1 (avoiding z = 1) and 5 on each of |z| = 0.97, 1.03.

    For m = 2 the grid is all ordered pairs of the 16 points.
    """
    pts = [cmath.exp(1j * math.pi * (2 * k + 1) / 6) for k in range(6)]
    for r in (0.97, 1.03):
        pts += [r * cmath.exp(1j * math.pi * (2 * k + 1) / 5) for k in range(5)]
    if m == 1:
        return [(p,) for p in pts]
    if m == 2:
        return [(p, q) for p in pts for q in pts]
    raise DomainError("default grid exists for m in {1, 2}")


@dataclass
class ConvergenceReport:
    Ns: list[int]
    errors: list[float]
    theta: float
    m: int
    grid: list[list[complex]]
    engines: list[str]
    recipe: dict = field(default_factory=dict)

    def strictly_decreasing(self) -> bool:
        e = self.errors
        return all(e[i] > e[i + 1] for i in range(len(e) - 1))

    def to_dict(self) -> dict:
        return {
            "Ns": self.Ns,
            "errors": self.errors,
            "theta": self.theta,
            "m": self.m,
            "grid": [[[z.real, z.imag] for z in pt] for pt in self.grid],
            "engines": self.engines,
            "recipe": self.recipe,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceReport":
        grid = [[complex(a, b) for a, b in pt] for pt in d["grid"]]
        return cls(Ns=list(d["Ns"]), errors=list(d["errors"]), theta=d["theta"], m=d["m"],
                   grid=grid, engines=list(d["engines"]), recipe=dict(d.get("recipe", {})))

    def csv(self) -> str:
        return "N,sup_error\n" + "".join(f"{N},{e:.17g}\n" for N, e in zip(self.Ns, self.errors))


def _is_int(theta: float) -> bool:
    return float(theta).is_integer()


def _one_variable(lam: Signature, z: complex, theta: float, engine: str) -> tuple[complex, str]:
    N = len(lam)
    if engine == "residue" or (engine in ("auto", "integral") and _is_int(theta)):
        return complex(residue_character(lam, N, int(theta), z)), "residue"
    if engine in ("auto", "integral", "contour"):
        if abs(z) < 1:
            return contour_character_inside(lam, N, theta, z), "contour-inside"
        if abs(z) > 1:
            return contour_character_outside(lam, N, theta, z), "contour-outside"
        if engine == "contour":
            raise DomainError("contour representations exclude |z| = 1")
    if N > BRANCHING_N_CAP:
        raise CapacityError(f"branching engine capped at N={BRANCHING_N_CAP}")
    return complex(jack_character(lam, [complex(z)], theta)), "branching"


def convergence_experiment(recipe: VKRecipe, theta, m: int, Ns: Sequence[int],
                           grid: Sequence[Sequence[complex]] | None = None,
                           engine: str = "auto") -> ConvergenceReport:
    """Sup over the grid of |J_{lam(N)}(z; N, theta) - prod Psi(z_i)| for each N.

    engine: "auto" (integral representations for m = 1, branching otherwise),
    "residue", "contour", "integral" or "branching".
    """
    t = float(as_theta(theta))
    if engine not in ("auto", "residue", "contour", "integral", "branching"):
        raise DomainError(f"unknown engine {engine!r}")
    grid = [tuple(complex(v) for v in pt) for pt in (grid or default_grid(m))]
    if any(len(pt) != m for pt in grid):
        raise DomainError(f"grid points must have {m} coordinates")
    omega = recipe.target
    target = np.array([np.prod([psi_limit(v, omega, t) for v in pt]) for pt in grid])
    errors, engines = [], []
    for N in Ns:
        lam = vk_sequence(recipe, N)
        if m > N:
            raise DomainError(f"m={m} exceeds N={N}")
        if m == 1 and engine != "branching":
            vals, used = [], set()
            for (z,) in grid:
                v, name = _one_variable(lam, z, t, engine)
                vals.append(v)
                used.add(name)
            vals = np.array(vals)
            engines.append("+".join(sorted(used)))
        else:
            if N > BRANCHING_N_CAP:
                raise CapacityError(f"branching engine capped at N={BRANCHING_N_CAP}")
            cols = [np.array([pt[i] for pt in grid]) for i in range(m)]
            vals = np.asarray(jack_character(lam, cols, t))
            engines.append("branching")
        errors.append(float(np.max(np.abs(vals - target))))
    return ConvergenceReport(Ns=list(Ns), errors=errors, theta=t, m=m, grid=[list(p) for p in grid],
                             engines=engines, recipe=json.loads(omega.to_json()))


@dataclass
class MomentReport:
    Ns: list[int]
    k: int
    a_plus: list[float]
    b_plus: list[float]
    a_minus: list[float]
    b_minus: list[float]

    def decreased(self) -> bool:
        """Error at the largest N below that at the smallest N, for each series."""
        return all(s[-1] < s[0] or s[0] == s[-1] == 0
                   for s in (self.a_plus, self.b_plus, self.a_minus, self.b_minus))


def moment_convergence_check(recipe: VKRecipe, k: int, Ns: Sequence[int]) -> MomentReport:
    """|sum (a_i/N)^k - sum alpha_i^k| and the b/beta analogue on both sides."""
    if k < 2:
        raise DomainError("moment order k must be >= 2")
    om = recipe.target
    out: dict[str, list[float]] = {"a_plus": [], "b_plus": [], "a_minus": [], "b_minus": []}
    for N in Ns:
        plus, minus = split_signature(vk_sequence(recipe, N))
        for side, part, alpha, beta in (("plus", plus, om.alpha_plus, om.beta_plus),
                                        ("minus", minus, om.alpha_minus, om.beta_minus)):
            fc = frobenius(part)
            sa = sum((float(a) / N) ** k for a in fc.a)
            sb = sum((float(b) / N) ** k for b in fc.b)
            out["a_" + side].append(abs(sa - sum(a**k for a in alpha)))
            out["b_" + side].append(abs(sb - sum(b**k for b in beta)))
    return MomentReport(Ns=list(Ns), k=k, **out)
