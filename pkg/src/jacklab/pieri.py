"""Pieri integral formula for Jack characters.

The product J_nu(x_1..x_m; N, theta) J_nu(x; N, theta) equals an m-fold
integral of (m+1)-variable characters J_nu(x_1 w_1, ..., x_m w_m, x/(w_1...w_m))
against an explicit positive kernel supported on

    U_x = {0 <= w_i <= 1, w_1 ... w_m >= x}.

Quadrature
----------
In the coordinates z_i = -log w_i the domain becomes the simplex
{z_i >= 0, sum z_i <= y} with y = -log x, and the kernel is

    prod z_i^(theta-1) * (y - sum z)^(theta(N-m)-1) * S(z)

with S analytic on the closed simplex.  Stick-breaking coordinates
z_k = y s_k prod_{j<k}(1 - s_j) turn this into a product of Jacobi weights
s_k^(theta-1) (1-s_k)^(theta(N-k)-1) on the unit cube, so a tensor
Gauss-Jacobi rule integrates every endpoint singularity exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Sequence

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .errors import AccuracyError, CapacityError, DomainError
from .integral_reps import QuadratureConfig
from .jack_core import as_theta, jack_character
from .partitions import Signature

__all__ = [
    "PieriInstance",
    "PieriReport",
    "in_domain",
    "kernel_F",
    "kernel_G",
    "kernel_m1_intro",
    "pieri_integrand",
    "pieri_rhs",
    "pieri_check",
    "kernel_mass_outside_cube",
    "BranchingEngine",
    "M_MAX",
]

M_MAX = 3
_MAX_TOTAL_NODES = 2_000_000

PIERI_QUADRATURE = QuadratureConfig(nodes=16, target_rel=1e-10, max_nodes=200)


@dataclass(frozen=True)
class PieriInstance:
    nu: Signature
    m: int
    theta: float
    xs: tuple[float, ...]
    x: float

    def __post_init__(self):
        if not isinstance(self.nu, Signature):
            object.__setattr__(self, "nu", Signature(self.nu))
        xs = tuple(float(v) for v in self.xs)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "theta", float(as_theta(self.theta)))
        N, m = len(self.nu), self.m
        if N < 2:
            raise DomainError("Pieri formula needs N >= 2")
        if not 1 <= m <= N - 1:
            raise DomainError(f"need 1 <= m <= N-1, got m={m}, N={N}")
        if len(xs) != m:
            raise DomainError(f"expected {m} x-values, got {len(xs)}")
        chain = (0.0,) + xs + (self.x, 1.0)
        if any(not chain[i] < chain[i + 1] for i in range(len(chain) - 1)):
            raise DomainError("need 0 < x_1 < ... < x_m < x < 1")
        if any(not self.x > xs[i] / xs[i + 1] for i in range(m - 1)):
            raise DomainError("need x > x_i / x_{i+1} for every i")

    @property
    def N(self) -> int:
        return len(self.nu)


@dataclass
class PieriReport:
    lhs: complex | float
    rhs: complex | float
    abs_err: float
    rel_err: float
    quad_err: float
    nodes: int
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.rel_err <= self.tol)


# ------------------------------------------------------------- pointwise kernel


def in_domain(w: Sequence[float], x: float) -> bool:
    return all(0 <= wi <= 1 for wi in w) and math.prod(w) >= x


def _extend(xs, x, w):
    xe = list(xs) + [1.0]
    we = list(w) + [x / math.prod(w)]
    return xe, we


def kernel_F(xs: Sequence[float], x: float, w: Sequence[float]) -> float:
    xe, we = _extend(xs, x, w)
    out = 1.0 / (1.0 - x)
    for xj in xs:
        out /= 1.0 - xj
    for xi, wi in zip(xe, we):
        out *= 1.0 - xi * wi
    return out


def _fpow(base: float, p: float) -> float:
    if p == 0:
        return 1.0
    if float(p).is_integer():
        return base**p
    if not base > 0:
        raise DomainError(f"nonpositive base {base} under the fractional power {p}")
    return base**p


def kernel_G(xs: Sequence[float], x: float, w: Sequence[float], theta) -> float:
    t = float(as_theta(theta))
    m = len(xs)
    xe, we = _extend(xs, x, w)
    out = 1.0
    for i in range(m):
        out *= _fpow(w[i], -t * (m - i))
    for i in range(m):
        for j in range(i + 1, m):
            out *= _fpow(1 - xe[i] * we[i] / xe[j], t - 1)
            out *= _fpow(1 - xe[i] / xe[j], 1 - 2 * t)
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            out *= 1 - xe[i] * we[i] / (xe[j] * we[j])
            out *= _fpow(1 - xe[i] / (xe[j] * we[j]), t - 1)
    return out


def pieri_integrand(xs: Sequence[float], x: float, w: Sequence[float], theta, N: int) -> float:
    """G F^(theta(N-m)-1) prod(1-w_i)^(theta-1) / prod w_i, without the character."""
    t = float(as_theta(theta))
    m = len(xs)
    val = kernel_G(xs, x, w, t) * _fpow(kernel_F(xs, x, w), t * (N - m) - 1)
    for wi in w:
        val *= _fpow(1 - wi, t - 1) / wi
    return val


def kernel_m1_intro(x1: float, y: float, w: float, theta, N: int) -> float:
    """The m = 1 integrand written directly in the variables (x, y) = (x_1, x), dw-density."""
    t = float(as_theta(theta))
    val = (1 - x1 * w * w / y) * _fpow(1 - x1 * w / y, t - 1) * _fpow(1 / w - 1, t - 1)
    val *= _fpow((1 - x1 * w) * (1 - y / w) / ((1 - x1) * (1 - y)), t * (N - 1) - 1)
    return val / (w * w)


def _log_prefactor(inst: PieriInstance) -> float:
    t, N, m, x = inst.theta, inst.N, inst.m, inst.x
    out = gammaln(N * t) + m * t * math.log(x) - gammaln((N - m) * t) - m * gammaln(t)
    out -= m * t * math.log1p(-x)
    out -= t * sum(math.log1p(-xi) for xi in inst.xs)
    return float(out)


# ------------------------------------------------------------- vectorised kernel


def _log_smooth(inst: PieriInstance, z: np.ndarray) -> np.ndarray:
    """log S(z): kernel / (prod z_i^(theta-1) (y - sum z)^(theta(N-m)-1)); z has shape (m, P)."""
    t, m, N = inst.theta, inst.m, inst.N
    xs = np.asarray(inst.xs)
    y = -math.log(inst.x)
    e = t * (N - m) - 1
    u = y - z.sum(axis=0)
    w = np.exp(-z)
    we = np.vstack([w, np.exp(-u)[None, :]])
    xe = np.append(xs, 1.0)
    acc = np.zeros(z.shape[1])
    # (w_1^m ... w_m)^(-theta)
    for i in range(m):
        acc += t * (m - i) * z[i]
    for i in range(m):
        for j in range(i + 1, m):
            acc += (t - 1) * np.log1p(-xe[i] * we[i] / xe[j])
            acc += (1 - 2 * t) * math.log1p(-xe[i] / xe[j])
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            acc += np.log1p(-xe[i] * we[i] / (xe[j] * we[j]))
            acc += (t - 1) * np.log1p(-xe[i] / (xe[j] * we[j]))
    # F = F_rest * (1 - e^{-u}); the (1 - e^{-u}) / u part is smooth
    log_f_rest = -math.log1p(-inst.x) - np.sum(np.log1p(-xs))
    log_f_rest = log_f_rest + np.sum(np.log1p(-xs[:, None] * w), axis=0)
    acc += e * (log_f_rest + _log_expm1_ratio(u))
    # (1 - w_i)^(theta-1) = z_i^(theta-1) * ((1 - e^{-z_i}) / z_i)^(theta-1)
    acc += (t - 1) * np.sum(_log_expm1_ratio(z), axis=0)
    return acc


def _log_expm1_ratio(u: np.ndarray) -> np.ndarray:
    """log((1 - e^{-u}) / u), continuous at u = 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = u < 1e-8
    out[small] = -u[small] / 2
    us = u[~small]
    out[~small] = np.log(-np.expm1(-us) / us)
    return out


@lru_cache(maxsize=256)
def _jacobi01(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^1 s^a (1-s)^b f(s) ds."""
    t, w = roots_jacobi(n, b, a)
    return (1 + t) / 2, w / 2 ** (a + b + 1)


def _stick_breaking_rule(inst: PieriInstance, n: int):
    """Tensor Gauss-Jacobi rule on the simplex; returns (z of shape (m, P), weights)."""
    t, m, N = inst.theta, inst.m, inst.N
    y = -math.log(inst.x)
    rules = [_jacobi01(n, t - 1, t * (N - k) - 1) for k in range(1, m + 1)]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    s = np.array([g.ravel() for g in grids])
    wts = np.prod(np.array([g.ravel() for g in wgrids]), axis=0)
    z = np.empty_like(s)
    rest = np.ones(s.shape[1])
    for k in range(m):
        z[k] = y * s[k] * rest
        rest = rest * (1 - s[k])
    # Jacobian and the y-powers of the Dirichlet factors
    log_scale = (m * t + t * (N - m) - 1) * math.log(y)
    return z, wts, log_scale


class BranchingEngine:
    """Character evaluator backed by the branching rule (vectorised over nodes)."""

    deterministic = True

    def __call__(self, nu: Signature, cols: Sequence[np.ndarray], theta: float) -> np.ndarray:
        return np.asarray(jack_character(nu, list(cols), float(theta)), dtype=float)


_DEFAULT_ENGINE = BranchingEngine()

CharEngine = Callable[[Signature, Sequence[np.ndarray], float], Any]


def _rhs_at(inst: PieriInstance, n: int, engine: CharEngine | None, with_character: bool) -> float:
    z, wts, log_scale = _stick_breaking_rule(inst, n)
    log_k = _log_smooth(inst, z) + log_scale + _log_prefactor(inst)
    vals = np.exp(log_k)
    if with_character:
        w = np.exp(-z)
        cols = [inst.xs[i] * w[i] for i in range(inst.m)]
        cols.append(inst.x * np.exp(z.sum(axis=0)))
        vals = vals * (engine or _DEFAULT_ENGINE)(inst.nu, cols, inst.theta)
    return float(np.sum(wts * vals))


def _refine(f, cfg: QuadratureConfig, m: int) -> tuple[float, float, int]:
    """Grow the per-dimension node count until two rules agree to cfg.target_rel."""
    n = cfg.nodes
    prev, err = f(n), float("inf")
    while True:
        n2 = n + max(4, n // 2)
        if n2**m > _MAX_TOTAL_NODES or n2 > cfg.max_nodes:
            raise AccuracyError(f"Pieri quadrature did not converge (last estimate {err:.3g})",
                                estimate=err)
        cur = f(n2)
        err = abs(cur - prev) / max(abs(cur), 1e-300)
        if err <= cfg.target_rel:
            return cur, err, n2**m
        n, prev = n2, cur


def pieri_rhs(inst: PieriInstance, cfg: QuadratureConfig | None = None,
              engine: CharEngine | None = None, *, with_error: bool = False):
    """Right-hand side of the Pieri integral formula by quadrature.

    With ``with_error`` returns (value, quadrature error estimate, node count).
    """
    if inst.m > M_MAX:
        raise CapacityError(f"pieri_rhs supports m <= {M_MAX}, got m={inst.m}")
    cfg = cfg or PIERI_QUADRATURE
    val, err, nodes = _refine(lambda n: _rhs_at(inst, n, engine, True), cfg, inst.m)
    return (val, err, nodes) if with_error else val


def kernel_mass(inst: PieriInstance, cfg: QuadratureConfig | None = None) -> float:
    """Total mass of the kernel (the right-hand side with J replaced by 1)."""
    cfg = cfg or PIERI_QUADRATURE
    val, _, _ = _refine(lambda n: _rhs_at(inst, n, None, False), cfg, inst.m)
    return val


def kernel_mass_outside_cube(inst: PieriInstance, cfg: QuadratureConfig | None = None,
                             exponent: float = 0.6) -> float:
    """Kernel mass outside the cube prod [1 - N^-exponent, 1].

    Computed as total mass minus the mass of the cube, which (for the
    configurations where the cube lies inside U_x) is a tensor Gauss-Jacobi
    integral with weight z^(theta-1) on [0, c]^m, c = -log(1 - N^-exponent).
    """
    cfg = cfg or PIERI_QUADRATURE
    t, m, N = inst.theta, inst.m, inst.N
    c = -math.log1p(-(N ** -exponent))
    y = -math.log(inst.x)
    if not m * c < y:
        raise DomainError("cube is not contained in the integration domain for this configuration")
    e = t * (N - m) - 1

    def cube(n: int) -> float:
        s, ws = _jacobi01(n, t - 1, 0.0)
        grids = np.meshgrid(*([s] * m), indexing="ij")
        wg = np.meshgrid(*([ws] * m), indexing="ij")
        z = c * np.array([g.ravel() for g in grids])
        wts = np.prod(np.array([g.ravel() for g in wg]), axis=0)
        u = y - z.sum(axis=0)
        log_k = _log_smooth(inst, z) + e * np.log(u) + _log_prefactor(inst)
        return float(np.sum(wts * np.exp(log_k)) * c ** (m * t))

    total = kernel_mass(inst, cfg)
    inside, _, _ = _refine(cube, cfg, m)
    return total - inside


def pieri_check(inst: PieriInstance, cfg: QuadratureConfig | None = None,
                engine: CharEngine | None = None, tol: float | None = None) -> PieriReport:
    """Compare both sides of the Pieri formula."""
    if tol is None:
        tol = 1e-6 if inst.theta >= 1 else 1e-4
    lhs = jack_character(inst.nu, list(inst.xs), inst.theta) * jack_character(inst.nu, [inst.x], inst.theta)
    rhs, qerr, nodes = pieri_rhs(inst, cfg, engine, with_error=True)
    abs_err = abs(lhs - rhs)
    return PieriReport(lhs=float(lhs), rhs=rhs, abs_err=abs_err, rel_err=abs_err / abs(lhs),
                       quad_err=qerr, nodes=nodes, tol=tol)
