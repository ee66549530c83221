"""Jack polynomials and Jack characters through the branching rule.

Values are computed by peeling one variable at a time:

    J_lam(x_1..x_{N+1}) = sum_{mu < lam} psi_{lam/mu}(theta) x_{N+1}^{|lam|-|mu|} J_mu(x_1..x_N),

with J of zero variables equal to 1.  The same code path runs over exact
rationals (``Fraction``) and over floats/complex numbers, including numpy
arrays of evaluation points.  Exact mode is selected when theta and every
argument are rational; otherwise everything is converted to float first.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Any, Sequence

import numpy as np

from .errors import DomainError
from .partitions import Signature, interlaces, interlacing_below

__all__ = [
    "as_theta",
    "is_exact",
    "pochhammer",
    "psi_branching",
    "jack_eval_ones",
    "jack_eval_ones_branching",
    "jack_eval",
    "jack_character",
    "CharacterQuery",
    "collapse_ones",
    "clear_caches",
]

CACHE_SIZE = int(os.environ.get("JACKLAB_CACHE_SIZE", "200000"))

# products are exact to a few ulp; past this length switch to log-gamma
_POCH_PRODUCT_MAX = 64


def is_exact(v: Any) -> bool:
    return isinstance(v, Rational) and not isinstance(v, bool)


def as_theta(theta) -> Fraction | float:
    """Validate theta; rationals (int, Fraction, "p/q" strings) stay exact."""
    if isinstance(theta, bool):
        raise DomainError("theta must be a positive number")
    if isinstance(theta, str):
        try:
            theta = Fraction(theta)
        except ValueError:
            theta = float(theta)
    if is_exact(theta):
        t: Fraction | float = Fraction(theta)
    elif isinstance(theta, (float, np.floating)):
        t = float(theta)
    else:
        raise DomainError(f"theta must be a positive real, got {theta!r}")
    if not t > 0 or (isinstance(t, float) and not math.isfinite(t)):
        raise DomainError(f"theta must be positive, got {theta!r}")
    return t


def _to_float(v):
    if isinstance(v, np.ndarray):
        return v if v.dtype.kind in "fc" else v.astype(float)
    if is_exact(v):
        return float(v)
    return v


def _resolve_mode(theta, xs: Sequence[Any]):
    """Return (theta, xs) either all exact or all floating."""
    t = as_theta(theta)
    if isinstance(t, Fraction) and all(is_exact(x) for x in xs):
        return t, [Fraction(x) for x in xs]
    return float(t), [_to_float(x) for x in xs]


def pochhammer(x, n: int):
    """Rising factorial (x)_n = x(x+1)...(x+n-1)."""
    if n < 0:
        raise DomainError("pochhammer length must be >= 0")
    if n <= _POCH_PRODUCT_MAX or is_exact(x) or not isinstance(x, float) or x <= 0:
        out = 1
        for k in range(n):
            out = out * (x + k)
        return out
    return math.exp(math.lgamma(x + n) - math.lgamma(x))


@lru_cache(maxsize=CACHE_SIZE, typed=True)
def _psi(lam: tuple[int, ...], mu: tuple[int, ...], theta) -> Any:
    # only columns j with mu_j > lam_{j+1} contribute, so trailing zeros are free
    val = 1
    for j in range(len(mu)):
        L = mu[j] - lam[j + 1]
        if L == 0:
            continue
        for i in range(j + 1):
            d = theta * (j - i)
            a = mu[i] - mu[j] + d
            b = lam[i] - mu[j] + d
            val = val * pochhammer(a + theta, L) * pochhammer(b + 1, L)
            val = val / (pochhammer(a + 1, L) * pochhammer(b + theta, L))
    return val


def psi_branching(lam, mu, theta):
    """Branching coefficient psi_{lam/mu}(theta); 0 when mu does not interlace lam."""
    lam_t, mu_t = tuple(Signature(lam).parts), tuple(mu)
    if len(lam_t) != len(mu_t) + 1:
        raise DomainError("psi needs len(lam) = len(mu) + 1")
    if mu_t and not interlaces(Signature(mu_t), Signature(lam_t)):
        return 0
    t = as_theta(theta)
    return _psi(lam_t, mu_t, t)


def jack_eval_ones(lam, N: int, theta):
    """Closed-form J_lam(1^N)."""
    t = as_theta(theta)
    parts = list(lam)
    if len(parts) > N:
        if any(parts[N:]):
            raise DomainError(f"{tuple(lam)} has more than N={N} nonzero parts")
        parts = parts[:N]
    parts += [0] * (N - len(parts))
    out = 1
    for i in range(N):
        for j in range(i + 1, N):
            L = parts[i] - parts[j]
            if L:
                out = out * pochhammer(t * (j - i + 1), L) / pochhammer(t * (j - i), L)
    return out


@lru_cache(maxsize=CACHE_SIZE, typed=True)
def _collapse(lam: tuple[int, ...], k: int, theta) -> dict:
    """Coefficients c_mu with J_lam(x, 1^k) = sum c_mu J_mu(x)."""
    if k == 0:
        return {lam: 1}
    prev = _collapse(lam, k - 1, theta)
    out: dict = {}
    for mu, c in prev.items():
        for nu in interlacing_below(mu):
            out[nu] = out.get(nu, 0) + c * _psi(mu, nu, theta)
    return out


def collapse_ones(lam, k: int, theta) -> dict[tuple[int, ...], Any]:
    """Expansion of J_lam(x_1..x_{N-k}, 1^k) over signatures of length N-k."""
    lam_t = tuple(lam)
    if not 0 <= k <= len(lam_t):
        raise DomainError(f"cannot collapse {k} ones out of {len(lam_t)} variables")
    return dict(_collapse(lam_t, k, as_theta(theta)))


def jack_eval_ones_branching(lam, theta):
    """J_lam(1^N) obtained by collapsing every variable with the branching rule."""
    lam_t = tuple(lam)
    return _collapse(lam_t, len(lam_t), as_theta(theta))[()]


def _peel(coeffs: dict, xs: Sequence[Any], theta):
    """Evaluate sum c_mu J_mu(xs) by peeling the variables from the right."""
    level = coeffs
    for x in reversed(xs):
        nxt: dict = {}
        for mu, c in level.items():
            smu = sum(mu)
            for nu in interlacing_below(mu):
                term = c * _psi(mu, nu, theta)
                d = smu - sum(nu)
                if d:
                    term = term * x**d
                if nu in nxt:
                    nxt[nu] = nxt[nu] + term
                else:
                    nxt[nu] = term
        level = nxt
    return level.get((), 0)


def _any_zero(x) -> bool:
    if isinstance(x, np.ndarray):
        return bool(np.any(x == 0))
    return x == 0


def _prod(xs):
    out = 1
    for x in xs:
        out = out * x
    return out


def _monomial_power(xs, M: int):
    """(x_1...x_n)^M, checking for zeros when M < 0."""
    if M == 0:
        return 1
    if M < 0 and any(_any_zero(x) for x in xs):
        raise DomainError("zero argument with negative signature parts")
    p = _prod(xs)
    return p**M if M > 0 else 1 / p ** (-M)


def jack_eval(lam, xs: Sequence[Any], theta):
    """J_lam(xs; theta) for a signature lam of length len(xs) (Laurent if lam_N < 0)."""
    lam_t = tuple(Signature(lam).parts)
    if len(xs) != len(lam_t):
        raise DomainError(f"need {len(lam_t)} variables, got {len(xs)}")
    t, xv = _resolve_mode(theta, xs)
    M = lam_t[-1]
    base = tuple(v - M for v in lam_t)
    val = _peel({base: 1}, xv, t) * _monomial_power(xv, M)
    return Fraction(val) if isinstance(t, Fraction) else val


def jack_character(lam, xs: Sequence[Any], theta, N: int | None = None):
    """J_lam(x_1..x_m, 1^{N-m}) / J_lam(1^N)."""
    lam_t = tuple(Signature(lam).parts)
    if N is None:
        N = len(lam_t)
    if N != len(lam_t):
        raise DomainError(f"signature length {len(lam_t)} differs from N={N}")
    m = len(xs)
    if not 1 <= m <= N:
        raise DomainError(f"number of variables must be in [1, {N}], got {m}")
    t, xv = _resolve_mode(theta, xs)
    M = lam_t[-1]
    base = tuple(v - M for v in lam_t)
    coeffs = _collapse(base, N - m, t)
    val = _peel(coeffs, xv, t)
    if isinstance(t, Fraction):
        val = Fraction(val)  # keep int / int from turning into a float
    val = val / jack_eval_ones(base, N, t) * _monomial_power(xv, M)
    return Fraction(val) if isinstance(t, Fraction) else val


@dataclass(frozen=True)
class CharacterQuery:
    lam: Signature
    xs: tuple
    N: int
    theta: Any

    def __post_init__(self):
        if not isinstance(self.lam, Signature):
            object.__setattr__(self, "lam", Signature(self.lam))
        object.__setattr__(self, "xs", tuple(self.xs))
        if len(self.lam) != self.N:
            raise DomainError("signature length must equal N")
        if not 1 <= len(self.xs) <= self.N:
            raise DomainError("need 1 <= m <= N variables")
        as_theta(self.theta)

    def evaluate(self):
        return jack_character(self.lam, self.xs, self.theta, self.N)


def clear_caches() -> None:
    _psi.cache_clear()
    _collapse.cache_clear()
