"""One-variable Jack characters from contour integrals.

Three representations are implemented, all independent of the branching
engine in :mod:`jacklab.jack_core`:

* ``residue_character``: integer theta, the contour integral collapses to a
  finite sum over theta*N simple poles.
* ``contour_character_inside``: 0 < |x| < 1, a contour wrapping the poles of
  prod Gamma(a_i - z)/Gamma(a_i + theta - z) from the left.
* ``contour_character_outside``: |x| > 1, the mirrored contour opening to the
  left.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal

import mpmath
import numpy as np
from scipy.optimize import brentq, minimize
from scipy.special import digamma, loggamma

from .errors import AccuracyError, DomainError
from .jack_core import as_theta, is_exact
from .partitions import Signature

__all__ = [
    "ContourSpec",
    "QuadratureConfig",
    "log_gamma_complex",
    "residue_character",
    "contour_character_inside",
    "contour_character_outside",
    "default_contour",
]


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 20
    eps_trunc: float = 1e-16
    target_rel: float = 1e-9
    max_nodes: int = 160

    def __post_init__(self):
        if self.nodes <= 0 or self.max_nodes < self.nodes:
            raise DomainError("node counts must be positive and max_nodes >= nodes")
        if not (self.eps_trunc > 0 and self.target_rel > 0):
            raise DomainError("tolerances must be positive")


@dataclass(frozen=True)
class ContourSpec:
    """Contour made of a vertical edge and two horizontal rays.

    ``M`` is the abscissa of the vertical edge.  The rays sit at heights
    ``-r`` and ``+r_upper`` (``r_upper=None`` means symmetric).  ``length`` is
    the ray length before truncation (None: decided numerically) and
    ``nodes_per_unit`` fixes the Gauss-Legendre panel size (None: adaptive).
    """

    variant: Literal["inside", "outside"]
    M: float
    r: float = 0.5
    r_upper: float | None = None
    length: float | None = None
    nodes_per_unit: int | None = None

    def __post_init__(self):
        if self.variant not in ("inside", "outside"):
            raise DomainError(f"unknown contour variant {self.variant!r}")
        if not self.r > 0 or (self.r_upper is not None and not self.r_upper > 0):
            raise DomainError("contour half-heights must be positive")
        if self.length is not None and not self.length > 0:
            raise DomainError("ray length must be positive")

    @property
    def upper(self) -> float:
        return self.r if self.r_upper is None else self.r_upper

    def validate(self, lam: tuple[int, ...], theta: float) -> None:
        N = len(lam)
        if self.variant == "inside" and not self.M < lam[-1]:
            raise DomainError(f"inside contour needs M < lam_N = {lam[-1]}, got {self.M}")
        if self.variant == "outside" and not self.M > lam[0] + theta * N - 1:
            raise DomainError(
                f"outside contour needs M > lam_1 + theta*N - 1 = {lam[0] + theta * N - 1}, got {self.M}"
            )


def log_gamma_complex(z):
    """Principal log Gamma; scalar or array input."""
    arr = np.asarray(z, dtype=complex)
    bad = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))
    if np.any(bad):
        raise DomainError("log Gamma has a pole at nonpositive integers")
    if np.ndim(z) == 0:
        if arr.imag == 0 and arr.real > 0:
            return complex(math.lgamma(arr.real))  # correctly rounded on the positive axis
        return complex(loggamma(arr))
    return loggamma(arr)


def _log_x(x: complex) -> complex:
    """Principal log, with the upper side of the cut on the negative axis."""
    x = complex(x)
    if x.imag == 0 and x.real < 0:
        return complex(math.log(-x.real), math.pi)
    return complex(np.log(x))


# ---------------------------------------------------------------- residues


def _poles(lam: tuple[int, ...], theta: int) -> list[int]:
    N = len(lam)
    return [lam[i] + theta * (N - 1 - i) + j for i in range(N) for j in range(theta)]


@lru_cache(maxsize=4096)
def _residue_weights(lam: tuple[int, ...], theta: int) -> tuple[tuple[int, Fraction], ...]:
    poles = _poles(lam, theta)
    out = []
    for p in poles:
        den = 1
        for q in poles:
            if q != p:
                den *= p - q
        out.append((p, Fraction(1, den)))
    return tuple(out)


def residue_character(lam, N: int, theta, x):
    """Character J_lam(x; N, theta) for integer theta as a sum over residues.

    Rational x gives an exact ``Fraction``.  Otherwise the sum, which suffers
    cancellation of order (2/|x-1|)^(theta*N), is done in mpmath with the
    working precision raised until two precisions agree.
    """
    lam = tuple(Signature(lam).parts)
    if len(lam) != N:
        raise DomainError(f"signature length {len(lam)} differs from N={N}")
    t = as_theta(theta)
    if not (isinstance(t, Fraction) and t.denominator == 1) and not (
        isinstance(t, float) and t.is_integer()
    ):
        raise DomainError("residue formula needs a positive integer theta")
    th = int(t)
    if x == 0 or x == 1:
        raise DomainError("x must avoid 0 and 1")
    if lam[0] == lam[-1]:
        # J_(c^N) = (x_1...x_N)^c, a single pole
        return Fraction(x) ** lam[0] if is_exact(x) else complex(x) ** lam[0]
    n = th * N
    weights = _residue_weights(lam, th)
    shift = min(p for p, _ in weights)
    if is_exact(x):
        x = Fraction(x)
        s = sum(w * x ** (p - shift) for p, w in weights)
        return Fraction(math.factorial(n - 1)) * s * x**shift / (x - 1) ** (n - 1)
    xc = complex(x)
    return _residue_float(weights, shift, n, xc)


_local = threading.local()


def _mp() -> mpmath.ctx_mp.MPContext:
    # mpmath's default context is global; each thread gets its own
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = _local.ctx = mpmath.ctx_mp.MPContext()
    return ctx


def _residue_float(weights, shift: int, n: int, x: complex) -> complex:
    # magnitude of the largest term vs the expected size of the sum
    lx = math.log(abs(x))
    logs = [(p - shift) * lx - math.log(abs(w.denominator)) for p, w in weights]
    big = max(logs)
    expected = (n - 1) * math.log(abs(x - 1)) - math.lgamma(n)
    lost = max(0.0, (big - expected) / math.log(10))
    dps = int(lost) + 25
    prev = None
    mp = _mp()
    for _ in range(6):
        mp.dps = dps
        xm = mp.mpc(x.real, x.imag)
        s = mp.fsum(mp.mpf(w.numerator) / w.denominator * xm ** (p - shift) for p, w in weights)
        val = complex(mp.factorial(n - 1) * s * xm**shift / (xm - 1) ** (n - 1))
        if prev is not None and abs(val - prev) <= 1e-15 * abs(val):
            return val
        prev = val
        dps += 30
    raise AccuracyError("residue sum did not stabilise", estimate=abs(val - prev) / abs(val))


# ---------------------------------------------------------------- contours
#
# The integral is a tiny number (of order (1-x)^(theta N - 1)/Gamma(theta N))
# while the integrand near the poles can be many orders larger, so a contour
# hugging the poles loses digits to cancellation.  The default contour is
# instead tuned so that the peak of |integrand| along it is as small as
# possible, which moves it through (or near) the saddle point.


@lru_cache(maxsize=64)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(n)
    return (t + 1) / 2, w / 2


def _panels(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre on [a, b] with panels of width <= 1."""
    k = max(1, math.ceil(b - a - 1e-12))
    edges = np.linspace(a, b, k + 1)
    t, w = _gauss_legendre(n)
    h = np.diff(edges)
    s = (edges[:-1, None] + h[:, None] * t[None, :]).ravel()
    ws = (h[:, None] * w[None, :]).ravel()
    return s, ws


class _Integrand:
    """log of x^z times the Gamma-ratio product, for either variant."""

    def __init__(self, lam: tuple[int, ...], theta: float, x: complex, variant: str):
        N = len(lam)
        self.variant = variant
        self.theta = theta
        self.a = np.array([lam[i] + theta * (N - 1 - i) for i in range(N)], dtype=float)
        self.lx = _log_x(x)
        # +1: rays run to +inf (inside); -1: rays run to -inf (outside)
        self.d = 1 if variant == "inside" else -1
        if variant == "inside":
            self.edge = float(self.a.min())
            self.far = float(self.a.max() + theta + 1)
        else:
            self.edge = float(self.a.max() + theta - 1)
            self.far = float(self.a.min() - 2)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = z * self.lx
        t = self.theta
        if self.variant == "inside":
            for ai in self.a:
                acc = acc + loggamma(ai - z) - loggamma(ai + t - z)
        else:
            for ai in self.a:
                acc = acc + loggamma(z + 1 - ai - t) - loggamma(z + 1 - ai)
        return acc

    def dlog(self, z):
        t = self.theta
        if self.variant == "inside":
            return self.lx - np.sum(digamma(self.a - z) - digamma(self.a + t - z))
        return self.lx + np.sum(digamma(z + 1 - self.a - t) - digamma(z + 1 - self.a))

    def peak(self, M: float, lo: float, hi: float, step: float = 0.0) -> float:
        """Max of log|integrand| sampled along the contour (step 0: coarse)."""
        span = abs(self.far - M) + 3
        ns = 80 if not step else int(span / step) + 2
        nt = 60 if not step else int((lo + hi) / step) + 2
        s = M + self.d * np.linspace(0, span, ns)
        t = np.linspace(-lo, hi, nt)
        return float(max(self(s + 1j * hi).real.max(), self(s - 1j * lo).real.max(),
                         self(M + 1j * t).real.max()))

    def real_saddle(self) -> float:
        """Minimiser of log|integrand| on the real axis beyond the edge (uses |x|)."""
        t, a, lxr, d = self.theta, self.a, self.lx.real, self.d
        if d > 0:
            def dg(s):
                return lxr - np.sum(digamma(a - s) - digamma(a + t - s))
        else:
            def dg(s):
                return lxr + np.sum(digamma(s + 1 - a - t) - digamma(s + 1 - a))
        near = self.edge - d * 0.5
        # moving away from the poles, d*dg changes sign once
        if d * dg(near) <= 0:
            return near
        far, step = near, 1.0
        while d * dg(far) > 0:
            far -= d * step
            step *= 2
            if step > 1e7:
                return near
        lo, hi = sorted((far, near))
        return float(brentq(dg, lo, hi, xtol=1e-6))

    def complex_saddle(self) -> complex | None:
        """Damped Newton for the zero of d/dz log(integrand); None on failure."""
        t, N = self.theta, len(self.a)
        c = float(np.mean(self.a))
        z = complex(c + t * N / self.lx)
        for _ in range(200):
            g = self.dlog(z)
            h = 1e-6 * max(1.0, abs(z))
            dg = (self.dlog(z + h) - self.dlog(z - h)) / (2 * h)
            if not (np.isfinite(g) and np.isfinite(dg)) or dg == 0:
                return None
            step = g / dg
            cap = 1.0 + 0.5 * abs(z - c)
            if abs(step) > cap:
                step *= cap / abs(step)
            z = z - step
            if abs(step) < 1e-10 * max(1.0, abs(z)):
                return z
        return None


_HCAP = 5.0  # log of the largest ray height tried by the optimiser


def _symmetric_contour(f: _Integrand) -> tuple[float, float, float]:
    """Edge at the real saddle; rays raised until they stay below the edge."""
    M = f.real_saddle()
    seg = f(M + 1j * np.linspace(-0.5, 0.5, 9)).real.max()
    span = abs(f.far - M) + 3
    s = M + f.d * np.linspace(0, span, int(2 * span) + 2)
    r = 0.5
    while r < 4096:
        top = max(f(s + 1j * r).real.max(), f(s - 1j * r).real.max())
        if top <= seg + 2:
            break
        r *= 2
    return M, r, r


def _optimised_contour(f: _Integrand) -> tuple[float, float, float]:
    """Nelder-Mead on (edge, lower height, upper height), started at the complex saddle."""
    d = f.d

    def unpack(p):
        M = f.edge - d * (0.5 + math.exp(min(p[0], _HCAP + 1)))
        return M, 0.5 + math.exp(min(p[1], _HCAP)), 0.5 + math.exp(min(p[2], _HCAP))

    def obj(p):
        val = f.peak(*unpack(p))
        return val if np.isfinite(val) else 1e300

    zs = f.complex_saddle()
    if zs is None:
        p0 = (-3.0, -3.0, -3.0)
    else:
        p0 = (math.log(max(d * (f.edge - zs.real) - 0.5, 0.05)),
              math.log(max(-zs.imag - 0.5, 0.05)),
              math.log(max(zs.imag - 0.5, 0.05)))
    res = minimize(obj, p0, method="Nelder-Mead",
                   options={"xatol": 1e-2, "fatol": 1e-2, "maxfev": 300})
    return unpack(res.x)


def _tune_contour(f: _Integrand) -> tuple[float, float, float]:
    """Contour with the smallest peak |integrand| among a few candidates."""
    cands = [(f.edge - f.d * 0.5, 0.5, 0.5), _symmetric_contour(f)]
    if f.lx.imag != 0:
        cands.append(_optimised_contour(f))
    return min(cands, key=lambda c: f.peak(*c, step=0.25))


def _ray_length(f: _Integrand, M: float, lo: float, hi: float, eps: float) -> tuple[float, float]:
    """Truncation length of the rays and the reference log-magnitude."""
    ref = f.peak(M, lo, hi)
    target = ref + math.log(eps)
    L, chunk = 0.0, 64.0
    while True:
        s = M + f.d * (L + np.arange(1.0, chunk + 1))
        vals = np.maximum(f(s + 1j * hi).real, f(s - 1j * lo).real)
        past = f.d * (s - f.far) > 0
        ok = np.nonzero(past & (vals < target))[0]
        if ok.size:
            return L + float(ok[0] + 1), ref
        L += chunk
        if L > 1e6:
            raise AccuracyError("contour ray truncation did not converge")


def _contour_integral(f: _Integrand, M: float, lo: float, hi: float, L: float, n: int) -> complex:
    """(2 pi i)^-1 times the integral over the positively oriented contour."""
    s, ws = _panels(0.0, L, n)
    t, wt = _panels(-lo, hi, n)
    seg = np.sum(wt * np.exp(f(M + 1j * t)))
    if f.d > 0:
        # top ray from +inf to M, segment downward, bottom ray from M to +inf
        total = np.sum(ws * np.exp(f(M + s - 1j * lo))) - np.sum(ws * np.exp(f(M + s + 1j * hi)))
        total -= 1j * seg
    else:
        # bottom ray from -inf to M, segment upward, top ray from M to -inf
        total = np.sum(ws * np.exp(f(M - s - 1j * lo))) - np.sum(ws * np.exp(f(M - s + 1j * hi)))
        total += 1j * seg
    return complex(total / (2j * math.pi))


def _adaptive(evaluate, cfg: QuadratureConfig) -> tuple[complex, float, int]:
    """Refine the per-panel node count until two rules agree to cfg.target_rel."""
    n = cfg.nodes
    prev = evaluate(n)
    while True:
        n2 = n + max(4, n // 2)
        cur = evaluate(n2)
        err = abs(cur - prev) / max(abs(cur), 1e-300)
        if err <= cfg.target_rel:
            return cur, err, n2
        if n2 >= cfg.max_nodes:
            raise AccuracyError(f"contour quadrature estimate {err:.3g} above target", estimate=err)
        n, prev = n2, cur


def default_contour(lam, theta, variant: str, x=None) -> ContourSpec:
    """Contour used when none is given.

    Without ``x`` this is the plain contour half a unit beyond the extreme
    pole with r = 1/2.  With ``x`` the edge and heights are tuned for that
    argument.
    """
    lam = tuple(Signature(lam).parts)
    t = float(as_theta(theta))
    if variant not in ("inside", "outside"):
        raise DomainError(f"unknown contour variant {variant!r}")
    if x is None:
        M = lam[-1] - 0.5 if variant == "inside" else lam[0] + t * len(lam) + 0.5
        return ContourSpec(variant, M)
    M, lo, hi = _tune_contour(_Integrand(lam, t, complex(x), variant))
    return ContourSpec(variant, M, lo, hi)


def _character_by_contour(lam, N, theta, x, variant, spec, cfg, return_error):
    lam = tuple(Signature(lam).parts)
    if len(lam) != N:
        raise DomainError(f"signature length {len(lam)} differs from N={N}")
    t = float(as_theta(theta))
    x = complex(x)
    if variant == "inside" and not 0 < abs(x) < 1:
        raise DomainError("inside representation needs 0 < |x| < 1")
    if variant == "outside" and not abs(x) > 1:
        raise DomainError("outside representation needs |x| > 1")
    cfg = cfg or QuadratureConfig()
    f = _Integrand(lam, t, x, variant)
    if spec is None:
        spec = ContourSpec(variant, *_tune_contour(f))
    if spec.variant != variant:
        raise DomainError(f"contour variant must be {variant!r}")
    spec.validate(lam, t)
    lo, hi = spec.r, spec.upper
    if spec.length is None:
        L, _ = _ray_length(f, spec.M, lo, hi, cfg.eps_trunc)
    else:
        L = float(spec.length)

    def ev(n):
        return _contour_integral(f, spec.M, lo, hi, L, n)

    if spec.nodes_per_unit:
        I, err = ev(spec.nodes_per_unit), float("nan")
    else:
        I, err, _ = _adaptive(ev, cfg)
    if variant == "inside":
        val = -complex(np.exp(math.lgamma(t * N) - (t * N - 1) * np.log(1 - x))) * I
    else:
        val = complex(np.exp(math.lgamma(t * N) - (t * N - 1) * np.log(x - 1))) * I
    return (val, err) if return_error else val


def contour_character_inside(lam, N: int, theta, x, spec: ContourSpec | None = None,
                             cfg: QuadratureConfig | None = None, *, return_error: bool = False):
    """Character via the contour wrapping the poles from the left (0 < |x| < 1).

    ``spec=None`` tunes the contour for this x (see ``default_contour``).
    With ``return_error`` a pair (value, quadrature error estimate) is returned.
    """
    return _character_by_contour(lam, N, theta, x, "inside", spec, cfg, return_error)


def contour_character_outside(lam, N: int, theta, x, spec: ContourSpec | None = None,
                              cfg: QuadratureConfig | None = None, *, return_error: bool = False):
    """Character via the mirrored contour opening to the left (|x| > 1)."""
    return _character_by_contour(lam, N, theta, x, "outside", spec, cfg, return_error)
