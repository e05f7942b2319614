"""Step weights, difference schemes and the generalized modulus of smoothness.

A step weight ``phi`` is a continuous nonnegative even function with
``phi(0) = 0`` whose zero set is null.  The generalized modulus of a
spectrum is ``sup_{|h| <= delta} (sum_k phi(lambda_k h)^p |A_k|^p)^(1/p)``;
with ``phi(t) = 2^alpha |sin(t/2)|^alpha`` this is the classical modulus of
smoothness of order ``alpha``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .spectral import Spectrum, _require_valid

__all__ = [
    "StepWeight",
    "DifferenceScheme",
    "phi_alpha",
    "phi_from_scheme",
    "weighted_difference_norm",
    "generalized_modulus",
    "scheme_modulus",
    "modulus_pow_profile",
    "parse_weight_spec",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_REFINE_WIDTH = 1e-10
_DEFAULT_GRID = 4096


def phi_alpha(t, alpha: float):
    """Sine-power step weight 2^alpha |sin(t/2)|^alpha (= 2^(a/2)(1-cos t)^(a/2))."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return 2.0**alpha * np.abs(np.sin(np.asarray(t, dtype=np.float64) / 2.0)) ** alpha


@dataclass(frozen=True)
class DifferenceScheme:
    """Coefficients mu_0..mu_m of a difference operator, summing to zero."""

    mu: tuple[complex, ...]

    def __post_init__(self):
        mu = tuple(complex(m) for m in self.mu)
        object.__setattr__(self, "mu", mu)
        if not mu or all(m == 0 for m in mu):
            raise ValueError("scheme coefficients must not be all zero")
        if abs(sum(mu)) > 1e-12 * max(1.0, max(abs(m) for m in mu)):
            raise ValueError("scheme coefficients must sum to zero")

    @classmethod
    def binomial(cls, m: int) -> "DifferenceScheme":
        """Alternating binomial coefficients (-1)^j C(m, j): the order-m scheme."""
        return cls(tuple((-1.0) ** j * math.comb(m, j) for j in range(m + 1)))


class StepWeight:
    """Callable step weight with evenness / sup metadata.

    Instances evaluate vectorized: ``w(t)`` accepts scalars or arrays.
    ``sup`` is the known maximum value when available (``C(phi)``), used by
    norm majorization and by the inverse-theorem hypothesis check.
    """

    def __init__(self, fn: Callable, kind: str, even: bool, sup: float | None,
                 domain: float | None = None, zero_fraction: float = 0.0):
        self._fn = fn
        self.kind = kind
        self.even = even
        self.sup = sup
        self.domain = domain  # half-width of the valid argument range, None = all reals
        self.zero_fraction = zero_fraction

    def __call__(self, t):
        ts = np.asarray(t, dtype=np.float64)
        if self.domain is not None and np.any(np.abs(ts) > self.domain * (1 + 1e-12)):
            raise ValueError(
                f"tabulated step weight evaluated outside [-{self.domain}, {self.domain}]"
            )
        out = self._fn(ts)
        return float(out) if ts.ndim == 0 else out

    def __repr__(self):
        return f"StepWeight(kind={self.kind!r}, even={self.even}, sup={self.sup})"

    @classmethod
    def alpha(cls, a: float) -> "StepWeight":
        if a <= 0:
            raise ValueError("alpha must be positive")
        return cls(lambda t: phi_alpha(t, a), kind=f"alpha:{a:g}", even=True, sup=2.0**a)

    @classmethod
    def from_scheme(cls, scheme: DifferenceScheme) -> "StepWeight":
        return phi_from_scheme(scheme)

    @classmethod
    def tabulated(cls, nodes: Sequence[float], values: Sequence[float]) -> "StepWeight":
        """Piecewise-linear even weight from (t, phi(t)) samples.

        Evenness is enforced by folding onto |t| (conflicting mirror samples
        are averaged).  Evaluations outside the tabulated range raise.
        """
        t = np.asarray(nodes, dtype=np.float64)
        v = np.asarray(values, dtype=np.float64)
        if t.size != v.size or t.size < 2:
            raise ValueError("tabulated weight needs matching nodes/values, >= 2 points")
        if np.any(v < 0):
            raise ValueError("tabulated weight has negative values")
        folded: dict[float, list[float]] = {}
        for ti, vi in zip(np.abs(t), v):
            folded.setdefault(float(ti), []).append(float(vi))
        xs = np.array(sorted(folded))
        ys = np.array([np.mean(folded[x]) for x in xs])
        if xs[0] > 0.0:
            xs = np.insert(xs, 0, 0.0)
            ys = np.insert(ys, 0, 0.0)
        zero_fraction = float(np.mean(ys <= 1e-15))
        if zero_fraction > 0.01:
            warnings.warn(
                f"tabulated step weight vanishes on {zero_fraction:.1%} of samples",
                stacklevel=2,
            )
        fn = lambda ts: np.interp(np.abs(ts), xs, ys)
        return cls(fn, kind="tabulated", even=True, sup=float(ys.max()),
                   domain=float(xs[-1]), zero_fraction=zero_fraction)

    def validate(self, half_width: float | None = None) -> list[str]:
        """Sample-based membership checks: phi(0)=0, phi >= 0, evenness.

        Uses a 1001-point symmetric grid on [-T, T] (T = tabulated domain or
        2*pi), tolerance 1e-12.
        """
        T = half_width or self.domain or 2.0 * math.pi
        t = np.linspace(-T, T, 1001)
        v = self(t)
        report = []
        if abs(self(0.0)) > 1e-12:
            report.append("phi(0) != 0")
        if np.any(v < -1e-12):
            report.append("phi takes negative values")
        if np.max(np.abs(v - v[::-1])) > 1e-12 * max(1.0, float(np.max(np.abs(v)))):
            report.append("phi is not even on the sample grid")
        return report


def phi_from_scheme(scheme: DifferenceScheme) -> StepWeight:
    """Weight induced by a difference scheme: t -> |sum_j mu_j exp(-i j t)|.

    For real coefficients the weight is even; complex schemes may break
    evenness, which is recorded in the flag (the modulus then scans both
    signs of the step).
    """
    mu = np.asarray(scheme.mu, dtype=np.complex128)
    js = np.arange(mu.size, dtype=np.float64)

    def fn(ts):
        return np.abs(np.exp(-1j * np.multiply.outer(ts, js)) @ mu)

    even = bool(np.all(np.abs(mu.imag) == 0.0))
    if not even:
        probe = np.linspace(0.0, 2.0 * math.pi, 257)
        even = bool(np.max(np.abs(fn(probe) - fn(-probe))) <= 1e-12)
    sup = float(np.max(fn(np.linspace(0.0, 2.0 * math.pi, 4097))))
    m = len(scheme.mu) - 1
    return StepWeight(fn, kind=f"scheme:m={m}", even=even, sup=sup)


def _pow_p(w: np.ndarray, p: float) -> np.ndarray:
    """w**p via exp(p log w), guarded at w = 0 (avoids 0**p branch issues)."""
    w = np.asarray(w, dtype=np.float64)
    out = np.zeros_like(w)
    pos = w > 0
    out[pos] = np.exp(p * np.log(w[pos]))
    return out


def weighted_difference_norm(s: Spectrum, phi: StepWeight, h: float) -> float:
    """lp norm of the phi-reweighted coefficients at step h:
    (sum_k phi(lambda_k h)^p |A_k|^p)^(1/p)."""
    _require_valid(s)
    if s.coeffs.size == 0:
        return 0.0
    w = _pow_p(phi(s.exponents * h), s.p) @ (s.abs_coeffs**s.p)
    return float(w) ** (1.0 / s.p)


def _pow_sums_on_grid(s: Spectrum, phi: StepWeight, hs: np.ndarray) -> np.ndarray:
    """sum_k phi(lambda_k h)^p |A_k|^p for a vector of steps h (chunked)."""
    amps = s.abs_coeffs**s.p
    lams = s.exponents
    out = np.empty(hs.size, dtype=np.float64)
    # keep the (entries x steps) work matrix under ~2^24 elements
    chunk = max(1, (1 << 24) // max(1, lams.size))
    for i in range(0, hs.size, chunk):
        block = hs[i : i + chunk]
        out[i : i + chunk] = _pow_p(phi(np.multiply.outer(lams, block)), s.p).T @ amps
    return out


def _golden_max(fn: Callable[[float], float], a: float, b: float,
                width: float = _REFINE_WIDTH, max_iter: int = 200) -> float:
    """Golden-section maximization; returns the best function value found."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    best = max(f1, f2)
    it = 0
    while (b - a) > width and it < max_iter:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fn(x1)
        best = max(best, f1, f2)
        it += 1
    return best


def generalized_modulus(s: Spectrum, phi: StepWeight, delta: float,
                        grid: int = _DEFAULT_GRID) -> float:
    """sup over |h| <= delta of the weighted difference norm.

    Scans a uniform grid on [0, delta] (parity makes negative steps
    redundant for even weights) and polishes around the best node with
    golden-section refinement to width 1e-10.  The result is a certified
    lower bound of the true supremum and converges to it as the grid grows.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if grid < 2:
        raise ValueError("grid must be >= 2")
    _require_valid(s)
    if delta == 0.0 or s.coeffs.size == 0:
        return 0.0
    if phi.even:
        hs = np.linspace(0.0, delta, grid + 1)
    else:
        hs = np.linspace(-delta, delta, 2 * grid + 1)
    vals = _pow_sums_on_grid(s, phi, hs)
    i = int(np.argmax(vals))
    lo = hs[max(i - 1, 0)]
    hi = hs[min(i + 1, hs.size - 1)]
    amps = s.abs_coeffs**s.p

    def pow_sum(h: float) -> float:
        return float(_pow_p(phi(s.exponents * h), s.p) @ amps)

    best = max(float(vals[i]), _golden_max(pow_sum, float(lo), float(hi)))
    return best ** (1.0 / s.p)


def scheme_modulus(s: Spectrum, scheme: DifferenceScheme, delta: float,
                   grid: int = _DEFAULT_GRID) -> float:
    """Modulus of smoothness of a difference scheme: the generalized modulus
    with the scheme-induced weight (identical grid protocol, same code path)."""
    return generalized_modulus(s, phi_from_scheme(scheme), delta, grid)


def modulus_pow_profile(s: Spectrum, phi: StepWeight, deltas: np.ndarray,
                        samples_per_cycle: int = 16,
                        max_substeps: int = 4096) -> np.ndarray:
    """p-th powers of the modulus at every delta of a uniform increasing grid.

    One shared scan: the step grid is the delta grid refined by an integer
    factor chosen so the fastest oscillation of phi(lambda_max h) is sampled
    ``samples_per_cycle`` times; running maxima over prefixes then give the
    whole profile in a single pass.  Values are grid lower bounds (no
    golden-section polish), adequate wherever a profile feeds a one-sided
    inequality check or an integral.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    if deltas.size < 2 or deltas[0] < 0:
        raise ValueError("deltas must be an increasing grid starting at >= 0")
    step = np.diff(deltas)
    if np.any(step <= 0) or np.max(np.abs(step - step[0])) > 1e-9 * step[0]:
        raise ValueError("deltas must be uniformly spaced")
    _require_valid(s)
    if s.coeffs.size == 0:
        return np.zeros(deltas.size)
    lam_max = float(np.max(np.abs(s.exponents))) if s.exponents.size else 0.0
    if lam_max == 0.0:
        return np.zeros(deltas.size)
    # substeps so that h-spacing <= 2*pi / (samples_per_cycle * lam_max)
    need = samples_per_cycle * lam_max * step[0] / (2.0 * math.pi)
    R = int(min(max(1, math.ceil(need)), max_substeps))
    n_fine = (deltas.size - 1) * R
    fine = np.linspace(deltas[0], deltas[-1], n_fine + 1)
    vals = _pow_sums_on_grid(s, phi, fine)
    if not phi.even:
        vals = np.maximum(vals, _pow_sums_on_grid(s, phi, -fine))
    running = np.maximum.accumulate(vals)
    out = running[::R].copy()
    if deltas[0] == 0.0:
        out[0] = 0.0
    return out


def parse_weight_spec(spec: str) -> StepWeight:
    """Parse the CLI weight syntax: ``alpha:<a>``, ``scheme:<mu0>,<mu1>,...``,
    ``table:<path>`` (CSV of t,phi(t) pairs)."""
    kind, _, rest = spec.partition(":")
    if kind == "alpha":
        return StepWeight.alpha(float(rest))
    if kind == "scheme":
        mu = tuple(complex(c) for c in rest.split(","))
        return phi_from_scheme(DifferenceScheme(mu))
    if kind == "table":
        data = np.loadtxt(rest, delimiter=",", ndmin=2)
        return StepWeight.tabulated(data[:, 0], data[:, 1])
    raise ValueError(f"unknown step-weight spec {spec!r}")
