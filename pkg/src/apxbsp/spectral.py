"""Finitely supported symmetric spectra of almost-periodic functions.

A function is represented by its spectrum: a finite list of entries
``(k, lambda_k, A_k)`` with signed integer labels ``k``, real exponents
``lambda_k`` (``lambda_0 = 0``, ``lambda_{-k} = -lambda_k``) and complex
coefficients ``A_k``.  The ambient space exponent ``p`` (1 <= p < inf) is
carried next to the entries; all norms are lp norms of the coefficient
sequence.

Absent labels mean zero coefficients.  Zero-coefficient entries are legal
as interior ladder placeholders (they pin the exponent of a label without
contributing mass); the top positive label must carry a nonzero pair.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "SpectrumEntry",
    "Spectrum",
    "SpectrumError",
    "validate_spectrum",
    "lp_norm",
    "evaluate",
    "best_approximation",
    "tail_power",
    "pair_energy",
    "estimate_coefficient",
    "generate_spectrum",
    "load_spectrum",
    "save_spectrum",
    "load_spectrum_csv",
    "save_spectrum_csv",
]

_SYM_TOL = 1e-12


class SpectrumError(ValueError):
    """Raised when a spectrum violates its invariants or cannot be parsed."""


@dataclass(frozen=True)
class SpectrumEntry:
    """One spectral line: label ``k``, exponent ``lam``, coefficient ``coeff``."""

    k: int
    lam: float
    coeff: complex


@dataclass(frozen=True)
class Spectrum:
    """Finitely supported spectrum together with the ambient exponent ``p``."""

    entries: tuple[SpectrumEntry, ...]
    p: float

    @classmethod
    def make(cls, entries: Iterable[SpectrumEntry | tuple], p: float) -> "Spectrum":
        """Build a spectrum from (k, lam, coeff) triples, sorted by label."""
        norm = []
        for e in entries:
            if not isinstance(e, SpectrumEntry):
                e = SpectrumEntry(int(e[0]), float(e[1]), complex(e[2]))
            norm.append(e)
        norm.sort(key=lambda e: e.k)
        return cls(tuple(norm), float(p))

    # -- cached array views ------------------------------------------------

    @cached_property
    def labels(self) -> np.ndarray:
        a = np.array([e.k for e in self.entries], dtype=np.int64)
        a.flags.writeable = False
        return a

    @cached_property
    def exponents(self) -> np.ndarray:
        a = np.array([e.lam for e in self.entries], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def coeffs(self) -> np.ndarray:
        a = np.array([e.coeff for e in self.entries], dtype=np.complex128)
        a.flags.writeable = False
        return a

    @cached_property
    def abs_coeffs(self) -> np.ndarray:
        a = np.abs(self.coeffs)
        a.flags.writeable = False
        return a

    @cached_property
    def positive_labels(self) -> np.ndarray:
        a = self.labels[self.labels > 0]
        a.flags.writeable = False
        return a

    @cached_property
    def positive_exponents(self) -> np.ndarray:
        a = self.exponents[self.labels > 0]
        a.flags.writeable = False
        return a

    @property
    def kmax(self) -> int:
        pos = self.positive_labels
        return int(pos[-1]) if pos.size else 0

    def exponent_for(self, k: int) -> float:
        """Exponent stored under label ``k`` (raises if the label is absent)."""
        idx = np.searchsorted(self.labels, k)
        if idx >= self.labels.size or self.labels[idx] != k:
            raise SpectrumError(f"label {k} not present in the spectrum")
        return float(self.exponents[idx])

    def has_label(self, k: int) -> bool:
        idx = np.searchsorted(self.labels, k)
        return idx < self.labels.size and self.labels[idx] == k

    def scaled(self, c: complex) -> "Spectrum":
        """Entrywise coefficient scaling by a complex scalar."""
        return Spectrum.make(
            [(e.k, e.lam, c * e.coeff) for e in self.entries], self.p
        )

    def __add__(self, other: "Spectrum") -> "Spectrum":
        if not isinstance(other, Spectrum):
            return NotImplemented
        if self.p != other.p:
            raise SpectrumError("cannot add spectra with different p")
        merged: dict[int, tuple[float, complex]] = {
            e.k: (e.lam, e.coeff) for e in self.entries
        }
        for e in other.entries:
            if e.k in merged:
                lam, coeff = merged[e.k]
                if abs(lam - e.lam) > _SYM_TOL * max(1.0, abs(lam)):
                    raise SpectrumError(
                        f"exponent mismatch at label {e.k}: {lam} vs {e.lam}"
                    )
                merged[e.k] = (lam, coeff + e.coeff)
            else:
                merged[e.k] = (e.lam, e.coeff)
        return Spectrum.make([(k, v[0], v[1]) for k, v in merged.items()], self.p)


def validate_spectrum(s: Spectrum) -> list[str]:
    """Check all spectrum invariants; return the list of violations (empty if valid).

    Checks: p in [1, inf); distinct labels; lambda(0) = 0; exponent
    antisymmetry lambda(-k) = -lambda(k) for paired labels; strictly
    increasing positive exponents; nonzero mass |A_k| + |A_{-k}| at the top
    positive label.  Interior zero pairs are allowed (ladder placeholders).
    """
    report: list[str] = []
    if not (1.0 <= s.p < math.inf):
        report.append(f"p = {s.p} outside [1, inf)")
    ks = s.labels
    if ks.size == 0:
        return report
    if np.unique(ks).size != ks.size:
        report.append("duplicate labels")
        return report
    by_k = {int(e.k): e for e in s.entries}
    if 0 in by_k and abs(by_k[0].lam) > _SYM_TOL:
        report.append(f"lambda(0) = {by_k[0].lam} != 0")
    pos = sorted(k for k in by_k if k > 0)
    for k in pos:
        lam = by_k[k].lam
        if lam <= 0:
            report.append(f"lambda({k}) = {lam} not positive")
        if -k in by_k and abs(by_k[-k].lam + lam) > _SYM_TOL * max(1.0, abs(lam)):
            report.append(f"lambda({-k}) != -lambda({k})")
    for a, b in zip(pos, pos[1:]):
        if not (by_k[b].lam > by_k[a].lam):
            report.append(f"lambda({b}) <= lambda({a}): ladder not increasing")
    neg_only = [k for k in by_k if k < 0 and -k not in by_k]
    for k in neg_only:
        if by_k[k].lam >= 0:
            report.append(f"lambda({k}) = {by_k[k].lam} not negative")
    if pos:
        top = pos[-1]
        mass = abs(by_k[top].coeff) + (abs(by_k[-top].coeff) if -top in by_k else 0.0)
        if mass == 0.0:
            report.append(f"|A_{top}|+|A_{-top}| = 0")
    return report


def _require_valid(s: Spectrum) -> None:
    report = validate_spectrum(s)
    if report:
        raise SpectrumError("invalid spectrum: " + "; ".join(report))


def _stable_power_sum(mags: np.ndarray, p: float) -> float:
    """sum(mags**p) with ascending-magnitude ordering for stable accumulation."""
    if mags.size == 0:
        return 0.0
    v = np.sort(mags.astype(np.float64))
    return float(np.sum(v**p))


def lp_norm(s: Spectrum) -> float:
    """lp norm of the coefficient sequence, (sum |A_k|^p)^(1/p)."""
    _require_valid(s)
    total = _stable_power_sum(s.abs_coeffs, s.p)
    return total ** (1.0 / s.p)


def evaluate(s: Spectrum, x):
    """Evaluate sum_k A_k exp(i lambda_k x) at scalar or array ``x``."""
    _require_valid(s)
    xs = np.asarray(x, dtype=np.float64)
    if s.coeffs.size == 0:
        out = np.zeros(xs.shape, dtype=np.complex128)
    else:
        out = np.exp(1j * np.multiply.outer(xs, s.exponents)) @ s.coeffs
    return complex(out) if xs.ndim == 0 else out


def tail_power(s: Spectrum, n: int) -> float:
    """sum over |k| >= n of |A_k|^p (the p-th power of the best approximation)."""
    absk = np.abs(s.labels)
    mask = absk >= n
    return _stable_power_sum(s.abs_coeffs[mask], s.p)


def best_approximation(s: Spectrum, n: int) -> float:
    """Distance to functions with spectrum inside the n-th exponent gap.

    Equals the lp tail norm (sum over |k| >= n of |A_k|^p)^(1/p); zero when
    no labels of magnitude >= n are present.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _require_valid(s)
    return tail_power(s, n) ** (1.0 / s.p)


def pair_energy(s: Spectrum, nu: int) -> float:
    """|A_{-nu}|^p + |A_nu|^p (zero when the label pair is absent)."""
    _require_valid(s)
    total = 0.0
    for sign in (nu, -nu):
        idx = np.searchsorted(s.labels, sign)
        if idx < s.labels.size and s.labels[idx] == sign:
            total += float(s.abs_coeffs[idx] ** s.p)
    return total


def estimate_coefficient(
    f: "Spectrum | Callable", lam: float, T: float, steps: int
) -> complex:
    """Approximate the mean (1/T) int_0^T f(x) exp(-i lam x) dx.

    Composite Simpson quadrature over [0, T]; ``steps`` subintervals
    (rounded up to even).  For a Spectrum input with ``lam`` among its
    exponents the result approaches that coefficient as T grows, with
    O(1/T) error when exponent gaps are bounded below.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    m = steps + (steps % 2)
    x = np.linspace(0.0, T, m + 1)
    if isinstance(f, Spectrum):
        fx = evaluate(f, x)
    else:
        try:
            fx = np.asarray(f(x), dtype=np.complex128)
            if fx.shape != x.shape:
                raise TypeError
        except Exception:
            fx = np.array([f(xi) for xi in x], dtype=np.complex128)
    g = fx * np.exp(-1j * lam * x)
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    integral = (T / m) / 3.0 * np.dot(w, g)
    return complex(integral / T)


_KIND_IDS = {"arithmetic": 1, "lacunary": 2, "perturbed": 3}


def generate_spectrum(kind: str, size: int, decay: float, seed: int) -> Spectrum:
    """Deterministic test spectrum generator.

    kind:
      - ``arithmetic``: lambda_k = k
      - ``lacunary``:   lambda_k = 2**(k-1)
      - ``perturbed``:  lambda_k = k + u_k, u_k uniform in (-0.4, 0.4)

    Coefficient magnitudes are lambda_k**(-decay) on both sides of the pair,
    with independently seeded phases.  Same arguments give the same spectrum
    on every platform.  The returned spectrum carries p = 2 by default; use
    ``with_p`` to reinterpret (the entries do not depend on p).
    """
    if kind not in _KIND_IDS:
        raise ValueError(f"unknown generator kind {kind!r}")
    if size < 1:
        raise ValueError("size must be >= 1")
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, _KIND_IDS[kind]])
    k = np.arange(1, size + 1, dtype=np.float64)
    if kind == "arithmetic":
        lam = k
    elif kind == "lacunary":
        lam = 2.0 ** (k - 1)
    else:
        lam = k + rng.uniform(-0.4, 0.4, size)
    if np.any(np.diff(lam) <= 0) or lam[0] <= 0:
        raise ValueError("generated exponents are not strictly increasing")
    mags = lam ** (-decay)
    phases = rng.uniform(0.0, 2.0 * math.pi, 2 * size)
    entries = []
    for i in range(size):
        entries.append((i + 1, lam[i], mags[i] * np.exp(1j * phases[2 * i])))
        entries.append((-(i + 1), -lam[i], mags[i] * np.exp(1j * phases[2 * i + 1])))
    s = Spectrum.make(entries, p=2.0)
    _require_valid(s)
    return s


def with_p(s: Spectrum, p: float) -> Spectrum:
    """Same entries, different ambient exponent."""
    return Spectrum(s.entries, float(p))


# -- file formats ----------------------------------------------------------


def save_spectrum(s: Spectrum, path: str) -> None:
    """Write the JSON spectrum format: {"p": .., "entries": [{k, lambda, re, im}]}."""
    doc = {
        "p": s.p,
        "entries": [
            {"k": int(e.k), "lambda": float(e.lam), "re": e.coeff.real, "im": e.coeff.imag}
            for e in s.entries
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_spectrum(path: str) -> Spectrum:
    """Load and validate the JSON spectrum format; reject on any violation."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpectrumError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}")
    try:
        entries = [
            (int(e["k"]), float(e["lambda"]), complex(float(e["re"]), float(e["im"])))
            for e in doc["entries"]
        ]
        s = Spectrum.make(entries, float(doc["p"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpectrumError(f"{path}: bad spectrum document: {exc}")
    report = validate_spectrum(s)
    if report:
        raise SpectrumError(f"{path}: " + "; ".join(report))
    return s


def save_spectrum_csv(s: Spectrum, path: str) -> None:
    """Write the CSV alternative (header k,lambda,re,im; p supplied out-of-band)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "lambda", "re", "im"])
        for e in s.entries:
            w.writerow([e.k, repr(e.lam), repr(e.coeff.real), repr(e.coeff.imag)])


def load_spectrum_csv(path: str, p: float) -> Spectrum:
    """Load the CSV spectrum format; ``p`` is supplied by the caller."""
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                if [c.strip().lower() for c in row] != ["k", "lambda", "re", "im"]:
                    raise SpectrumError(f"{path}: line 1: expected header k,lambda,re,im")
                continue
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise SpectrumError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
            try:
                entries.append(
                    (int(row[0]), float(row[1]), complex(float(row[2]), float(row[3])))
                )
            except ValueError as exc:
                raise SpectrumError(f"{path}: line {lineno}: {exc}")
    s = Spectrum.make(entries, p)
    report = validate_spectrum(s)
    if report:
        raise SpectrumError(f"{path}: " + "; ".join(report))
    return s
