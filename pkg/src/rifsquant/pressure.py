"""Pressure equations for the quantization exponents.

Each exponent s is found through z = s / (r + s) in (0, 1), where the
defining sum is a strictly decreasing function of z.  Roots are bracketed by
bisection down to adjacent floating point numbers.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp
from scipy.stats import linregress

from .core import RifsSpec
from .errors import InternalInvariant
from .symbolic import Antichain, Word


@dataclass(frozen=True)
class PressureSolution:
    exponent: float
    z: float
    residual: float
    iterations: int


def bisect_decreasing(f, lo=0.0, hi=1.0, max_iter=200):
    """Root of a strictly decreasing ``f`` on [lo, hi] with f(lo) > 0 > f(hi)."""
    flo, fhi = f(lo), f(hi)
    if not (flo > 0 > fhi):
        raise InternalInvariant(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        it += 1
        if fm == 0.0:
            return mid, 0.0, it
        if fm > 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    if abs(flo) <= abs(fhi):
        return lo, flo, it
    return hi, fhi, it


def _solution(z, res, it, r):
    return PressureSolution(r * z / (1.0 - z), z, res, it)


def _log_bracket_fn(spec: RifsSpec, r: float):
    """Vectorized z -> log B_i(z); rows are padded, padding is masked out."""
    lws = spec.log_weights(r)
    width = max(lw.size for lw in lws)
    L = np.zeros((len(lws), width))
    mask = np.zeros((len(lws), width), dtype=bool)
    for i, lw in enumerate(lws):
        L[i, :lw.size] = lw
        mask[i, :lw.size] = True
    top = np.array([lw.max() for lw in lws])
    shifted = np.where(mask, L - top[:, None], 0.0)

    def f(z):
        return z * top + np.log(np.sum(np.where(mask, np.exp(z * shifted), 0.0), axis=1))
    return f


def component_log_bracket(spec: RifsSpec, r: float, z: float) -> np.ndarray:
    """log B_i(z) = log sum_j (p_ij c_ij^r)^z for every component i."""
    return _log_bracket_fn(spec, r)(z)


def expected_pressure(spec: RifsSpec, r: float, z: float) -> float:
    """T(z) = sum_i zeta_i log B_i(z)."""
    return float(spec.zeta @ component_log_bracket(spec, r, z))


def solve_kappa(spec: RifsSpec, r: float | None = None) -> PressureSolution:
    """The almost-sure quantization exponent kappa_r: the zero of T."""
    r = spec.r_default if r is None else r
    if r <= 0:
        raise ValueError("r must be positive")
    bracket = _log_bracket_fn(spec, r)
    z, res, it = bisect_decreasing(lambda z: float(spec.zeta @ bracket(z)))
    return _solution(z, res, it, r)


def _letter_counts(spec, word, n):
    return np.bincount(word.prefix(n), minlength=spec.n_components)


def solve_level_pressure(spec: RifsSpec, word: Word, n: int, r: float) -> PressureSolution:
    """s_{n,r}: the exponent for which the level-n sum equals 1.

    The level sum factorizes over letters, so only letter counts matter.
    """
    counts = _letter_counts(spec, word, n).astype(float)
    z, res, it = bisect_decreasing(lambda z: float(counts @ component_log_bracket(spec, r, z)))
    return _solution(z, res, it, r)


def level_pressure_series(spec: RifsSpec, word: Word, ns, r: float) -> np.ndarray:
    return np.array([solve_level_pressure(spec, word, int(n), r).exponent for n in ns])


def solve_tnr(spec: RifsSpec, gamma: Antichain, r: float) -> PressureSolution:
    """t: the exponent for which sum over the antichain of (p c^r)^{t/(r+t)} equals 1."""
    return tnr_from_log_weights(gamma.log_weights(r), r)


def tnr_from_log_weights(lw: np.ndarray, r: float) -> PressureSolution:
    """Same root as ``solve_tnr`` from the member log weights log(p c^r) alone."""
    lw = np.asarray(lw, dtype=float)
    if lw.size == 0:
        raise ValueError("empty antichain")
    z, res, it = bisect_decreasing(lambda z: float(logsumexp(z * lw)))
    return _solution(z, res, it, r)


def antichain_pressure(gamma: Antichain, r: float, exponent: float) -> float:
    """sum over the antichain of (p c^r)^{s/(r+s)}."""
    z = exponent / (r + exponent)
    return float(np.exp(logsumexp(z * gamma.log_weights(r))))


@dataclass(frozen=True)
class WindowProducts:
    """Products of level brackets B over windows of the word, kept as cumulative logs."""

    cumlog: np.ndarray  # cumlog[k] = sum_{i<=k} log B_{omega_i}, cumlog[0] = 0
    n_max: int
    nprime_max: int
    log_min: float
    log_max: float
    drift_slope: float
    drift_stderr: float

    def log_product(self, n, nprime):
        """log of prod_{i=n+1}^{n+nprime} B_{omega_i}."""
        return self.cumlog[np.asarray(n) + np.asarray(nprime)] - self.cumlog[np.asarray(n)]

    def matrix(self) -> np.ndarray:
        n = np.arange(self.n_max + 1)[:, None]
        k = np.arange(1, self.nprime_max + 1)[None, :]
        return np.exp(self.log_product(n, k))

    @property
    def observed_min(self) -> float:
        return math.exp(self.log_min)

    @property
    def observed_max(self) -> float:
        return math.exp(self.log_max)

    @property
    def consistent(self) -> bool:
        """Whether the drift of log P(0, n) is within two standard errors of zero."""
        return abs(self.drift_slope) <= 2.0 * self.drift_stderr

    def to_csv(self, dest=None, stride=1) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter=";", lineterminator="\n")
        w.writerow(["n", "nprime", "log_product"])
        for n in range(0, self.n_max + 1, stride):
            for k in range(1, self.nprime_max + 1, stride):
                w.writerow([n, k, repr(float(self.log_product(n, k)))])
        text = buf.getvalue()
        if dest is not None:
            with open(dest, "w") as fh:
                fh.write(text)
        return text


def drift_statistic(cumlog: np.ndarray) -> tuple[float, float]:
    """OLS slope of log P(0, k) against k for k >= 1, with its standard error."""
    y = np.asarray(cumlog[1:], dtype=float)
    if y.size < 3:
        return 0.0, 0.0
    if np.ptp(y) <= 1e-12:  # numerically flat: no drift to speak of
        return 0.0, 0.0
    fit = linregress(np.arange(1, y.size + 1, dtype=float), y)
    return float(fit.slope), float(fit.stderr)


def window_products(spec: RifsSpec, word: Word, r: float, kappa: float,
                    n_max: int, nprime_max: int) -> WindowProducts:
    z = kappa / (r + kappa)
    logb = component_log_bracket(spec, r, z)
    letters = word.prefix(n_max + nprime_max)
    cumlog = np.concatenate([[0.0], np.cumsum(logb[letters])])
    # window extremes over n in [0, n_max], nprime in [1, nprime_max]
    win = np.lib.stride_tricks.sliding_window_view(cumlog[1:], nprime_max)[: n_max + 1]
    base = cumlog[: n_max + 1]
    log_min = float((win.min(axis=1) - base).min())
    log_max = float((win.max(axis=1) - base).max())
    slope, stderr = drift_statistic(cumlog)
    return WindowProducts(cumlog, n_max, nprime_max, log_min, log_max, slope, stderr)


def ergodic_average(spec: RifsSpec, word: Word, r: float, z: float, n: int) -> float:
    """(1/n) log of the level-n sum at z, i.e. the Birkhoff average of log B."""
    logb = component_log_bracket(spec, r, z)
    return float(logb[word.prefix(n)].mean())


def ergodic_series(spec: RifsSpec, word: Word, r: float, z: float, n: int) -> np.ndarray:
    logb = component_log_bracket(spec, r, z)
    return np.cumsum(logb[word.prefix(n)]) / np.arange(1, n + 1)


def ergodic_moments(spec: RifsSpec, r: float, z: float) -> tuple[float, float]:
    """Exact mean and standard deviation of log B_{omega_1}(z) under zeta."""
    logb = component_log_bracket(spec, r, z)
    mean = float(spec.zeta @ logb)
    return mean, float(math.sqrt(max(0.0, spec.zeta @ (logb - mean) ** 2)))


def ergodic_csv(series: np.ndarray, dest=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=";", lineterminator="\n")
    w.writerow(["n", "average"])
    for k, v in enumerate(series, start=1):
        w.writerow([k, repr(float(v))])
    text = buf.getvalue()
    if dest is not None:
        with open(dest, "w") as fh:
            fh.write(text)
    return text
