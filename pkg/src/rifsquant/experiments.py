"""End-to-end runs shared by the command line, the demos and the acceptance tests."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import RifsSpec, check_suosc_intervals, check_uessc
from .errors import Unsupported
from .measure import approximant
from .pressure import component_log_bracket, solve_kappa, tnr_from_log_weights, window_products
from .quantization import (DimensionEstimate, QuantResult, coefficient_series, estimate_dimension,
                           quantization_depth, vnr_exact_1d_series, vnr_lloyd)
from .symbolic import gamma_events, sample_word


@dataclass(eq=False)
class PipelineReport:
    kappa: float
    estimate: float
    abs_error: float
    depth: int
    rule_depth: int
    atoms: int
    results: list = field(repr=False)
    dimension: DimensionEstimate = field(repr=False)
    warnings: list = field(default_factory=list)

    @property
    def resolution_ok(self) -> bool:
        return self.depth >= self.rule_depth

    def summary(self) -> dict:
        return {
            "kappa": self.kappa,
            "estimate": self.estimate,
            "abs_error": self.abs_error,
            "lower": self.dimension.lower,
            "upper": self.dimension.upper,
            "depth": self.depth,
            "rule_depth": self.rule_depth,
            "resolution_ok": self.resolution_ok,
            "atoms": self.atoms,
            "warnings": self.warnings,
        }


def dyadic_range(n_min: int, n_max: int) -> list[int]:
    lo = max(0, math.ceil(math.log2(n_min)))
    hi = math.floor(math.log2(n_max))
    return [2**k for k in range(lo, hi + 1)]


def dimension_pipeline(spec: RifsSpec, seed: int = 0, r: float | None = None, n_min: int | None = None,
                       n_max: int = 1024, depth: int | None = None, lloyd: bool = False,
                       restarts: int = 16) -> PipelineReport:
    """Sample a word, build the approximant, quantize at dyadic n, estimate the dimension.

    Dyadic n run from ``n_min`` (default min(16, n_max / 8)) to ``n_max``.
    """
    r = spec.r_default if r is None else r
    n_min = min(16, max(1, n_max // 8)) if n_min is None else n_min
    kappa = solve_kappa(spec, r).exponent
    rule = quantization_depth(spec.c_max, n_max, kappa, spec.diameter)
    depth = rule if depth is None else depth
    warnings = []
    if depth < rule:
        warnings.append(f"depth {depth} violates the resolution rule (needs >= {rule})")
    if spec.dimension != 1 and not lloyd:
        raise Unsupported("exact quantization needs d = 1; pass lloyd=True")
    mu = approximant(spec, sample_word(spec, seed, depth), depth)
    ns = dyadic_range(n_min, n_max)
    if lloyd:
        results = [vnr_lloyd(mu, n, r, restarts, seed) for n in ns]
    else:
        results = vnr_exact_1d_series(mu, ns, r)
    usable = [q for q in results if q.cost > 0]
    if len(usable) < len(results):
        warnings.append(f"dropped n >= {len(mu)} (atom count), where the error vanishes")
    est = estimate_dimension([(q.n, q.cost) for q in usable], r)
    return PipelineReport(kappa, est.slope_fit, abs(est.slope_fit - kappa), depth, rule, len(mu),
                          results, est, warnings)


@dataclass(eq=False)
class SandwichReport:
    """Phi-subsequence series Phi^{r/t_n} V_Phi for one word."""

    ns: np.ndarray
    phi: np.ndarray
    t: np.ndarray
    v: np.ndarray
    series: np.ndarray
    tail_ratio: float
    theil_sen_slope: float
    depth: int


def sandwich_series(spec: RifsSpec, seed: int = 0, r: float | None = None, n_max: int = 10**6,
                    tail: float = 0.5) -> SandwichReport:
    """Phi^{r/t_n} V_{Phi,r} at every n <= n_max where the threshold antichain changes."""
    r = spec.r_default if r is None else r
    word = sample_word(spec, seed, 4096)
    events = gamma_events(spec, word, r, n_max)
    ns = np.array([n for n, _, _ in events])
    phi = np.array([lw.size for _, _, lw in events])
    t = np.array([tnr_from_log_weights(lw, r).exponent for _, _, lw in events])
    kappa = solve_kappa(spec, r).exponent
    depth = quantization_depth(spec.c_max, int(phi.max()), kappa, spec.diameter)
    mu = approximant(spec, word, depth)
    distinct = sorted(set(int(p) for p in phi))
    vmap = {q.n: q.cost for q in vnr_exact_1d_series(mu, distinct, r)}
    v = np.array([vmap[int(p)] for p in phi])
    cs = coefficient_series(list(zip(phi.tolist(), v.tolist())), t, r, tail=tail)
    series = np.array([val for _, val in cs.values])
    return SandwichReport(ns, phi, t, v, series, cs.tail_max / cs.tail_min, cs.theil_sen_slope, depth)


def reproduce_example(k: int, spec: RifsSpec, seed: int = 0, r: float | None = None,
                      n_words: int = 100, n_letters: int = 10_000) -> dict:
    """Verdicts for the three bundled examples."""
    r = spec.r_default if r is None else r
    kappa = solve_kappa(spec, r)
    report = {"example": k, "r": r, "kappa": kappa.exponent, "z0": kappa.z}
    if k == 1:
        u = check_uessc(spec)
        s = check_suosc_intervals(spec)
        report.update(holds_uessc=bool(u["holds"]), beta_max=float(u["beta"]),
                      holds_suosc=bool(s["holds"]), open_set=list(s["open_set"]))
        return report
    if k == 2:
        wp = window_products(spec, sample_word(spec, seed, 2 * n_letters), r, kappa.exponent,
                             n_letters, n_letters)
        dev = max(abs(wp.observed_min - 1.0), abs(wp.observed_max - 1.0))
        report.update(window_min=wp.observed_min, window_max=wp.observed_max, max_deviation=dev,
                      drift_slope=wp.drift_slope, drift_stderr=wp.drift_stderr,
                      verdict="consistent" if wp.consistent else "inconsistent")
        return report
    if k == 3:
        logb = component_log_bracket(spec, r, kappa.z)
        detected, identity_err = 0, 0.0
        for s in range(seed, seed + n_words):
            word = sample_word(spec, s, n_letters)
            wp = window_products(spec, word, r, kappa.exponent, 0, n_letters)
            detected += not wp.consistent
            if spec.n_components == 2:
                letters = word.prefix(n_letters)
                n2 = np.cumsum(letters == 1)
                n1 = np.arange(1, n_letters + 1) - n2
                identity = (n2 - n1) * logb[1]  # exact only when B_1 B_2 = 1
                identity_err = max(identity_err, float(np.max(np.abs(identity - wp.cumlog[1:]))))
        first = window_products(spec, sample_word(spec, seed, n_letters), r, kappa.exponent, 0, n_letters)
        report.update(log_b=logb.tolist(), log_b_sum=float(logb.sum()),
                      drift_slope=first.drift_slope, drift_stderr=first.drift_stderr,
                      verdict="consistent" if first.consistent else "inconsistent",
                      words=n_words, letters=n_letters, drift_detected=detected,
                      letter_count_identity_error=identity_err)
        return report
    raise ValueError(f"unknown example {k}")


__all__ = ["PipelineReport", "QuantResult", "SandwichReport", "dimension_pipeline", "dyadic_range",
           "reproduce_example", "sandwich_series"]
