"""Finite-depth discrete approximants of the random self-similar measure."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .core import RifsSpec
from .errors import NotAnFma, Unsupported
from .symbolic import Antichain, Word, enumerate_level, shift, validate_fma

MERGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    points: np.ndarray   # (M, d)
    weights: np.ndarray  # (M,)
    sigmas: tuple | None = None
    depth: object = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.weights.shape != (pts.shape[0],):
            raise ValueError("one weight per atom is required")
        if np.any(self.weights <= 0):
            raise ValueError("atom weights must be positive")

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def __len__(self):
        return self.weights.size

    @property
    def x(self) -> np.ndarray:
        """Coordinates of a 1-D measure."""
        if self.dimension != 1:
            raise Unsupported("x is only defined for 1-D measures")
        return self.points[:, 0]

    def sorted(self) -> "DiscreteMeasure":
        order = np.lexsort(self.points.T[::-1])
        sig = None if self.sigmas is None else tuple(self.sigmas[i] for i in order)
        return DiscreteMeasure(self.points[order], self.weights[order], sig, self.depth)

    def scaled(self, lam: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points * lam, self.weights, self.sigmas, self.depth)

    def mass_in_box(self, lo, hi, tol=1e-12) -> float:
        inside = np.all((self.points >= np.asarray(lo) - tol) & (self.points <= np.asarray(hi) + tol), axis=1)
        return float(self.weights[inside].sum())

    def to_csv(self, dest=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter=";", lineterminator="\n")
        d = self.dimension
        w.writerow([f"x{k + 1}" for k in range(d)] + ["weight", "sigma"])
        for k in range(len(self)):
            sig = "" if self.sigmas is None else ".".join(map(str, self.sigmas[k]))
            w.writerow([repr(float(v)) for v in self.points[k]] + [repr(float(self.weights[k])), sig])
        text = buf.getvalue()
        if dest is not None:
            with open(dest, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "DiscreteMeasure":
        """Read the format written by ``to_csv`` (path or text)."""
        if "\n" not in str(source):
            with open(source) as fh:
                source = fh.read()
        rows = list(csv.reader(io.StringIO(source), delimiter=";"))
        header, rows = rows[0], [r for r in rows[1:] if r]
        d = header.index("weight")
        pts = np.array([[float(v) for v in r[:d]] for r in rows]).reshape(-1, d)
        wts = np.array([float(r[d]) for r in rows])
        sig = None
        if "sigma" in header and rows and all(len(r) > d + 1 for r in rows):
            sig = tuple(tuple(int(s) for s in r[d + 1].split(".")) if r[d + 1] else () for r in rows)
        return cls(pts, wts, sig)


def merge_atoms(points, weights, sigmas=None, tol=MERGE_TOL):
    """Sort atoms and merge those whose coordinates agree within ``tol``."""
    points = np.asarray(points, dtype=float)
    order = np.lexsort(points.T[::-1])
    pts, wts = points[order], np.asarray(weights, dtype=float)[order]
    sig = None if sigmas is None else [sigmas[i] for i in order]
    if len(wts) > 1:
        new = np.ones(len(wts), dtype=bool)
        new[1:] = np.any(np.abs(np.diff(pts, axis=0)) > tol, axis=1)
        if not new.all():
            grp = np.cumsum(new) - 1
            wts = np.bincount(grp, weights=wts)
            pts = pts[new]
            if sig is not None:
                sig = [s for s, keep in zip(sig, new) if keep]
    return pts, wts, None if sig is None else tuple(sig)


def _anchor(spec, anchor):
    return spec.center if anchor is None else np.atleast_1d(np.asarray(anchor, dtype=float))


def measure_on_antichain(spec: RifsSpec, gamma: Antichain, anchor=None, depth=None) -> DiscreteMeasure:
    x0 = _anchor(spec, anchor)
    pts, wts, sig = merge_atoms(gamma.points(x0), np.exp(gamma.log_p), gamma.members)
    return DiscreteMeasure(pts, wts, sig, depth if depth is not None else gamma.source)


def approximant(spec: RifsSpec, word: Word, depth: int, anchor=None) -> DiscreteMeasure:
    """Push-forward of a point mass at ``anchor`` through all depth-``depth`` cylinders."""
    return measure_on_antichain(spec, enumerate_level(spec, word, depth), anchor, depth)


def approximant_on_antichain(spec: RifsSpec, word: Word, gamma: Antichain, anchor=None) -> DiscreteMeasure:
    """Atoms at S_sigma(anchor) weighted p_sigma over a finite maximal antichain."""
    if not validate_fma(spec, word, gamma):
        raise NotAnFma("the given strings do not form a finite maximal antichain")
    return measure_on_antichain(spec, gamma, anchor)


def refine_consistency(spec: RifsSpec, word: Word, gamma: Antichain, depth_L: int, anchor=None) -> float:
    """Max weight discrepancy between the refined antichain measure and the level-L approximant.

    Every member sigma of length k is refined by the level-(L - k) strings of
    the shifted word, with weight p_sigma * p_tau regrouped as a product.
    """
    if not validate_fma(spec, word, gamma):
        raise NotAnFma("the given strings do not form a finite maximal antichain")
    if depth_L < int(gamma.depths.max()):
        raise ValueError("depth_L must be at least the deepest member")
    x0 = _anchor(spec, anchor)
    refined = {}
    depths = gamma.depths
    p_sigma = np.exp(gamma.log_p)
    for k in np.unique(depths):
        tail = enumerate_level(spec, shift(word, int(k)), depth_L - int(k))
        p_tail = np.exp(tail.log_p)
        tail_pts = tail.points(x0)
        for m in np.flatnonzero(depths == k):
            pts = tail_pts @ gamma.linear[m].T + gamma.offset[m]
            for t, tau in enumerate(tail.members):
                refined[gamma.members[m] + tau] = (p_sigma[m] * p_tail[t], pts[t])
    level = enumerate_level(spec, word, depth_L)
    if set(level.members) != set(refined):
        return math.inf
    direct_w = np.exp(level.log_p)
    direct_pts = level.points(x0)
    worst = 0.0
    for k, s in enumerate(level.members):
        w, pt = refined[s]
        if np.max(np.abs(pt - direct_pts[k])) > 1e-9:
            return math.inf
        worst = max(worst, abs(w - direct_w[k]))
    return worst


def w1_distance_1d(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Exact Monge-Kantorovich (W1) distance between 1-D measures: integral of |F - G|."""
    if mu.dimension != 1 or nu.dimension != 1:
        raise Unsupported("exact W1 is only available in one dimension")
    xs = np.concatenate([mu.x, nu.x])
    order = np.argsort(xs, kind="mergesort")
    xs = xs[order]
    signed = np.concatenate([mu.weights / mu.total, -nu.weights / nu.total])[order]
    diff = np.cumsum(signed)[:-1]
    return float(np.sum(np.abs(diff) * np.diff(xs)))


@dataclass(frozen=True)
class ConvergenceBound:
    a_nu: float
    c_max: float

    def bound_at_depth(self, n) -> np.ndarray | float:
        """A_nu c_max^n / (1 - c_max): the Cauchy rate of the approximants."""
        return self.a_nu * np.power(self.c_max, n) / (1.0 - self.c_max)

    __call__ = bound_at_depth


def cauchy_bound(spec: RifsSpec, anchor=None) -> ConvergenceBound:
    """For nu a point mass at ``anchor``: A_nu = max over all maps of |anchor - S(anchor)|."""
    x0 = _anchor(spec, anchor)
    a = max(float(np.linalg.norm(m(x0) - x0)) for c in spec.components for m in c.maps)
    return ConvergenceBound(a, spec.c_max)


def depth_for_resolution(spec: RifsSpec, target: float = 1e-4) -> int:
    """Smallest depth at which every cylinder has diameter <= target."""
    return max(0, math.ceil(math.log(target / spec.diameter) / math.log(spec.c_max) - 1e-12))
