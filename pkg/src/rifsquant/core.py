"""Data model for random homogeneous self-similar systems.

A system is a list of component IFSs, one of which is chosen per letter of an
infinite word.  All maps are contracting similarities ``x -> c Q x + t`` acting
on an axis-aligned ambient box.  Letters and map indices are 0-based.
"""
from __future__ import annotations

import itertools
import json
import math
import os
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidSymbol, SeparationRequired, SpecError, Unsupported

TOL = 1e-12
DEFAULT_BUDGET = 10**7


def enumeration_budget() -> int:
    """Node budget for exhaustive enumerations (env FRACTAL_QUANT_BUDGET overrides)."""
    raw = os.environ.get("FRACTAL_QUANT_BUDGET")
    if raw:
        return int(float(raw))
    return DEFAULT_BUDGET


@dataclass(frozen=True, eq=False)
class Similarity:
    ratio: float
    translation: np.ndarray
    orthogonal: np.ndarray | None = None

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.translation, dtype=float))
        object.__setattr__(self, "translation", t)
        if not 0.0 < self.ratio < 1.0:
            raise SpecError(f"similarity ratio {self.ratio} not in (0, 1)")
        if self.orthogonal is not None:
            q = np.asarray(self.orthogonal, dtype=float).reshape(t.size, t.size)
            if not np.allclose(q.T @ q, np.eye(t.size), atol=TOL, rtol=0):
                raise SpecError("orthogonal part is not orthogonal")
            object.__setattr__(self, "orthogonal", q)

    @property
    def dimension(self) -> int:
        return self.translation.size

    @property
    def linear(self) -> np.ndarray:
        q = np.eye(self.dimension) if self.orthogonal is None else self.orthogonal
        return self.ratio * q

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.linear.T + self.translation


@dataclass(frozen=True, eq=False)
class Ifs:
    maps: tuple[Similarity, ...]
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if len(self.maps) < 2:
            raise SpecError("a component IFS needs at least two maps")
        if probs.shape != (len(self.maps),):
            raise SpecError("one probability per map is required")
        if np.any(probs <= 0):
            raise SpecError("map probabilities must be positive")
        if abs(probs.sum() - 1.0) > TOL:
            raise SpecError(f"map probabilities sum to {probs.sum():.15g}, not 1")

    @property
    def ratios(self) -> np.ndarray:
        return np.array([m.ratio for m in self.maps])

    def __len__(self):
        return len(self.maps)


@dataclass(frozen=True, eq=False)
class RifsSpec:
    """The full random system: component IFSs, selection vector and ambient box."""

    dimension: int
    lo: np.ndarray
    hi: np.ndarray
    components: tuple[Ifs, ...]
    zeta: np.ndarray
    r_default: float = 1.0
    scale: float = 1.0  # original |X| when built through normalized()
    name: str = ""

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        zeta = np.asarray(self.zeta, dtype=float)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "components", tuple(self.components))
        d = self.dimension
        if d < 1 or lo.shape != (d,) or hi.shape != (d,):
            raise SpecError("ambient box does not match the dimension")
        if np.any(hi <= lo):
            raise SpecError("ambient box must have hi > lo on every axis")
        if not self.components:
            raise SpecError("at least one component IFS is required")
        if zeta.shape != (len(self.components),):
            raise SpecError("one selection probability per component is required")
        if np.any(zeta <= 0) or abs(zeta.sum() - 1.0) > TOL:
            raise SpecError("zeta must be a positive probability vector")
        if self.r_default <= 0:
            raise SpecError("order r must be positive")
        for i, comp in enumerate(self.components):
            for j, m in enumerate(comp.maps):
                if m.dimension != d:
                    raise SpecError(f"component {i} map {j} has wrong dimension")
                if d <= 3:
                    img = m(self.corners)
                    if np.any(img < lo - 1e-9) or np.any(img > hi + 1e-9):
                        raise SpecError(f"component {i} map {j} does not send X into X")

    @property
    def corners(self) -> np.ndarray:
        return np.array(list(itertools.product(*zip(self.lo, self.hi))), dtype=float)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def max_card(self) -> int:
        return max(len(c) for c in self.components)

    def _all(self, attr):
        return np.concatenate([getattr(c, attr) for c in self.components])

    @property
    def p_min(self) -> float:
        return float(self._all("probs").min())

    @property
    def p_max(self) -> float:
        return float(self._all("probs").max())

    @property
    def c_min(self) -> float:
        return float(self._all("ratios").min())

    @property
    def c_max(self) -> float:
        return float(self._all("ratios").max())

    def log_weights(self, r: float) -> list[np.ndarray]:
        """Per component, the array of log(p_ij c_ij^r)."""
        return [np.log(c.probs) + r * np.log(c.ratios) for c in self.components]

    def normalized(self) -> "RifsSpec":
        """Equivalent system rescaled so that |X| = 1."""
        s = self.diameter
        if abs(s - 1.0) <= TOL:
            return self
        comps = [
            Ifs([Similarity(m.ratio, m.translation / s, m.orthogonal) for m in c.maps], c.probs)
            for c in self.components
        ]
        return RifsSpec(self.dimension, self.lo / s, self.hi / s, comps, self.zeta,
                        self.r_default, self.scale * s, self.name)

    def to_dict(self) -> dict:
        comps = []
        for c in self.components:
            maps = []
            for m in c.maps:
                entry = {"ratio": m.ratio, "translation": m.translation.tolist()}
                if m.orthogonal is not None:
                    entry["orthogonal"] = m.orthogonal.tolist()
                maps.append(entry)
            comps.append({"maps": maps, "probs": c.probs.tolist()})
        return {
            "dimension": self.dimension,
            "ambient": {"lo": self.lo.tolist(), "hi": self.hi.tolist()},
            "components": comps,
            "zeta": self.zeta.tolist(),
            "r": self.r_default,
        }


def _line_of(text: str, key: str, occurrence: int = 0) -> int | None:
    hits = [m.start() for m in re.finditer(rf'"{re.escape(key)}"\s*:', text)]
    if occurrence < len(hits):
        return text.count("\n", 0, hits[occurrence]) + 1
    return None


def spec_from_dict(data: dict, text: str | None = None, normalize: bool = True) -> RifsSpec:
    """Build a validated system from the JSON document layout.

    ``text`` is the raw document; when given, error messages carry the line of
    the offending field.
    """
    text = text or ""

    def fail(msg, key, occ=0):
        raise SpecError(msg, _line_of(text, key, occ))

    for key in ("dimension", "ambient", "components", "zeta"):
        if key not in data:
            raise SpecError(f"missing field '{key}'")
    d = int(data["dimension"])
    amb = data["ambient"]
    try:
        lo, hi = np.asarray(amb["lo"], float), np.asarray(amb["hi"], float)
    except (KeyError, TypeError, ValueError):
        fail("ambient must be {lo: [...], hi: [...]}", "ambient")
    if lo.shape != (d,) or hi.shape != (d,) or np.any(hi <= lo):
        fail("ambient box must have dimension entries with hi > lo", "ambient")

    comps = []
    map_occ = 0
    for i, c in enumerate(data["components"]):
        maps = []
        for j, m in enumerate(c.get("maps", [])):
            try:
                maps.append(Similarity(float(m["ratio"]), m["translation"], m.get("orthogonal")))
            except SpecError as exc:
                fail(f"component {i} map {j}: {exc}", "ratio", map_occ + j)
            except (KeyError, TypeError, ValueError) as exc:
                fail(f"component {i} map {j}: malformed ({exc})", "maps", i)
        map_occ += len(c.get("maps", []))
        try:
            comps.append(Ifs(maps, c.get("probs", [])))
        except SpecError as exc:
            fail(f"component {i}: {exc}", "probs", i)
    try:
        spec = RifsSpec(d, lo, hi, comps, data["zeta"], float(data.get("r", 1.0)))
    except SpecError as exc:
        msg = str(exc)
        key = "zeta" if "zeta" in msg or "selection" in msg else "components"
        m = re.match(r"component (\d+) map", msg)
        if m:
            fail(msg, "probs", int(m.group(1)))
        fail(msg, key)
    return spec.normalized() if normalize else spec


def load_spec(path, normalize: bool = True) -> RifsSpec:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    spec = spec_from_dict(data, text, normalize)
    return spec


def save_spec(spec: RifsSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


# -- cylinder geometry --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CylinderGeom:
    sigma: tuple[int, ...]
    product_ratio: float
    product_prob: float
    log_ratio: float
    log_prob: float
    box_lo: np.ndarray
    box_hi: np.ndarray
    anchor: np.ndarray
    linear: np.ndarray = field(repr=False)
    offset: np.ndarray = field(repr=False)

    @property
    def diameter(self) -> float:
        return self.product_ratio


def image_boxes(spec: RifsSpec, linear: np.ndarray, offset: np.ndarray):
    """Bounding boxes of S(X) for a stack of affine maps (linear (M,d,d), offset (M,d))."""
    if spec.dimension == 1:
        a = linear[:, 0, 0]
        p0 = a * spec.lo[0] + offset[:, 0]
        p1 = a * spec.hi[0] + offset[:, 0]
        return np.minimum(p0, p1)[:, None], np.maximum(p0, p1)[:, None]
    pts = np.einsum("mij,kj->mki", linear, spec.corners) + offset[:, None, :]
    return pts.min(axis=1), pts.max(axis=1)


def _letters(omega_prefix, n):
    if hasattr(omega_prefix, "prefix"):
        return omega_prefix.prefix(n)
    letters = np.asarray(omega_prefix, dtype=int)
    if letters.size < n:
        raise InvalidSymbol(f"word prefix has {letters.size} letters, {n} needed")
    return letters[:n]


def compose(spec: RifsSpec, omega_prefix, sigma: Sequence[int], anchor=None) -> CylinderGeom:
    """Geometry of the cylinder E_sigma = S_sigma(X) along the word."""
    sigma = tuple(int(s) for s in sigma)
    letters = _letters(omega_prefix, len(sigma))
    d = spec.dimension
    x0 = spec.center if anchor is None else np.atleast_1d(np.asarray(anchor, float))
    lin, off = np.eye(d), np.zeros(d)
    log_c = log_p = 0.0
    for k, (w, s) in enumerate(zip(letters, sigma)):
        if not 0 <= w < spec.n_components:
            raise InvalidSymbol(f"letter {w} at position {k} is outside the alphabet")
        comp = spec.components[w]
        if not 0 <= s < len(comp):
            raise InvalidSymbol(f"symbol {s} at position {k} not in component {w}")
        m = comp.maps[s]
        off = lin @ m.translation + off
        lin = lin @ m.linear
        log_c += math.log(m.ratio)
        log_p += math.log(comp.probs[s])
    blo, bhi = image_boxes(spec, lin[None], off[None])
    return CylinderGeom(sigma, math.exp(log_c), math.exp(log_p), log_c, log_p,
                        blo[0], bhi[0], lin @ x0 + off, lin, off)


# -- separation conditions ------------------------------------------------------

def box_distance(lo1, hi1, lo2, hi2) -> np.ndarray:
    """Euclidean distance between axis-aligned boxes (broadcasting over leading axes)."""
    gap = np.maximum(0.0, np.maximum(np.asarray(lo2) - hi1, np.asarray(lo1) - hi2))
    return np.sqrt((gap**2).sum(axis=-1))


def _level_one_boxes(spec, comp):
    lin = np.stack([m.linear for m in comp.maps])
    off = np.stack([m.translation for m in comp.maps])
    return image_boxes(spec, lin, off)


def check_uessc(spec: RifsSpec) -> dict:
    """Largest beta with min dist(E_ij, E_ij') >= beta * max |E_ij| in every component."""
    beta = math.inf
    for comp in spec.components:
        lo, hi = _level_one_boxes(spec, comp)
        dist = box_distance(lo[:, None], hi[:, None], lo[None], hi[None])
        iu = np.triu_indices(len(comp), 1)
        gap = float(dist[iu].min())
        if gap <= TOL:
            return {"holds": False, "beta": 0.0}
        beta = min(beta, gap / (comp.ratios.max() * spec.diameter))
    return {"holds": True, "beta": beta}


def check_suosc_intervals(spec: RifsSpec) -> dict:
    """Strong uniform open set condition with U = interior(X), intervals only."""
    if spec.dimension != 1:
        raise Unsupported("SUOSC verification is only implemented for d = 1")
    lo, hi = float(spec.lo[0]), float(spec.hi[0])
    holds = True
    for comp in spec.components:
        blo, bhi = _level_one_boxes(spec, comp)
        blo, bhi = blo[:, 0], bhi[:, 0]
        if np.any(blo < lo - TOL) or np.any(bhi > hi + TOL):
            holds = False
        order = np.argsort(blo)
        if np.any(blo[order][1:] < bhi[order][:-1] - TOL):
            holds = False  # open images overlap
        # closed images strictly inside U force F_omega to meet U for every omega
        if np.any(blo <= lo + TOL) or np.any(bhi >= hi - TOL):
            holds = False
    return {"holds": holds, "open_set": (lo, hi)}


def lemma_constants(spec: RifsSpec, r: float, beta: float) -> dict:
    """Covering constants D, G1, G2 and G = G1 + G2 of the local-complexity lemmas."""
    if beta <= 0:
        raise SeparationRequired("beta must be positive (UESSC must hold)")
    if r <= 0:
        raise ValueError("r must be positive")
    target = 2.0 / (spec.p_min * spec.c_min**r)
    D = max(1, math.floor(target ** (1.0 / r)))
    while D**r <= target:
        D += 1
    while D > 1 and (D - 1) ** r > target:
        D -= 1
    d = spec.dimension
    g1 = math.floor((1 + 16 * D / beta) ** d)
    g2 = math.floor((1 + 16 * D / beta + 8 * D) ** d)
    return {"D": D, "G1": g1, "G2": g2, "G": g1 + g2}
