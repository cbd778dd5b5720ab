"""Words over the component alphabet, cylinder enumeration and antichains."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .core import TOL, RifsSpec, compose, enumeration_budget, image_boxes
from .errors import BudgetExceeded, InvalidSymbol

_BLOCK = 4096


class Word:
    """A one-sided infinite word, materialized lazily.

    ``kind`` is one of ``"explicit"`` (finite, fixed letters), ``"periodic"``
    (``letters`` repeated forever) or ``"sampled"`` (i.i.d. letters with law
    ``zeta``, reproducible from ``seed``).  Letters are 0-based.
    """

    def __init__(self, letters=(), kind="explicit", seed=None, zeta=None, offset=0, length=None):
        if kind not in ("explicit", "periodic", "sampled"):
            raise ValueError(f"unknown word kind {kind!r}")
        self.kind = kind
        self._letters = np.asarray(letters, dtype=np.int64)
        self.seed = seed
        self.zeta = None if zeta is None else np.asarray(zeta, dtype=float)
        self.offset = int(offset)
        self._blocks: dict[int, np.ndarray] = {}
        if kind == "periodic" and self._letters.size == 0:
            raise ValueError("periodic word needs at least one letter")
        if kind == "sampled" and (seed is None or self.zeta is None):
            raise ValueError("sampled word needs seed and zeta")
        if length is None:
            length = self._letters.size - self.offset if kind == "explicit" else None
        self.length = length

    @property
    def period(self):
        return self._letters.size if self.kind == "periodic" else None

    def _block(self, b):
        if b not in self._blocks:
            rng = np.random.default_rng([self.seed, b])
            cdf = np.cumsum(self.zeta)
            idx = np.searchsorted(cdf, rng.random(_BLOCK) * cdf[-1], side="right")
            self._blocks[b] = np.minimum(idx, self.zeta.size - 1)
        return self._blocks[b]

    def _raw(self, start, stop):
        if stop <= start:
            return np.zeros(0, dtype=np.int64)
        if self.kind == "explicit":
            if stop > self._letters.size:
                raise InvalidSymbol(
                    f"explicit word has {self._letters.size - self.offset} letters, "
                    f"{stop - self.offset} requested")
            return self._letters[start:stop]
        if self.kind == "periodic":
            return self._letters[np.arange(start, stop) % self._letters.size]
        b0, b1 = start // _BLOCK, (stop - 1) // _BLOCK
        chunk = np.concatenate([self._block(b) for b in range(b0, b1 + 1)])
        return chunk[start - b0 * _BLOCK: stop - b0 * _BLOCK]

    def prefix(self, n: int) -> np.ndarray:
        """The first ``n`` letters as an integer array."""
        return self._raw(self.offset, self.offset + int(n))

    def __getitem__(self, k: int) -> int:
        return int(self._raw(self.offset + k, self.offset + k + 1)[0])

    def counts(self, n: int, n_letters: int) -> np.ndarray:
        return np.bincount(self.prefix(n), minlength=n_letters)

    def periodic(self, n: int) -> "Word":
        """The periodic word repeating the first ``n`` letters."""
        return Word(self.prefix(n), kind="periodic")

    def _clone(self, offset, length):
        w = Word(self._letters, self.kind, self.seed, self.zeta, offset, length)
        w._blocks = self._blocks
        return w

    def __repr__(self):
        head = ",".join(str(x) for x in self.prefix(min(8, self.length or 8)))
        return f"Word({self.kind}, [{head}...], offset={self.offset})"


def explicit_word(letters) -> Word:
    return Word(letters, kind="explicit")


def sample_word(spec: RifsSpec, seed: int, length: int) -> Word:
    """An i.i.d. word with letter law zeta, reproducible from ``seed``."""
    if length < 1:
        raise ValueError("length must be >= 1")
    return Word(kind="sampled", seed=int(seed), zeta=spec.zeta, length=int(length))


def shift(word: Word, n: int) -> Word:
    """Left shift applied ``n`` times; ``shift(w, 0)`` is ``w`` itself."""
    if n < 0:
        raise ValueError("shift count must be >= 0")
    length = None if word.length is None else word.length - n
    if word.kind == "explicit" and length < 0:
        raise InvalidSymbol("shift past the end of an explicit word")
    offset = word.offset + n
    if word.kind == "periodic":
        offset %= word.period
    return word._clone(offset, length)


# -- antichains -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Antichain:
    """Symbol strings with their cylinder data, stored as parallel arrays."""

    members: tuple
    log_p: np.ndarray
    log_c: np.ndarray
    linear: np.ndarray = field(repr=False)
    offset: np.ndarray = field(repr=False)
    box_lo: np.ndarray = field(repr=False)
    box_hi: np.ndarray = field(repr=False)
    source: str = "custom"

    def __len__(self):
        return len(self.members)

    @property
    def depths(self) -> np.ndarray:
        return np.array([len(s) for s in self.members], dtype=int)

    def points(self, anchor) -> np.ndarray:
        """S_sigma(anchor) for every member, shape (M, d)."""
        return np.einsum("mij,j->mi", self.linear, np.asarray(anchor, float)) + self.offset

    def log_weights(self, r: float) -> np.ndarray:
        return self.log_p + r * self.log_c

    def to_csv(self, dest=None) -> str:
        """Rows sigma;depth;log_p;log_c;box_lo;box_hi (symbols joined by '.')."""
        buf = io.StringIO()
        w = csv.writer(buf, delimiter=";", lineterminator="\n")
        w.writerow(["sigma", "depth", "log_p", "log_c", "box_lo", "box_hi"])
        for k, s in enumerate(self.members):
            w.writerow([".".join(map(str, s)), len(s), repr(float(self.log_p[k])),
                        repr(float(self.log_c[k])),
                        ",".join(repr(float(v)) for v in self.box_lo[k]),
                        ",".join(repr(float(v)) for v in self.box_hi[k])])
        text = buf.getvalue()
        if dest is not None:
            with open(dest, "w") as fh:
                fh.write(text)
        return text


@dataclass
class _Frontier:
    """Nodes of one tree level as parallel arrays."""

    sigma: np.ndarray  # (M, depth)
    log_p: np.ndarray
    log_c: np.ndarray
    linear: np.ndarray
    offset: np.ndarray

    @classmethod
    def root(cls, d):
        return cls(np.zeros((1, 0), dtype=np.int64), np.zeros(1), np.zeros(1),
                   np.eye(d)[None], np.zeros((1, d)))

    def __len__(self):
        return self.log_p.size

    def children(self, spec: RifsSpec, letter: int) -> "_Frontier":
        comp = spec.components[letter]
        k = len(comp)
        mlin = np.stack([m.linear for m in comp.maps])           # (k,d,d)
        mt = np.stack([m.translation for m in comp.maps])         # (k,d)
        lin = np.einsum("mij,kjl->mkil", self.linear, mlin)
        off = np.einsum("mij,kj->mki", self.linear, mt) + self.offset[:, None, :]
        M, d = len(self), spec.dimension
        sig = np.concatenate([np.repeat(self.sigma, k, axis=0),
                              np.tile(np.arange(k), M)[:, None]], axis=1)
        return _Frontier(sig,
                         (self.log_p[:, None] + np.log(comp.probs)[None]).ravel(),
                         (self.log_c[:, None] + np.log(comp.ratios)[None]).ravel(),
                         lin.reshape(M * k, d, d), off.reshape(M * k, d))

    def select(self, mask) -> "_Frontier":
        return _Frontier(self.sigma[mask], self.log_p[mask], self.log_c[mask],
                         self.linear[mask], self.offset[mask])


def _concat(spec, parts, source, sort=True) -> Antichain:
    parts = [p for p in parts if len(p)]
    d = spec.dimension
    if not parts:
        parts = [_Frontier.root(d)]
    members = [tuple(int(x) for x in row) for p in parts for row in p.sigma]
    log_p = np.concatenate([p.log_p for p in parts])
    log_c = np.concatenate([p.log_c for p in parts])
    lin = np.concatenate([p.linear for p in parts])
    off = np.concatenate([p.offset for p in parts])
    order = sorted(range(len(members)), key=members.__getitem__) if sort else range(len(members))
    order = np.asarray(list(order), dtype=int)
    members = tuple(members[i] for i in order)
    lin, off = lin[order], off[order]
    lo, hi = image_boxes(spec, lin, off)
    return Antichain(members, log_p[order], log_c[order], lin, off, lo, hi, source)


def level_size(spec: RifsSpec, word: Word, n: int) -> int:
    return reduce(lambda a, b: a * b, (len(spec.components[w]) for w in word.prefix(n)), 1)


def enumerate_level(spec: RifsSpec, word: Word, n: int, budget: int | None = None) -> Antichain:
    """All symbol strings of length ``n`` along ``word``."""
    budget = enumeration_budget() if budget is None else budget
    count = level_size(spec, word, n)
    if count > budget:
        raise BudgetExceeded(count, budget)
    front = _Frontier.root(spec.dimension)
    for w in word.prefix(n):
        front = front.children(spec, int(w))
    return _concat(spec, [front], f"level({n})")


@dataclass(frozen=True)
class GammaStats:
    phi: int
    l1: int
    l2: int
    threshold: float
    log_threshold: float


def gamma_log_threshold(spec: RifsSpec, n: int, r: float) -> float:
    return math.log(spec.p_min) + r * math.log(spec.c_min) - math.log(n)


def build_gamma(spec: RifsSpec, word: Word, n: int, r: float,
                budget: int | None = None) -> tuple[Antichain, GammaStats]:
    """The antichain of strings whose weight p c^r first drops below p_min c_min^r / n.

    A node keeps descending while its weight is >= the threshold (ties within
    1e-12 in log space count as ">=").
    """
    if n < 1 or r <= 0:
        raise ValueError("need n >= 1 and r > 0")
    budget = enumeration_budget() if budget is None else budget
    log_thr = gamma_log_threshold(spec, n, r)
    front = _Frontier.root(spec.dimension)
    found, depth, total = [], 0, 0
    while len(front):
        front = front.children(spec, word[depth])
        depth += 1
        total += len(front)
        if total > budget:
            raise BudgetExceeded(total, budget)
        lw = front.log_p + r * front.log_c
        deeper = lw >= log_thr - TOL
        found.append(front.select(~deeper))
        front = front.select(deeper)
    gamma = _concat(spec, found, f"gamma({n})")
    depths = gamma.depths
    stats = GammaStats(len(gamma), int(depths.min()), int(depths.max()),
                       math.exp(log_thr), log_thr)
    return gamma, stats


def _descend_from(log_w, log_pcr):
    """Smallest integer n >= 1 at which a node of log weight ``log_w`` is descended."""
    a = log_pcr - log_w - TOL
    n = np.maximum(1, np.ceil(np.exp(np.minimum(a, 700.0)))).astype(np.int64)
    for _ in range(2):
        lower = (n > 1) & (np.log(np.maximum(n - 1, 1)) >= a)
        n = np.where(lower, n - 1, n)
        n = np.where(np.log(n) < a, n + 1, n)
    return n


def gamma_nodes(spec: RifsSpec, word: Word, r: float, n_max: int,
                budget: int | None = None) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Per depth k: (log p c^r, first n, end n) of every node that is ever a member.

    A string sigma belongs to the threshold antichain for exactly the n with
    descend(parent) <= n < descend(sigma); end values are capped at n_max + 1.
    """
    budget = enumeration_budget() if budget is None else budget
    log_pcr = math.log(spec.p_min) + r * math.log(spec.c_min)
    log_thr = log_pcr - math.log(n_max)
    start = np.ones(1, dtype=np.int64)
    front_lp = np.zeros(1)
    per_depth = []
    depth, total = 0, 0
    while front_lp.size:
        lw_kids = front_lp[:, None] + spec.log_weights(r)[word[depth]][None]
        a = np.repeat(start, lw_kids.shape[1])
        lw_kids = lw_kids.ravel()
        b = _descend_from(lw_kids, log_pcr)
        depth += 1
        total += lw_kids.size
        if total > budget:
            raise BudgetExceeded(total, budget)
        ok = a < np.minimum(b, n_max + 1)
        per_depth.append((lw_kids[ok], a[ok], np.minimum(b, n_max + 1)[ok]))
        keep = lw_kids >= log_thr - TOL
        front_lp, start = lw_kids[keep], b[keep]
    return per_depth


def gamma_counts(spec: RifsSpec, word: Word, r: float, n_max: int,
                 budget: int | None = None) -> dict:
    """Phi, l1 and l2 of the threshold antichain for every n in 1..n_max at once.

    Each node contributes its membership interval of n to a difference array.
    """
    per_depth = [(a, b) for _, a, b in gamma_nodes(spec, word, r, n_max, budget)]
    phi = np.zeros(n_max + 2, dtype=np.int64)
    l1 = np.full(n_max + 2, np.iinfo(np.int64).max)
    l2 = np.zeros(n_max + 2, dtype=np.int64)
    for k, (a, b) in enumerate(per_depth, start=1):
        diff = np.zeros(n_max + 3, dtype=np.int64)
        np.add.at(diff, a, 1)
        np.add.at(diff, b, -1)
        cover = np.cumsum(diff)[: n_max + 2]
        phi += cover
        present = cover > 0
        l1 = np.where(present, np.minimum(l1, k), l1)
        l2 = np.where(present, np.maximum(l2, k), l2)
    ns = np.arange(1, n_max + 1)
    return {"n": ns, "phi": phi[1: n_max + 1], "l1": l1[1: n_max + 1], "l2": l2[1: n_max + 1]}


def gamma_events(spec: RifsSpec, word: Word, r: float, n_max: int,
                 budget: int | None = None) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """The distinct threshold antichains for n <= n_max.

    Returns (n, depths, log p c^r) for every n at which the antichain
    changes; it stays constant until the next listed n.
    """
    nodes = gamma_nodes(spec, word, r, n_max, budget)
    lw = np.concatenate([x for x, _, _ in nodes])
    a = np.concatenate([y for _, y, _ in nodes])
    b = np.concatenate([z for _, _, z in nodes])
    dep = np.concatenate([np.full(x.size, k) for k, (x, _, _) in enumerate(nodes, start=1)])
    out = []
    for n in np.unique(a):
        live = (a <= n) & (n < b)
        out.append((int(n), dep[live], lw[live]))
    return out


def bracket_index(phi: np.ndarray, n: int) -> int | None:
    """1-based j with phi[j] <= n < phi[j+1] for a nondecreasing phi (phi[0] is Phi_1)."""
    phi = np.asarray(phi)
    j = int(np.searchsorted(phi, n, side="right"))
    if j == 0 or j >= phi.size:
        return None
    return j


def antichain_from_members(spec: RifsSpec, word: Word, members, source="custom") -> Antichain:
    """Geometry for an explicit list of symbol strings."""
    members = [tuple(int(x) for x in s) for s in members]
    geoms = [compose(spec, word, s) for s in members]
    d = spec.dimension
    if not geoms:
        raise ValueError("empty antichain")
    lin = np.stack([g.linear for g in geoms]).reshape(-1, d, d)
    off = np.stack([g.offset for g in geoms]).reshape(-1, d)
    lo, hi = image_boxes(spec, lin, off)
    return Antichain(tuple(members), np.array([g.log_prob for g in geoms]),
                     np.array([g.log_ratio for g in geoms]), lin, off, lo, hi, source)


def validate_fma(spec: RifsSpec, word: Word, antichain) -> bool:
    """True iff the strings are pairwise incomparable and cover every deep enough string.

    Coverage is checked by counting: given incomparability the descendant
    sets at the maximal depth are disjoint, so they partition that level iff
    their sizes add up to the level size.
    """
    members = list(antichain.members if isinstance(antichain, Antichain) else antichain)
    if not members:
        return False
    L = max(len(s) for s in members)
    letters = word.prefix(L)
    cards = [len(spec.components[w]) for w in letters]
    memo = set()
    for s in members:
        s = tuple(s)
        if s in memo:
            return False
        for k, sym in enumerate(s):
            if not 0 <= sym < cards[k]:
                return False
        memo.add(s)
    for s in memo:
        for k in range(len(s)):
            if s[:k] in memo:
                return False
    tail = [1] * (L + 1)
    for k in range(L - 1, -1, -1):
        tail[k] = tail[k + 1] * cards[k]
    return sum(tail[len(s)] for s in memo) == tail[0]
