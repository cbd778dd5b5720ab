"""Quantization errors of discrete measures.

In one dimension nearest-center cells are intervals, so an optimal n-point
quantizer splits the sorted atoms into at most n contiguous clusters.  The
exact solver is a dynamic program over those splits.  Small inputs use a
directly evaluated cost matrix (any r > 0); large inputs with r in {1, 2} use
prefix-sum costs and a divide-and-conquer layer update that relies on the
monotonicity of optimal split points.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.spatial import cKDTree
from scipy.stats import theilslopes

from .errors import BudgetExceeded, DegenerateInput, Unsupported
from .measure import DiscreteMeasure

DIRECT_MAX_ATOMS = 256


@dataclass(frozen=True, eq=False)
class QuantResult:
    centers: np.ndarray
    cost: float
    method: str
    n: int

    def to_row(self):
        flat = ",".join(repr(float(v)) for v in np.ravel(self.centers))
        return [self.n, repr(float(self.cost)), self.method, flat]


def results_csv(results, dest=None) -> str:
    """Rows n;V;method;centers (centers comma-separated, row-major)."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=";", lineterminator="\n")
    w.writerow(["n", "V", "method", "centers"])
    for res in results:
        w.writerow(res.to_row())
    text = buf.getvalue()
    if dest is not None:
        with open(dest, "w") as fh:
            fh.write(text)
    return text


def assignment_cost(mu: DiscreteMeasure, centers, r: float, open_set=None) -> float:
    """sum_x w(x) d(x, centers)^r, optionally with the complement of an open box as extra target."""
    pts = mu.points
    centers = np.asarray(centers, dtype=float).reshape(-1, mu.dimension)
    if len(centers):
        dist, _ = cKDTree(centers).query(pts)
    else:
        dist = np.full(len(mu), np.inf)
    if open_set is not None:
        lo, hi = (np.atleast_1d(np.asarray(v, float)) for v in open_set)
        inside = np.minimum(pts - lo, hi - pts)
        dist = np.minimum(dist, np.maximum(0.0, inside.min(axis=1)))
    return float(np.sum(mu.weights * dist**r))


# -- one-center problems ----------------------------------------------------------

def _median_index(cw, total):
    """Index of the weighted median atom given cumulative weights cw."""
    return int(np.searchsorted(cw, 0.5 * total, side="left"))


def one_center_1d(x: np.ndarray, w: np.ndarray, r: float) -> float:
    """Minimizer of sum w |x - c|^r over c, x sorted."""
    if x.size == 1:
        return float(x[0])
    if r == 2:
        return float(np.dot(w, x) / w.sum())
    if r == 1:
        return float(x[min(_median_index(np.cumsum(w), w.sum()), x.size - 1)])
    if r < 1:
        costs = (w[None, :] * np.abs(x[:, None] - x[None, :]) ** r).sum(axis=1)
        return float(x[np.argmin(costs)])
    lo, hi = float(x[0]), float(x[-1])
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        grad = np.sum(w * np.sign(mid - x) * np.abs(mid - x) ** (r - 1))
        if grad > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def one_center(points: np.ndarray, w: np.ndarray, r: float) -> np.ndarray:
    """Minimizer of sum w ||x - c||^r; exact in 1-D, numerical otherwise."""
    if points.shape[1] == 1:
        order = np.argsort(points[:, 0])
        return np.array([one_center_1d(points[order, 0], w[order], r)])
    mean = w @ points / w.sum()
    if r == 2 or len(points) == 1:
        return mean

    def f(c):
        return float(np.sum(w * np.linalg.norm(points - c, axis=1) ** r))

    best = min((mean, *points[np.argsort(-w)[:3]]), key=f)
    res = optimize.minimize(f, best, method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    return res.x if res.fun <= f(best) else best


# -- cluster costs ----------------------------------------------------------------

def _direct_cost_matrix(x, w, r):
    """C[i, j] = optimal 1-center cost of atoms i..j-1 (inf for j <= i)."""
    m = x.size
    C = np.full((m + 1, m + 1), np.inf)
    for i in range(m):
        xs, ws = x[i:], w[i:]
        L = xs.size
        upper = np.tril(np.ones((L, L), dtype=bool))  # row e = cluster end, col t = atom
        if r == 2:
            cw, cwx = np.cumsum(ws), np.cumsum(ws * xs)
            c = cwx / cw
            C[i, i + 1:] = np.where(upper, ws[None] * (xs[None] - c[:, None]) ** 2, 0.0).sum(axis=1)
        elif r == 1:
            cw = np.cumsum(ws)
            med = np.minimum(np.searchsorted(cw, 0.5 * cw, side="left"), np.arange(L))
            c = xs[med]
            C[i, i + 1:] = np.where(upper, ws[None] * np.abs(xs[None] - c[:, None]), 0.0).sum(axis=1)
        elif r < 1:
            G = ws[None, :] * np.abs(xs[:, None] - xs[None, :]) ** r  # row t = center atom
            H = np.cumsum(G, axis=1)  # H[t, e] = cost of atoms i..i+e with center atom t
            H = np.where(np.triu(np.ones((L, L), dtype=bool)), H, np.inf)
            C[i, i + 1:] = H.min(axis=0)
        else:
            lo = np.full(L, xs[0])
            hi = xs.copy()
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                diff = mid[:, None] - xs[None]
                g = np.where(upper, ws[None] * np.sign(diff) * np.abs(diff) ** (r - 1), 0.0).sum(axis=1)
                hi = np.where(g > 0, mid, hi)
                lo = np.where(g > 0, lo, mid)
            c = 0.5 * (lo + hi)
            C[i, i + 1:] = np.where(upper, ws[None] * np.abs(xs[None] - c[:, None]) ** r, 0.0).sum(axis=1)
    return C


class _PrefixCost:
    """Vectorized cluster costs from prefix sums (r = 1 or 2)."""

    def __init__(self, x, w, r):
        self.x, self.r = x, r
        self.W = np.concatenate([[0.0], np.cumsum(w)])
        self.WX = np.concatenate([[0.0], np.cumsum(w * x)])
        if r == 2:
            self.WXX = np.concatenate([[0.0], np.cumsum(w * x * x)])

    def __call__(self, i, j):
        W, WX = self.W, self.WX
        if self.r == 2:
            s = W[j] - W[i]
            sx = WX[j] - WX[i]
            return np.maximum(0.0, (self.WXX[j] - self.WXX[i]) - sx * sx / s)
        half = 0.5 * (W[i] + W[j])
        med = np.clip(np.searchsorted(W, half, side="left") - 1, i, j - 1)
        xm = self.x[med]
        left = xm * (W[med] - W[i]) - (WX[med] - WX[i])
        right = (WX[j] - WX[med + 1]) - xm * (W[j] - W[med + 1])
        return np.maximum(0.0, left + right)


def _layer_dense(prev, C):
    vals = prev[:, None] + C
    arg = np.argmin(vals, axis=0)
    return vals[arg, np.arange(C.shape[1])], arg


def _layer_dc(prev, cost, m, lower=None):
    """cur[j] = min_{i<j} prev[i] + cost(i, j) assuming monotone leftmost minimizers.

    ``lower`` optionally bounds the minimizer from below at every j (the
    previous layer's minimizers, which never exceed the current ones).
    """
    cur = np.full(m + 1, np.inf)
    arg = np.zeros(m + 1, dtype=np.int64)
    finite = np.flatnonzero(np.isfinite(prev[:m]))
    if finite.size == 0:
        return cur, arg
    first = int(finite[0])
    jlo, jhi = np.array([first + 1]), np.array([m])
    olo, ohi = np.array([first]), np.array([m - 1])
    while jlo.size:
        mid = (jlo + jhi) // 2
        top = np.minimum(ohi, mid - 1)
        base = olo if lower is None else np.minimum(np.maximum(olo, lower[mid]), top)
        cnt = top - base + 1
        starts = np.cumsum(cnt) - cnt
        total = int(cnt.sum())
        ci = np.repeat(base - starts, cnt) + np.arange(total)
        cj = np.repeat(mid, cnt)
        vals = prev[ci] + cost(ci, cj)
        segmin = np.minimum.reduceat(vals, starts)
        hit = np.flatnonzero(vals == np.repeat(segmin, cnt))
        seg = np.repeat(np.arange(cnt.size), cnt)[hit]
        _, first_hit = np.unique(seg, return_index=True)
        best = ci[hit[first_hit]]
        cur[mid] = segmin
        arg[mid] = best
        left = jlo <= mid - 1
        right = mid + 1 <= jhi
        jlo, jhi, olo, ohi = (
            np.concatenate([jlo[left], mid[right] + 1]),
            np.concatenate([mid[left] - 1, jhi[right]]),
            np.concatenate([olo[left], best[right]]),
            np.concatenate([best[left], ohi[right]]),
        )
    return cur, arg


class _Solver1D:
    """Layered dynamic program over contiguous clusters of sorted 1-D atoms."""

    def __init__(self, mu: DiscreteMeasure, r: float, force_dc: bool = False):
        if mu.dimension != 1:
            raise Unsupported("the exact solver only handles 1-D measures")
        if r <= 0:
            raise ValueError("r must be positive")
        s = mu.sorted()
        self.x, self.w, self.r = s.x.copy(), s.weights.copy(), r
        self.m = self.x.size
        if self.m <= DIRECT_MAX_ATOMS and not force_dc:
            self.C = _direct_cost_matrix(self.x, self.w, r)
            self.layer = lambda prev, lower=None: _layer_dense(prev, self.C)
            self.method = "exact_dp"
        elif r in (1, 2):
            cost = _PrefixCost(self.x, self.w, r)
            self.layer = lambda prev, lower=None: _layer_dc(prev, cost, self.m, lower)
            self.method = "exact_dp"
        else:
            raise BudgetExceeded(self.m, DIRECT_MAX_ATOMS)

    def center(self, i, j):
        return one_center_1d(self.x[i:j], self.w[i:j], self.r)

    def run(self, prev0, kmax, keep_fewer=False):
        prev = prev0
        layers = [prev0]
        args = []
        for _ in range(kmax):
            lower = args[-1] if args and not keep_fewer else None
            cur, arg = self.layer(prev, lower)
            arg = arg.astype(np.int32)
            if keep_fewer:
                stay = prev <= cur
                cur = np.where(stay, prev, cur)
                arg = np.where(stay, -1, arg).astype(np.int32)
            layers.append(cur)
            args.append(arg)
            prev = cur
        return layers, args

    def backtrack(self, args, k, j):
        centers = []
        while k > 0:
            i = int(args[k - 1][j])
            if i >= 0:
                centers.append(self.center(i, j))
                j = i
            k -= 1
        return np.array(sorted(centers)), j


def vnr_exact_1d_series(mu: DiscreteMeasure, ns, r: float, force_dc: bool = False) -> list[QuantResult]:
    """Exact V_{n,r} for every n in ``ns`` from a single dynamic program."""
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns):
        raise ValueError("n must be >= 1")
    if mu.dimension != 1:
        raise Unsupported("the exact solver only handles 1-D measures")
    s = mu.sorted()
    m = len(s)
    out = {}
    big = [n for n in ns if n >= m]
    for n in big:
        out[n] = QuantResult(s.points.copy(), 0.0, "exact_dp", n)
    small = [n for n in ns if n < m]
    if small:
        solver = _Solver1D(s, r, force_dc)
        prev0 = np.full(m + 1, np.inf)
        prev0[0] = 0.0
        layers, args = solver.run(prev0, max(small))
        for n in small:
            centers, _ = solver.backtrack(args, n, m)
            out[n] = QuantResult(centers[:, None], float(layers[n][m]), solver.method, n)
    return [out[n] for n in ns]


def vnr_exact_1d(mu: DiscreteMeasure, n: int, r: float) -> QuantResult:
    """Exact n-th quantization error of order r of a 1-D discrete measure."""
    return vnr_exact_1d_series(mu, [n], r)[0]


def unr(mu: DiscreteMeasure, n: int, r: float, open_set, method: str = "exact",
        restarts: int = 16, seed: int = 0) -> QuantResult:
    """Constrained error: distances are to the centers or to the complement of ``open_set``.

    In 1-D the two boundary points act as zero-cost phantom centers; atoms
    served by them form a prefix and a suffix of the sorted atoms.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if mu.dimension != 1:
        if method != "lloyd":
            raise Unsupported("exact U_{n,r} is only available in 1-D; use method='lloyd'")
        return _lloyd(mu, n, r, restarts, seed, open_set=open_set)
    lo, hi = (float(np.ravel(v)[0]) for v in open_set)
    s = mu.sorted()
    x, w, m = s.x, s.weights, len(s)
    left = np.concatenate([[0.0], np.cumsum(w * np.maximum(0.0, x - lo) ** r)])
    right_tail = np.concatenate([np.cumsum((w * np.maximum(0.0, hi - x) ** r)[::-1])[::-1], [0.0]])
    k = min(n, m)
    if k == 0:
        j = int(np.argmin(left + right_tail))
        return QuantResult(np.zeros((0, 1)), float(left[j] + right_tail[j]), "exact_dp", n)
    solver = _Solver1D(s, r)
    layers, args = solver.run(left, k, keep_fewer=True)
    total = layers[k] + right_tail
    j = int(np.argmin(total))
    centers, _ = solver.backtrack(args, k, j)
    return QuantResult(centers.reshape(-1, 1), float(total[j]), "exact_dp", n)


# -- Lloyd ----------------------------------------------------------------------

def _kmeanspp(pts, w, n, r, rng):
    """Greedy D^r seeding: each step keeps the best of 2 + log n sampled candidates."""
    trials = 2 + int(math.log(n))
    idx = [int(rng.choice(len(w), p=w / w.sum()))]
    d = np.linalg.norm(pts - pts[idx[0]], axis=1) ** r
    for _ in range(1, n):
        score = w * d
        if score.sum() <= 0:
            rest = np.setdiff1d(np.arange(len(w)), idx)
            idx.append(int(rng.choice(rest)))
            d = np.minimum(d, np.linalg.norm(pts - pts[idx[-1]], axis=1) ** r)
            continue
        cand = rng.choice(len(w), size=trials, p=score / score.sum())
        dc = np.minimum(d[None], np.linalg.norm(pts[None] - pts[cand][:, None], axis=2) ** r)
        best = int(np.argmin(dc @ w))
        idx.append(int(cand[best]))
        d = dc[best]
    return pts[idx].copy()


def _lloyd_run(pts, w, n, r, rng, max_iter, open_set):
    centers = _kmeanspp(pts, w, n, r, rng)
    mu = DiscreteMeasure(pts, w)
    cost = assignment_cost(mu, centers, r, open_set)
    for _ in range(max_iter):
        dist, lab = cKDTree(centers).query(pts)
        if open_set is not None:
            lo, hi = (np.atleast_1d(np.asarray(v, float)) for v in open_set)
            bdist = np.maximum(0.0, np.minimum(pts - lo, hi - pts).min(axis=1))
            lab = np.where(bdist < dist, -1, lab)
        contrib = w * dist**r
        new = centers.copy()
        for k in range(n):
            sel = lab == k
            if sel.any():
                new[k] = one_center(pts[sel], w[sel], r)
            else:
                worst = int(np.argmax(np.where(lab >= 0, contrib, -1.0)))
                new[k] = pts[worst]
                contrib[worst] = 0.0
        new_cost = assignment_cost(mu, new, r, open_set)
        if new_cost >= cost * (1 - 1e-15):
            if new_cost <= cost:
                centers, cost = new, new_cost
            break
        centers, cost = new, new_cost
    return centers, cost


def _nearest_cost_1d(x, w, centers, r):
    k = np.clip(np.searchsorted(centers, x), 1, centers.size - 1) if centers.size > 1 else None
    if k is None:
        return float(np.sum(w * np.abs(x - centers[0]) ** r))
    d = np.minimum(np.abs(x - centers[k - 1]), np.abs(x - centers[k]))
    return float(np.sum(w * d**r))


def _lloyd_run_1d(x, w, n, r, rng, max_iter):
    """Lloyd on sorted 1-D atoms: cells are index ranges split at center midpoints."""
    W = np.concatenate([[0.0], np.cumsum(w)])
    WX = np.concatenate([[0.0], np.cumsum(w * x)])
    centers = np.sort(_kmeanspp(x[:, None], w, n, r, rng)[:, 0])
    cost = _nearest_cost_1d(x, w, centers, r)
    for _ in range(max_iter):
        cuts = np.searchsorted(x, 0.5 * (centers[1:] + centers[:-1]), side="right")
        lo = np.concatenate([[0], cuts])
        hi = np.concatenate([cuts, [x.size]])
        full = hi > lo
        a, b = lo[full], hi[full]
        if r == 2:
            new = (WX[b] - WX[a]) / (W[b] - W[a])
        elif r == 1:
            med = np.clip(np.searchsorted(W, 0.5 * (W[a] + W[b]), side="left") - 1, a, b - 1)
            new = x[med]
        else:
            new = np.array([one_center_1d(x[i:j], w[i:j], r) for i, j in zip(a, b)])
        missing = n - new.size
        if missing:
            k = np.clip(np.searchsorted(new, x), 1, max(new.size - 1, 1))
            d = np.abs(x - new[0]) if new.size == 1 else np.minimum(np.abs(x - new[k - 1]), np.abs(x - new[k]))
            worst = np.argsort(-(w * d**r), kind="stable")
            extra = [x[i] for i in worst if x[i] not in new][:missing]
            new = np.concatenate([new, extra])
        new = np.sort(new)
        new_cost = _nearest_cost_1d(x, w, new, r)
        if new_cost >= cost * (1 - 1e-15):
            if new_cost <= cost:
                centers, cost = new, new_cost
            break
        centers, cost = new, new_cost
    return centers[:, None], cost


def _lloyd(mu, n, r, restarts, seed, max_iter=300, open_set=None):
    pts, w = mu.points, mu.weights
    if n == 0:
        return QuantResult(np.zeros((0, mu.dimension)), assignment_cost(mu, [], r, open_set),
                           f"lloyd({restarts},{max_iter})", n)
    if n >= len(mu):
        return QuantResult(pts.copy(), 0.0, f"lloyd({restarts},{max_iter})", n)
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    fast = mu.dimension == 1 and open_set is None
    if fast:
        s = mu.sorted()
        xs, ws = s.x, s.weights
    for ss in seeds:
        rng = np.random.default_rng(ss)
        if fast:
            c, v = _lloyd_run_1d(xs, ws, n, r, rng, max_iter)
        else:
            c, v = _lloyd_run(pts, w, n, r, rng, max_iter, open_set)
        if best is None or v < best[1]:
            best = (c, v)
    centers = best[0]
    cost = assignment_cost(mu, centers, r, open_set)
    return QuantResult(centers, cost, f"lloyd({restarts},{max_iter})", n)


def vnr_lloyd(mu: DiscreteMeasure, n: int, r: float, restarts: int = 16, seed: int = 0,
              max_iter: int = 300) -> QuantResult:
    """Best of ``restarts`` Lloyd runs (seeded D^r sampling); an upper bound on V_{n,r}."""
    if n < 1 or restarts < 1:
        raise ValueError("need n >= 1 and restarts >= 1")
    return _lloyd(mu, n, r, restarts, seed, max_iter)


# -- bounds built from antichains -------------------------------------------------

def allocate_points(log_w: np.ndarray, r: float, kappa: float, total: int) -> np.ndarray:
    """Split ``total`` centers across cylinders proportionally to (p c^r)^{kappa/(r+kappa)}."""
    k = log_w.size
    if total < k:
        raise ValueError("need at least one center per cylinder")
    z = kappa / (r + kappa)
    share = np.exp(z * log_w - np.max(z * log_w))
    share = share / share.sum() * total
    alloc = np.maximum(1, np.floor(share)).astype(int)
    while alloc.sum() > total:
        cand = np.flatnonzero(alloc > 1)
        alloc[cand[np.argmin((share - alloc)[cand])]] -= 1
    while alloc.sum() < total:
        alloc[np.argmax(share - alloc)] += 1
    return alloc


def vnr_subdivision_upper(spec, word, gamma, inner_n: int, r: float, depth: int = 8,
                          anchor=None, total_n: int | None = None, kappa: float | None = None,
                          restarts: int = 16) -> float:
    """sum over the antichain of p_sigma c_sigma^r V_{n_sigma,r}(shifted measure).

    Uniform ``inner_n`` per cylinder by default; with ``total_n`` the centers
    are allocated in proportion to (p c^r)^{kappa/(r+kappa)}.  Shifted
    measures are depth-``depth`` approximants.
    """
    from .measure import approximant
    from .pressure import solve_kappa
    from .symbolic import shift

    log_w = gamma.log_weights(r)
    if total_n is None:
        alloc = np.full(len(gamma), int(inner_n))
    else:
        kappa = solve_kappa(spec, r).exponent if kappa is None else kappa
        alloc = allocate_points(log_w, r, kappa, total_n)
    depths = gamma.depths
    total = 0.0
    for k in np.unique(depths):
        nu = approximant(spec, shift(word, int(k)), depth, anchor)
        sel = np.flatnonzero(depths == k)
        need = sorted(set(int(a) for a in alloc[sel]))
        if spec.dimension == 1:
            vals = dict(zip(need, (q.cost for q in vnr_exact_1d_series(nu, need, r))))
        else:
            vals = {a: vnr_lloyd(nu, a, r, restarts).cost for a in need}
        total += float(sum(math.exp(log_w[i]) * vals[int(alloc[i])] for i in sel))
    return total


# -- dimension and coefficient estimators ------------------------------------------

@dataclass(frozen=True, eq=False)
class DimensionEstimate:
    lower: float
    upper: float
    slope_fit: float
    points: list = field(repr=False)
    e_n: np.ndarray = field(repr=False)


def estimate_dimension(points, r: float, tail: float = 0.25) -> DimensionEstimate:
    """e_n = r log n / (-log V_n); lower/upper over the largest ``tail`` fraction of n;
    slope_fit regresses r log n on -log V_n."""
    pts = sorted((int(n), float(v)) for n, v in points)
    if len(pts) < 4:
        raise DegenerateInput("need at least four (n, V) points")
    n = np.array([p[0] for p in pts], dtype=float)
    v = np.array([p[1] for p in pts])
    if np.any(v <= 0):
        raise DegenerateInput("quantization errors must be positive")
    if np.any(v >= 1):
        raise DegenerateInput("errors must lie below 1 for -log V to be positive")
    y = r * np.log(n)
    x = -np.log(v)
    e = y / x
    k = max(1, math.ceil(tail * len(pts)))
    slope = float(np.polyfit(x, y, 1)[0])
    return DimensionEstimate(float(e[-k:].min()), float(e[-k:].max()), slope, pts, e)


def dimension_table_csv(est: DimensionEstimate, s: float, r: float, dest=None) -> str:
    """Rows n;e_n;coef_s with coef_s = n^{r/s} V_n."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=";", lineterminator="\n")
    w.writerow(["n", "e_n", "coef_s"])
    for (n, v), e in zip(est.points, est.e_n):
        w.writerow([n, repr(float(e)), repr(float(n ** (r / s) * v))])
    text = buf.getvalue()
    if dest is not None:
        with open(dest, "w") as fh:
            fh.write(text)
    return text


@dataclass(frozen=True, eq=False)
class CoefficientSeries:
    s: object
    values: list
    phi_subseq: list
    tail_min: float
    tail_max: float
    theil_sen_slope: float


def coefficient_series(points, s, r: float, phi_list=None, tail: float = 0.5) -> CoefficientSeries:
    """n^{r/s} V_n (the r-th power normalization); ``s`` may be one value per point.

    Tail statistics and the Theil-Sen slope of log value against log n are
    taken on the Phi-subsequence when ``phi_list`` is given.
    """
    pts = sorted((int(n), float(v)) for n, v in points)
    n = np.array([p[0] for p in pts], dtype=float)
    v = np.array([p[1] for p in pts])
    if np.any(v <= 0):
        raise DegenerateInput("quantization errors must be positive")
    s_arr = np.broadcast_to(np.asarray(s, dtype=float), n.shape)
    vals = n ** (r / s_arr) * v
    values = list(zip(n.astype(int).tolist(), vals.tolist()))
    if phi_list is not None:
        phis = set(int(p) for p in phi_list)
        sub = [(a, b) for a, b in values if a in phis]
    else:
        sub = values
    arr = np.array([b for _, b in sub])
    k = max(1, math.ceil(tail * arr.size))
    tail_vals = arr[-k:]
    if arr.size >= 2:
        slope = float(theilslopes(np.log(arr), np.log([a for a, _ in sub]))[0])
    else:
        slope = 0.0
    return CoefficientSeries(s, values, sub, float(tail_vals.min()), float(tail_vals.max()), slope)


def quantization_depth(c_max: float, n_max: int, kappa: float, diameter: float = 1.0,
                       factor: float = 1e-2) -> int:
    """Smallest depth with c_max^depth |X| <= factor * n_max^{-1/kappa}."""
    target = factor * n_max ** (-1.0 / kappa) / diameter
    return max(1, math.ceil(math.log(target) / math.log(c_max) - 1e-12))
