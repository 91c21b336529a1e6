"""Generalized preferential attachment growth.

Every vertex of in-degree ``k`` has attachment weight ``b(k)``, so a target is
drawn by first choosing a degree class with probability
``count(k) b(k) / W`` from a Fenwick tree over degrees, then a uniform member
of that class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .degrees import DegreeCounts
from .errors import InputError
from .pref import PrefParams, pref_values

__all__ = [
    "FenwickSampler",
    "GrowthState",
    "simulate",
    "simulate_edge_list",
    "empirical_survival",
    "empirical_survival_at",
]

REBUILD_EVERY = 1 << 14
MAX_EDGE_LIST_VERTICES = 10_000


class FenwickSampler:
    """Binary indexed tree of nonnegative float weights with prefix search."""

    def __init__(self, weights):
        self._size = 1
        weights = np.asarray(weights, dtype=float)
        while self._size < len(weights):
            self._size *= 2
        self._build(weights)

    def _build(self, weights):
        size = self._size
        tree = [0.0] * (size + 1)
        w = [0.0] * size
        w[: len(weights)] = [float(x) for x in weights]
        for i in range(1, size + 1):
            tree[i] += w[i - 1]
            j = i + (i & -i)
            if j <= size:
                tree[j] += tree[i]
        self._tree = tree
        self._weights = w
        self.total = math.fsum(w)

    def __len__(self):
        return self._size

    def __getitem__(self, i):
        return self._weights[i]

    def grow(self, new_size):
        if new_size <= self._size:
            return
        w = self._weights
        while self._size < new_size:
            self._size *= 2
        self._build(w)

    def rebuild(self):
        self._build(self._weights)

    def add(self, i, delta):
        self._weights[i] += delta
        self.total += delta
        tree = self._tree
        size = self._size
        i += 1
        while i <= size:
            tree[i] += delta
            i += i & -i

    def find(self, target):
        """Smallest index whose inclusive prefix sum exceeds ``target``."""
        tree = self._tree
        pos = 0
        step = self._size
        while step:
            nxt = pos + step
            if nxt <= self._size and tree[nxt] <= target:
                pos = nxt
                target -= tree[nxt]
            step >>= 1
        return pos

    def sample(self, u):
        return self.find(u * self.total)


@dataclass
class GrowthState:
    params: PrefParams
    m: int
    degree_buckets: list[list[int]]
    position: list[int]
    vertex_degrees: list[int]
    class_weights: FenwickSampler
    b: list[float]
    t: int = 0

    @classmethod
    def initial(cls, p: PrefParams, m: int, capacity: int = 64) -> "GrowthState":
        b = pref_values(p, np.arange(capacity)).tolist()
        weights = np.zeros(capacity)
        weights[0] = m * b[0]
        return cls(
            params=p,
            m=m,
            degree_buckets=[list(range(m))],
            position=list(range(m)),
            vertex_degrees=[0] * m,
            class_weights=FenwickSampler(weights),
            b=b,
        )

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_degrees)

    @property
    def total_weight(self) -> float:
        return self.class_weights.total

    def count(self, k: int) -> int:
        return len(self.degree_buckets[k]) if k < len(self.degree_buckets) else 0

    def degree_counts(self) -> dict[int, int]:
        return {k: len(v) for k, v in enumerate(self.degree_buckets) if v}

    def _ensure_degree(self, k: int) -> None:
        if k >= len(self.b):
            new = max(2 * len(self.b), k + 1)
            self.b = pref_values(self.params, np.arange(new)).tolist()
            self.class_weights.grow(new)
        while len(self.degree_buckets) <= k:
            self.degree_buckets.append([])

    def target_probabilities(self) -> np.ndarray:
        """Per-vertex probability of being the next target, by direct enumeration."""
        w = np.array([self.b[d] for d in self.vertex_degrees])
        return w / w.sum()

    def draw_target(self, u_class: float, u_member: float) -> int:
        counts_ok = False
        while not counts_ok:
            k = self.class_weights.sample(u_class)
            bucket = self.degree_buckets[k] if k < len(self.degree_buckets) else ()
            counts_ok = len(bucket) > 0
            if not counts_ok:
                # rounding landed on an empty class; perturb deterministically
                u_class = (u_class + 0.6180339887498949) % 1.0
        return bucket[int(u_member * len(bucket))]

    def _move_up(self, v: int) -> None:
        d = self.vertex_degrees[v]
        self._ensure_degree(d + 1)
        bucket = self.degree_buckets[d]
        i = self.position[v]
        last = bucket.pop()
        if last != v:
            bucket[i] = last
            self.position[last] = i
        up = self.degree_buckets[d + 1]
        self.position[v] = len(up)
        up.append(v)
        self.vertex_degrees[v] = d + 1
        self.class_weights.add(d, -self.b[d])
        self.class_weights.add(d + 1, self.b[d + 1])

    def step(self, uniforms) -> list[int]:
        """Add one vertex with ``m`` edges; ``uniforms`` holds ``2 m`` floats in [0, 1)."""
        targets = [self.draw_target(uniforms[2 * j], uniforms[2 * j + 1]) for j in range(self.m)]
        for v in targets:
            self._move_up(v)
        v_new = len(self.vertex_degrees)
        self.vertex_degrees.append(0)
        self.position.append(len(self.degree_buckets[0]))
        self.degree_buckets[0].append(v_new)
        self.class_weights.add(0, self.b[0])
        self.t += 1
        if self.t % REBUILD_EVERY == 0:
            self.resync()
        return targets

    def resync(self) -> None:
        """Recompute class weights from the exact bucket sizes."""
        fw = self.class_weights
        for k in range(len(fw)):
            fw._weights[k] = self.count(k) * self.b[k] if k < len(self.b) else 0.0
        fw.rebuild()


def _grow(p: PrefParams, n_vertices: int, m: int, seed: int, batch: int, on_step=None) -> GrowthState:
    if m < 1:
        raise InputError("m must be >= 1")
    if n_vertices <= m:
        raise InputError("n_vertices must exceed m")
    rng = np.random.default_rng(seed)
    state = GrowthState.initial(p, m)
    steps = n_vertices - m
    per_step = 2 * m
    done = 0
    while done < steps:
        chunk = min(batch, steps - done)
        u = rng.random(chunk * per_step).tolist()
        step = state.step
        for j in range(chunk):
            targets = step(u[j * per_step:(j + 1) * per_step])
            if on_step is not None:
                on_step(state.n_vertices - 1, targets)
        done += chunk
    return state


def simulate(p: PrefParams, n_vertices: int, m: int = 1, seed: int = 0,
             batch: int = 8192) -> DegreeCounts:
    """Grow a GPA network to ``n_vertices`` and return its in-degree counts."""
    state = _grow(p, n_vertices, m, seed, batch)
    meta = {"params": p.to_dict(), "n_vertices": n_vertices, "m": m, "seed": seed, "rng": "numpy PCG64"}
    return DegreeCounts(state.degree_counts(), meta=meta)


def simulate_edge_list(p: PrefParams, n_vertices: int, m: int = 1, seed: int = 0) -> list[tuple[int, int]]:
    """Same growth as :func:`simulate` but keeps ``(source, target)`` edges.

    Limited to small networks; degree counts are all large runs need.
    """
    if n_vertices > MAX_EDGE_LIST_VERTICES:
        raise InputError(f"edge lists are only kept for n_vertices <= {MAX_EDGE_LIST_VERTICES}")
    edges: list[tuple[int, int]] = []
    _grow(p, n_vertices, m, seed, 8192, lambda src, targets: edges.extend((src, t) for t in targets))
    return edges


def empirical_survival(counts: DegreeCounts) -> dict[int, float]:
    """``F(k) = #{vertices with degree > k} / N`` at every observed degree, plus ``F(-1) = 1``."""
    items = [(k, n) for k, n in counts.counts.items()]
    total = sum(n for _, n in items)
    if total == 0:
        raise InputError("empty degree counts")
    out = {-1: 1.0}
    above = total
    for k, n in items:
        above -= n
        out[k] = above / total
    return out


def empirical_survival_at(counts: DegreeCounts, ks, conditional_on: int | None = None) -> np.ndarray:
    """Step-function empirical survival at arbitrary degrees ``k >= -1``.

    With ``conditional_on=l`` only vertices of degree ``>= l`` are counted.
    """
    deg, n = counts.arrays(modeled_only=False)
    if conditional_on is not None:
        keep = deg >= conditional_on
        deg, n = deg[keep], n[keep]
    total = n.sum()
    if total == 0:
        raise InputError("empty degree counts")
    above = total - np.concatenate([[0], np.cumsum(n)])
    idx = np.searchsorted(deg, np.asarray(ks), side="right")
    return above[idx] / total
