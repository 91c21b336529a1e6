"""Degree-count vectors and the readers that produce them.

Edge lists are read in the KONECT whitespace format (``%`` or ``#`` comment
lines, optional weight/timestamp columns).  Degree counts are stored sparsely
as ``{degree: number of vertices}``.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, TextIO

import numpy as np

from .errors import InputError

__all__ = [
    "DegreeCounts",
    "DIRECTED_IN",
    "UNDIRECTED_TOTAL",
    "parse_edge_list",
    "load_counts",
    "write_counts",
    "truncate",
]

DIRECTED_IN = "directed-in"
UNDIRECTED_TOTAL = "undirected-total"
MODES = (DIRECTED_IN, UNDIRECTED_TOTAL)


@dataclass(frozen=True)
class DegreeCounts:
    """Sparse degree distribution ``{k: n_k}`` with a truncation level ``l``.

    Degrees below ``l`` stay in ``counts`` but are excluded from
    :attr:`modeled`, which is what the likelihood sees.
    """

    counts: dict[int, int]
    l: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        clean = {}
        for k, n in self.counts.items():
            k, n = int(k), int(n)
            if k < 0 or n < 0:
                raise InputError(f"degrees and counts must be nonnegative, got {k}: {n}")
            clean[k] = n
        object.__setattr__(self, "counts", dict(sorted(clean.items())))
        if self.l < 0:
            raise InputError("truncation level must be nonnegative")
        if self.total_vertices == 0:
            raise InputError("degree counts are empty")

    @property
    def M(self) -> int:
        return max(k for k, n in self.counts.items() if n > 0)

    @property
    def total_vertices(self) -> int:
        return sum(self.counts.values())

    @property
    def modeled(self) -> dict[int, int]:
        return {k: n for k, n in self.counts.items() if k >= self.l and n > 0}

    @property
    def modeled_vertices(self) -> int:
        return sum(self.modeled.values())

    @property
    def excluded_vertices(self) -> int:
        return self.total_vertices - self.modeled_vertices

    def arrays(self, modeled_only: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """``(degrees, counts)`` as int arrays, zero counts dropped."""
        src = self.modeled if modeled_only else {k: n for k, n in self.counts.items() if n > 0}
        ks = np.fromiter(src.keys(), dtype=np.int64, count=len(src))
        ns = np.fromiter(src.values(), dtype=np.int64, count=len(src))
        return ks, ns

    def summary(self) -> dict:
        return {
            "l": self.l,
            "max_degree": self.M,
            "total_vertices": self.total_vertices,
            "modeled_vertices": self.modeled_vertices,
            "excluded_vertices": self.excluded_vertices,
            "distinct_degrees": len(self.counts),
        }


def _edge_tokens(stream: Iterable[str]):
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "%#":
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise InputError(f"line {lineno}: expected at least two vertex ids, got {line!r}")
        yield tokens[0], tokens[1]


def parse_edge_list(stream: Iterable[str] | str, mode: str = UNDIRECTED_TOTAL) -> DegreeCounts:
    """Count degrees from a whitespace-separated edge list.

    ``directed-in`` uses in-degree (sources that are never targets get degree
    0); ``undirected-total`` counts incident edge ends, so a self-loop adds 2.
    Multi-edges count with multiplicity.
    """
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}, got {mode!r}")
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    degree: Counter = Counter()
    n_edges = 0
    for src, dst in _edge_tokens(stream):
        n_edges += 1
        if mode == DIRECTED_IN:
            degree[src] += 0
            degree[dst] += 1
        else:
            degree[src] += 1
            degree[dst] += 1
    if n_edges == 0:
        raise InputError("edge list contains no edges")
    counts = Counter(degree.values())
    meta = {"mode": mode, "edges": n_edges, "vertices": len(degree)}
    return DegreeCounts(dict(counts), meta=meta)


def load_counts(stream: TextIO | str) -> DegreeCounts:
    """Read a ``degree,count`` CSV with a header row."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header[:2]] != ["degree", "count"]:
        raise InputError("degree-count CSV must start with the header 'degree,count'")
    counts: dict[int, int] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise InputError(f"line {lineno}: expected 2 columns, got {len(row)}")
        try:
            k, n = int(row[0]), int(row[1])
        except ValueError:
            raise InputError(f"line {lineno}: non-integer entry {row!r}") from None
        if k < 0 or n < 0:
            raise InputError(f"line {lineno}: negative value {row!r}")
        if k in counts:
            raise InputError(f"line {lineno}: duplicate degree {k}")
        counts[k] = n
    if not counts:
        raise InputError("degree-count CSV has no rows")
    return DegreeCounts(counts)


def write_counts(d: DegreeCounts, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["degree", "count"])
    for k, n in d.counts.items():
        writer.writerow([k, n])


def truncate(d: DegreeCounts, l: int) -> DegreeCounts:
    if l < 0:
        raise InputError("truncation level must be nonnegative")
    if l > d.M:
        raise InputError(f"truncation level {l} exceeds the maximum degree {d.M}")
    return replace(d, l=int(l))
