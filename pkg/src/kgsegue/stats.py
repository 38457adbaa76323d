"""Corpus statistics: path-type frequencies and per-type edge-set medians."""

from __future__ import annotations

import random
import statistics
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import IO, Mapping

from .kgraph import GraphError, KnowledgeGraph
from .pathfind import PathConstraints, find_paths, iter_paths_from

__all__ = [
    "CorpusStats",
    "PairSample",
    "StatsError",
    "centrality",
    "compute_stats",
    "median_edgeset",
    "read_stats",
    "write_stats",
]

DEFAULT_SAMPLE_THRESHOLD = 500
DEFAULT_SAMPLE_PAIRS = 5000


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class PairSample:
    """Which ordered item pairs feed the frequency table.

    ``mode`` is ``"all"`` or ``"sample"``. Sampling draws ``n_pairs``
    unordered pairs with ``seed`` and counts both orientations of each, so
    the table stays symmetric under path reversal.
    """

    mode: str = "all"
    n_pairs: int = DEFAULT_SAMPLE_PAIRS
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("all", "sample"):
            raise ValueError(f"unknown pair sampling mode {self.mode!r}")
        if self.mode == "sample":
            if self.seed is None:
                raise ValueError("pair sampling needs a seed")
            if self.n_pairs < 1:
                raise ValueError("n_pairs must be >= 1")

    @classmethod
    def auto(cls, n_items: int, seed: int = 0, threshold: int = DEFAULT_SAMPLE_THRESHOLD,
             n_pairs: int = DEFAULT_SAMPLE_PAIRS) -> "PairSample":
        if n_items > threshold:
            return cls("sample", n_pairs, seed)
        return cls("all")

    def describe(self) -> str:
        if self.mode == "all":
            return "pairs=all"
        return f"pairs=sample n_pairs={self.n_pairs} seed={self.seed}"


@dataclass(frozen=True)
class CorpusStats:
    freq: Mapping[str, int]
    medians: Mapping[str, float]
    constraints: PathConstraints
    sample: PairSample
    max_freq: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "max_freq", max(self.freq.values(), default=0))

    def frequency(self, ptype: str) -> int:
        return self.freq.get(ptype, 0)

    @property
    def provenance(self) -> str:
        return f"{self.constraints.describe()} {self.sample.describe()}"


def _type_medians(g: KnowledgeGraph) -> dict[str, float]:
    sizes: dict[str, list[int]] = {}
    for e in g.entities:
        sizes.setdefault(e.etype, []).append(g.edgeset_size(e.id))
    return {t: float(statistics.median(v)) for t, v in sorted(sizes.items())}


def _sample_pairs(items: tuple[int, ...], sample: PairSample) -> list[tuple[int, int]]:
    rng = random.Random(sample.seed)
    n = len(items)
    total = n * (n - 1) // 2
    if sample.n_pairs >= total:
        return list(combinations(items, 2))
    picked = sorted(rng.sample(range(total), sample.n_pairs))
    # decode a flat index into the (i, j) pair with i < j, row by row
    pairs = []
    row, start = 0, 0
    for k in picked:
        while k >= start + (n - 1 - row):
            start += n - 1 - row
            row += 1
        pairs.append((items[row], items[row + 1 + k - start]))
    return pairs


def compute_stats(g: KnowledgeGraph, c: PathConstraints | None = None,
                  sample: PairSample | None = None) -> CorpusStats:
    c = c or PathConstraints()
    sample = sample or PairSample()
    if not g.frozen:
        raise GraphError("graph must be frozen")
    items = g.items
    if not items:
        raise StatsError("no items in graph")
    freq: Counter[str] = Counter()
    if sample.mode == "all":
        for src in items:
            for _, ptype in iter_paths_from(g, src, c):
                freq[ptype] += 1
    else:
        pairs = _sample_pairs(items, sample)
        if not pairs:
            raise StatsError("empty pair sample")
        for a, b in pairs:
            for p in find_paths(g, a, b, c):
                freq[p.ptype] += 1
                freq[p.reversed(g).ptype] += 1
    return CorpusStats(dict(sorted(freq.items())), _type_medians(g), c, sample)


def median_edgeset(stats: CorpusStats, etype: str) -> float:
    try:
        return stats.medians[etype]
    except KeyError:
        raise StatsError(f"no median for entity type {etype!r}") from None


def centrality(stats: CorpusStats, g: KnowledgeGraph, eid: int) -> float:
    """``min(1, |edgeset(e)| / median |edgeset| of e's type)``.

    A zero median only arises when most entities of a type are isolated
    items; the ratio is then unbounded for connected entities and clamps to 1.
    """
    size = g.edgeset_size(eid)
    med = median_edgeset(stats, g.entity(eid).etype)
    if med == 0:
        return 1.0 if size > 0 else 0.0
    return min(1.0, size / med)


def write_stats(stats: CorpusStats, fh: IO[str]) -> None:
    fh.write(f"# {stats.provenance}\n")
    fh.write("[path_types]\n")
    for ptype, n in stats.freq.items():
        fh.write(f"{ptype}\t{n}\n")
    fh.write("[medians]\n")
    for etype, m in stats.medians.items():
        fh.write(f"{etype}\t{m!r}\n")


def _parse_bool(s: str) -> bool:
    if s not in ("true", "false"):
        raise StatsError(f"bad boolean {s!r}")
    return s == "true"


def read_stats(fh: IO[str]) -> CorpusStats:
    header = fh.readline()
    if not header.startswith("# "):
        raise StatsError("stats file lacks provenance header")
    conf = dict(tok.split("=", 1) for tok in header[2:].split())
    try:
        c = PathConstraints(int(conf["max_length"]), _parse_bool(conf["forbid_intermediate_items"]))
        if conf["pairs"] == "all":
            sample = PairSample()
        else:
            sample = PairSample("sample", int(conf["n_pairs"]), int(conf["seed"]))
    except (KeyError, ValueError) as exc:
        raise StatsError(f"bad provenance header: {exc}") from None
    freq: dict[str, int] = {}
    medians: dict[str, float] = {}
    section = None
    for lineno, raw in enumerate(fh, 2):
        line = raw.rstrip("\n")
        if line in ("[path_types]", "[medians]"):
            section = line
            continue
        if not line:
            continue
        try:
            key, val = line.split("\t")
            if section == "[path_types]":
                freq[key] = int(val)
            elif section == "[medians]":
                medians[key] = float(val)
            else:
                raise ValueError("row outside a section")
        except ValueError as exc:
            raise StatsError(f"stats line {lineno}: {exc}") from None
    return CorpusStats(freq, medians, c, sample)
