"""Path interestingness: rarity, unpopularity and shortness, combined convexly."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kgraph import KnowledgeGraph
from .pathfind import Path
from .stats import CorpusStats, StatsError, centrality

__all__ = [
    "DEFAULT_WEIGHTS",
    "ScoredPath",
    "Weights",
    "combine",
    "format_breakdown",
    "interestingness",
    "rarity",
    "shortness",
    "unpopularity",
]

UNSEEN_TYPE = "unseen-path-type"


@dataclass(frozen=True)
class Weights:
    rarity: float = 0.4
    unpopularity: float = 0.2
    shortness: float = 0.4

    def __post_init__(self) -> None:
        ws = (self.rarity, self.unpopularity, self.shortness)
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise ValueError(f"weights must be finite and non-negative, got {ws}")
        if abs(sum(ws) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {ws} (sum {sum(ws)!r})")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.rarity, self.unpopularity, self.shortness)


DEFAULT_WEIGHTS = Weights()


@dataclass(frozen=True)
class ScoredPath:
    path: Path
    rarity: float
    unpopularity: float
    shortness: float
    interestingness: float
    flags: tuple[str, ...] = ()

    def rank_key(self) -> tuple:
        """Sort key putting the preferred path first.

        Higher interestingness, then higher rarity, then shorter, then path
        type and entity sequence.
        """
        p = self.path
        return (-self.interestingness, -self.rarity, p.length, p.ptype, p.entities)


def rarity(p: Path, stats: CorpusStats) -> float:
    if stats.max_freq <= 0:
        raise StatsError("empty path-type frequency table")
    return 1.0 - stats.frequency(p.ptype) / stats.max_freq


def unpopularity(p: Path, stats: CorpusStats, g: KnowledgeGraph, exclude_endpoints: bool = False) -> float:
    """1 minus the smallest centrality on the path.

    Endpoints count unless ``exclude_endpoints``; a one-hop path has no
    interior, so it falls back to its endpoints.
    """
    ents = p.entities
    if exclude_endpoints and len(ents) > 2:
        ents = ents[1:-1]
    return 1.0 - min(centrality(stats, g, e) for e in ents)


def shortness(p: Path) -> float:
    if p.length < 1:
        raise ValueError("path has no relationships")
    return 1.0 / p.length


def combine(w: Weights, r: float, u: float, s: float) -> float:
    # weights only sum to 1 within 1e-9, so the raw sum may leave [0, 1]
    return min(1.0, max(0.0, w.rarity * r + w.unpopularity * u + w.shortness * s))


def interestingness(p: Path, stats: CorpusStats, g: KnowledgeGraph, w: Weights = DEFAULT_WEIGHTS,
                    exclude_endpoints: bool = False) -> ScoredPath:
    r = rarity(p, stats)
    u = unpopularity(p, stats, g, exclude_endpoints)
    s = shortness(p)
    flags = () if p.ptype in stats.freq else (UNSEEN_TYPE,)
    return ScoredPath(p, r, u, s, combine(w, r, u, s), flags)


def format_breakdown(sp: ScoredPath, w: Weights) -> str:
    lines = [
        f"rarity          {sp.rarity:.6f}  x {w.rarity:g}",
        f"unpopularity    {sp.unpopularity:.6f}  x {w.unpopularity:g}",
        f"shortness       {sp.shortness:.6f}  x {w.shortness:g}",
        f"interestingness {sp.interestingness:.6f}",
        f"path type       {sp.path.ptype}",
    ]
    if sp.flags:
        lines.append(f"flags           {', '.join(sp.flags)}")
    return "\n".join(lines)
