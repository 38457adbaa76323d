"""Command-line interface.

Exit codes: 0 success, 1 error, 2 no segue found.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .config import ConfigError, EngineConfig, load_config
from .ingest import IngestError, build_graph, read_facts, read_items, resolve_item
from .kgraph import ITEM_KEY_SEP, GraphError, KnowledgeGraph, load_snapshot, save_snapshot
from .score import Weights, format_breakdown
from .segue import Segue, TemplateError, fallback_text, find_best_target, find_segue
from .stats import CorpusStats, StatsError, compute_stats, read_stats, write_stats

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_SEGUE = 2

_SPEC_PART = re.compile(r'(\w+):"((?:[^"\\]|\\.)*)"')


class CliError(Exception):
    pass


def resolve_spec(g: KnowledgeGraph, spec: str) -> int:
    """Find the item named by ``spec``.

    ``song:"Name"`` with optional ``artist:"Name"`` and ``album:"Name"``, or
    a raw item key such as ``Faces | Ed Sheeran``.
    """
    parts = dict((k, v.replace('\\"', '"')) for k, v in _SPEC_PART.findall(spec))
    if not parts:
        hits = resolve_item(g, spec)
    else:
        unknown = set(parts) - {"song", "artist", "album"}
        if unknown or "song" not in parts:
            raise CliError(f"bad item spec {spec!r}: expected song:\"...\" [artist:\"...\"] [album:\"...\"]")
        norm = g.registry.normalize
        want = [norm("song", parts["song"]),
                norm("song", parts["artist"]) if "artist" in parts else None,
                norm("song", parts["album"]) if "album" in parts else None]
        hits = []
        for i in g.items:
            fields = g.entity(i).value.split(ITEM_KEY_SEP)
            fields += [""] * (3 - len(fields))
            if all(w is None or w == f for w, f in zip(want, fields)):
                hits.append(i)
    if not hits:
        raise CliError(f"unknown item {spec!r}")
    if len(hits) > 1:
        listing = "; ".join(g.entity(i).value for i in hits)
        raise CliError(f"ambiguous item {spec!r}, candidates: {listing}")
    return hits[0]


def _load_engine(args) -> EngineConfig:
    cfg = load_config(args.config)
    weights = constraints = None
    if args.weights is not None:
        try:
            weights = Weights(*(float(x) for x in args.weights.split(",")))
        except (TypeError, ValueError) as exc:
            raise CliError(f"--weights expects three comma-separated numbers summing to 1: {exc}") from None
    if args.max_length is not None:
        constraints = replace(cfg.constraints, max_length=args.max_length)
    return cfg.with_overrides(seed=getattr(args, "seed", None), weights=weights, constraints=constraints)


def _load_stats(path: str, cfg: EngineConfig) -> CorpusStats:
    with open(path, encoding="utf-8") as fh:
        stats = read_stats(fh)
    if stats.constraints != cfg.constraints:
        raise CliError(
            f"stats in {path} were built with {stats.constraints.describe()}, "
            f"but the configuration uses {cfg.constraints.describe()}; rebuild the stats"
        )
    return stats


def segue_record(g: KnowledgeGraph, i1: int, i2: int, seg: Segue | None) -> dict:
    rec = {"i1": g.entity(i1).value, "i2": g.entity(i2).value}
    if seg is None:
        rec.update(text=None, interestingness=None, rarity=None, unpopularity=None,
                   shortness=None, path_type=None, fallback=None)
        return rec
    sp = seg.scored
    rec.update(text=seg.text, interestingness=sp.interestingness, rarity=sp.rarity,
               unpopularity=sp.unpopularity, shortness=sp.shortness,
               path_type=sp.path.ptype, fallback=seg.fallback)
    return rec


def cmd_build(args) -> int:
    cfg = _load_engine(args)
    items = read_items(args.items)
    facts = [f for path in args.facts for f in read_facts(path)]
    g, report = build_graph(items, facts, cfg.resources(), cfg.registry())
    save_snapshot(g, args.output)
    text = report.to_text()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.export:
        with open(args.export, "w", encoding="utf-8", newline="\n") as fh:
            g.export_triples(fh)
    return EXIT_OK


def cmd_stats(args) -> int:
    cfg = _load_engine(args)
    if args.all_pairs:
        cfg = cfg.with_overrides(pairs="all")
    elif args.sample is not None:
        cfg = cfg.with_overrides(pairs="sample", n_pairs=args.sample)
    g = load_snapshot(args.snapshot)
    stats = compute_stats(g, cfg.constraints, cfg.pair_sample(len(g.items)))
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        write_stats(stats, fh)
    return EXIT_OK


def _print_segue(g: KnowledgeGraph, seg: Segue, cfg: EngineConfig, explain: bool) -> None:
    print(seg.text)
    if explain:
        print(f"path            {fallback_text(g, seg.path)}")
        print(format_breakdown(seg.scored, cfg.weights))
        if seg.fallback:
            print("template        (none; fallback rendering)")


def cmd_segue(args, explain: bool = False) -> int:
    cfg = _load_engine(args)
    g = load_snapshot(args.snapshot)
    stats = _load_stats(args.stats, cfg)
    templates = cfg.templates()
    src = resolve_spec(g, args.source)
    kw = dict(c=cfg.constraints, stats=stats, w=cfg.weights, templates=templates,
              exclude_endpoints=cfg.exclude_endpoints)
    if getattr(args, "candidates", None):
        specs = [ln for ln in Path(args.candidates).read_text(encoding="utf-8").splitlines() if ln.strip()]
        cands = [resolve_spec(g, s) for s in specs]
        if not cands:
            raise CliError(f"no candidates in {args.candidates}")
        if src in cands:
            raise CliError("the --from item is also a candidate")
        hit = find_best_target(g, src, cands, **kw)
        if hit is None:
            print("no segue found")
            return EXIT_NO_SEGUE
        target, seg = hit
        print(f"to: {g.entity(target).value}")
    else:
        if not args.target:
            raise CliError("give --to or --candidates")
        target = resolve_spec(g, args.target)
        if target == src:
            raise CliError("--from and --to name the same item")
        seg = find_segue(g, src, target, **kw)
        if seg is None:
            print("no segue found")
            return EXIT_NO_SEGUE
    _print_segue(g, seg, cfg, explain or args.explain)
    return EXIT_OK


def cmd_explain(args) -> int:
    return cmd_segue(args, explain=True)


def cmd_batch(args) -> int:
    """Segues for each ``from<TAB>to`` line of the pairs file, as JSON lines."""
    cfg = _load_engine(args)
    g = load_snapshot(args.snapshot)
    stats = _load_stats(args.stats, cfg)
    templates = cfg.templates()
    out = open(args.output, "w", encoding="utf-8", newline="\n") if args.output else sys.stdout
    try:
        with open(args.pairs, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip() or line.startswith("#"):
                    continue
                cols = line.rstrip("\n").split("\t")
                if len(cols) != 2:
                    raise CliError(f"{args.pairs}:{lineno}: expected 'from<TAB>to'")
                try:
                    i1, i2 = resolve_spec(g, cols[0]), resolve_spec(g, cols[1])
                except CliError as exc:
                    raise CliError(f"{args.pairs}:{lineno}: {exc}") from None
                seg = find_segue(g, i1, i2, cfg.constraints, stats, cfg.weights, templates,
                                 cfg.exclude_endpoints)
                out.write(json.dumps(segue_record(g, i1, i2, seg), ensure_ascii=False) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgsegue", description="Interesting item-to-item segues from a knowledge graph.")
    parser.add_argument("--config", help="engine configuration file (INI)")
    parser.add_argument("--weights", metavar="R,U,S", help="override rarity,unpopularity,shortness weights")
    parser.add_argument("--max-length", type=int, metavar="N", help="override the path length bound")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a graph snapshot from items and fact files")
    p.add_argument("items", help="items file (.csv or .jsonl)")
    p.add_argument("--facts", action="append", default=[], help="fact file (repeatable)")
    p.add_argument("-o", "--output", required=True, help="snapshot destination")
    p.add_argument("--report", help="write the build report here instead of stdout")
    p.add_argument("--export", help="also write a tab-separated triple export")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("stats", help="compute path-type statistics for a snapshot")
    p.add_argument("snapshot")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--all-pairs", action="store_true", help="enumerate every item pair")
    grp.add_argument("--sample", type=int, metavar="N", help="sample N item pairs")
    p.set_defaults(func=cmd_stats)

    for name, func, helptext in (("segue", cmd_segue, "find the best segue from one item"),
                                 ("explain", cmd_explain, "segue plus its score breakdown")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("snapshot")
        p.add_argument("stats")
        p.add_argument("--from", dest="source", required=True, help='e.g. song:"Faces" artist:"Ed Sheeran"')
        tgt = p.add_mutually_exclusive_group(required=True)
        tgt.add_argument("--to", dest="target")
        tgt.add_argument("--candidates", help="file with one item spec per line")
        p.add_argument("--explain", action="store_true", default=name == "explain")
        p.set_defaults(func=func)

    p = sub.add_parser("batch", help="segues for a file of item pairs, as JSON lines")
    p.add_argument("snapshot")
    p.add_argument("stats")
    p.add_argument("pairs", help="tab-separated 'from<TAB>to' item specs")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ConfigError, GraphError, IngestError, StatsError, TemplateError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
