"""Acceptance suite: one test group per criterion, tagged with its number.

The terminal summary (see conftest.py) prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from kgsegue import cli
from kgsegue.config import EngineConfig, data_path
from kgsegue.ingest import build_graph, read_facts, read_items
from kgsegue.lexify import porter_stem
from kgsegue.pathfind import PathConstraints, find_paths
from kgsegue.score import Weights, combine, interestingness
from kgsegue.segue import find_segue
from kgsegue.stats import compute_stats

from oracles import (
    duplicate_graph,
    oracle_best,
    oracle_centrality,
    oracle_freq,
    oracle_paths,
    oracle_scores,
    random_graph,
)

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
DEMO = data_path("demo")
N_GRAPHS = 200
TOL = 1e-12


def _ordered_item_pairs(g):
    return [(a, b) for a in g.items for b in g.items if a != b]


# -- 1 ---------------------------------------------------------------------

@pytest.mark.acceptance(1)
@pytest.mark.parametrize("w", [(0.4, 0.2, 0.4), (1.0, 0.0, 0.0), (0.0, 0.0, 1.0), (0.1, 0.7, 0.2)])
def test_ac1_formulas_and_selection_match_oracle(w):
    t0 = time.perf_counter()
    c = PathConstraints()
    weights = Weights(*w)
    checked_paths = selections = 0
    for seed in range(N_GRAPHS):
        g = random_graph(seed)
        stats = compute_stats(g, c)
        freq = oracle_freq(g, c.max_length, c.forbid_intermediate_items)
        cent = oracle_centrality(g)
        for a, b in _ordered_item_pairs(g):
            for p in find_paths(g, a, b, c):
                sp = interestingness(p, stats, g, weights)
                r, u, s, i = oracle_scores(g, p.entities, p.hops, freq, cent, w)
                assert abs(sp.rarity - r) <= TOL
                assert abs(sp.unpopularity - u) <= TOL
                assert abs(sp.shortness - s) <= TOL
                assert abs(sp.interestingness - i) <= TOL
                checked_paths += 1
            want = oracle_best(g, a, b, c.max_length, c.forbid_intermediate_items, freq, cent, w)
            got = find_segue(g, a, b, c, stats, weights)
            if want is None:
                assert got is None
            else:
                assert got is not None, (seed, a, b)
                assert (got.path.entities, got.path.hops) == (want[0], want[1]), (seed, a, b)
                selections += 1
    assert checked_paths > 1000 and selections > 100
    assert time.perf_counter() - t0 < 10.0


# -- 2 ---------------------------------------------------------------------

@pytest.mark.acceptance(2)
@pytest.mark.parametrize("forbid", [True, False])
@pytest.mark.parametrize("max_length", [2, 3, 4, 6])
def test_ac2_enumeration_equals_oracle(max_length, forbid):
    c = PathConstraints(max_length, forbid)
    nonempty = 0
    for seed in range(N_GRAPHS):
        g = random_graph(seed)
        for a, b in _ordered_item_pairs(g):
            got = {(p.entities, p.hops) for p in find_paths(g, a, b, c)}
            assert got == oracle_paths(g, a, b, max_length, forbid), (seed, a, b)
            nonempty += bool(got)
    assert nonempty > 0


# -- 3 ---------------------------------------------------------------------

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def weights(draw):
    a = draw(st.integers(0, 1000))
    b = draw(st.integers(0, 1000 - a))
    return Weights(a / 1000, b / 1000, (1000 - a - b) / 1000)


@pytest.mark.acceptance(3)
def test_ac3_bounds_and_monotonicity():
    calls = 0

    @settings(max_examples=10_000, deadline=None, database=None,
              suppress_health_check=[HealthCheck.too_slow])
    @given(weights(), unit, unit, unit, st.integers(0, 2), unit)
    def prop(w, r, u, s, which, bumped):
        nonlocal calls
        calls += 1
        base = combine(w, r, u, s)
        assert 0.0 <= base <= 1.0
        comps = [r, u, s]
        comps[which] = max(comps[which], bumped)
        higher = combine(w, *comps)
        assert 0.0 <= higher <= 1.0
        assert higher >= base

    prop()
    assert calls >= 10_000


@pytest.mark.acceptance(3)
@settings(max_examples=300, deadline=None, database=None)
@given(st.integers(0, 10**6), weights())
def test_ac3_component_ranges_on_graphs(seed, w):
    g = random_graph(seed)
    c = PathConstraints()
    stats = compute_stats(g, c)
    for a, b in _ordered_item_pairs(g):
        for p in find_paths(g, a, b, c):
            sp = interestingness(p, stats, g, w)
            assert 0.0 <= sp.rarity <= 1.0
            assert 0.0 <= sp.unpopularity <= 1.0
            assert 0.0 < sp.shortness <= 1.0
            assert 0.0 <= sp.interestingness <= 1.0


# -- 4 ---------------------------------------------------------------------

@pytest.mark.acceptance(4)
def test_ac4_duplication_invariance():
    c = PathConstraints()
    compared = 0
    for seed in range(50):
        g = random_graph(1000 + seed)
        d = duplicate_graph(g)
        sg, sd = compute_stats(g, c), compute_stats(d, c)
        assert {t: 2 * n for t, n in sg.freq.items()} == dict(sd.freq)
        assert sd.medians == sg.medians
        for a, b in _ordered_item_pairs(g):
            va, vb = g.entity(a), g.entity(b)
            da, db = d.find(va.etype, va.value), d.find(vb.etype, vb.value)
            single = sorted((interestingness(p, sg, g) for p in find_paths(g, a, b, c)),
                            key=lambda sp: [g.entity(e).value for e in sp.path.entities] + [sp.path.ptype])
            double = sorted((interestingness(p, sd, d) for p in find_paths(d, da, db, c)),
                            key=lambda sp: [d.entity(e).value for e in sp.path.entities] + [sp.path.ptype])
            assert len(single) == len(double)
            for x, y in zip(single, double):
                assert x.path.ptype == y.path.ptype
                for field in ("rarity", "unpopularity", "shortness", "interestingness"):
                    assert abs(getattr(x, field) - getattr(y, field)) <= TOL
                compared += 1
    assert compared > 0


# -- 5 ---------------------------------------------------------------------

def _run_pipeline(workdir: Path, extra: list[str] = ()) -> dict[str, Path]:
    workdir.mkdir(parents=True, exist_ok=True)
    out = {
        "snapshot": workdir / "demo.kgs",
        "report": workdir / "report.txt",
        "stats": workdir / "stats.tsv",
        "batch": workdir / "batch.jsonl",
    }
    base = ["--config", str(DEMO / "engine.ini"), *extra]
    assert cli.main([*base, "build", str(DEMO / "items.csv"), "--facts", str(DEMO / "facts.tsv"),
                     "-o", str(out["snapshot"]), "--report", str(out["report"])]) == 0
    assert cli.main([*base, "stats", str(out["snapshot"]), "-o", str(out["stats"])]) == 0
    assert cli.main([*base, "batch", str(out["snapshot"]), str(out["stats"]),
                     str(DEMO / "pairs.tsv"), "-o", str(out["batch"])]) == 0
    return out


@pytest.mark.acceptance(5)
def test_ac5_demo_batch_matches_golden(tmp_path):
    out = _run_pipeline(tmp_path)
    assert out["batch"].read_bytes() == (GOLDEN / "demo_batch.jsonl").read_bytes()
    assert out["stats"].read_bytes() == (GOLDEN / "demo_stats.tsv").read_bytes()
    assert out["report"].read_bytes() == (GOLDEN / "demo_report.txt").read_bytes()


@pytest.fixture(scope="module")
def demo():
    cfg = EngineConfig()
    g, _ = build_graph(read_items(DEMO / "items.csv"), read_facts(DEMO / "facts.tsv"),
                       cfg.resources(), cfg.registry())
    stats = compute_stats(g, cfg.constraints, cfg.pair_sample(len(g.items)))
    return g, stats, cfg.templates()


WITNESS = ('song:"Dance Me to the End of Love"', 'song:"Dancing in the Dark"')


@pytest.mark.acceptance(5)
def test_ac5_weight_witness(demo):
    g, stats, templates = demo
    a, b = (cli.resolve_spec(g, s) for s in WITNESS)
    c = PathConstraints()
    default = find_segue(g, a, b, c, stats, Weights(0.4, 0.2, 0.4), templates)
    rare = find_segue(g, a, b, c, stats, Weights(1, 0, 0), templates)
    short = find_segue(g, a, b, c, stats, Weights(0, 0, 1), templates)
    assert default.path.entities != rare.path.entities
    assert rare.path.entities != short.path.entities
    assert default.path.ptype == "song|released_in|year|~released_in|song"
    assert rare.path.ptype == "song|title_word|word|has_stem|stem|~has_stem|word|~title_word|song"


# -- 6 ---------------------------------------------------------------------

@pytest.mark.acceptance(6)
def test_ac6_porter_reference_vocabulary():
    words = (HERE / "data" / "porter" / "voc.txt").read_text(encoding="ascii").split()
    stems = (HERE / "data" / "porter" / "output.txt").read_text(encoding="ascii").split()
    assert len(words) == len(stems) > 23_000
    t0 = time.perf_counter()
    got = [porter_stem(w) for w in words]
    elapsed = time.perf_counter() - t0
    mismatches = [(w, g, e) for w, g, e in zip(words, got, stems) if g != e]
    assert mismatches == []
    assert elapsed < 1.0


# -- 7 ---------------------------------------------------------------------

@pytest.mark.acceptance(7)
def test_ac7_pipeline_is_deterministic(tmp_path):
    t0 = time.perf_counter()
    first = _run_pipeline(tmp_path / "run1")
    second = _run_pipeline(tmp_path / "run2")
    elapsed = time.perf_counter() - t0
    for name in ("snapshot", "stats", "batch", "report"):
        assert first[name].read_bytes() == second[name].read_bytes(), name
    n_pairs = sum(1 for ln in (DEMO / "pairs.tsv").read_text(encoding="utf-8").splitlines()
                  if ln.strip() and not ln.startswith("#"))
    assert n_pairs == 100
    assert len(first["batch"].read_text(encoding="utf-8").splitlines()) == 100
    assert elapsed < 60.0


# -- 8 ---------------------------------------------------------------------

WORDPLAY_NODES = ("|stem|", "|phonetic|")
FACT_RELS = ("has_genre", "member_of", "based_in", "born_in", "won", "signed_to",
             "toured_with", "collaborated_with", "plays")


@pytest.mark.acceptance(8)
def test_ac8_wordplay_and_factual_segues(tmp_path):
    out = _run_pipeline(tmp_path)
    types = [json.loads(ln)["path_type"] for ln in out["batch"].read_text(encoding="utf-8").splitlines()]
    types = [t for t in types if t]
    wordplay = [t for t in types if any(n in t for n in WORDPLAY_NODES)]
    factual = [t for t in types
               if "|artist|" in t and any(r in t.split("|") or "~" + r in t.split("|") for r in FACT_RELS)]
    assert wordplay, types
    assert factual, types
