import json
import subprocess
import sys
from pathlib import Path

import pytest

from kgsegue import cli
from kgsegue.config import ConfigError, data_path, load_config
from kgsegue.kgraph import save_snapshot

from test_stats import tiny_graph

DEMO = data_path("demo")
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    d = tmp_path_factory.mktemp("demo")
    snap, stats = d / "demo.kgs", d / "stats.tsv"
    assert cli.main(["build", str(DEMO / "items.csv"), "--facts", str(DEMO / "facts.tsv"),
                     "-o", str(snap), "--report", str(d / "report.txt"), "--export", str(d / "triples.tsv")]) == 0
    assert cli.main(["stats", str(snap), "-o", str(stats)]) == 0
    return d, snap, stats


def golden_records():
    return [json.loads(ln) for ln in (GOLDEN / "demo_batch.jsonl").read_text(encoding="utf-8").splitlines()]


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_build_report_lists_type_counts(built):
    d, _, _ = built
    report = (d / "report.txt").read_text(encoding="utf-8")
    assert report == (GOLDEN / "demo_report.txt").read_text(encoding="utf-8")
    assert "[entities]" in report and "\nsong\t53\n" in report
    first = (d / "triples.tsv").read_text(encoding="utf-8").splitlines()[0]
    assert len(first.split("\t")) == 5


def test_build_report_to_stdout(tmp_path, capsys):
    code, out, _ = run(capsys, "build", DEMO / "items.csv", "-o", tmp_path / "g.kgs")
    assert code == 0 and out.startswith("records\t53\n")


def test_missing_items_file(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    code, _, err = run(capsys, "build", missing, "-o", tmp_path / "g.kgs")
    assert code == 1 and str(missing) in err


def test_bad_fact_line_reports_location(tmp_path, capsys):
    facts = tmp_path / "facts.tsv"
    facts.write_text("artist\tA\tbased_in\tplace\n", encoding="utf-8")
    code, _, err = run(capsys, "build", DEMO / "items.csv", "--facts", facts, "-o", tmp_path / "g.kgs")
    assert code == 1 and f"{facts}:1" in err


def test_rebuild_is_byte_identical(built, tmp_path):
    _, snap, _ = built
    again = tmp_path / "again.kgs"
    assert cli.main(["build", str(DEMO / "items.csv"), "--facts", str(DEMO / "facts.tsv"),
                     "-o", str(again), "--report", str(tmp_path / "r.txt")]) == 0
    assert again.read_bytes() == snap.read_bytes()


def test_stats_on_tiny_fixture_matches_golden(tmp_path):
    save_snapshot(tiny_graph(), tmp_path / "tiny.kgs")
    assert cli.main(["stats", str(tmp_path / "tiny.kgs"), "-o", str(tmp_path / "s.tsv")]) == 0
    assert (tmp_path / "s.tsv").read_bytes() == (GOLDEN / "tiny_stats.tsv").read_bytes()


def test_stats_seed_contract(built, tmp_path):
    _, snap, _ = built
    outs = {}
    for name, seed in (("a", 1), ("b", 1), ("c", 2)):
        outs[name] = tmp_path / f"{name}.tsv"
        assert cli.main(["stats", str(snap), "-o", str(outs[name]), "--sample", "40", "--seed", str(seed)]) == 0
    assert outs["a"].read_bytes() == outs["b"].read_bytes()
    assert outs["a"].read_bytes() != outs["c"].read_bytes()
    assert "seed=2" in outs["c"].read_text(encoding="utf-8").splitlines()[0]


def test_stats_without_items(tmp_path, capsys):
    items = tmp_path / "empty.csv"
    items.write_text("song_name,artist_name,album_name\n", encoding="utf-8")
    assert cli.main(["build", str(items), "-o", str(tmp_path / "e.kgs"), "--report", str(tmp_path / "r")]) == 0
    code, _, err = run(capsys, "stats", tmp_path / "e.kgs", "-o", tmp_path / "s.tsv", "--all-pairs")
    assert code == 1 and "no items" in err


def test_corrupt_snapshot(tmp_path, capsys, built):
    _, snap, _ = built
    data = bytearray(snap.read_bytes())
    data[-3] ^= 0xFF
    (tmp_path / "bad.kgs").write_bytes(bytes(data))
    code, _, err = run(capsys, "stats", tmp_path / "bad.kgs", "-o", tmp_path / "s.tsv")
    assert code == 1 and "checksum" in err


def test_segue_text_matches_golden(built, capsys):
    _, snap, stats = built
    rec = next(r for r in golden_records() if r["text"] and not r["fallback"])
    code, out, _ = run(capsys, "segue", snap, stats, "--from", rec["i1"], "--to", rec["i2"])
    assert code == 0 and out == rec["text"] + "\n"


def test_segue_by_song_and_artist_spec(built, capsys):
    _, snap, stats = built
    code, out, _ = run(capsys, "segue", snap, stats, "--from", 'song:"Blue Monday" artist:"New Order"',
                       "--to", 'song:"Blew"')
    assert code == 0 and out == "blue sounds just like blew. Here is Blew...\n"


def test_unreachable_pair_exits_2(built, capsys):
    _, snap, stats = built
    rec = next(r for r in golden_records() if r["text"] is None)
    code, out, _ = run(capsys, "segue", snap, stats, "--from", rec["i1"], "--to", rec["i2"])
    assert code == 2 and out.strip() == "no segue found"


def test_explain_components_sum(built, capsys):
    _, snap, stats = built
    code, out, _ = run(capsys, "explain", snap, stats, "--from", 'song:"Green Clax"', "--to", 'song:"Yellow Belly"')
    assert code == 0
    rows = {}
    for ln in out.splitlines()[1:]:
        rows.setdefault(ln.split()[0], ln.split())
    total = sum(float(rows[k][1]) * float(rows[k][3]) for k in ("rarity", "unpopularity", "shortness"))
    assert abs(total - float(rows["interestingness"][1])) < 1e-5
    assert rows["path"][1] == "Green"


def test_segue_explain_flag(built, capsys):
    _, snap, stats = built
    code, out, _ = run(capsys, "segue", snap, stats, "--explain", "--from", 'song:"Faces"', "--to", 'song:"Weather To Fly"')
    assert code == 0 and "interestingness" in out


def test_item_errors(built, capsys, tmp_path):
    _, snap, stats = built
    code, _, err = run(capsys, "segue", snap, stats, "--from", 'song:"No Such Song"', "--to", 'song:"Faces"')
    assert code == 1 and "unknown item" in err
    code, _, err = run(capsys, "segue", snap, stats, "--from", 'song:"Faces"', "--to", 'song:"Faces"')
    assert code == 1 and "same item" in err
    code, _, err = run(capsys, "segue", snap, stats, "--from", 'title:"Faces"', "--to", 'song:"Yellow"')
    assert code == 1 and "bad item spec" in err


def test_ambiguous_item_lists_candidates(tmp_path, capsys):
    items = tmp_path / "items.csv"
    items.write_text("song_name,artist_name\nDreams,Fleetwood Mac\nDreams,The Cranberries\n", encoding="utf-8")
    snap, stats = tmp_path / "g.kgs", tmp_path / "s.tsv"
    assert cli.main(["build", str(items), "-o", str(snap), "--report", str(tmp_path / "r")]) == 0
    assert cli.main(["stats", str(snap), "-o", str(stats)]) == 0
    code, _, err = run(capsys, "segue", snap, stats, "--from", 'song:"Dreams"', "--to", 'song:"Dreams" artist:"The Cranberries"')
    assert code == 1 and "ambiguous" in err
    assert "Dreams | Fleetwood Mac" in err and "Dreams | The Cranberries" in err
    # song values keep their case, so only the exact spelling resolves
    code, _, err = run(capsys, "segue", snap, stats, "--from", 'song:"dreams" artist:"Fleetwood Mac"',
                       "--to", "Dreams | The Cranberries")
    assert code == 1 and "unknown item" in err
    code, _, err = run(capsys, "segue", snap, stats, "--from", 'song:"Dreams" artist:"Fleetwood Mac"',
                       "--to", "Dreams | The Cranberries")
    assert code in (0, 2) and err == ""


def test_stats_constraint_mismatch_is_refused(built, tmp_path, capsys):
    _, snap, stats = built
    cfg = tmp_path / "short.ini"
    cfg.write_text("[paths]\nmax_length = 3\n", encoding="utf-8")
    code, _, err = run(capsys, "--config", cfg, "segue", snap, stats, "--from", 'song:"Faces"', "--to", 'song:"Weather To Fly"')
    assert code == 1 and "max_length=4" in err and "max_length=3" in err and "rebuild" in err


def test_candidates_mode(built, tmp_path, capsys):
    _, snap, stats = built
    pool = tmp_path / "pool.txt"
    pool.write_text('song:"Blew"\nsong:"Wonderwall"\n\nsong:"Dreaming"\n', encoding="utf-8")
    code, out, _ = run(capsys, "segue", snap, stats, "--from", 'song:"Blue Monday"', "--candidates", pool)
    assert code == 0 and out.splitlines()[0].startswith("to: ")
    pool.write_text('song:"Blue Monday"\n', encoding="utf-8")
    code, _, err = run(capsys, "segue", snap, stats, "--from", 'song:"Blue Monday"', "--candidates", pool)
    assert code == 1 and "candidate" in err


def test_batch_keeps_input_order(built, tmp_path):
    _, snap, stats = built
    pairs = tmp_path / "pairs.tsv"
    pairs.write_text('song:"Faces"\tsong:"Weather To Fly"\nsong:"Blew"\tsong:"Blue Monday"\n', encoding="utf-8")
    out = tmp_path / "out.jsonl"
    assert cli.main(["batch", str(snap), str(stats), str(pairs), "-o", str(out)]) == 0
    recs = [json.loads(ln) for ln in out.read_text(encoding="utf-8").splitlines()]
    assert [r["i1"].split(" | ")[0] for r in recs] == ["Faces", "Blew"]
    assert set(recs[0]) == {"i1", "i2", "text", "interestingness", "rarity", "unpopularity",
                            "shortness", "path_type", "fallback"}


def test_batch_bad_line(built, tmp_path, capsys):
    _, snap, stats = built
    pairs = tmp_path / "pairs.tsv"
    pairs.write_text('song:"Faces"\n', encoding="utf-8")
    code, _, err = run(capsys, "batch", snap, stats, pairs)
    assert code == 1 and f"{pairs}:1" in err


def test_config_loading(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[weights]\nrarity = 1\nunpopularity = 0\nshortness = 0\n[stats]\npairs = sample\nseed = 9\n", encoding="utf-8")
    cfg = load_config(p)
    assert cfg.weights.as_tuple() == (1.0, 0.0, 0.0)
    assert cfg.pair_sample(10).describe() == "pairs=sample n_pairs=5000 seed=9"
    for text, msg in (("[weights]\nrarity = 0.9\n", "sum to 1"),
                      ("[files]\nlexicon = missing.tsv\n", "not found"),
                      ("[files]\ncolour = x\n", "unknown key"),
                      ("[paths]\nmax_length = 0\n", "max_length"),
                      ("[stats]\npairs = some\n", "pairs")):
        p.write_text(text, encoding="utf-8")
        with pytest.raises(ConfigError, match=msg):
            load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")


def test_config_file_paths_are_relative(tmp_path):
    (tmp_path / "lex.tsv").write_text("clax\thypernym\tnoise\n", encoding="utf-8")
    p = tmp_path / "c.ini"
    p.write_text("[files]\nlexicon = lex.tsv\n", encoding="utf-8")
    cfg = load_config(p)
    assert cfg.files["lexicon"] == (tmp_path / "lex.tsv").resolve()
    assert cfg.resources().lexicon == {"clax": (("hypernym", "noise"),)}


def test_bad_config_exits_1(tmp_path, capsys):
    p = tmp_path / "c.ini"
    p.write_text("[weights]\nrarity = lots\n", encoding="utf-8")
    code, _, err = run(capsys, "--config", p, "build", DEMO / "items.csv", "-o", tmp_path / "g")
    assert code == 1 and "error:" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kgsegue", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("build", "stats", "segue", "batch", "explain"):
        assert cmd in res.stdout


def test_flags_override_config(built, tmp_path, capsys):
    _, snap, stats = built
    a, b = 'song:"Dance Me to the End of Love"', 'song:"Dancing in the Dark"'
    _, default, _ = run(capsys, "explain", snap, stats, "--from", a, "--to", b)
    _, rare, _ = run(capsys, "--weights", "1,0,0", "explain", snap, stats, "--from", a, "--to", b)
    assert "|year|" in default and "|stem|" in rare
    code, _, err = run(capsys, "--weights", "1,1,1", "segue", snap, stats, "--from", a, "--to", b)
    assert code == 1 and "sum to 1" in err
    code, _, err = run(capsys, "--max-length", "3", "segue", snap, stats, "--from", a, "--to", b)
    assert code == 1 and "rebuild" in err
