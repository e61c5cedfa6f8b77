import json
import os

import pytest

from molfrag.cli import main


@pytest.fixture()
def toy_corpus(tmp_path):
    path = tmp_path / "toy.smi"
    path.write_text("C1CCCCC1C\nC1CCCCC1O\n# a comment\nCCO\n")
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_build_vocab_toy(tmp_path, toy_corpus, capsys):
    out = tmp_path / "v.vocab"
    code, _, err = run(
        capsys, "build-vocab", "--input", toy_corpus, "--scheme", "bbb",
        "--k", "1", "--output", out,
    )
    assert code == 0
    lines = out.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["scheme"] == "bbb"
    assert header["k"] == 1
    rank, smiles, count, atom_count, has_ring = lines[1].split("\t")
    assert smiles == "C1CCCCC1"
    assert count == "2"
    assert "top motifs" in err


def test_build_vocab_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.smi"
    empty.write_text("")
    code, _, _ = run(
        capsys, "build-vocab", "--input", empty, "--scheme", "bbb",
        "--k", "1", "--output", tmp_path / "v",
    )
    assert code == 4


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.smi"
    bad.write_text("C1CC\n")
    code, _, err = run(
        capsys, "build-vocab", "--input", bad, "--scheme", "bbb",
        "--k", "1", "--output", tmp_path / "v",
    )
    assert code == 2
    assert "parse error" in err


def test_skip_invalid_logs_line_numbers(tmp_path, capsys):
    mixed = tmp_path / "mixed.smi"
    mixed.write_text("CCO\nnot_smiles((\nCCCO\n")
    code, _, err = run(
        capsys, "parse", "--input", mixed, "--skip-invalid",
    )
    assert code == 0
    assert "line 2" in err


def test_k_exceeds_available_warns(tmp_path, toy_corpus, capsys):
    out = tmp_path / "v.vocab"
    with pytest.warns(UserWarning):
        code, _, _ = run(
            capsys, "build-vocab", "--input", toy_corpus, "--scheme", "bbb",
            "--k", "10", "--output", out,
        )
    assert code == 0
    header = json.loads(out.read_text().splitlines()[0])
    assert header["k"] == 2


def test_usage_error_exit_code(capsys):
    code, _, _ = run(capsys, "build-vocab", "--input", "x", "--scheme", "bbb",
                     "--k", "0", "--output", "y")
    assert code == 1


def _build_vocab(tmp_path, toy_corpus, capsys, scheme="bbb", k="2"):
    out = tmp_path / f"{scheme}.vocab"
    code, _, _ = run(
        capsys, "build-vocab", "--input", toy_corpus, "--scheme", scheme,
        "--k", k, "--output", out,
    )
    assert code == 0
    return out


def test_decompose_records_and_dominance(tmp_path, toy_corpus, capsys):
    vocab = _build_vocab(tmp_path, toy_corpus, capsys)
    code, out_sub, _ = run(
        capsys, "decompose", "--input", toy_corpus, "--scheme", "subcover",
        "--vocab", vocab,
    )
    assert code == 0
    code, out_bbb, _ = run(
        capsys, "decompose", "--input", toy_corpus, "--scheme", "bbb",
        "--vocab", vocab,
    )
    assert code == 0

    def sizes(text):
        out = []
        for line in text.splitlines():
            if line.startswith("#"):
                continue
            rec = json.loads(line)
            out.append(len(rec["motifs"]) + len(rec["singles"]))
        return out

    for s, b in zip(sizes(out_sub), sizes(out_bbb)):
        assert s <= b


def test_decompose_scheme_mismatch(tmp_path, toy_corpus, capsys):
    vocab = _build_vocab(tmp_path, toy_corpus, capsys, scheme="psm", k="1")
    code, _, err = run(
        capsys, "decompose", "--input", toy_corpus, "--scheme", "subcover",
        "--vocab", vocab,
    )
    assert code == 3
    assert "scheme" in err


def test_decompose_deterministic_across_workers(tmp_path, toy_corpus, capsys):
    vocab = _build_vocab(tmp_path, toy_corpus, capsys)
    outputs = []
    for workers in ("1", "4"):
        code, out, _ = run(
            capsys, "decompose", "--input", toy_corpus, "--scheme", "subcover",
            "--vocab", vocab, "--workers", workers,
        )
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1]


def test_stats_ring_histogram_benzene(tmp_path, capsys):
    corpus = tmp_path / "benz.smi"
    corpus.write_text("c1ccccc1\n")
    code, out, _ = run(
        capsys, "stats", "--report", "ring-histogram", "--input", corpus,
    )
    assert code == 0
    assert "6,1.0" in out.splitlines()


def test_stats_decomposition_csv_reparses(tmp_path, toy_corpus, capsys):
    vocab = _build_vocab(tmp_path, toy_corpus, capsys)
    code, out, _ = run(
        capsys, "stats", "--report", "decomposition", "--input", toy_corpus,
        "--scheme", "bbb", "--vocab", vocab,
    )
    assert code == 0
    rows = []
    aggregate = None
    for line in out.splitlines():
        if line.startswith("# aggregate "):
            aggregate = json.loads(line[len("# aggregate "):])
        elif line.startswith("#") or line.startswith("molecule_id"):
            continue
        else:
            rows.append(line.split(","))
    sizes = [int(r[2]) for r in rows]
    assert aggregate["mean_fragments"] == sum(sizes) / len(sizes)


def test_split_deterministic(tmp_path, toy_corpus, capsys):
    prefix_a = tmp_path / "a"
    prefix_b = tmp_path / "b"
    for prefix in (prefix_a, prefix_b):
        code, _, _ = run(
            capsys, "split", "--input", toy_corpus, "--seed", "7",
            "--output", prefix,
        )
        assert code == 0
    for part in ("train", "valid", "test"):
        assert (
            (tmp_path / f"a.{part}.smi").read_text()
            == (tmp_path / f"b.{part}.smi").read_text()
        )
    total = sum(
        len(
            [
                l
                for l in (tmp_path / f"a.{part}.smi").read_text().splitlines()
                if not l.startswith("#")
            ]
        )
        for part in ("train", "valid", "test")
    )
    assert total == 3


def test_split_bad_ratios(toy_corpus, tmp_path, capsys):
    code, _, _ = run(
        capsys, "split", "--input", toy_corpus, "--split", "0.5,0.2,0.2",
        "--output", tmp_path / "x",
    )
    assert code == 1


def test_assemble_four_cycle(tmp_path, capsys):
    task = {
        "atoms": [{"element": "C", "charge": 0}] * 4,
        "intra_bonds": [],
        "candidates": [[0, 1, 1, 0.9], [1, 2, 1, 0.8], [2, 3, 1, 0.7], [3, 0, 1, 0.6]],
    }
    path = tmp_path / "tasks.jsonl"
    path.write_text(json.dumps(task) + "\n")
    code, out, _ = run(capsys, "assemble", "--input", path)
    assert code == 0
    assert out.strip() == "CCCC"


def test_compare_table_and_figures(tmp_path, toy_corpus, capsys):
    figures = tmp_path / "figs"
    code, out, _ = run(
        capsys, "compare", "--input", toy_corpus, "--k", "2",
        "--figures", figures,
    )
    assert code == 0
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows[0].startswith("scheme,")
    assert {r.split(",")[0] for r in rows[1:]} == {"bbb", "psm", "subcover"}
    assert (figures / "fragment_histogram.png").exists()


def test_identical_invocations_byte_identical(tmp_path, toy_corpus, capsys):
    vocab = _build_vocab(tmp_path, toy_corpus, capsys)
    runs = []
    for _ in range(2):
        code, out, _ = run(
            capsys, "decompose", "--input", toy_corpus, "--scheme", "bbb",
            "--vocab", vocab,
        )
        assert code == 0
        runs.append(out)
    assert runs[0] == runs[1]
