import warnings

import pytest

from molfrag.errors import EmptyCorpusError, SchemeMismatchError, VocabFormatError
from molfrag.fragmentation import bbb_fragment, psm_decompose
from molfrag.molgraph import parse_smiles
from molfrag.vocab import (
    bbb_build_vocab,
    load_vocab,
    psm_build_vocab,
    save_vocab,
)

from oracles import random_corpus


def mols(*smiles):
    return [parse_smiles(s) for s in smiles]


def test_bbb_toy_corpus():
    vocab = bbb_build_vocab(mols("C1CCCCC1C", "C1CCCCC1O"), 1)
    assert vocab.k == 1
    assert vocab.entries[0].smiles == "C1CCCCC1"
    assert vocab.entries[0].count == 2
    assert vocab.entries[0].has_ring


def test_bbb_small_fragments_ineligible():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        vocab = bbb_build_vocab(mols("CC", "CO", "CN"), 5)
    assert vocab.k == 0
    assert caught


def test_bbb_whole_molecule_eligible():
    vocab = bbb_build_vocab(mols("CCO"), 1)
    assert vocab.k == 1
    assert vocab.entries[0].smiles == "CCO"
    assert vocab.entries[0].count == 1
    assert not vocab.entries[0].has_ring


def test_bbb_empty_corpus():
    with pytest.raises(EmptyCorpusError):
        bbb_build_vocab([], 1)


def test_bbb_ranking_and_monotonic_prefix():
    corpus = random_corpus(seed=41, size=60, max_atoms=12)
    v_small = bbb_build_vocab(corpus, 5)
    v_large = bbb_build_vocab(corpus, 12)
    assert v_large.entries[: v_small.k] == v_small.entries
    counts = [e.count for e in v_large.entries]
    assert counts == sorted(counts, reverse=True)
    assert all(e.atom_count >= 3 for e in v_large.entries)


def test_bbb_occurrence_conservation():
    corpus = random_corpus(seed=43, size=40, max_atoms=10)
    total_eligible = sum(
        1 for mol in corpus for f in bbb_fragment(mol) if len(f) >= 3
    )
    vocab = bbb_build_vocab(corpus, 10_000)
    assert sum(e.count for e in vocab.entries) == total_eligible


def test_psm_first_motif():
    vocab = psm_build_vocab(mols("CCO", "CCC"), 1)
    assert vocab.k == 1
    assert vocab.entries[0].smiles == "CC"
    assert vocab.entries[0].count == 3


def test_psm_exhaustion_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        vocab = psm_build_vocab(mols("CC"), 2)
    assert [e.smiles for e in vocab.entries] == ["CC"]
    assert any("exhausted" in str(w.message) for w in caught)


def test_psm_count_bounded_by_bond_count():
    corpus = mols("CCO", "CCC", "CC(C)C")
    total_bonds = sum(len(m.bonds) for m in corpus)
    vocab = psm_build_vocab(corpus, 3)
    assert all(e.count <= total_bonds for e in vocab.entries)


def test_psm_prefix_monotonicity():
    corpus = random_corpus(seed=47, size=10, max_atoms=6)
    v2 = psm_build_vocab(corpus, 2)
    v4 = psm_build_vocab(corpus, 4)
    assert v4.entries[:2] == v2.entries


def test_save_load_roundtrip(tmp_path):
    vocab = bbb_build_vocab(mols("C1CCCCC1C", "C1CCCCC1O", "CCO"), 3)
    path = tmp_path / "v.vocab"
    save_vocab(vocab, path)
    loaded = load_vocab(path)
    assert loaded.scheme == vocab.scheme
    assert loaded.corpus_hash == vocab.corpus_hash
    assert loaded.entries == vocab.entries


def test_load_duplicate_key(tmp_path):
    path = tmp_path / "dup.vocab"
    path.write_text(
        '{"format_version": 1, "scheme": "bbb", "corpus_hash": "x", "k": 2}\n'
        "1\tCCO\t3\t3\tfalse\n"
        "2\tOCC\t2\t3\tfalse\n"  # same isomorphism class as CCO
    )
    with pytest.raises(VocabFormatError):
        load_vocab(path)


def test_load_version_mismatch(tmp_path):
    path = tmp_path / "old.vocab"
    path.write_text(
        '{"format_version": 99, "scheme": "bbb", "corpus_hash": "x", "k": 0}\n'
    )
    with pytest.raises(VocabFormatError):
        load_vocab(path)


def test_load_malformed(tmp_path):
    path = tmp_path / "bad.vocab"
    path.write_text("not json\n")
    with pytest.raises(VocabFormatError):
        load_vocab(path)


def test_scheme_contract_enforced(tmp_path):
    vocab = bbb_build_vocab(mols("C1CCCCC1C"), 1)
    path = tmp_path / "bbb.vocab"
    save_vocab(vocab, path)
    loaded = load_vocab(path)
    with pytest.raises(SchemeMismatchError):
        psm_decompose(parse_smiles("CC"), loaded)
