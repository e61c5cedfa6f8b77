import itertools
import random

import pytest

from molfrag.errors import (
    DisconnectedMoleculeError,
    KekulizationError,
    SmilesParseError,
    UnsupportedElementError,
    ValenceError,
)
from molfrag.elements import max_valence
from molfrag.molgraph import parse_smiles, perceive_rings, write_smiles

from oracles import brute_isomorphic, random_corpus


def test_single_atom():
    mol = parse_smiles("C")
    assert len(mol.atoms) == 1
    assert mol.atoms[0].element == "C"
    assert mol.atoms[0].formal_charge == 0
    assert len(mol.bonds) == 0


def test_benzene_kekulized():
    mol = parse_smiles("c1ccccc1")
    assert len(mol.atoms) == 6
    assert len(mol.bonds) == 6
    orders = sorted(b.order for b in mol.bonds)
    assert orders == [1, 1, 1, 2, 2, 2]
    # alternation: every atom has exactly one double bond
    for i in range(6):
        doubles = sum(1 for _, o in mol.neighbors(i) if o == 2)
        assert doubles == 1


def test_acetate():
    mol = parse_smiles("CC(=O)[O-]")
    assert len(mol.atoms) == 4
    charges = [a.formal_charge for a in mol.atoms]
    assert charges.count(-1) == 1
    assert mol.atoms[charges.index(-1)].element == "O"
    assert sorted(b.order for b in mol.bonds) == [1, 1, 2]


def test_atom_order_follows_tokens():
    mol = parse_smiles("NCO")
    assert [a.element for a in mol.atoms] == ["N", "C", "O"]


def test_stereo_discarded():
    a = parse_smiles("C(/F)=C\\Cl")
    b = parse_smiles("C(F)=CCl")
    assert write_smiles(a) == write_smiles(b)
    assert write_smiles(parse_smiles("C[C@@H](N)O")) == write_smiles(
        parse_smiles("CC(N)O")
    )


def test_explicit_h_folded():
    mol = parse_smiles("[H]C([H])([H])O")
    assert [a.element for a in mol.atoms] == ["C", "O"]
    assert len(mol.bonds) == 1


def test_percent_ring_digits():
    mol = parse_smiles("C%12CCCCC%12")
    assert len(mol.bonds) == 6
    info = perceive_rings(mol)
    assert [len(r) for r in info.rings] == [6]


@pytest.mark.parametrize(
    "text,exc",
    [
        ("", SmilesParseError),
        ("C(", SmilesParseError),
        ("C)", SmilesParseError),
        ("C1CC", SmilesParseError),  # unclosed ring digit
        ("C.C", DisconnectedMoleculeError),
        ("[13C]", SmilesParseError),  # isotope
        ("[Xe]", UnsupportedElementError),
        ("C==C", SmilesParseError),
        ("C(C)(C)(C)(C)C", ValenceError),
        ("[CH5]", ValenceError),
        ("c1cccc1", KekulizationError),  # 5 carbons all needing a double bond
        ("Cq", SmilesParseError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_smiles(text)


def test_error_reports_position():
    with pytest.raises(SmilesParseError) as err:
        parse_smiles("CC(C")
    assert err.value.position == 4


def test_pyrrole_vs_pyridine():
    pyrrole = parse_smiles("c1cc[nH]c1")
    n = next(a for a in pyrrole.atoms if a.element == "N")
    assert pyrrole.bond_order_sum(n.index) == 2  # two singles, lone pair in ring
    pyridine = parse_smiles("n1ccccc1")
    n = next(a for a in pyridine.atoms if a.element == "N")
    assert pyridine.bond_order_sum(n.index) == 3  # one double


def test_valences_after_parse(fuzz_corpus_small):
    for mol in fuzz_corpus_small:
        for a in mol.atoms:
            assert mol.bond_order_sum(a.index) <= max_valence(
                a.element, a.formal_charge
            )


def test_charged_nitrogen_valence():
    mol = parse_smiles("C[N+](C)(C)C")
    n = next(a for a in mol.atoms if a.element == "N")
    assert mol.bond_order_sum(n.index) == 4
    with pytest.raises(ValenceError):
        parse_smiles("CN(C)(C)C")


def test_write_single_atom():
    assert write_smiles(parse_smiles("C")) == "C"


def test_write_canonical_across_forms():
    assert write_smiles(parse_smiles("c1ccccc1")) == write_smiles(
        parse_smiles("C1=CC=CC=C1")
    )
    assert write_smiles(parse_smiles("OCC")) == write_smiles(parse_smiles("CCO"))


def test_roundtrip_fuzz_corpus():
    # parse(write(parse(s))) structurally equal to parse(s), checked with a
    # graph-isomorphism oracle on a 100-molecule corpus
    corpus = random_corpus(seed=5, size=100, max_atoms=9)
    for mol in corpus:
        text = write_smiles(mol)
        again = parse_smiles(text)
        assert brute_isomorphic(mol, again), text
        assert write_smiles(again) == text


def test_rings_acyclic():
    info = perceive_rings(parse_smiles("CCO"))
    assert not any(info.atom_in_ring)
    assert not any(info.bond_in_ring.values())
    assert info.rings == ()


def test_rings_cyclohexane():
    info = perceive_rings(parse_smiles("C1CCCCC1"))
    assert all(info.bond_in_ring.values())
    assert [len(r) for r in info.rings] == [6]


def test_rings_naphthalene():
    mol = parse_smiles("c1ccc2ccccc2c1")
    info = perceive_rings(mol)
    assert sum(info.bond_in_ring.values()) == 11
    assert sorted(len(r) for r in info.rings) == [6, 6]
    for ring in info.rings:
        # every listed ring is a simple cycle
        assert len(set(ring)) == len(ring)
        for a, b in zip(ring, ring[1:] + ring[:1]):
            assert mol.bond_between(a, b) is not None


def test_bridge_oracle(fuzz_corpus_small):
    # in-ring iff removal leaves endpoints connected
    for mol in fuzz_corpus_small[:60]:
        info = perceive_rings(mol)
        for bond in mol.bonds:
            adj = {i: set() for i in range(len(mol.atoms))}
            for b in mol.bonds:
                if b is bond:
                    continue
                adj[b.u].add(b.v)
                adj[b.v].add(b.u)
            seen = {bond.u}
            stack = [bond.u]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            assert info.bond_in_ring[(bond.u, bond.v)] == (bond.v in seen)


def test_ring_basis_size(fuzz_corpus_small):
    for mol in fuzz_corpus_small:
        info = perceive_rings(mol)
        assert len(info.rings) == len(mol.bonds) - len(mol.atoms) + 1
