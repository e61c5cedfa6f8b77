"""Inference-time graph postprocessing over a scored candidate-bond graph:
valency correction and cycle breaking.

Bond scores come from outside (e.g. an external model's confidences); this
module only enforces the chemical constraints: no atom above its
charge-adjusted valence, and extra-motif cycles limited to sizes five or six
with at most two atoms shared between such cycles. Deletion decisions always
sacrifice the lowest-confidence inter bond.
"""

import warnings
from dataclasses import dataclass

from .elements import max_valence
from .errors import AssemblyError, MolfragError
from .molgraph import Atom, Bond, Molecule, minimum_cycle_basis


@dataclass(frozen=True)
class ScoredBondGraph:
    """Fragments with fixed intra-motif bonds plus scored bond candidates.

    atoms: tuple of (element, formal_charge); intra_bonds: tuple of Bond;
    candidates: tuple of (u, v, order, confidence).
    """

    atoms: tuple
    intra_bonds: tuple
    candidates: tuple

    def __post_init__(self):
        intra_pairs = {(b.u, b.v) for b in self.intra_bonds}
        seen = set()
        for u, v, order, conf in self.candidates:
            pair = (min(u, v), max(u, v))
            if pair in intra_pairs:
                raise MolfragError(
                    f"candidate duplicates intra-motif bond {pair}"
                )
            if not 0.0 <= conf <= 1.0:
                raise MolfragError(f"confidence {conf} outside [0, 1]")
            if (pair, order) in seen:
                raise MolfragError(
                    f"duplicate candidate for pair {pair} order {order}"
                )
            seen.add((pair, order))


def valency_correct(graph):
    """Greedy candidate acceptance in descending confidence (ties: lower
    (u, v, order)); a bond is accepted only if both endpoints still have
    enough remaining valence for its order."""
    remaining = [
        max_valence(element, charge) for element, charge in graph.atoms
    ]
    for b in graph.intra_bonds:
        remaining[b.u] -= b.order
        remaining[b.v] -= b.order
    ordered = sorted(
        graph.candidates,
        key=lambda c: (-c[3], min(c[0], c[1]), max(c[0], c[1]), c[2]),
    )
    accepted = []
    taken_pairs = set()
    for u, v, order, conf in ordered:
        pair = (min(u, v), max(u, v))
        if pair in taken_pairs:
            continue
        if remaining[pair[0]] >= order and remaining[pair[1]] >= order:
            accepted.append(Bond(pair[0], pair[1], order))
            remaining[pair[0]] -= order
            remaining[pair[1]] -= order
            taken_pairs.add(pair)
    return accepted


def _extra_cycles(n_atoms, bonds, intra_pairs):
    """Smallest-ring-basis cycles containing at least one inter bond."""
    basis = minimum_cycle_basis(n_atoms, [(b.u, b.v) for b in bonds])
    extra = []
    for cycle in basis:
        edges = [
            (min(a, b), max(a, b))
            for a, b in zip(cycle, cycle[1:] + cycle[:1])
        ]
        inter = [e for e in edges if e not in intra_pairs]
        if inter:
            extra.append((cycle, edges, inter))
    return extra


def cycle_break(mol, intra_bonds, confidences):
    """Delete low-confidence inter bonds until every cycle that touches an
    inter bond has size five or six and no two such cycles share more than
    two atoms. Intra-motif bonds are never deleted. May disconnect the
    graph; components are returned as-is (with a warning)."""
    intra_pairs = {(b.u, b.v) for b in intra_bonds}
    bonds = list(mol.bonds)
    for b in bonds:
        if (b.u, b.v) not in intra_pairs and (b.u, b.v) not in confidences:
            raise MolfragError(f"missing confidence for inter bond {(b.u, b.v)}")

    def conf_of(edge):
        return confidences[edge]

    while True:
        extra = _extra_cycles(len(mol.atoms), bonds, intra_pairs)
        violations = []
        for i, (cycle, edges, inter) in enumerate(extra):
            if len(cycle) not in (5, 6):
                violations.append(inter)
        for i in range(len(extra)):
            for j in range(i + 1, len(extra)):
                shared = set(extra[i][0]) & set(extra[j][0])
                if len(shared) > 2:
                    violations.append(extra[i][2] + extra[j][2])
        if not violations:
            break
        # fix the violation containing the globally weakest inter bond first
        target = min(
            violations, key=lambda inter: min((conf_of(e), e) for e in inter)
        )
        if not target:
            raise AssemblyError(
                "cycle violation resolvable only by deleting an intra-motif bond"
            )
        victim = min(target, key=lambda e: (conf_of(e), e))
        bonds = [b for b in bonds if (b.u, b.v) != victim]
    pruned = Molecule(mol.atoms, tuple(bonds))
    if len(mol.atoms) > 1:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w, _ in pruned.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(mol.atoms):
            warnings.warn("cycle breaking disconnected the molecule")
    return pruned


def _molecule_from(graph, inter_bonds):
    atoms = tuple(
        Atom(element, charge, i) for i, (element, charge) in enumerate(graph.atoms)
    )
    bonds = tuple(sorted(set(graph.intra_bonds) | set(inter_bonds),
                         key=lambda b: (b.u, b.v)))
    return Molecule(atoms, bonds)


def run_assembly(graph, order="valency-first"):
    """Full postprocessing pipeline over a scored bond graph.

    valency-first (default): accept candidates under valence limits, then
    break cycles. cycle-first: materialize the best candidate per pair, break
    cycles, then re-run valency correction on the survivors.
    """
    if order == "valency-first":
        accepted = valency_correct(graph)
        mol = _molecule_from(graph, accepted)
        confidences = {}
        for u, v, bond_order, conf in graph.candidates:
            pair = (min(u, v), max(u, v))
            if any(b.u == pair[0] and b.v == pair[1] for b in accepted):
                confidences.setdefault(pair, conf)
        return cycle_break(mol, graph.intra_bonds, confidences)
    if order == "cycle-first":
        best = {}
        for u, v, bond_order, conf in graph.candidates:
            pair = (min(u, v), max(u, v))
            current = best.get(pair)
            if current is None or (conf, -bond_order) > (current[1], -current[0]):
                best[pair] = (bond_order, conf)
        inter = [Bond(u, v, o) for (u, v), (o, _) in best.items()]
        mol = _molecule_from(graph, inter)
        confidences = {pair: conf for pair, (_, conf) in best.items()}
        pruned = cycle_break(mol, graph.intra_bonds, confidences)
        surviving = {
            (b.u, b.v) for b in pruned.bonds
        } - {(b.u, b.v) for b in graph.intra_bonds}
        narrowed = ScoredBondGraph(
            graph.atoms,
            graph.intra_bonds,
            tuple(
                c
                for c in graph.candidates
                if (min(c[0], c[1]), max(c[0], c[1])) in surviving
            ),
        )
        accepted = valency_correct(narrowed)
        return _molecule_from(graph, accepted)
    raise MolfragError(f"unknown assembly order {order!r}")
