"""Fragments (connected atom subsets of a molecule) and decompositions.

A decomposition partitions a molecule's atoms into multi-atom motif fragments
and single atoms, and splits the bond set into intra-motif and everything
else.
"""

from collections import deque
from dataclasses import dataclass, field

from .canon import MotifKey, canonical_form
from .errors import DisconnectedFragmentError, MolfragError
from .molgraph import Atom, Bond, Molecule


@dataclass(frozen=True)
class Fragment:
    """A connected subset of one molecule's atoms with its induced bonds.

    atom_indices are parent molecule indices, sorted ascending; bonds are the
    parent bonds with both endpoints inside.
    """

    molecule: Molecule = field(repr=False)
    atom_indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "atom_indices", tuple(sorted(self.atom_indices)))
        if not self.atom_indices:
            raise MolfragError("empty fragment")

    def __len__(self):
        return len(self.atom_indices)

    @property
    def bonds(self):
        inside = set(self.atom_indices)
        return tuple(
            b for b in self.molecule.bonds if b.u in inside and b.v in inside
        )

    def atoms(self):
        return tuple(self.molecule.atoms[i] for i in self.atom_indices)

    def is_connected(self):
        inside = set(self.atom_indices)
        start = self.atom_indices[0]
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w, _ in self.molecule.neighbors(v):
                if w in inside and w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(inside)

    def local_graph(self, charge_sensitive=True):
        """(labels, bonds) in fragment-local indices for canonicalization."""
        local = {idx: k for k, idx in enumerate(self.atom_indices)}
        labels = [
            (a.element, a.formal_charge if charge_sensitive else 0)
            for a in self.atoms()
        ]
        bonds = {
            (local[b.u], local[b.v]): b.order for b in self.bonds
        }
        return labels, bonds

    def to_molecule(self):
        """Standalone Molecule with fragment-local atom indices."""
        local = {idx: k for k, idx in enumerate(self.atom_indices)}
        atoms = tuple(
            Atom(a.element, a.formal_charge, local[a.index]) for a in self.atoms()
        )
        bonds = tuple(
            Bond(local[b.u], local[b.v], b.order) for b in self.bonds
        )
        return Molecule(atoms, bonds)


def whole_molecule_fragment(mol):
    return Fragment(mol, tuple(range(len(mol.atoms))))


def canonical_key(frag, charge_sensitive):
    """Exact order-independent key of a fragment's labeled-graph isomorphism
    class. The charge-insensitive variant blanks out formal charges, which is
    what relaxed ("identical up to a charge") motif matching uses."""
    if not frag.is_connected():
        raise DisconnectedFragmentError("canonical_key requires a connected fragment")
    labels, bonds = frag.local_graph(charge_sensitive)
    encoding, _ = canonical_form(labels, bonds)
    return MotifKey(encoding, charge_sensitive)


@dataclass(frozen=True)
class Decomposition:
    """Partition of a molecule into motifs and single atoms, with bond split."""

    molecule: Molecule = field(repr=False)
    scheme: str
    motifs: tuple  # (Fragment, MotifKey) pairs
    singles: tuple  # single-atom Fragments

    @property
    def intra_bonds(self):
        out = []
        for frag, _ in self.motifs:
            out.extend(frag.bonds)
        return tuple(out)

    @property
    def inter_bonds(self):
        intra = set(self.intra_bonds)
        return tuple(b for b in self.molecule.bonds if b not in intra)

    @property
    def n_fragments(self):
        return len(self.motifs) + len(self.singles)

    def validate(self):
        """Check the partition invariants; raises on violation."""
        seen = []
        for frag, _ in self.motifs:
            if len(frag) < 2:
                raise MolfragError("motif fragment with < 2 atoms")
            seen.extend(frag.atom_indices)
        for frag in self.singles:
            if len(frag) != 1:
                raise MolfragError("single fragment with != 1 atom")
            seen.extend(frag.atom_indices)
        if sorted(seen) != list(range(len(self.molecule.atoms))):
            raise MolfragError("fragments do not partition the atom set")
        intra = self.intra_bonds
        if len(set(intra)) != len(intra):
            raise MolfragError("intra-motif bonds overlap")
        if set(intra) | set(self.inter_bonds) != set(self.molecule.bonds):
            raise MolfragError("bond split does not cover the bond set")
        return self


def singles_decomposition(mol, scheme):
    return Decomposition(
        mol,
        scheme,
        motifs=(),
        singles=tuple(Fragment(mol, (i,)) for i in range(len(mol.atoms))),
    )
