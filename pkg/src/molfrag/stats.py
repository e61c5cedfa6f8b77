"""Corpus diagnostics: decomposition cardinalities, ring-size histograms,
and vocabulary composition fractions."""

from dataclasses import dataclass

from .errors import EmptyCorpusError
from .fragmentation import decompose
from .molgraph import perceive_rings

RING_SIZE_MIN = 3
RING_SIZE_MAX = 20


@dataclass(frozen=True)
class MoleculeRecord:
    molecule_id: str
    scheme: str
    n_fragments: int
    n_motifs: int
    n_singles: int


@dataclass(frozen=True)
class DecompositionStats:
    records: tuple  # MoleculeRecord per molecule, input order
    mean_fragments: float
    median_fragments: float
    fragment_histogram: dict  # |F| -> molecule count
    single_atom_rate: float  # sum |S| / sum |A|


@dataclass(frozen=True)
class RingHistogram:
    # ring size -> mean rings per molecule, sizes 3..20 plus an overflow bucket
    means: dict
    overflow_mean: float
    n_molecules: int


@dataclass(frozen=True)
class VocabComposition:
    ring_motif_fraction: float
    size_histogram: dict  # atom_count -> number of entries


def _median(values):
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def decomposition_stats(molecules, vocab, scheme, ids=None, decompositions=None):
    """Per-molecule |F|, |M|, |S| plus corpus aggregates.

    Aggregates are accumulated in input order (stable summation), so results
    are byte-reproducible. Pre-computed decompositions may be passed to avoid
    duplicate work.
    """
    molecules = list(molecules)
    if not molecules:
        raise EmptyCorpusError("empty corpus")
    if ids is None:
        ids = [str(i) for i in range(len(molecules))]
    records = []
    total_singles = 0
    total_atoms = 0
    histogram = {}
    for pos, mol in enumerate(molecules):
        if decompositions is not None:
            dec = decompositions[pos]
        else:
            dec = decompose(mol, vocab, scheme)
        rec = MoleculeRecord(
            ids[pos], scheme, dec.n_fragments, len(dec.motifs), len(dec.singles)
        )
        records.append(rec)
        total_singles += rec.n_singles
        total_atoms += len(mol.atoms)
        histogram[rec.n_fragments] = histogram.get(rec.n_fragments, 0) + 1
    sizes = [r.n_fragments for r in records]
    return DecompositionStats(
        records=tuple(records),
        mean_fragments=sum(sizes) / len(sizes),
        median_fragments=_median(sizes),
        fragment_histogram=dict(sorted(histogram.items())),
        single_atom_rate=total_singles / total_atoms,
    )


def ring_histogram(molecules, ring_infos=None):
    """Mean rings-per-molecule by ring size from each molecule's
    smallest-ring set; sizes above the bucket range go to the overflow."""
    molecules = list(molecules)
    if not molecules:
        raise EmptyCorpusError("empty corpus")
    counts = {size: 0 for size in range(RING_SIZE_MIN, RING_SIZE_MAX + 1)}
    overflow = 0
    for pos, mol in enumerate(molecules):
        info = ring_infos[pos] if ring_infos is not None else perceive_rings(mol)
        for ring in info.rings:
            size = len(ring)
            if size > RING_SIZE_MAX:
                overflow += 1
            else:
                counts[size] += 1
    n = len(molecules)
    return RingHistogram(
        means={size: c / n for size, c in counts.items()},
        overflow_mean=overflow / n,
        n_molecules=n,
    )


def vocab_composition(vocab):
    """Fraction of vocabulary entries containing at least one in-ring bond,
    plus the motif-size distribution."""
    if vocab.k == 0:
        raise EmptyCorpusError("empty vocabulary")
    ring_count = sum(1 for e in vocab.entries if e.has_ring)
    sizes = {}
    for e in vocab.entries:
        sizes[e.atom_count] = sizes.get(e.atom_count, 0) + 1
    return VocabComposition(
        ring_motif_fraction=ring_count / vocab.k,
        size_histogram=dict(sorted(sizes.items())),
    )
