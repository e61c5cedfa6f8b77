"""Motif vocabulary construction, ranking, and serialization.

BBB vocabularies rank fragment occurrence counts top-down (fragments of at
least three heavy atoms); PSM vocabularies are mined bottom-up, one motif per
iteration, by merging adjacent fragments across the corpus. The BBB
vocabulary is shared by the bbb and subcover decomposition schemes.
"""

import hashlib
import json
import warnings
from dataclasses import dataclass, field

from .errors import EmptyCorpusError, VocabFormatError
from .fragmentation import bbb_fragment
from .fragments import Fragment, canonical_key, whole_molecule_fragment
from .molgraph import parse_smiles, perceive_rings, write_smiles

FORMAT_VERSION = 1


@dataclass(frozen=True)
class VocabEntry:
    key: object  # charge-sensitive MotifKey
    smiles: str  # canonical SMILES of the representative fragment
    count: int
    atom_count: int
    has_ring: bool
    _fragment_cache: list = field(default_factory=list, repr=False, compare=False)

    def fragment(self):
        """Representative fragment (lazily parsed from the canonical SMILES)."""
        if not self._fragment_cache:
            self._fragment_cache.append(
                whole_molecule_fragment(parse_smiles(self.smiles))
            )
        return self._fragment_cache[0]


@dataclass(frozen=True)
class Vocabulary:
    scheme: str  # "bbb" or "psm"
    entries: tuple
    corpus_hash: str = "unknown"
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for e in self.entries:
            if e.key in index:
                raise VocabFormatError(f"duplicate vocabulary key {e.key.hex()}")
            index[e.key] = e
        object.__setattr__(self, "_index", index)

    @property
    def k(self):
        return len(self.entries)

    def lookup(self, key):
        return self._index.get(key)

    def __contains__(self, key):
        return key in self._index


def fragment_record(frag):
    """(key, canonical SMILES, atom_count, has_ring) of a fragment; the key is
    charge-sensitive, so the record is a pure function of the isomorphism
    class."""
    key = canonical_key(frag, charge_sensitive=True)
    sub = frag.to_molecule()
    smiles = write_smiles(sub)
    ring_info = perceive_rings(sub)
    has_ring = any(ring_info.bond_in_ring.values())
    return key, smiles, len(frag), has_ring


def eligible_bbb_records(mol, ring_info=None):
    """Per-occurrence records of a molecule's BBB fragments with >= 3 atoms."""
    return [
        fragment_record(frag)
        for frag in bbb_fragment(mol, ring_info)
        if len(frag) >= 3
    ]


def corpus_hash(smiles_lines):
    digest = hashlib.sha256()
    for line in smiles_lines:
        digest.update(line.encode())
        digest.update(b"\n")
    return digest.hexdigest()[:16]


def _molecule_lines(molecules):
    return [m.source if m.source is not None else write_smiles(m) for m in molecules]


def vocabulary_from_counts(counts, meta, k, scheme, hash_value):
    """Build a ranked vocabulary from a mergeable count table.

    counts: {key: occurrences}; meta: {key: (smiles, atom_count, has_ring)}.
    Top-k by (count desc, key asc); warns when fewer than k motifs exist.
    """
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].key))
    if len(ranked) < k:
        warnings.warn(
            f"only {len(ranked)} distinct eligible motifs for requested k={k}"
        )
    entries = []
    for key, count in ranked[:k]:
        smiles, atom_count, has_ring = meta[key]
        entries.append(VocabEntry(key, smiles, count, atom_count, has_ring))
    return Vocabulary(scheme, tuple(entries), hash_value)


def bbb_build_vocab(molecules, k):
    """Count charge-sensitive keys of all BBB fragments with >= 3 heavy atoms
    (one count per occurrence) and keep the top k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    molecules = list(molecules)
    if not molecules:
        raise EmptyCorpusError("empty corpus")
    counts = {}
    meta = {}
    for mol in molecules:
        for key, smiles, atom_count, has_ring in eligible_bbb_records(mol):
            counts[key] = counts.get(key, 0) + 1
            meta.setdefault(key, (smiles, atom_count, has_ring))
    return vocabulary_from_counts(
        counts, meta, k, "bbb", corpus_hash(_molecule_lines(molecules))
    )


def psm_build_vocab(molecules, k):
    """Mine k motifs bottom-up.

    Maintains a working partition per molecule initialized to single atoms.
    Each iteration counts every merged candidate from adjacent fragment pairs
    across the corpus (per occurrence), adds the most frequent candidate
    (ties: smaller key) with its count frozen at mining time, then re-merges
    fragments wherever an adjacent pair merges into the new motif, scanning
    deterministically by smallest atom index.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    molecules = list(molecules)
    if not molecules:
        raise EmptyCorpusError("empty corpus")
    partitions = [[(i,) for i in range(len(m.atoms))] for m in molecules]
    key_caches = [{} for _ in molecules]

    def merged_key(mi, indices):
        cache = key_caches[mi]
        if indices not in cache:
            cache[indices] = canonical_key(
                Fragment(molecules[mi], indices), charge_sensitive=True
            )
        return cache[indices]

    adjacency = [
        {(b.u, b.v) for b in m.bonds} for m in molecules
    ]

    def adjacent(mi, pa, pb):
        for x in pa:
            for y in pb:
                if (min(x, y), max(x, y)) in adjacency[mi]:
                    return True
        return False

    entries = []
    for _ in range(k):
        counts = {}
        meta = {}
        for mi, parts in enumerate(partitions):
            for ia in range(len(parts)):
                for ib in range(ia + 1, len(parts)):
                    if not adjacent(mi, parts[ia], parts[ib]):
                        continue
                    merged = tuple(sorted(parts[ia] + parts[ib]))
                    key = merged_key(mi, merged)
                    counts[key] = counts.get(key, 0) + 1
                    if key not in meta:
                        meta[key] = Fragment(molecules[mi], merged)
        if not counts:
            warnings.warn(
                f"corpus exhausted after {len(entries)} motifs (requested {k})"
            )
            break
        best_key = min(counts, key=lambda key: (-counts[key], key.key))
        _, smiles, atom_count, has_ring = fragment_record(meta[best_key])
        entries.append(
            VocabEntry(best_key, smiles, counts[best_key], atom_count, has_ring)
        )
        # re-merge every pair forming the new motif, left-to-right
        for mi, parts in enumerate(partitions):
            changed = True
            while changed:
                changed = False
                pairs = sorted(
                    (
                        (min(parts[ia][0], parts[ib][0]), ia, ib)
                        for ia in range(len(parts))
                        for ib in range(ia + 1, len(parts))
                        if adjacent(mi, parts[ia], parts[ib])
                    ),
                )
                for _, ia, ib in pairs:
                    merged = tuple(sorted(parts[ia] + parts[ib]))
                    if merged_key(mi, merged) == best_key:
                        partitions[mi] = [
                            p for j, p in enumerate(parts) if j not in (ia, ib)
                        ]
                        partitions[mi].append(merged)
                        partitions[mi].sort()
                        parts = partitions[mi]
                        changed = True
                        break
    return Vocabulary(
        "psm", tuple(entries), corpus_hash(_molecule_lines(molecules))
    )


# ---------------------------------------------------------------------------
# Serialization: one-line JSON header, then tab-separated entry lines
# (rank, canonical SMILES, count, atom_count, has_ring). '#' comments allowed.


def save_vocab(vocab, path):
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format_version": FORMAT_VERSION,
            "scheme": vocab.scheme,
            "corpus_hash": vocab.corpus_hash,
            "k": vocab.k,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rank, e in enumerate(vocab.entries, start=1):
            ring = "true" if e.has_ring else "false"
            fh.write(f"{rank}\t{e.smiles}\t{e.count}\t{e.atom_count}\t{ring}\n")


def load_vocab(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [
            line.rstrip("\n")
            for line in fh
            if line.strip() and not line.startswith("#")
        ]
    if not lines:
        raise VocabFormatError("empty vocabulary file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise VocabFormatError(f"malformed vocabulary header: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise VocabFormatError(
            f"unsupported format_version {header.get('format_version')!r}"
        )
    scheme = header.get("scheme")
    if scheme not in ("bbb", "psm"):
        raise VocabFormatError(f"unknown scheme {scheme!r}")
    entries = []
    expected_rank = 1
    for line in lines[1:]:
        fields = line.split("\t")
        if len(fields) != 5:
            raise VocabFormatError(f"malformed entry line: {line!r}")
        rank_txt, smiles, count_txt, atom_count_txt, ring_txt = fields
        if int(rank_txt) != expected_rank:
            raise VocabFormatError(f"non-sequential rank {rank_txt}")
        expected_rank += 1
        frag = whole_molecule_fragment(parse_smiles(smiles))
        key = canonical_key(frag, charge_sensitive=True)
        count = int(count_txt)
        atom_count = int(atom_count_txt)
        if count < 1:
            raise VocabFormatError(f"non-positive count in line: {line!r}")
        if atom_count != len(frag):
            raise VocabFormatError(
                f"atom_count {atom_count} does not match SMILES {smiles!r}"
            )
        entries.append(
            VocabEntry(key, smiles, count, atom_count, ring_txt == "true")
        )
    if header.get("k") != len(entries):
        raise VocabFormatError(
            f"header k={header.get('k')} but {len(entries)} entries"
        )
    return Vocabulary(scheme, tuple(entries), header.get("corpus_hash", "unknown"))
