"""The three decomposition schemes: BBB, PSM, and Subcover.

BBB cuts every acyclic bond adjacent to a ring and keeps whole-fragment
vocabulary hits; PSM greedily re-merges single atoms guided by vocabulary
counts; Subcover extends BBB by recursively extracting the largest, most
frequent vocabulary motif from unmatched fragments (charge-insensitive
subgraph matching).

Tie-breaking everywhere is size -> count -> canonical key -> smallest atom
index, so decompositions are deterministic and reproducible across runs and
worker counts.
"""

from collections import deque

from .errors import SchemeMismatchError
from .fragments import Decomposition, Fragment, canonical_key
from .molgraph import perceive_rings


def bbb_fragment(mol, ring_info=None):
    """Cut every non-ring bond with at least one ring-atom endpoint; return
    the connected components ordered by smallest contained atom index."""
    if ring_info is None:
        ring_info = perceive_rings(mol)
    cut = set()
    for b in mol.bonds:
        key = (b.u, b.v)
        if not ring_info.bond_in_ring[key] and (
            ring_info.atom_in_ring[b.u] or ring_info.atom_in_ring[b.v]
        ):
            cut.add(key)
    n = len(mol.atoms)
    seen = [False] * n
    components = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w, _ in mol.neighbors(v):
                key = (min(v, w), max(v, w))
                if key in cut or seen[w]:
                    continue
                seen[w] = True
                queue.append(w)
        components.append(Fragment(mol, tuple(comp)))
    return components


def match_subgraph(pattern, target, charge_sensitive):
    """Find pattern as an induced subgraph of target.

    Elements must match, bond orders must match on mapped pairs, pattern
    non-bonds must map to target non-bonds, and charges are compared only in
    the charge-sensitive variant. Returns the lexicographically smallest
    mapping (tuple of target parent atom indices, aligned with the pattern's
    atom order), or None.
    """
    p_atoms = pattern.atoms()
    t_atoms = target.atoms()
    np_, nt = len(p_atoms), len(t_atoms)
    if np_ > nt:
        return None
    p_local = {idx: k for k, idx in enumerate(pattern.atom_indices)}
    t_local = {idx: k for k, idx in enumerate(target.atom_indices)}
    p_adj = [[None] * np_ for _ in range(np_)]
    for b in pattern.bonds:
        i, j = p_local[b.u], p_local[b.v]
        p_adj[i][j] = p_adj[j][i] = b.order
    t_adj = [[None] * nt for _ in range(nt)]
    for b in target.bonds:
        i, j = t_local[b.u], t_local[b.v]
        t_adj[i][j] = t_adj[j][i] = b.order

    def compatible(pi, ti):
        pa, ta = p_atoms[pi], t_atoms[ti]
        if pa.element != ta.element:
            return False
        if charge_sensitive and pa.formal_charge != ta.formal_charge:
            return False
        return True

    mapping = [None] * np_
    used = [False] * nt

    def extend(pi):
        if pi == np_:
            return True
        for ti in range(nt):
            if used[ti] or not compatible(pi, ti):
                continue
            ok = True
            for pj in range(pi):
                if p_adj[pi][pj] != t_adj[ti][mapping[pj]]:
                    ok = False
                    break
            if ok:
                mapping[pi] = ti
                used[ti] = True
                if extend(pi + 1):
                    return True
                mapping[pi] = None
                used[ti] = False
        return False

    if extend(0):
        return tuple(target.atom_indices[ti] for ti in mapping)
    return None


def _connected_components(mol, indices):
    inside = set(indices)
    seen = set()
    comps = []
    for start in sorted(inside):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w, _ in mol.neighbors(v):
                if w in inside and w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append(tuple(sorted(comp)))
    return comps


def find_m_in_f(frag, vocab):
    """Recursive motif extraction from a fragment that missed the vocabulary.

    Repeatedly selects the vocabulary motif contained in the remaining
    fragment that is largest by atom count (ties: higher count, then smaller
    canonical key), removes the matched atoms, and recurses independently on
    each connected component of the remainder. Matching ignores formal
    charges. Returns (motifs, leftover single-atom fragments).
    """
    motifs = []
    leftovers = []
    # entries pre-sorted by (size desc, count desc, key asc) selection order
    candidates = sorted(
        vocab.entries, key=lambda e: (-e.atom_count, -e.count, e.key.key)
    )

    def recurse(current):
        selected = None
        selected_mapping = None
        for entry in candidates:
            if entry.atom_count > len(current):
                continue
            mapping = match_subgraph(
                entry.fragment(), current, charge_sensitive=False
            )
            if mapping is not None:
                selected = entry
                selected_mapping = mapping
                break
        if selected is None:
            for idx in current.atom_indices:
                leftovers.append(Fragment(current.molecule, (idx,)))
            return
        motifs.append(
            (Fragment(current.molecule, tuple(selected_mapping)), selected.key)
        )
        remainder = [
            i for i in current.atom_indices if i not in set(selected_mapping)
        ]
        for comp in _connected_components(current.molecule, remainder):
            recurse(Fragment(current.molecule, comp))

    recurse(frag)
    return motifs, leftovers


def _require_scheme(vocab, expected, operation):
    if vocab.scheme != expected:
        raise SchemeMismatchError(
            f"{operation} requires a {expected}-scheme vocabulary, "
            f"got {vocab.scheme!r}"
        )


def bbb_decompose(mol, vocab, ring_info=None):
    """Whole-fragment vocabulary hits become motifs; every other fragment is
    exploded into single atoms."""
    motifs = []
    singles = []
    for frag in bbb_fragment(mol, ring_info):
        entry = None
        if len(frag) >= 2:
            entry = vocab.lookup(canonical_key(frag, charge_sensitive=True))
        if entry is not None:
            motifs.append((frag, entry.key))
        else:
            singles.extend(Fragment(mol, (i,)) for i in frag.atom_indices)
    return Decomposition(mol, "bbb", tuple(motifs), tuple(singles))


def subcover_decompose(mol, vocab, ring_info=None):
    """BBB fragmentation, then recursive motif extraction from misses."""
    _require_scheme(vocab, "bbb", "subcover_decompose")
    motifs = []
    singles = []
    for frag in bbb_fragment(mol, ring_info):
        if len(frag) == 1:
            singles.append(frag)
            continue
        entry = vocab.lookup(canonical_key(frag, charge_sensitive=True))
        if entry is not None:
            motifs.append((frag, entry.key))
        else:
            sub_motifs, sub_singles = find_m_in_f(frag, vocab)
            motifs.extend(sub_motifs)
            singles.extend(sub_singles)
    return Decomposition(mol, "subcover", tuple(motifs), tuple(singles))


def psm_decompose(mol, vocab):
    """Iterative merging of adjacent fragments, starting from single atoms.

    Among all adjacent pairs whose merged fragment is in the vocabulary, the
    pair with the highest merged-motif count is merged first; stops at the
    fixpoint where no adjacent pair merges into a vocabulary member.
    """
    _require_scheme(vocab, "psm", "psm_decompose")
    parts = [(i,) for i in range(len(mol.atoms))]
    key_cache = {}

    def merged_key(indices):
        if indices not in key_cache:
            key_cache[indices] = canonical_key(
                Fragment(mol, indices), charge_sensitive=True
            )
        return key_cache[indices]

    adjacent = {(b.u, b.v) for b in mol.bonds}

    def parts_adjacent(pa, pb):
        for x in pa:
            for y in pb:
                if (min(x, y), max(x, y)) in adjacent:
                    return True
        return False

    while True:
        best = None
        for ia in range(len(parts)):
            for ib in range(ia + 1, len(parts)):
                if not parts_adjacent(parts[ia], parts[ib]):
                    continue
                merged = tuple(sorted(parts[ia] + parts[ib]))
                key = merged_key(merged)
                entry = vocab.lookup(key)
                if entry is None:
                    continue
                rank = (-entry.count, key.key, merged[0])
                if best is None or rank < best[0]:
                    best = (rank, ia, ib, merged)
        if best is None:
            break
        _, ia, ib, merged = best
        parts = [p for k, p in enumerate(parts) if k not in (ia, ib)]
        parts.append(merged)
        parts.sort()
    motifs = []
    singles = []
    for p in parts:
        frag = Fragment(mol, p)
        if len(p) >= 2:
            motifs.append((frag, merged_key(p)))
        else:
            singles.append(frag)
    return Decomposition(mol, "psm", tuple(motifs), tuple(singles))


_DECOMPOSERS = {
    "bbb": bbb_decompose,
    "psm": psm_decompose,
    "subcover": subcover_decompose,
}


def decompose(mol, vocab, scheme):
    """Dispatch to the named scheme's decomposition."""
    if scheme not in _DECOMPOSERS:
        raise SchemeMismatchError(f"unknown scheme {scheme!r}")
    return _DECOMPOSERS[scheme](mol, vocab)
