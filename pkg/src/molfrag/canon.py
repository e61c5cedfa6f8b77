"""Exact canonical labeling of small node/edge-labeled graphs.

Iterated neighborhood refinement on (label, degree, bond-order multiset)
colors, with tie-breaking by exhaustive branching over the smallest remaining
color class. The output is the lexicographically minimal adjacency encoding,
so two graphs receive equal keys iff they are isomorphic as labeled graphs.
Not hash-based: no collisions, which keeps vocabulary counting exact.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class MotifKey:
    """Order-independent identifier of a fragment's isomorphism class."""

    key: bytes
    charge_sensitive: bool

    def hex(self):
        return self.key.hex()


def _refine(colors, adjacency):
    """Equitable refinement: split color classes by the multiset of
    (neighbor color, bond order) pairs until stable. Deterministic."""
    n = len(colors)
    colors = list(colors)
    while True:
        signatures = []
        for i in range(n):
            sig = tuple(sorted((colors[j], order) for j, order in adjacency[i]))
            signatures.append((colors[i], sig))
        ranking = {sig: rank for rank, sig in enumerate(sorted(set(signatures)))}
        new_colors = [ranking[signatures[i]] for i in range(n)]
        if new_colors == colors:
            return colors
        colors = new_colors


def _encode(order, labels, adjacency):
    """Adjacency encoding of the graph under a vertex ordering.

    order[k] = original index placed at canonical position k.
    """
    pos = {v: k for k, v in enumerate(order)}
    parts = [repr(len(order))]
    parts.extend(repr(labels[v]) for v in order)
    edges = []
    for v in order:
        for w, bond_order in adjacency[v]:
            a, b = pos[v], pos[w]
            if a < b:
                edges.append((a, b, bond_order))
    parts.extend(f"{a},{b},{o}" for a, b, o in sorted(edges))
    return "|".join(parts).encode()


def _search(colors, labels, adjacency, best):
    """Branch over the smallest non-singleton color class; keep the minimal
    complete encoding in best[0] (list used as a mutable cell)."""
    n = len(colors)
    colors = _refine(colors, adjacency)
    classes = {}
    for i, c in enumerate(colors):
        classes.setdefault(c, []).append(i)
    target = None
    for c in sorted(classes):
        if len(classes[c]) > 1:
            target = c
            break
    if target is None:
        order = sorted(range(n), key=lambda i: colors[i])
        enc = _encode(order, labels, adjacency)
        if best[0] is None or enc < best[0][0]:
            best[0] = (enc, order)
        return
    for v in classes[target]:
        branched = list(colors)
        # individualize v: give it a color just below its class
        branched[v] = target - 0.5
        _search(branched, labels, adjacency, best)


def canonical_form(labels, bonds):
    """Canonicalize a connected labeled graph.

    labels: per-vertex hashable label tuples. bonds: {(i, j): order} with
    i < j. Returns (encoding bytes, order) where order[k] is the original
    vertex placed at canonical position k.
    """
    n = len(labels)
    adjacency = [[] for _ in range(n)]
    for (i, j), order in bonds.items():
        adjacency[i].append((j, order))
        adjacency[j].append((i, order))
    for neigh in adjacency:
        neigh.sort()
    initial = [
        (labels[i], len(adjacency[i]), tuple(sorted(o for _, o in adjacency[i])))
        for i in range(n)
    ]
    ranking = {sig: rank for rank, sig in enumerate(sorted(set(initial)))}
    colors = [ranking[initial[i]] for i in range(n)]
    best = [None]
    _search(colors, labels, adjacency, best)
    return best[0]
