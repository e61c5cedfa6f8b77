"""Molecular graph data model, SMILES parsing/writing, ring perception.

The model is 2D and hydrogen-implicit: heavy atoms carry (element, formal
charge), bonds are single/double/triple. Aromatic input is kekulized at parse
time by a backtracking perfect matching, so the internal representation never
contains an aromatic bond type. All objects are immutable after construction
and safe to share across workers.
"""

from collections import deque
from dataclasses import dataclass, field

from .canon import canonical_form
from .elements import (
    AROMATIC_ELEMENTS,
    ORGANIC_SUBSET,
    SUPPORTED_ELEMENTS,
    allowed_valences,
    implicit_hydrogens,
    max_valence,
)
from .errors import (
    DisconnectedMoleculeError,
    KekulizationError,
    SmilesParseError,
    UnsupportedElementError,
    ValenceError,
)

BOND_ORDERS = (1, 2, 3)


@dataclass(frozen=True)
class Atom:
    element: str
    formal_charge: int
    index: int


@dataclass(frozen=True)
class Bond:
    """Unordered bond between two atom indices; endpoints stored with u < v."""

    u: int
    v: int
    order: int

    def __post_init__(self):
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    @property
    def endpoints(self):
        return (self.u, self.v)


@dataclass(frozen=True)
class Molecule:
    atoms: tuple
    bonds: tuple
    source: str = None
    _adjacency: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        adjacency = {i: [] for i in range(len(self.atoms))}
        for b in self.bonds:
            adjacency[b.u].append((b.v, b.order))
            adjacency[b.v].append((b.u, b.order))
        for neigh in adjacency.values():
            neigh.sort()
        object.__setattr__(self, "_adjacency", adjacency)

    def __len__(self):
        return len(self.atoms)

    def neighbors(self, i):
        return self._adjacency[i]

    def bond_order_sum(self, i):
        return sum(order for _, order in self._adjacency[i])

    def bond_between(self, i, j):
        for k, order in self._adjacency[i]:
            if k == j:
                return Bond(min(i, j), max(i, j), order)
        return None

    def bond_dict(self):
        return {(b.u, b.v): b.order for b in self.bonds}


@dataclass(frozen=True)
class RingInfo:
    atom_in_ring: tuple
    bond_in_ring: dict  # (u, v) -> bool
    rings: tuple  # each ring: tuple of atom indices in cycle order


# ---------------------------------------------------------------------------
# SMILES parsing


class _ParsedAtom:
    __slots__ = ("element", "charge", "aromatic", "explicit_h", "bracket", "position")

    def __init__(self, element, charge, aromatic, explicit_h, bracket, position):
        self.element = element
        self.charge = charge
        self.aromatic = aromatic
        self.explicit_h = explicit_h  # None for organic-subset atoms
        self.bracket = bracket
        self.position = position


_TWO_LETTER = ("Cl", "Br", "Si", "Se")
_BOND_SYMBOLS = {"-": 1, "=": 2, "#": 3, ":": 1, "/": 1, "\\": 1}


def _parse_bracket(text, start):
    """Parse a bracket atom starting at text[start] == '['. Returns
    (_ParsedAtom, index after closing bracket). [H] yields element 'H'."""
    i = start + 1
    n = len(text)
    if i < n and text[i].isdigit():
        raise SmilesParseError("isotope specifications are not supported", i)
    element = None
    aromatic = False
    for sym in ("se",) + _TWO_LETTER:
        if text.startswith(sym, i):
            element = "Se" if sym == "se" else sym
            aromatic = sym == "se"
            i += 2
            break
    if element is None:
        if i < n and text[i] in "bcnosp":
            element = text[i].upper()
            aromatic = True
            i += 1
        elif i < n and text[i].isupper():
            # single uppercase letter element, including H
            element = text[i]
            i += 1
        else:
            raise SmilesParseError("expected element symbol in bracket atom", i)
    if element != "H" and element not in SUPPORTED_ELEMENTS:
        raise UnsupportedElementError(f"unsupported element {element!r}", start)
    while i < n and text[i] == "@":  # chirality: accepted and discarded
        i += 1
    explicit_h = 0
    if i < n and text[i] == "H":
        i += 1
        digits = ""
        while i < n and text[i].isdigit():
            digits += text[i]
            i += 1
        explicit_h = int(digits) if digits else 1
    charge = 0
    if i < n and text[i] in "+-":
        sign = 1 if text[i] == "+" else -1
        symbol = text[i]
        i += 1
        if i < n and text[i].isdigit():
            digits = ""
            while i < n and text[i].isdigit():
                digits += text[i]
                i += 1
            charge = sign * int(digits)
        else:
            count = 1
            while i < n and text[i] == symbol:
                count += 1
                i += 1
            charge = sign * count
    if i >= n or text[i] != "]":
        raise SmilesParseError("unterminated bracket atom", start)
    if not -4 <= charge <= 4:
        raise SmilesParseError(f"formal charge {charge} out of range [-4, 4]", start)
    return _ParsedAtom(element, charge, aromatic, explicit_h, True, start), i + 1


def _kekulize(atoms, bonds, aromatic_bonds):
    """Assign single/double orders to aromatic bonds via perfect matching.

    An aromatic atom needs exactly one double bond iff its valence is not
    already saturated by sigma bonds (+ explicit hydrogens). Raises when no
    perfect matching over the needy atoms exists.
    """
    if not aromatic_bonds:
        return
    sigma = {i: 0 for i in range(len(atoms))}
    for (u, v), order in bonds.items():
        sigma[u] += order
        sigma[v] += order
    needs = set()
    for i, atom in enumerate(atoms):
        if not atom.aromatic:
            continue
        h = atom.explicit_h if atom.bracket else 0
        vals = allowed_valences(atom.element, atom.charge)
        if not vals:
            raise ValenceError(
                f"no allowed valence for {atom.element} charge {atom.charge}",
                atom.position,
            )
        free = min(vals) - sigma[i] - h
        if free >= 1:
            needs.add(i)
    candidate = {i: [] for i in needs}
    for u, v in sorted(aromatic_bonds):
        if u in needs and v in needs:
            candidate[u].append(v)
            candidate[v].append(u)

    matched = {}

    def backtrack(remaining):
        if not remaining:
            return True
        v = min(remaining)
        for w in candidate[v]:
            if w in remaining:
                matched[v] = w
                matched[w] = v
                if backtrack(remaining - {v, w}):
                    return True
                del matched[v], matched[w]
        return False

    if not backtrack(frozenset(needs)):
        first = atoms[min(needs)] if needs else atoms[0]
        raise KekulizationError("unkekulizable aromatic system", first.position)
    for u, v in aromatic_bonds:
        if matched.get(u) == v:
            bonds[(u, v)] = 2


def parse_smiles(text):
    """Parse a single-molecule SMILES string into a kekulized Molecule.

    Stereo markers are accepted and discarded; isotopes and multi-fragment
    inputs ('.') are rejected. Atom order follows token order.
    """
    if not text:
        raise SmilesParseError("empty SMILES", 0)
    atoms = []
    bonds = {}  # (u, v) u < v -> order
    aromatic_bonds = set()
    prev = None
    pending_order = None  # explicit bond symbol awaiting next atom
    branch_stack = []
    ring_openings = {}  # digit -> (atom index, explicit order or None, position)
    i = 0
    n = len(text)

    def add_bond(a, b, order, aromatic, position):
        key = (min(a, b), max(a, b))
        if a == b:
            raise SmilesParseError("self-bond", position)
        if key in bonds:
            raise SmilesParseError("duplicate bond between atoms", position)
        bonds[key] = order
        if aromatic:
            aromatic_bonds.add(key)

    def close_ring(digit, position):
        nonlocal pending_order
        if prev is None:
            raise SmilesParseError("ring-bond digit before any atom", position)
        if digit in ring_openings:
            other, other_order, _ = ring_openings.pop(digit)
            order = pending_order if pending_order is not None else other_order
            if (
                pending_order is not None
                and other_order is not None
                and pending_order != other_order
            ):
                raise SmilesParseError("conflicting ring-bond orders", position)
            aromatic = (
                order is None
                and atoms[prev].aromatic
                and atoms[other].aromatic
            )
            add_bond(prev, other, order if order is not None else 1, aromatic, position)
        else:
            ring_openings[digit] = (prev, pending_order, position)
        pending_order = None

    def add_atom(parsed):
        nonlocal prev, pending_order
        atoms.append(parsed)
        idx = len(atoms) - 1
        if prev is not None:
            aromatic = (
                pending_order is None
                and atoms[prev].aromatic
                and parsed.aromatic
            )
            order = pending_order if pending_order is not None else 1
            add_bond(prev, idx, order, aromatic, parsed.position)
        elif pending_order is not None:
            raise SmilesParseError("bond symbol without preceding atom", parsed.position)
        prev = idx
        pending_order = None

    while i < n:
        ch = text[i]
        if ch == "[":
            parsed, i = _parse_bracket(text, i)
            add_atom(parsed)
        elif text.startswith(("Cl", "Br", "Si", "Se"), i):
            sym = text[i : i + 2]
            if sym not in ORGANIC_SUBSET and sym not in ("Si", "Se"):
                raise UnsupportedElementError(f"unsupported element {sym!r}", i)
            if sym in ("Si", "Se"):
                raise SmilesParseError(f"{sym} requires bracket notation", i)
            add_atom(_ParsedAtom(sym, 0, False, None, False, i))
            i += 2
        elif ch in "BCNOFPSI":
            add_atom(_ParsedAtom(ch, 0, False, None, False, i))
            i += 1
        elif ch in "bcnosp":
            add_atom(_ParsedAtom(ch.upper(), 0, True, None, False, i))
            i += 1
        elif ch in _BOND_SYMBOLS:
            if pending_order is not None:
                raise SmilesParseError("consecutive bond symbols", i)
            pending_order = _BOND_SYMBOLS[ch]
            i += 1
        elif ch == "(":
            if prev is None:
                raise SmilesParseError("branch before any atom", i)
            branch_stack.append(prev)
            i += 1
        elif ch == ")":
            if not branch_stack:
                raise SmilesParseError("unmatched closing parenthesis", i)
            prev = branch_stack.pop()
            i += 1
        elif ch.isdigit():
            close_ring(ch, i)
            i += 1
        elif ch == "%":
            if i + 2 >= n or not text[i + 1 : i + 3].isdigit():
                raise SmilesParseError("malformed %nn ring-bond number", i)
            close_ring(text[i + 1 : i + 3], i)
            i += 3
        elif ch == ".":
            raise DisconnectedMoleculeError("multi-fragment SMILES rejected", i)
        else:
            raise SmilesParseError(f"unexpected character {ch!r}", i)

    if branch_stack:
        raise SmilesParseError("unclosed branch", n)
    if ring_openings:
        digit, (_, _, position) = sorted(ring_openings.items())[0]
        raise SmilesParseError(f"unclosed ring-bond digit {digit}", position)
    if not atoms:
        raise SmilesParseError("no atoms in SMILES", 0)

    # Fold explicit [H] atoms into their heavy neighbor's implicit-H count.
    h_indices = {idx for idx, a in enumerate(atoms) if a.element == "H"}
    if h_indices:
        for idx in h_indices:
            partners = [
                (key, order)
                for key, order in bonds.items()
                if idx in key
            ]
            if len(partners) != 1 or partners[0][1] != 1:
                raise SmilesParseError(
                    "explicit [H] must have exactly one single bond",
                    atoms[idx].position,
                )
            (u, v), _ = partners[0]
            heavy = u if v == idx else v
            if heavy in h_indices:
                raise SmilesParseError("H-H bond unsupported", atoms[idx].position)
        remap = {}
        kept = []
        for idx, a in enumerate(atoms):
            if idx not in h_indices:
                remap[idx] = len(kept)
                kept.append(a)
        new_bonds = {}
        new_aromatic = set()
        for (u, v), order in bonds.items():
            if u in h_indices or v in h_indices:
                continue
            key = (remap[u], remap[v])
            key = (min(key), max(key))
            new_bonds[key] = order
            if (u, v) in aromatic_bonds:
                new_aromatic.add(key)
        atoms, bonds, aromatic_bonds = kept, new_bonds, new_aromatic
        if not atoms:
            raise SmilesParseError("molecule contains no heavy atoms", 0)

    # Connectivity check (ring digits could in principle be abused, and the
    # '.'-rejection above does not cover pathological cases).
    if len(atoms) > 1:
        adjacency = {i: set() for i in range(len(atoms))}
        for u, v in bonds:
            adjacency[u].add(v)
            adjacency[v].add(u)
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for y in adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        if len(seen) != len(atoms):
            raise DisconnectedMoleculeError("disconnected molecular graph", 0)

    _kekulize(atoms, bonds, aromatic_bonds)

    # Valence validation after kekulization.
    order_sum = {i: 0 for i in range(len(atoms))}
    for (u, v), order in bonds.items():
        order_sum[u] += order
        order_sum[v] += order
    for idx, a in enumerate(atoms):
        h = a.explicit_h if (a.bracket and a.explicit_h is not None) else 0
        if order_sum[idx] + h > max_valence(a.element, a.charge):
            raise ValenceError(
                f"valence violation on {a.element} (charge {a.charge}): "
                f"bond order sum {order_sum[idx]} + {h} H",
                a.position,
            )

    mol_atoms = tuple(
        Atom(a.element, a.charge, idx) for idx, a in enumerate(atoms)
    )
    mol_bonds = tuple(
        Bond(u, v, order) for (u, v), order in sorted(bonds.items())
    )
    return Molecule(mol_atoms, mol_bonds, source=text)


# ---------------------------------------------------------------------------
# SMILES writing


def _atom_labels(mol, charge_sensitive=True):
    return [
        (a.element, a.formal_charge if charge_sensitive else 0) for a in mol.atoms
    ]


def canonical_atom_order(mol):
    """Canonical permutation: order[k] = original index at canonical rank k."""
    _, order = canonical_form(_atom_labels(mol), mol.bond_dict())
    return order


def _atom_token(element, charge, bond_order_sum):
    if charge == 0 and element in ORGANIC_SUBSET:
        return element
    h = implicit_hydrogens(element, charge, bond_order_sum)
    h_part = "" if h == 0 else ("H" if h == 1 else f"H{h}")
    if charge == 0:
        charge_part = ""
    elif charge == 1:
        charge_part = "+"
    elif charge == -1:
        charge_part = "-"
    else:
        charge_part = f"{charge:+d}"
    return f"[{element}{h_part}{charge_part}]"


_ORDER_SYMBOL = {1: "", 2: "=", 3: "#"}


def write_smiles(mol):
    """Deterministic canonical SMILES: a pure function of the isomorphism
    class, so isomorphic molecules yield identical strings."""
    order = canonical_atom_order(mol)
    pos = {v: k for k, v in enumerate(order)}
    # Rebuild adjacency in canonical indices.
    adjacency = {k: [] for k in range(len(order))}
    for b in mol.bonds:
        adjacency[pos[b.u]].append((pos[b.v], b.order))
        adjacency[pos[b.v]].append((pos[b.u], b.order))
    for neigh in adjacency.values():
        neigh.sort()
    atoms = [mol.atoms[v] for v in order]
    order_sum = {
        k: sum(o for _, o in adjacency[k]) for k in range(len(order))
    }

    visited = set()
    ring_bonds = {}  # (a, b) a < b -> digit assigned at open time
    ring_digit_pool = list(range(1, 100))
    open_digits = {}

    # First pass: find spanning tree edges / ring-closure edges via DFS from 0.
    tree_children = {k: [] for k in adjacency}
    closure_at = {k: [] for k in adjacency}  # vertex -> [(other, order)]
    visited.add(0)
    stack = [(0, iter(adjacency[0]))]
    parent = {0: None}
    tree_edges = set()
    while stack:
        v, it = stack[-1]
        advanced = False
        for w, bond_order in it:
            if w not in visited:
                visited.add(w)
                parent[w] = v
                tree_children[v].append((w, bond_order))
                tree_edges.add((min(v, w), max(v, w)))
                stack.append((w, iter(adjacency[w])))
                advanced = True
                break
            else:
                key = (min(v, w), max(v, w))
                if key not in tree_edges and key not in ring_bonds:
                    ring_bonds[key] = bond_order
                    closure_at[key[0]].append((key[1], bond_order))
                    closure_at[key[1]].append((key[0], bond_order))
        if not advanced:
            stack.pop()

    out = []

    def emit(v):
        out.append(_atom_token(atoms[v].element, atoms[v].formal_charge, order_sum[v]))
        for w, bond_order in sorted(closure_at[v]):
            key = (min(v, w), max(v, w))
            if key in open_digits:
                digit = open_digits.pop(key)
                ring_digit_pool.append(digit)
                ring_digit_pool.sort()
            else:
                digit = ring_digit_pool.pop(0)
                open_digits[key] = digit
            out.append(_ORDER_SYMBOL[bond_order])
            out.append(str(digit) if digit < 10 else f"%{digit:02d}")
        children = tree_children[v]
        for idx, (w, bond_order) in enumerate(children):
            last = idx == len(children) - 1
            if not last:
                out.append("(")
            out.append(_ORDER_SYMBOL[bond_order])
            emit(w)
            if not last:
                out.append(")")

    emit(0)
    return "".join(out)


# ---------------------------------------------------------------------------
# Ring perception


def find_bridges(n_atoms, bonds):
    """Bridge bonds via iterative DFS low-link. Returns a set of (u, v) pairs
    with u < v whose removal disconnects their endpoints."""
    adjacency = {i: [] for i in range(n_atoms)}
    for (u, v) in bonds:
        adjacency[u].append(v)
        adjacency[v].append(u)
    for neigh in adjacency.values():
        neigh.sort()
    visited = [False] * n_atoms
    disc = [0] * n_atoms
    low = [0] * n_atoms
    bridges = set()
    timer = [0]
    for root in range(n_atoms):
        if visited[root]:
            continue
        stack = [(root, None, iter(adjacency[root]))]
        visited[root] = True
        disc[root] = low[root] = timer[0]
        timer[0] += 1
        while stack:
            v, parent_edge_used, it = stack[-1]
            advanced = False
            for w in it:
                if not visited[w]:
                    visited[w] = True
                    disc[w] = low[w] = timer[0]
                    timer[0] += 1
                    stack.append((w, v, iter(adjacency[w])))
                    advanced = True
                    break
                elif w != parent_edge_used:
                    low[v] = min(low[v], disc[w])
                elif parent_edge_used is not None and w == parent_edge_used:
                    # skip the tree edge back to parent exactly once
                    parent_edge_used = None
                    stack[-1] = (v, None, it)
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[v])
                    if low[v] > disc[p]:
                        bridges.add((min(p, v), max(p, v)))
    return bridges


def _shortest_path_tree(adjacency, root):
    parent = {root: None}
    dist = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in adjacency[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                parent[w] = v
                queue.append(w)
    return parent, dist


def _path_to_root(parent, v):
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def minimum_cycle_basis(n_atoms, bond_keys):
    """Minimum cycle basis (smallest-set-of-smallest-rings style) via the
    Horton candidate set + greedy GF(2) independence. Returns ordered simple
    cycles as atom-index tuples."""
    adjacency = {i: [] for i in range(n_atoms)}
    edges = sorted(bond_keys)
    for (u, v) in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    for neigh in adjacency.values():
        neigh.sort()
    edge_index = {e: i for i, e in enumerate(edges)}

    components = 0
    seen = set()
    for root in range(n_atoms):
        if root in seen:
            continue
        components += 1
        queue = deque([root])
        seen.add(root)
        while queue:
            x = queue.popleft()
            for y in adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    rank_needed = len(edges) - n_atoms + components
    if rank_needed == 0:
        return ()

    candidates = {}
    for v in range(n_atoms):
        parent, dist = _shortest_path_tree(adjacency, v)
        for (x, y) in edges:
            if x not in dist or y not in dist:
                continue
            px = _path_to_root(parent, x)
            py = _path_to_root(parent, y)
            if set(px) & set(py) != {v}:
                continue
            # v..x along the tree, then edge (x, y), then y back toward v
            cycle = px[::-1] + py[:-1]
            if len(cycle) < 3 or len(set(cycle)) != len(cycle):
                continue
            vec = 0
            ok = True
            ring_edges = list(zip(cycle, cycle[1:] + cycle[:1]))
            for a, b in ring_edges:
                key = (min(a, b), max(a, b))
                if key not in edge_index:
                    ok = False
                    break
                vec |= 1 << edge_index[key]
            if not ok:
                continue
            # canonical rotation for dedup/determinism
            canon = _canonical_cycle(cycle)
            current = candidates.get(vec)
            if current is None or canon < current:
                candidates[vec] = canon

    ordered = sorted(candidates.items(), key=lambda kv: (len(kv[1]), kv[1]))
    basis = []
    pivots = {}
    for vec, cycle in ordered:
        reduced = vec
        while reduced:
            top = reduced.bit_length() - 1
            if top not in pivots:
                break
            reduced ^= pivots[top]
        if reduced:
            pivots[reduced.bit_length() - 1] = reduced
            basis.append(cycle)
            if len(basis) == rank_needed:
                break
    return tuple(basis)


def _canonical_cycle(cycle):
    """Rotate/reflect a cycle so it starts at its smallest atom and proceeds
    toward its smaller neighbor; makes cycle tuples order-independent."""
    k = len(cycle)
    start = cycle.index(min(cycle))
    forward = tuple(cycle[(start + i) % k] for i in range(k))
    backward = tuple(cycle[(start - i) % k] for i in range(k))
    return min(forward, backward)


def perceive_rings(mol):
    """Exact bridge classification plus a smallest-ring basis of size
    |bonds| - |atoms| + 1 (connected molecule)."""
    bond_keys = [(b.u, b.v) for b in mol.bonds]
    bridges = find_bridges(len(mol.atoms), bond_keys)
    bond_in_ring = {key: key not in bridges for key in bond_keys}
    atom_in_ring = [False] * len(mol.atoms)
    for (u, v), in_ring in bond_in_ring.items():
        if in_ring:
            atom_in_ring[u] = True
            atom_in_ring[v] = True
    rings = minimum_cycle_basis(len(mol.atoms), bond_keys)
    return RingInfo(tuple(atom_in_ring), bond_in_ring, rings)
