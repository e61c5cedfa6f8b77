"""Supported elements and the charge-adjusted valence table.

This is the single source of truth for valences; both the parser and the
bond-assembly module import from here.
"""

from .errors import MolfragError

# Heavy atoms we accept. Hydrogens are implicit throughout.
SUPPORTED_ELEMENTS = ("B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I", "Si", "Se")

# Organic subset: may appear without brackets (charge 0, implicit H from valence).
ORGANIC_SUBSET = ("B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I")

# Elements allowed as lowercase aromatic tokens.
AROMATIC_ELEMENTS = ("b", "c", "n", "o", "s", "p", "se")

_BASE_VALENCES = {
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "F": (1,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
    "Si": (4,),
    "Se": (2, 6),
}

# Lone-pair-bearing elements: valence shifts with the charge (N+ -> 4, O- -> 1, ...).
_LONE_PAIR_SHIFT = {"N", "O", "P", "S", "Se", "F", "Cl", "Br", "I"}


def allowed_valences(element, charge):
    """Allowed total bond-order sums for an (element, formal charge) pair,
    ascending. Empty tuple means no bonding state is representable."""
    if element not in _BASE_VALENCES:
        raise MolfragError(f"unsupported element {element!r}")
    base = _BASE_VALENCES[element]
    if charge == 0:
        return base
    if element in _LONE_PAIR_SHIFT:
        shifted = tuple(v + charge for v in base if v + charge >= 0)
    elif element == "B":
        shifted = tuple(v - charge for v in base if v - charge >= 0)
    else:  # C, Si: carbanion and carbocation are both trivalent
        shifted = tuple(v - abs(charge) for v in base if v - abs(charge) >= 0)
    return shifted


def max_valence(element, charge):
    vals = allowed_valences(element, charge)
    return vals[-1] if vals else 0


def implicit_hydrogens(element, charge, bond_order_sum):
    """Hydrogen count that completes the smallest allowed valence >= the
    current bond-order sum; 0 if the atom already exceeds every valence."""
    for v in allowed_valences(element, charge):
        if bond_order_sum <= v:
            return v - bond_order_sum
    return 0
