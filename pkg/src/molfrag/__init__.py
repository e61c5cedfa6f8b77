"""Molecular fragmentation toolkit: SMILES graphs, motif vocabularies,
BBB/PSM/Subcover decompositions, corpus diagnostics, and scored-bond-graph
postprocessing."""

__version__ = "0.1.0"

from .assemble import ScoredBondGraph, cycle_break, run_assembly, valency_correct
from .canon import MotifKey
from .fragmentation import (
    bbb_decompose,
    bbb_fragment,
    decompose,
    find_m_in_f,
    match_subgraph,
    psm_decompose,
    subcover_decompose,
)
from .fragments import (
    Decomposition,
    Fragment,
    canonical_key,
    whole_molecule_fragment,
)
from .molgraph import (
    Atom,
    Bond,
    Molecule,
    RingInfo,
    parse_smiles,
    perceive_rings,
    write_smiles,
)
from .stats import decomposition_stats, ring_histogram, vocab_composition
from .vocab import (
    Vocabulary,
    VocabEntry,
    bbb_build_vocab,
    load_vocab,
    psm_build_vocab,
    save_vocab,
)

__all__ = [
    "Atom",
    "Bond",
    "Decomposition",
    "Fragment",
    "Molecule",
    "MotifKey",
    "RingInfo",
    "ScoredBondGraph",
    "VocabEntry",
    "Vocabulary",
    "bbb_build_vocab",
    "bbb_decompose",
    "bbb_fragment",
    "canonical_key",
    "cycle_break",
    "decompose",
    "decomposition_stats",
    "find_m_in_f",
    "load_vocab",
    "match_subgraph",
    "parse_smiles",
    "perceive_rings",
    "psm_build_vocab",
    "psm_decompose",
    "ring_histogram",
    "run_assembly",
    "save_vocab",
    "subcover_decompose",
    "valency_correct",
    "vocab_composition",
    "whole_molecule_fragment",
    "write_smiles",
]
