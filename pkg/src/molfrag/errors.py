"""Exception taxonomy shared by the library and the CLI.

Exit-code mapping (see cli.py): usage errors -> 1, parse/valence/kekulization
errors -> 2, scheme or vocabulary mismatches -> 3, I/O and format errors -> 4.
"""


class MolfragError(Exception):
    """Base class for all library errors."""


class SmilesParseError(MolfragError):
    """Syntax or semantic error in a SMILES string. Carries the 0-based
    position in the input text where the problem was detected."""

    def __init__(self, message, position):
        super().__init__(f"{message} (position {position})")
        self.position = position


class UnsupportedElementError(SmilesParseError):
    pass


class ValenceError(SmilesParseError):
    """Bond-order sum exceeds every allowed valence for an (element, charge) pair."""


class KekulizationError(SmilesParseError):
    """No alternating single/double assignment exists for an aromatic system."""


class DisconnectedMoleculeError(SmilesParseError):
    """Multi-fragment SMILES ('.') are rejected; the model assumes connected graphs."""


class DisconnectedFragmentError(MolfragError):
    """Operation requires a connected fragment."""


class SchemeMismatchError(MolfragError):
    """Vocabulary scheme incompatible with the requested decomposition scheme."""


class VocabFormatError(MolfragError):
    """Malformed vocabulary file, version mismatch, or duplicate key."""


class EmptyCorpusError(MolfragError):
    """Corpus contains no molecules."""


class AssemblyError(MolfragError):
    """Cycle breaking would have to delete an intra-motif bond."""
