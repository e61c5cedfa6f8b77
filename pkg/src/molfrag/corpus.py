"""Corpus file handling, seeded splitting, and deterministic parallel maps.

Corpus files are UTF-8, one SMILES per line, '#'-prefixed comment lines
ignored. Parallel maps preserve input order, so results are byte-identical
regardless of worker count.
"""

import hashlib
import json
import multiprocessing
import os
import random

from .errors import EmptyCorpusError, SmilesParseError
from .molgraph import parse_smiles

WORKERS_ENV_VAR = "MOLFRAG_WORKERS"


def default_workers():
    value = os.environ.get(WORKERS_ENV_VAR)
    if value:
        return max(1, int(value))
    return 1


def read_smiles_lines(path):
    """(line_number, smiles) pairs, skipping blanks and '#' comments."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            out.append((lineno, line))
    return out


def load_corpus(path, skip_invalid=False, log=None):
    """Parse a corpus file. Returns (ids, molecules); ids are input line
    numbers as strings. With skip_invalid, parse failures are logged and
    dropped instead of raised."""
    ids = []
    molecules = []
    for lineno, line in read_smiles_lines(path):
        try:
            mol = parse_smiles(line)
        except SmilesParseError as exc:
            if skip_invalid:
                if log is not None:
                    log(f"line {lineno}: skipped ({exc})")
                continue
            raise SmilesParseError(f"line {lineno}: {exc}", exc.position) from exc
        ids.append(str(lineno))
        molecules.append(mol)
    if not molecules:
        raise EmptyCorpusError(f"no molecules in {path}")
    return ids, molecules


def parallel_map(func, items, workers):
    """Order-preserving map, sequential for workers <= 1."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [func(x) for x in items]
    chunk = max(1, len(items) // (workers * 8))
    with multiprocessing.Pool(workers) as pool:
        return pool.map(func, items, chunksize=chunk)


def split_corpus(lines, ratios, seed):
    """Seeded random partition of corpus lines into len(ratios) buckets.

    Exact: every line lands in exactly one bucket; bucket sizes are the floor
    allocation with the remainder assigned to the first bucket.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1.0, got {ratios}")
    lines = list(lines)
    order = list(range(len(lines)))
    random.Random(seed).shuffle(order)
    sizes = [int(len(lines) * r) for r in ratios]
    sizes[0] += len(lines) - sum(sizes)
    buckets = []
    start = 0
    for size in sizes:
        chosen = sorted(order[start : start + size])
        buckets.append([lines[i] for i in chosen])
        start += size
    return buckets


def config_fingerprint(config):
    """Short stable hash of a configuration mapping, for output provenance."""
    payload = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]
