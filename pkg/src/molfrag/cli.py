"""Command surface: build-vocab, decompose, stats, split, assemble, parse,
compare.

Data goes to stdout or the --output file; progress and summaries go to
stderr, so pipelines stay clean. All commands are deterministic given
(inputs, config, seed), independent of worker count. Exit codes: 0 success,
1 usage, 2 parse, 3 scheme/vocab mismatch, 4 I/O or format.
"""

import functools
import json
import sys

import click

from . import __version__
from .assemble import ScoredBondGraph, run_assembly
from .corpus import (
    WORKERS_ENV_VAR,
    config_fingerprint,
    default_workers,
    load_corpus,
    parallel_map,
    read_smiles_lines,
    split_corpus,
)
from .errors import (
    EmptyCorpusError,
    MolfragError,
    SchemeMismatchError,
    SmilesParseError,
    VocabFormatError,
)
from .fragmentation import decompose
from .molgraph import write_smiles
from .records import decomposition_record, dump_record, header_line, molecule_record
from .stats import decomposition_stats, ring_histogram, vocab_composition
from .vocab import (
    FORMAT_VERSION,
    bbb_build_vocab,
    corpus_hash,
    eligible_bbb_records,
    load_vocab,
    psm_build_vocab,
    save_vocab,
    vocabulary_from_counts,
)

SCHEMES = ("bbb", "psm", "subcover")


def _log(message):
    print(message, file=sys.stderr)


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit(path, lines):
    fh, close = _open_output(path)
    try:
        for line in lines:
            fh.write(line + "\n")
    finally:
        if close:
            fh.close()


def _vocab_for_scheme(vocab, scheme):
    if scheme == "psm" and vocab.scheme != "psm":
        raise SchemeMismatchError("psm decomposition requires a psm vocabulary")
    if scheme == "subcover" and vocab.scheme != "bbb":
        raise SchemeMismatchError("subcover requires a bbb-scheme vocabulary")
    return vocab


def _decompose_one(item, vocab, scheme):
    mol_id, mol = item
    dec = decompose(mol, vocab, scheme)
    dec.validate()
    return decomposition_record(mol_id, dec), dec.n_fragments, len(dec.singles), len(
        mol.atoms
    )


@click.group()
@click.version_option(__version__)
def cli():
    """Molecular fragmentation toolkit: motif vocabularies, decompositions,
    diagnostics, and bond-graph postprocessing."""


@cli.command("build-vocab")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--scheme", type=click.Choice(("bbb", "psm")), required=True)
@click.option("--k", type=int, required=True)
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--workers", type=int, default=None)
@click.option("--skip-invalid", is_flag=True, default=False)
def cmd_build_vocab(input_path, scheme, k, output_path, workers, skip_invalid):
    """Mine a motif vocabulary from a SMILES corpus and write it to a file."""
    if k < 1:
        raise click.UsageError("--k must be >= 1")
    workers = workers if workers is not None else default_workers()
    ids, molecules = load_corpus(input_path, skip_invalid=skip_invalid, log=_log)
    if scheme == "bbb":
        record_lists = parallel_map(eligible_bbb_records, molecules, workers)
        counts = {}
        meta = {}
        for records in record_lists:
            for key, smiles, atom_count, has_ring in records:
                counts[key] = counts.get(key, 0) + 1
                meta.setdefault(key, (smiles, atom_count, has_ring))
        lines = [line for _, line in read_smiles_lines(input_path)]
        vocab = vocabulary_from_counts(counts, meta, k, "bbb", corpus_hash(lines))
    else:
        vocab = psm_build_vocab(molecules, k)
    if vocab.k == 0:
        raise EmptyCorpusError("zero eligible motifs in corpus")
    save_vocab(vocab, output_path)
    comp = vocab_composition(vocab)
    _log(f"vocabulary: scheme={scheme} k={vocab.k} (requested {k})")
    _log(f"ring-motif fraction: {comp.ring_motif_fraction:.3f}")
    _log("top motifs:")
    for entry in vocab.entries[:10]:
        _log(f"  {entry.smiles}\tcount={entry.count}")


@cli.command("decompose")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--scheme", type=click.Choice(SCHEMES), required=True)
@click.option("--vocab", "vocab_path", required=True, type=click.Path())
@click.option("--output", "output_path", default=None, type=click.Path())
@click.option("--workers", type=int, default=None)
@click.option("--skip-invalid", is_flag=True, default=False)
def cmd_decompose(input_path, scheme, vocab_path, output_path, workers, skip_invalid):
    """Decompose every corpus molecule; one JSON record per line."""
    workers = workers if workers is not None else default_workers()
    vocab = _vocab_for_scheme(load_vocab(vocab_path), scheme)
    ids, molecules = load_corpus(input_path, skip_invalid=skip_invalid, log=_log)
    worker = functools.partial(_decompose_one, vocab=vocab, scheme=scheme)
    results = parallel_map(worker, list(zip(ids, molecules)), workers)
    fingerprint = config_fingerprint(
        {"command": "decompose", "scheme": scheme, "vocab": vocab.corpus_hash}
    )
    lines = [header_line(FORMAT_VERSION, fingerprint, scheme=scheme)]
    total_fragments = 0
    total_singles = 0
    total_atoms = 0
    for record, n_fragments, n_singles, n_atoms in results:
        lines.append(dump_record(record))
        total_fragments += n_fragments
        total_singles += n_singles
        total_atoms += n_atoms
    _emit(output_path, lines)
    _log(
        f"decomposed {len(results)} molecules: "
        f"mean |F| = {total_fragments / len(results)!r}, "
        f"single-atom rate = {total_singles / total_atoms!r}"
    )


@cli.command("stats")
@click.option("--input", "input_path", default=None, type=click.Path())
@click.option(
    "--report",
    type=click.Choice(("decomposition", "ring-histogram", "vocab-composition")),
    required=True,
)
@click.option("--scheme", type=click.Choice(SCHEMES), default=None)
@click.option("--vocab", "vocab_path", default=None, type=click.Path())
@click.option("--output", "output_path", default=None, type=click.Path())
@click.option("--workers", type=int, default=None)
@click.option("--skip-invalid", is_flag=True, default=False)
@click.option("--figures", "figures_dir", default=None, type=click.Path())
def cmd_stats(
    input_path, report, scheme, vocab_path, output_path, workers, skip_invalid,
    figures_dir,
):
    """Emit a CSV diagnostic report (optionally with rendered figures)."""
    fingerprint = config_fingerprint({"command": "stats", "report": report})
    lines = [header_line(FORMAT_VERSION, fingerprint, report=report)]
    if report == "decomposition":
        if not (input_path and scheme and vocab_path):
            raise click.UsageError(
                "--report decomposition needs --input, --scheme and --vocab"
            )
        vocab = _vocab_for_scheme(load_vocab(vocab_path), scheme)
        ids, molecules = load_corpus(input_path, skip_invalid=skip_invalid, log=_log)
        st = decomposition_stats(molecules, vocab, scheme, ids=ids)
        lines.append("molecule_id,scheme,n_fragments,n_motifs,n_singles")
        for rec in st.records:
            lines.append(
                f"{rec.molecule_id},{rec.scheme},{rec.n_fragments},"
                f"{rec.n_motifs},{rec.n_singles}"
            )
        aggregate = {
            "mean_fragments": st.mean_fragments,
            "median_fragments": st.median_fragments,
            "single_atom_rate": st.single_atom_rate,
        }
        lines.append("# aggregate " + json.dumps(aggregate, sort_keys=True))
        if figures_dir:
            from .figures import figure_path, render_fragment_histogram

            render_fragment_histogram(
                {scheme: st}, figure_path(figures_dir, "fragment_histogram.png")
            )
    elif report == "ring-histogram":
        if not input_path:
            raise click.UsageError("--report ring-histogram needs --input")
        ids, molecules = load_corpus(input_path, skip_invalid=skip_invalid, log=_log)
        hist = ring_histogram(molecules)
        lines.append("ring_size,mean_rings_per_molecule")
        for size in sorted(hist.means):
            lines.append(f"{size},{hist.means[size]!r}")
        lines.append(f"overflow,{hist.overflow_mean!r}")
        if figures_dir:
            from .figures import figure_path, render_ring_histogram

            render_ring_histogram(
                hist, figure_path(figures_dir, "ring_histogram.png")
            )
    else:  # vocab-composition
        if not vocab_path:
            raise click.UsageError("--report vocab-composition needs --vocab")
        vocab = load_vocab(vocab_path)
        comp = vocab_composition(vocab)
        lines.append("stat,key,value")
        lines.append(f"ring_motif_fraction,,{comp.ring_motif_fraction!r}")
        for size, count in comp.size_histogram.items():
            lines.append(f"size_histogram,{size},{count}")
        if figures_dir:
            from .figures import figure_path, render_vocab_composition

            render_vocab_composition(
                comp, figure_path(figures_dir, "vocab_composition.png")
            )
    _emit(output_path, lines)


@cli.command("split")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--split", "ratios_text", default="0.8,0.1,0.1", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "output_prefix", required=True)
def cmd_split(input_path, ratios_text, seed, output_prefix):
    """Seeded random split of a corpus into train/valid/test files."""
    try:
        ratios = [float(x) for x in ratios_text.split(",")]
    except ValueError as exc:
        raise click.UsageError(f"bad --split value: {exc}") from exc
    if len(ratios) != 3:
        raise click.UsageError("--split needs exactly three ratios")
    try:
        buckets = split_corpus(
            [line for _, line in read_smiles_lines(input_path)], ratios, seed
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    names = ("train", "valid", "test")
    for name, bucket in zip(names, buckets):
        path = f"{output_prefix}.{name}.smi"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# split={ratios_text} seed={seed} part={name}\n")
            for line in bucket:
                fh.write(line + "\n")
        _log(f"{path}: {len(bucket)} molecules")


@cli.command("assemble")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", "output_path", default=None, type=click.Path())
@click.option(
    "--order",
    type=click.Choice(("valency-first", "cycle-first")),
    default="valency-first",
    show_default=True,
)
def cmd_assemble(input_path, output_path, order):
    """Postprocess scored bond graphs (JSONL) into SMILES."""
    lines = []
    with open(input_path, "r", encoding="utf-8") as fh:
        tasks = [
            json.loads(line)
            for line in fh
            if line.strip() and not line.startswith("#")
        ]
    from .molgraph import Bond

    for task in tasks:
        graph = ScoredBondGraph(
            atoms=tuple((a["element"], a["charge"]) for a in task["atoms"]),
            intra_bonds=tuple(Bond(u, v, o) for u, v, o in task["intra_bonds"]),
            candidates=tuple(
                (u, v, o, c) for u, v, o, c in task["candidates"]
            ),
        )
        pruned = run_assembly(graph, order=order)
        lines.append(_components_smiles(pruned))
    _emit(output_path, lines)


def _components_smiles(mol):
    """SMILES of each connected component, '.'-joined (output convention for
    graphs that cycle breaking disconnected)."""
    from .molgraph import Molecule

    n = len(mol.atoms)
    seen = set()
    parts = []
    for start in range(n):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            v = stack.pop()
            for w, _ in mol.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comp.sort()
        local = {idx: i for i, idx in enumerate(comp)}
        from .molgraph import Atom

        atoms = tuple(
            Atom(mol.atoms[i].element, mol.atoms[i].formal_charge, local[i])
            for i in comp
        )
        bonds = tuple(
            type(b)(local[b.u], local[b.v], b.order)
            for b in mol.bonds
            if b.u in local and b.v in local
        )
        parts.append(write_smiles(Molecule(atoms, bonds)))
    return ".".join(parts)


@cli.command("parse")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", "output_path", default=None, type=click.Path())
@click.option("--skip-invalid", is_flag=True, default=False)
def cmd_parse(input_path, output_path, skip_invalid):
    """Parse a corpus and emit one molecule record (JSON) per line."""
    ids, molecules = load_corpus(input_path, skip_invalid=skip_invalid, log=_log)
    fingerprint = config_fingerprint({"command": "parse"})
    lines = [header_line(FORMAT_VERSION, fingerprint)]
    for mol_id, mol in zip(ids, molecules):
        lines.append(dump_record(molecule_record(mol_id, mol)))
    _emit(output_path, lines)


@cli.command("compare")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--k", type=int, required=True)
@click.option("--output", "output_path", default=None, type=click.Path())
@click.option("--workers", type=int, default=None)
@click.option("--skip-invalid", is_flag=True, default=False)
@click.option("--figures", "figures_dir", default=None, type=click.Path())
def cmd_compare(input_path, k, output_path, workers, skip_invalid, figures_dir):
    """Run all three schemes at one vocabulary size; side-by-side table."""
    workers = workers if workers is not None else default_workers()
    ids, molecules = load_corpus(input_path, skip_invalid=skip_invalid, log=_log)
    bbb_vocab = bbb_build_vocab(molecules, k)
    psm_vocab = psm_build_vocab(molecules, k)
    fingerprint = config_fingerprint({"command": "compare", "k": k})
    lines = [header_line(FORMAT_VERSION, fingerprint, k=k)]
    lines.append(
        "scheme,k,mean_fragments,median_fragments,single_atom_rate"
    )
    stats_by_scheme = {}
    for scheme, vocab in (
        ("bbb", bbb_vocab),
        ("psm", psm_vocab),
        ("subcover", bbb_vocab),
    ):
        worker = functools.partial(_decompose_one, vocab=vocab, scheme=scheme)
        results = parallel_map(worker, list(zip(ids, molecules)), workers)
        from .stats import DecompositionStats, MoleculeRecord, _median

        records = tuple(
            MoleculeRecord(mol_id, scheme, nf, nf - ns, ns)
            for (rec, nf, ns, na), mol_id in zip(results, ids)
        )
        sizes = [r.n_fragments for r in records]
        histogram = {}
        for s in sizes:
            histogram[s] = histogram.get(s, 0) + 1
        st = DecompositionStats(
            records=records,
            mean_fragments=sum(sizes) / len(sizes),
            median_fragments=_median(sizes),
            fragment_histogram=dict(sorted(histogram.items())),
            single_atom_rate=sum(ns for _, _, ns, _ in results)
            / sum(na for _, _, _, na in results),
        )
        stats_by_scheme[scheme] = st
        lines.append(
            f"{scheme},{vocab.k},{st.mean_fragments!r},"
            f"{st.median_fragments!r},{st.single_atom_rate!r}"
        )
    _emit(output_path, lines)
    if figures_dir:
        from .figures import figure_path, render_fragment_histogram

        render_fragment_histogram(
            stats_by_scheme, figure_path(figures_dir, "fragment_histogram.png")
        )


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        _log(f"usage error: {exc.format_message()}")
        return 1
    except click.Abort:
        return 1
    except SmilesParseError as exc:
        _log(f"parse error: {exc}")
        return 2
    except SchemeMismatchError as exc:
        _log(f"scheme mismatch: {exc}")
        return 3
    except (VocabFormatError, EmptyCorpusError, OSError) as exc:
        _log(f"error: {exc}")
        return 4
    except MolfragError as exc:
        _log(f"error: {exc}")
        return 4


if __name__ == "__main__":
    sys.exit(main())
