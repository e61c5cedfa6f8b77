/**
 * Bindings for the molfrag command-line tool.
 *
 * Everything goes through the installed `molfrag` executable and its
 * documented file formats (SMILES corpora, vocabulary files, JSON-lines
 * records, CSV reports); no Python internals are touched. Non-zero exit
 * codes are mapped to typed errors.
 */

import { spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";

export class MolfragError extends Error {
  readonly exitCode: number;
  readonly stderr: string;

  constructor(message: string, exitCode: number, stderr: string) {
    super(message);
    this.name = new.target.name;
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}

/** Exit code 1: bad arguments or option combinations. */
export class UsageError extends MolfragError {}
/** Exit code 2: a SMILES line failed to parse. */
export class SmilesParseError extends MolfragError {}
/** Exit code 3: vocabulary scheme incompatible with the requested scheme. */
export class SchemeMismatchError extends MolfragError {}
/** Exit code 4: I/O failures and malformed files. */
export class FormatError extends MolfragError {}

export interface Motif {
  key: string;
  smiles: string;
  atoms: number[];
}

export interface DecompositionRecord {
  id: string;
  scheme: string;
  motifs: Motif[];
  singles: number[];
  inter_bonds: [number, number, number][];
}

export interface AtomRecord {
  element: string;
  charge: number;
}

export interface MoleculeRecord {
  id: string;
  smiles: string;
  atoms: AtomRecord[];
  bonds: [number, number, number][];
}

export interface RecordHeader {
  format_version: number;
  config_fingerprint: string;
  [key: string]: unknown;
}

export interface VocabEntry {
  rank: number;
  smiles: string;
  count: number;
  atomCount: number;
  hasRing: boolean;
}

export interface Vocabulary {
  scheme: "bbb" | "psm";
  k: number;
  corpusHash: string;
  entries: VocabEntry[];
}

export type Scheme = "bbb" | "psm" | "subcover";

export interface CliOptions {
  /** Executable to invoke; defaults to `molfrag` on PATH. */
  executable?: string;
  /** Worker count; forwarded as --workers where supported. */
  workers?: number;
  /** Skip unparsable corpus lines instead of aborting. */
  skipInvalid?: boolean;
}

const ERROR_BY_CODE: Record<number, typeof MolfragError> = {
  1: UsageError,
  2: SmilesParseError,
  3: SchemeMismatchError,
  4: FormatError,
};

export function runCli(args: string[], options: CliOptions = {}): string {
  const executable = options.executable ?? "molfrag";
  const result = spawnSync(executable, args, {
    encoding: "utf-8",
    maxBuffer: 256 * 1024 * 1024,
  });
  if (result.error) {
    throw new FormatError(
      `failed to launch ${executable}: ${result.error.message}`,
      4,
      "",
    );
  }
  const code = result.status ?? 4;
  if (code !== 0) {
    const ctor = ERROR_BY_CODE[code] ?? MolfragError;
    const stderr = result.stderr ?? "";
    const line = stderr.trim().split("\n").pop() ?? `exit code ${code}`;
    throw new ctor(line, code, stderr);
  }
  return result.stdout;
}

function dataLines(output: string): string[] {
  return output
    .split("\n")
    .filter((line) => line.length > 0 && !line.startsWith("#"));
}

export function parseHeader(output: string): RecordHeader {
  const line = output.split("\n").find((l) => l.startsWith("# {"));
  if (!line) {
    throw new FormatError("missing record header", 4, "");
  }
  return JSON.parse(line.slice(2)) as RecordHeader;
}

function corpusFlags(options: CliOptions): string[] {
  return options.skipInvalid ? ["--skip-invalid"] : [];
}

function workerFlags(options: CliOptions): string[] {
  return options.workers === undefined
    ? []
    : ["--workers", String(options.workers)];
}

/** Parse a corpus into molecule records. */
export function boundParse(
  inputPath: string,
  options: CliOptions = {},
): MoleculeRecord[] {
  const out = runCli(
    ["parse", "--input", inputPath, ...corpusFlags(options)],
    options,
  );
  return dataLines(out).map((line) => JSON.parse(line) as MoleculeRecord);
}

/** Mine a vocabulary and return the parsed vocabulary file. */
export function boundBuildVocab(
  inputPath: string,
  scheme: "bbb" | "psm",
  k: number,
  outputPath: string,
  options: CliOptions = {},
): Vocabulary {
  runCli(
    [
      "build-vocab",
      "--input",
      inputPath,
      "--scheme",
      scheme,
      "--k",
      String(k),
      "--output",
      outputPath,
      ...corpusFlags(options),
      ...workerFlags(options),
    ],
    options,
  );
  return readVocabulary(outputPath);
}

/** Parse a vocabulary file written by build-vocab. */
export function readVocabulary(path: string): Vocabulary {
  const lines = readFileSync(path, "utf-8")
    .split("\n")
    .filter((line) => line.length > 0 && !line.startsWith("#"));
  if (lines.length === 0) {
    throw new FormatError("empty vocabulary file", 4, "");
  }
  const header = JSON.parse(lines[0]) as {
    format_version: number;
    scheme: "bbb" | "psm";
    corpus_hash: string;
    k: number;
  };
  if (header.format_version !== 1) {
    throw new FormatError(
      `unsupported vocabulary format_version ${header.format_version}`,
      4,
      "",
    );
  }
  const entries: VocabEntry[] = lines.slice(1).map((line) => {
    const fields = line.split("\t");
    if (fields.length !== 5) {
      throw new FormatError(`malformed vocabulary entry: ${line}`, 4, "");
    }
    return {
      rank: Number(fields[0]),
      smiles: fields[1],
      count: Number(fields[2]),
      atomCount: Number(fields[3]),
      hasRing: fields[4] === "true",
    };
  });
  return {
    scheme: header.scheme,
    k: header.k,
    corpusHash: header.corpus_hash,
    entries,
  };
}

/** Decompose every corpus molecule; one record per molecule. */
export function boundDecompose(
  inputPath: string,
  scheme: Scheme,
  vocabPath: string,
  options: CliOptions = {},
): DecompositionRecord[] {
  const out = runCli(
    [
      "decompose",
      "--input",
      inputPath,
      "--scheme",
      scheme,
      "--vocab",
      vocabPath,
      ...corpusFlags(options),
      ...workerFlags(options),
    ],
    options,
  );
  return dataLines(out).map(
    (line) => JSON.parse(line) as DecompositionRecord,
  );
}

export type StatsReport = "decomposition" | "ring-histogram" | "vocab-composition";

export interface StatsOptions extends CliOptions {
  inputPath?: string;
  scheme?: Scheme;
  vocabPath?: string;
}

export interface StatsResult {
  columns: string[];
  rows: string[][];
  /** Trailing "# aggregate {...}" line of the decomposition report, if any. */
  aggregate?: Record<string, number>;
}

/** Run a stats report and return the parsed CSV table. */
export function boundStats(
  report: StatsReport,
  options: StatsOptions = {},
): StatsResult {
  const args = ["stats", "--report", report];
  if (options.inputPath) args.push("--input", options.inputPath);
  if (options.scheme) args.push("--scheme", options.scheme);
  if (options.vocabPath) args.push("--vocab", options.vocabPath);
  args.push(...corpusFlags(options), ...workerFlags(options));
  const out = runCli(args, options);
  let aggregate: Record<string, number> | undefined;
  for (const line of out.split("\n")) {
    if (line.startsWith("# aggregate ")) {
      aggregate = JSON.parse(line.slice("# aggregate ".length));
    }
  }
  const table = dataLines(out);
  const columns = table[0]?.split(",") ?? [];
  const rows = table.slice(1).map((line) => line.split(","));
  return { columns, rows, aggregate };
}

/** Postprocess scored bond graphs (JSONL file) into SMILES strings. */
export function boundAssemble(
  inputPath: string,
  order: "valency-first" | "cycle-first" = "valency-first",
  options: CliOptions = {},
): string[] {
  const out = runCli(
    ["assemble", "--input", inputPath, "--order", order],
    options,
  );
  return out.split("\n").filter((line) => line.length > 0);
}
