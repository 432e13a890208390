/**
 * Parsing and validation for the run-output file formats:
 * complexity_tau=<t>.csv, lanczos_tau=<t>.csv, ipr_study_alpha=<a>.csv,
 * plus the manifest.json written next to them.
 */

import { readFileSync, readdirSync, existsSync } from "node:fs";
import { basename, dirname, join } from "node:path";

export class SchemaError extends Error {}

export interface Table {
  /** column name -> numeric values, row-aligned */
  columns: Map<string, number[]>;
  rows: number;
  path: string;
}

/** Parse a CSV file and check that every required column is present. */
export function readTable(path: string, required: string[]): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: file is empty`);
  }
  const header = lines[0]!.split(",");
  for (const name of required) {
    if (!header.includes(name)) {
      throw new SchemaError(`${path}: missing column "${name}"`);
    }
  }
  const columns = new Map<string, number[]>(header.map((name) => [name, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `${path}: row ${i} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    for (let j = 0; j < header.length; j++) {
      const value = Number(cells[j]);
      if (Number.isNaN(value)) {
        throw new SchemaError(
          `${path}: row ${i}, column "${header[j]}": not a number: ${cells[j]}`,
        );
      }
      columns.get(header[j]!)!.push(value);
    }
  }
  return { columns, rows: lines.length - 1, path };
}

export function column(table: Table, name: string): number[] {
  const values = table.columns.get(name);
  if (values === undefined) {
    throw new SchemaError(`${table.path}: missing column "${name}"`);
  }
  return values;
}

/**
 * Label for a series drawn from one file: the tau or alpha value from the
 * file name, cross-checked against the sibling manifest when one exists.
 */
export function seriesLabel(path: string): { name: string; value: number } {
  const match = basename(path).match(/(tau|alpha)=([-0-9.eE+]+)\.csv$/);
  if (!match) {
    throw new SchemaError(`${path}: cannot read tau/alpha from file name`);
  }
  const name = match[1]!;
  const value = Number(match[2]);
  const manifestPath = join(dirname(path), "manifest.json");
  if (existsSync(manifestPath)) {
    const manifest = JSON.parse(readFileSync(manifestPath, "utf8"));
    if (name === "tau" && Array.isArray(manifest.tau_list)) {
      if (!manifest.tau_list.some((t: number) => t === value)) {
        throw new SchemaError(
          `${path}: tau=${value} not in manifest tau_list [${manifest.tau_list}]`,
        );
      }
    }
    if (name === "alpha" && typeof manifest.alpha === "number" && manifest.alpha !== value) {
      throw new SchemaError(`${path}: alpha=${value} differs from manifest alpha=${manifest.alpha}`);
    }
  }
  return { name, value };
}

/** Expand a path pattern where any segment may contain `*` wildcards. */
export function expandGlob(pattern: string): string[] {
  const segments = pattern.split("/");
  let candidates: string[] = [pattern.startsWith("/") ? "/" : "."];
  for (const segment of segments) {
    if (segment === "" || segment === ".") continue;
    if (!segment.includes("*")) {
      candidates = candidates
        .map((dir) => join(dir, segment))
        .filter((p) => existsSync(p));
      continue;
    }
    const re = new RegExp(
      "^" + segment.split("*").map(escapeRegExp).join(".*") + "$",
    );
    const next: string[] = [];
    for (const dir of candidates) {
      let entries: string[];
      try {
        entries = readdirSync(dir).sort();
      } catch {
        continue;
      }
      for (const entry of entries) {
        if (re.test(entry)) next.push(join(dir, entry));
      }
    }
    candidates = next;
  }
  return candidates.sort();
}

function escapeRegExp(s: string): string {
  return s.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}
