// End-to-end: bundles wired to these scripts, driven through the twinpath
// CLI as a child process. Exercises the real deployment shape, where the
// engine spawns node from the bundle's scripts directory.
import { copyFileSync, mkdirSync, mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, expect, test } from 'vitest';
import { DIST_DIR, RunResult, runAsync } from './helpers';
import { spawnSync } from 'node:child_process';

let baseDir: string;

beforeAll(() => {
  baseDir = mkdtempSync(join(tmpdir(), 'twinpath-e2e-'));
});

afterAll(() => {
  rmSync(baseDir, { recursive: true, force: true });
});

function runCli(args: string[]): RunResult {
  const result = spawnSync('python3', ['-m', 'twinpath', ...args], {
    encoding: 'utf8',
    timeout: 60_000,
  });
  if (result.error) {
    throw result.error;
  }
  return { stdout: result.stdout, stderr: result.stderr, status: result.status };
}

interface Doc {
  [key: string]: unknown;
}

function writeDocs(root: string, docs: Record<string, Doc[]>) {
  mkdirSync(root, { recursive: true });
  mkdirSync(join(root, 'scripts'), { recursive: true });
  for (const [name, entries] of Object.entries(docs)) {
    writeFileSync(join(root, name), JSON.stringify(entries, null, 2) + '\n');
  }
}

// three containers in a line; the second hop is gated on a fact that only
// a live key check can flip
function writeKeyBundle(root: string, keyOnDisk: string) {
  writeDocs(root, {
    'verifiers.json': [
      {
        id: 'V1',
        executable_path: 'node',
        format_string: 'key-file-check.js "{0}" "{1}"',
        format_args: ['Description', 'Target'],
      },
    ],
    'actions.json': [],
    'common_properties.json': [{ id: 'CP1', description: 'Target', verifiers: [] }],
    'facts.json': [
      {
        id: 'F4',
        description: 'Has Intermediate Key',
        value: true,
        custom_properties: [],
        verifiers: [],
      },
      {
        id: 'F5',
        description: 'Has Goal Key',
        value: false,
        custom_properties: [
          { id: 'P1', common_property_id: 'CP1', description: 'Correct Goal Key' },
        ],
        verifiers: ['V1'],
      },
    ],
    'containers.json': [
      { id: 'C1', name: 'Container 1', facts: ['F4'] },
      { id: 'C2', name: 'Container 2', facts: ['F5'] },
      { id: 'C3', name: 'Container 3', facts: [] },
    ],
    'links.json': [
      { id: 'L1', from: 'C1', to: 'C2' },
      { id: 'L2', from: 'C2', to: 'C3' },
    ],
    'rules.json': [
      { id: 'R1', preconditions: [{ fact: 'F4', equals: true }], gates_link: 'L1' },
      { id: 'R2', preconditions: [{ fact: 'F5', equals: true }], gates_link: 'L2' },
    ],
  });
  copyFileSync(join(DIST_DIR, 'key-file-check.js'), join(root, 'scripts', 'key-file-check.js'));
  mkdirSync(join(root, 'scripts', 'Has Goal Key'), { recursive: true });
  // no trailing newline: the check compares the file content whole
  writeFileSync(join(root, 'scripts', 'Has Goal Key', 'key.txt'), keyOnDisk);
}

test('live key check opens the gated path', () => {
  const bundle = join(baseDir, 'key-right');
  writeKeyBundle(bundle, 'Correct Goal Key');

  const result = runCli(['run', bundle, '--start', 'C1', '--goal', 'C3', '--report', 'json']);
  expect(result.stderr).toBe('');
  expect(result.status).toBe(0);

  const report = JSON.parse(result.stdout);
  expect(report.found_paths).toBe(1);
  expect(report.paths).toEqual([['C1', 'C2', 'C3']]);
  expect(report.final_fact_values.F5).toBe(true);

  expect(report.verification_records).toHaveLength(1);
  const record = report.verification_records[0];
  expect(record.verifier_id).toBe('V1');
  expect(record.fact_id).toBe('F5');
  expect(record.parsed_value).toBe(true);
  expect(record.command.argv).toEqual([
    'node',
    'key-file-check.js',
    'Has Goal Key',
    'Correct Goal Key',
  ]);
}, 60_000);

test('wrong key on disk closes the same path', () => {
  const bundle = join(baseDir, 'key-wrong');
  writeKeyBundle(bundle, 'Not Correct Goal Key');

  const result = runCli(['run', bundle, '--start', 'C1', '--goal', 'C3', '--report', 'json']);
  expect(result.status).toBe(0);

  const report = JSON.parse(result.stdout);
  expect(report.found_paths).toBe(0);
  expect(report.paths).toEqual([]);
  expect(report.final_fact_values.F5).toBe(false);
  expect(report.verification_records[0].parsed_value).toBe(false);
}, 60_000);

test('bundle passes engine validation', () => {
  const bundle = join(baseDir, 'key-validate');
  writeKeyBundle(bundle, 'Correct Goal Key');
  const result = runCli(['validate', bundle]);
  expect(result).toEqual({ stdout: 'OK\n', stderr: '', status: 0 });
}, 60_000);

// same line of containers, but the gate fact is probed twice with different
// delays while the state file flips underneath the traversal
function writeRaceBundle(root: string) {
  writeDocs(root, {
    'verifiers.json': [
      {
        id: 'VA',
        executable_path: 'node',
        format_string: 'timed-state-check.js state.txt 0.2',
        format_args: [],
      },
      {
        id: 'VB',
        executable_path: 'node',
        format_string: 'timed-state-check.js state.txt 4',
        format_args: [],
      },
    ],
    'actions.json': [],
    'common_properties.json': [],
    'facts.json': [
      {
        id: 'F4',
        description: 'Has Intermediate Key',
        value: true,
        custom_properties: [],
        verifiers: [],
      },
      {
        id: 'F5',
        description: 'Goal Service Up',
        value: true,
        custom_properties: [],
        verifiers: ['VA', 'VB'],
      },
    ],
    'containers.json': [
      { id: 'C1', name: 'Container 1', facts: ['F4'] },
      { id: 'C2', name: 'Container 2', facts: ['F5'] },
      { id: 'C3', name: 'Container 3', facts: [] },
    ],
    'links.json': [
      { id: 'L1', from: 'C1', to: 'C2' },
      { id: 'L2', from: 'C2', to: 'C3' },
    ],
    'rules.json': [
      { id: 'R1', preconditions: [{ fact: 'F4', equals: true }], gates_link: 'L1' },
      { id: 'R2', preconditions: [{ fact: 'F5', equals: true }], gates_link: 'L2' },
    ],
  });
  copyFileSync(
    join(DIST_DIR, 'timed-state-check.js'),
    join(root, 'scripts', 'timed-state-check.js'),
  );
  writeFileSync(join(root, 'scripts', 'state.txt'), 'True\n');
}

test('traversal records the state flip between two probes of one fact', async () => {
  const bundle = join(baseDir, 'race');
  writeRaceBundle(bundle);

  const pending = runAsync('python3', [
    '-m', 'twinpath', 'run', bundle,
    '--start', 'C1', '--goal', 'C3', '--report', 'json',
  ]);
  // the fast probe reads well before this flip, the slow one well after
  setTimeout(() => writeFileSync(join(bundle, 'scripts', 'state.txt'), 'False\n'), 2000);
  const result = await pending;
  expect(result.status).toBe(0);

  const report = JSON.parse(result.stdout);
  const byId = new Map(
    report.verification_records.map((r: { verifier_id: string }) => [r.verifier_id, r]),
  );
  expect((byId.get('VA') as { parsed_value: boolean }).parsed_value).toBe(true);
  expect((byId.get('VB') as { parsed_value: boolean }).parsed_value).toBe(false);
  expect(report.final_fact_values.F5).toBe(false);
  expect(report.found_paths).toBe(0);
}, 30_000);
