// Process-level test helpers: every script contract is an argv-in,
// stdout-out contract, so tests exercise the compiled dist/ artifacts in
// real child processes rather than importing the sources.
import { spawn, spawnSync } from 'node:child_process';
import { join } from 'node:path';

export const DIST_DIR = join(process.cwd(), 'dist');

export interface RunResult {
  stdout: string;
  stderr: string;
  status: number | null;
}

export function runScript(script: string, args: string[], cwd?: string): RunResult {
  const result = spawnSync('node', [join(DIST_DIR, script), ...args], {
    encoding: 'utf8',
    cwd,
    timeout: 30_000,
  });
  if (result.error !== undefined) {
    throw result.error;
  }
  return { stdout: result.stdout, stderr: result.stderr, status: result.status };
}

export function runAsync(command: string, args: string[], cwd?: string): Promise<RunResult> {
  return new Promise((resolve, reject) => {
    const child = spawn(command, args, { cwd });
    let stdout = '';
    let stderr = '';
    child.stdout.on('data', (chunk) => (stdout += chunk.toString('utf8')));
    child.stderr.on('data', (chunk) => (stderr += chunk.toString('utf8')));
    child.on('error', reject);
    child.on('close', (status) => resolve({ stdout, stderr, status }));
  });
}

export function runScriptAsync(script: string, args: string[], cwd?: string): Promise<RunResult> {
  return runAsync('node', [join(DIST_DIR, script), ...args], cwd);
}
