// Timed state probe: waits, then reports the boolean stored in a file.
//
// Usage: node timed-state-check.js <state-file> <delay-seconds>
//
// Sampling after a configurable delay lets two probes of the same file
// observe different states when the file changes between their reads,
// which is exactly the situation a re-verifying traversal has to record
// faithfully. The state file must hold "True" or "False" (surrounding
// whitespace ignored); the path is taken relative to the working
// directory. Negative delays and unreadable or non-boolean files are
// malfunctions: diagnostic on stderr, exit 1.
import { readFileSync } from 'node:fs';

function fail(message: string): never {
  process.stderr.write(message + '\n');
  process.exit(1);
}

const [fileArg, delayArg] = process.argv.slice(2);
if (fileArg === undefined || delayArg === undefined) {
  fail('usage: timed-state-check <state-file> <delay-seconds>');
}
const delaySeconds = Number(delayArg);
if (!Number.isFinite(delaySeconds) || delaySeconds < 0) {
  fail(`invalid delay: ${delayArg}`);
}

setTimeout(() => {
  let text: string;
  try {
    text = readFileSync(fileArg, 'utf8');
  } catch {
    fail(`cannot read state file: ${fileArg}`);
  }
  const token = text.trim();
  if (token !== 'True' && token !== 'False') {
    fail(`state file does not hold a boolean: ${JSON.stringify(token)}`);
  }
  process.stdout.write(token + '\n');
}, delaySeconds * 1000);
