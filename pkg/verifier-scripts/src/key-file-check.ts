// Key-file check: compares the first file in a folder against a target key.
//
// Usage: node key-file-check.js <folder> <target>
//
// The folder is resolved relative to this script's own directory, so the
// script works wherever the engine sets the working directory, as long as
// it is deployed next to the folders it inspects. The first file in
// lexicographic order is read whole and compared case-sensitively; prints
// "True" on equality, "False" otherwise. A missing or empty folder is a
// malfunction, not a False: diagnostic on stderr, exit 1.
import { readdirSync, readFileSync, statSync } from 'node:fs';
import { join, resolve } from 'node:path';

function fail(message: string): never {
  process.stderr.write(message + '\n');
  process.exit(1);
}

const [folderArg, target] = process.argv.slice(2);
if (folderArg === undefined || target === undefined) {
  fail('usage: key-file-check <folder> <target>');
}

const folder = resolve(__dirname, folderArg);
let names: string[];
try {
  names = readdirSync(folder)
    .filter((name) => statSync(join(folder, name)).isFile())
    .sort();
} catch {
  fail(`no such folder: ${folderArg}`);
}
const first = names[0];
if (first === undefined) {
  fail(`no key file in ${folderArg}`);
}

const content = readFileSync(join(folder, first), 'utf8');
process.stdout.write(content === target ? 'True\n' : 'False\n');
