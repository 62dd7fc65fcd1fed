// Host reachability probe: one ICMP echo request with a 2 second ceiling.
//
// Usage: node ping-check.js <target>
//
// Prints "True" when the host answers and "False" when it does not; an
// unreachable host is a result, not an error. A missing target argument or
// a missing ping binary is a malfunction: diagnostic on stderr, exit 1.
import { spawnSync } from 'node:child_process';

const target = process.argv[2];
if (target === undefined || target.trim() === '') {
  process.stderr.write('usage: ping-check <target>\n');
  process.exit(1);
}

const result = spawnSync('ping', ['-c', '1', '-W', '2', target], {
  stdio: ['ignore', 'ignore', 'ignore'],
  timeout: 5000,
});
if (result.error !== undefined) {
  process.stderr.write(`cannot run ping: ${result.error.message}\n`);
  process.exit(1);
}
process.stdout.write(result.status === 0 ? 'True\n' : 'False\n');
