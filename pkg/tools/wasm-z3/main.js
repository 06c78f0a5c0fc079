// Minimal SMT-LIB 2 front for the WebAssembly build of Z3.
//
// Reads a complete script on stdin, evaluates it, prints the solver's
// output (check-sat verdict, get-model answer) on stdout and exits.
// Behaves like `z3 -in` for the straight-line scripts ebv emits; any
// command-line arguments are ignored so it can be dropped in wherever a
// solver path is expected.

'use strict';

const { init } = require('z3-solver');

async function main() {
  const chunks = [];
  for await (const chunk of process.stdin) chunks.push(chunk);
  const script = Buffer.concat(chunks).toString('utf8');

  const { Z3 } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  Z3.del_config(cfg);

  const out = await Z3.eval_smtlib2_string(ctx, script);
  process.stdout.write(out.endsWith('\n') || out === '' ? out : out + '\n');
  process.exit(0);
}

main().catch((err) => {
  process.stderr.write(String(err) + '\n');
  process.exit(1);
});
