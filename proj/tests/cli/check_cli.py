"""Command line checks: exit codes, output files, and the tail report schema."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

binary, schema_path = sys.argv[1], sys.argv[2]
failures = []


def run(*args):
    return subprocess.run([binary, *args], capture_output=True, text=True)


def expect(name, ok, detail=""):
    print(("ok    " if ok else "FAIL  ") + name + (f": {detail}" if detail and not ok else ""))
    if not ok:
        failures.append(name)


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)

    r = run("--version")
    expect("--version exits 0", r.returncode == 0 and r.stdout.startswith("acldp "), r.stdout + r.stderr)
    expect("no subcommand exits 2", run().returncode == 2)
    expect("unknown option exits 2", run("profile", "--bogus").returncode == 2)
    r = run("profile", "--set", "sde.epsilon=0.1", "--out", str(tmp / "x"))
    expect("unknown key exits 2 and names it", r.returncode == 2 and "sde.epsilon" in r.stderr, r.stderr)
    expect("malformed --set exits 2", run("profile", "--set", "domain.L").returncode == 2)
    r = run("energy", "--input", str(tmp / "missing.csv"), "--out", str(tmp / "e"))
    expect("missing input exits 2", r.returncode == 2, r.stderr)

    out = tmp / "profile"
    r = run("profile", "--L", "10", "--out", str(out))
    files = {p.name for p in out.iterdir()} if out.exists() else set()
    expect("profile --L 10 writes its files", r.returncode == 0
           and {"profile.csv", "profile.json", "config.resolved", "manifest.json"} <= files, r.stderr)
    if r.returncode == 0:
        resolved = (out / "config.resolved").read_text()
        expect("resolved configuration records the override", "domain.L = 10\n" in resolved)

    out = tmp / "tail"
    r = run("ldp-tail", "--set", "domain.n=63", "--set", "sde.samples_per_chain=100",
            "--set", "sde.n_chains=4", "--set", "sde.burn_in=20", "--out", str(out))
    expect("ldp-tail exits 0", r.returncode == 0, r.stderr)
    if r.returncode == 0:
        schema = json.loads(pathlib.Path(schema_path).read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        report = json.loads((out / "tail_report.json").read_text())
        try:
            jsonschema.validate(report, schema, cls=jsonschema.Draft202012Validator)
            expect("tail_report.json matches the schema", True)
        except jsonschema.ValidationError as e:
            expect("tail_report.json matches the schema", False, e.message)
        manifest = json.loads((out / "manifest.json").read_text())
        expect("manifest lists tail outputs",
               {"samples.csv", "tail.csv", "tail_report.json"} <= set(manifest["outputs"]), str(manifest))

sys.exit(1 if failures else 0)
