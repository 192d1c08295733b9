"""Runs every g2lab subcommand and validates its JSON against schemas/.

usage: cli_schemas.py <g2lab binary> <schema dir>
"""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema

BIN, SCHEMAS = os.path.abspath(sys.argv[1]), os.path.abspath(sys.argv[2])
failures = []


def schema(name):
    with open(os.path.join(SCHEMAS, name + ".json")) as f:
        return json.load(f)


def run(args, expect, env=None):
    p = subprocess.run([BIN] + args, capture_output=True, text=True, env=env)
    if p.returncode != expect:
        failures.append(f"{args}: exit {p.returncode}, expected {expect}; stderr: {p.stderr.strip()}")
    return p


def check(name, doc, what):
    try:
        jsonschema.validate(doc, schema(name))
    except jsonschema.ValidationError as e:
        failures.append(f"{what}: {e.message} at {list(e.absolute_path)}")


def check_stdout(name, args, expect=0):
    p = run(args, expect)
    try:
        check(name, json.loads(p.stdout), " ".join(args))
    except json.JSONDecodeError:
        failures.append(f"{args}: stdout is not JSON")
    return p


def check_error(args, expect):
    p = run(args, expect)
    lines = p.stderr.strip().splitlines()
    if not lines:
        failures.append(f"{args}: no error JSON on stderr")
        return
    check("error", json.loads(lines[-1]), "error for " + " ".join(args))


with tempfile.TemporaryDirectory() as d:
    os.chdir(d)
    with open("xi.json", "w") as f:
        json.dump({"dim": 7, "degree": 4, "terms": [{"idx": [2, 5, 6, 7], "c": "-3/2"}, {"idx": [1, 2, 3, 4], "c": 1}]}, f)
    with open("spec.json", "w") as f:
        json.dump({"eta": [[4, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 9]], "alpha": [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}, f)
    with open("bad_spec.json", "w") as f:
        json.dump({"eta": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], "beta": 1}, f)

    p = check_stdout("identities", ["identities", "--mode", "exact"])
    if p.returncode == 0 and any(c["residual"] != 0 for c in json.loads(p.stdout)["identities"]):
        failures.append("exact identities: nonzero residual")
    check_stdout("identities", ["identities", "--mode", "double"])
    check_stdout("fibration", ["fibration"])
    p = check_stdout("fibration", ["fibration", "--spec", "spec.json", "--mode", "exact"])
    if p.returncode == 0 and json.loads(p.stdout)["diagnosis"] != "non-product":
        failures.append("twisted spec should be non-product")
    check_stdout("deform", ["deform", "--xi", "xi.json", "--mode", "exact"])
    check_stdout("deform", ["deform", "--xi", "xi.json"])
    check_stdout("flow", ["flow", "--lattice", "4x4x4x4", "--group", "u1", "--seed", "7", "--out", "f.lat"])
    with open("f.lat.json") as f:
        manifest = json.load(f)
    if manifest.get("dims") != [4, 4, 4, 4]:
        failures.append("flow manifest dims")
    with open("f.lat.history.csv") as f:
        if f.readline().strip() != "step,asd_fraction,charge,asd_energy,step_size":
            failures.append("flow history header")
    check_stdout("lift", ["lift", "--in", "f.lat", "--spec", "spec.json", "--tgrid", "2x2x2", "--out", "f7.lat"])
    check_stdout("residual", ["residual", "--in", "f7.lat"])
    check_stdout("cs", ["cs", "--field", "f7.lat", "--probe-offsets", "2"])
    p = check_stdout("obstruct", ["obstruct", "--field", "f7.lat", "--xi", "xi.json"])
    if p.returncode == 0 and json.loads(p.stdout)["verdict"] != "instanton-obstructed":
        failures.append("charged lift with a type IV xi should be obstructed")
    p = check_stdout("obstruct", ["obstruct"])
    if p.returncode == 0 and json.loads(p.stdout)["verdict"] != "instanton-survives":
        failures.append("flat bundle should survive")

    run(["report", "--out", "r1.json", "--seed", "3"], 0)
    with open("r1.json") as f:
        check("report", json.load(f), "report")

    check_error([], 1)
    check_error(["deform", "--xi", "missing.json"], 1)
    check_error(["fibration", "--spec", "bad_spec.json"], 1)
    check_error(["flow", "--lattice", "4x4x4", "--out", "x.lat"], 1)
    check_error(["residual", "--in", "f.lat"], 1)
    check_error(["identities", "--mode", "fuzzy"], 1)
    check_error(["flow", "--lattice", "4x4x4x4", "--group", "u1", "--max-steps", "1", "--out", "y.lat"], 2)

for f in failures:
    print("FAIL", f)
print("cli schemas:", "FAIL" if failures else "PASS")
sys.exit(1 if failures else 0)
