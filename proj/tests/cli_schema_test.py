"""End-to-end checks of the rkhs-approx executable.

Runs every sample input under data/, validates each result document against
schema/result.schema.json, and checks exit codes and error documents for
failing inputs.

Usage: cli_schema_test.py <rkhs-approx binary> <source dir>
"""

import csv
import io
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

BINARY = Path(sys.argv[1]).resolve()
SOURCE = Path(sys.argv[2]).resolve()
DATA = SOURCE / "data"

RESULT_SCHEMA = json.loads((SOURCE / "schema" / "result.schema.json").read_text())
ERROR_SCHEMA = json.loads((SOURCE / "schema" / "error.schema.json").read_text())

failures = []


def run(*args):
    return subprocess.run([str(BINARY), *args], capture_output=True, text=True, cwd=DATA)


def check(cond, message):
    if not cond:
        failures.append(message)


def validate(instance, schema, label):
    try:
        jsonschema.validate(instance, schema)
    except jsonschema.ValidationError as exc:
        failures.append(f"{label}: {exc.message} at {list(exc.absolute_path)}")


SAMPLES = [
    ("solve", "solve_scalar.json"),
    ("solve", "solve_power.json"),
    ("solve", "solve_disk_complex.json"),
    ("interpolate", "interpolate_gaussian.json"),
    ("interpolate", "interpolate_gram.json"),
    ("frame-bounds", "frame_bounds.json"),
    ("hardy-demo", "hardy_demo.json"),
    ("quantize", "quantize_disk.json"),
]

for command, name in SAMPLES:
    proc = run(command, "--input", name)
    label = f"{command} {name}"
    check(proc.returncode == 0, f"{label}: exit {proc.returncode}, stderr {proc.stderr!r}")
    if proc.returncode != 0:
        continue
    doc = json.loads(proc.stdout)
    validate(doc, RESULT_SCHEMA, label)
    check(doc["command"] == command, f"{label}: command field {doc['command']!r}")
    # The data stream carries exactly one JSON document.
    check(proc.stdout.strip().endswith("}"), f"{label}: trailing text on stdout")
    again = run(command, "--input", name)
    check(again.stdout == proc.stdout, f"{label}: output not reproducible")

# Known values on the sample inputs.
scalar = json.loads(run("solve", "--input", "solve_scalar.json").stdout)["result"]
check(abs(scalar["alpha"][0] - 1.0) < 1e-12, f"solve_scalar alpha {scalar['alpha']}")
check(abs(scalar["objective"] - 2.0) < 1e-12, f"solve_scalar objective {scalar['objective']}")

gram = json.loads(run("interpolate", "--input", "interpolate_gram.json").stdout)
check(abs(gram["result"]["lsq_error"] - 0.5) < 1e-12, "rank-one Gram lsq_error")
check(any("rank deficient" in d for d in gram["diagnostics"]), "rank-one Gram warning")

hardy = json.loads(run("hardy-demo", "--input", "hardy_demo.json").stdout)["result"]
check(abs(hardy["coefficients"][0]["computed"][0] - 0.5) < 1e-6, "hardy-demo a0")
check(hardy["max_deviation"] < 1e-5, f"hardy-demo max deviation {hardy['max_deviation']}")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    # Output file, CSV side outputs, and seed override.
    out = tmp / "q.json"
    table = tmp / "q.csv"
    proc = run("quantize", "--input", "quantize_disk.json", "--output", str(out), "--csv", str(table))
    check(proc.returncode == 0 and proc.stdout == "", "quantize --output writes nothing to stdout")
    rows = list(csv.reader(io.StringIO(table.read_text())))
    check(rows[0] == ["N", "repetition", "objective", "rkhs_norm", "probe_drift"],
          f"quantize CSV header {rows[0]}")
    check(len(rows) == 1 + len(json.loads(out.read_text())["result"]["rows"]), "quantize CSV rows")

    reseeded = json.loads(run("quantize", "--input", "quantize_disk.json", "--seed", "7").stdout)
    check(reseeded["result"]["rows"][0]["seed"] != json.loads(out.read_text())["result"]["rows"][0]["seed"],
          "--seed changes cell seeds")

    hist = tmp / "hist.csv"
    gram_csv = tmp / "gram.csv"
    proc = run("frame-bounds", "--input", "frame_bounds.json", "--histogram", str(hist),
               "--gram-out", str(gram_csv))
    check(proc.returncode == 0, "frame-bounds with side outputs")
    check(hist.read_text().splitlines()[0] == "bin_lo,bin_hi,count", "histogram header")
    check(len(gram_csv.read_text().splitlines()) > 0, "gram CSV written")

    def expect_error(args, code, exit_code, label):
        proc = run(*args)
        check(proc.returncode == exit_code, f"{label}: exit {proc.returncode}, want {exit_code}")
        check(proc.stdout == "", f"{label}: stdout not empty")
        try:
            doc = json.loads(proc.stderr)
        except json.JSONDecodeError:
            failures.append(f"{label}: stderr is not JSON: {proc.stderr!r}")
            return
        validate(doc, ERROR_SCHEMA, label)
        check(doc["error"]["code"] == code, f"{label}: code {doc['error']['code']}")

    bad_cost = tmp / "bad_cost.json"
    bad_cost.write_text(json.dumps({
        "kernel": {"type": "gaussian", "gamma": 1.0}, "points": [[0.0]], "targets": [1.0],
        "cost": {"type": "cubic"}, "p": 2}))
    expect_error(["solve", "--input", str(bad_cost)], "SchemaError", 1, "unknown cost type")

    bad_weight = tmp / "bad_weight.json"
    bad_weight.write_text(json.dumps({
        "kernel": {"type": "gaussian", "gamma": 1.0}, "points": [[0.0], [1.0]],
        "weights": [1.0, -1.0], "targets": [1.0, 2.0]}))
    expect_error(["interpolate", "--input", str(bad_weight)], "InvariantViolation", 1,
                 "negative weight")

    expect_error(["solve", "--input", str(tmp / "missing.json")], "SchemaError", 1, "missing input")

    bad_radius = tmp / "bad_radius.json"
    bad_radius.write_text(json.dumps({"b": [1.0], "r": 1.5}))
    expect_error(["hardy-demo", "--input", str(bad_radius)], "RadiusOutOfRange", 1,
                 "radius outside (0, 1)")

    stalled = tmp / "stalled.json"
    stalled.write_text(json.dumps({
        "kernel": {"type": "gaussian", "gamma": 1.0}, "points": [[0.0], [0.5], [1.5]],
        "targets": [1.0, -1.0, 2.0], "cost": {"type": "power", "q": 1.5}, "p": 1.5,
        "solver": {"max_iter": 1}}))
    lenient = run("solve", "--input", str(stalled))
    check(lenient.returncode == 0, "non-converged solve without --strict exits 0")
    validate(json.loads(lenient.stdout), RESULT_SCHEMA, "non-converged solve")
    expect_error(["solve", "--input", str(stalled), "--strict"], "NotConverged", 2,
                 "non-converged solve with --strict")

    (tmp / "zero.csv").write_text("0,0\n0,0\n")
    zero = tmp / "zero.json"
    zero.write_text(json.dumps({"kernel": {"type": "gram", "csv": "zero.csv"}}))
    expect_error(["frame-bounds", "--input", str(zero)], "DegenerateSpan", 2, "zero Gram")

    proc = run("solve")
    check(proc.returncode == 1, f"missing --input: exit {proc.returncode}")
    proc = run("frobnicate")
    check(proc.returncode == 1, f"unknown subcommand: exit {proc.returncode}")

if failures:
    for f in failures:
        print("FAIL:", f)
    sys.exit(1)
print(f"all CLI checks passed ({len(SAMPLES)} sample documents)")
