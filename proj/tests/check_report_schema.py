"""Validates gp_certify JSON reports against docs/report.schema.json and
checks that repeated runs produce identical bytes."""

import json
import pathlib
import subprocess
import sys

import jsonschema

INPUTS = [
    ["--builtin", "scalar"],
    ["--builtin", "rotation"],
    ["--builtin", "jordan"],
    ["--builtin", "nonnormal", "--param", "b=20"],
    ["--builtin", "diagonal", "--param", "values=-1,0.5"],
    ["--builtin", "damped_wave", "--param", "n=4"],
    ["--builtin", "scalar", "--timing"],
]


def main():
    exe, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in INPUTS:
        cmd = [exe, "certify", "--format", "json", *args]
        first = subprocess.run(cmd, capture_output=True, check=False)
        report = json.loads(first.stdout)
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        for err in errors:
            print(f"{' '.join(args)}: {list(err.path)}: {err.message}")
        failures += len(errors)
        if "--timing" not in args:
            second = subprocess.run(cmd, capture_output=True, check=False)
            if second.stdout != first.stdout:
                print(f"{' '.join(args)}: output differs between runs")
                failures += 1
        print(f"{' '.join(args)}: exit {first.returncode}, verdict {report['certificate']['verdict']}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
