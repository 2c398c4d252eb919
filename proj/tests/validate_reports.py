"""Runs each CLI command on a small grid and validates report.json against the schema."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

COMMANDS = [
    ["analyze", "--surface", "plane_k", "--k", "2", "--res", "17"],
    ["analyze", "--surface", "catenoid_r6", "--res", "33", "--format", "both"],
    ["convergence", "--surface", "holo_graph", "--param", "p=z^2", "--res", "33,65", "--format", "both"],
    ["spectrum", "--surface", "plane_k", "--res", "17,33", "--format", "both"],
    ["holonomy", "--surface", "holo_graph", "--param", "p=z^3", "--res", "33"],
    ["holonomy", "--synthetic", "so4", "--res", "33"],
    ["catalog"],
]


def main():
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, cmd in enumerate(COMMANDS):
            out = Path(tmp) / str(i)
            proc = subprocess.run([cli, *cmd, "--quiet", "--out", str(out)], capture_output=True, text=True)
            report = json.loads((out / "report.json").read_text())
            try:
                jsonschema.validate(report, schema)
            except jsonschema.ValidationError as e:
                print(f"FAIL {' '.join(cmd)}: {e.message}")
                failures += 1
                continue
            if proc.returncode != (0 if report["summary"]["pass"] else 1):
                print(f"FAIL {' '.join(cmd)}: exit code {proc.returncode} disagrees with summary")
                failures += 1
                continue
            for csv in out.glob("*.csv"):
                header = csv.read_text().splitlines()[0].split(",")
                if csv.name != "convergence.csv" and header[:2] != ["u", "v"]:
                    print(f"FAIL {csv.name}: header {header[:2]}")
                    failures += 1
            print(f"ok   {' '.join(cmd)}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
