"""Walk through the command-line interface end to end.

Generates an instance, draws its graph, solves with a picking sequence,
verifies the result, prints the uniform lottery, and runs the exhaustive
oracle, all through subprocess calls to the installed CLI.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def cli(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "fairmatch.cli", *argv],
        capture_output=True,
        text=True,
    )
    print(f"$ fairmatch {' '.join(argv)}  (exit {proc.returncode})")
    return proc


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    instance = tmp / "instance.json"
    allocation = tmp / "allocation.json"

    cli("gen", "--agents", "3", "--items", "5", "--kind", "chores",
        "--seed", "7", "-o", str(instance))
    print(instance.read_text())

    proc = cli("graph", str(instance))
    print("\n".join(proc.stdout.splitlines()[:6]), "...\n")

    proc = cli("solve", str(instance), "--seq", "-o", str(allocation))
    payload = json.loads(allocation.read_text())
    print("allocation:", payload["allocation"])
    print("sequence:  ", " -> ".join(payload["sequence"]), "\n")

    proc = cli("verify", str(instance), str(allocation))
    print(proc.stdout)
    assert proc.returncode == 0

    proc = cli("lottery", str(instance))
    parts = json.loads(proc.stdout)["parts"]
    print(f"lottery with {len(parts)} parts; first part:", parts[0], "\n")

    proc = cli("oracle", str(instance))
    data = json.loads(proc.stdout)
    print(f"{data['count']} fair allocations in total; "
          f"cross-check: {data['matching_cross_check']}")
