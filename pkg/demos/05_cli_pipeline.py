"""The same toolkit from the command line, end to end.

simulate -> fit-stream (with a mid-stream snapshot + resume) ->
fit-weiszfeld -> bench -> curve, all through the `medcov` entry point.
Everything is seeded, so every byte printed here reproduces.
"""

import json
import os
import subprocess
import sys
import tempfile

CLI = [sys.executable, "-m", "medcov.cli"]


def run(*args):
    cmd = CLI + list(args)
    print("$ medcov " + " ".join(args))
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        sys.exit(f"exit code {proc.returncode}: {proc.stderr}")
    return proc.stdout


tmp = tempfile.mkdtemp(prefix="medcov_demo_")
data = os.path.join(tmp, "stream.csv")
head = os.path.join(tmp, "head.csv")
tail = os.path.join(tmp, "tail.csv")

# 1. synthesize a contaminated stream and split it in two
run("simulate", "--d", "8", "--n", "500", "--delta", "0.1",
    "--scenario", "student_t2", "--seed", "3", "--out", data)
rows = open(data).read().splitlines()
open(head, "w").write("\n".join(rows[:200]) + "\n")
open(tail, "w").write("\n".join(rows[200:]) + "\n")
print(f"  wrote {len(rows)} rows to {data}\n")

# 2. one-pass fit with a snapshot after 200 rows, then resume
snap = os.path.join(tmp, "state.json")
out = run("fit-stream", "--in", head, "--q", "2", "--out", snap)
print("  after 200 rows:", out.strip()[:100], "...\n")
out = run("fit-stream", "--in", tail, "--resume", snap, "--out", snap)
report = json.loads(out)
print(f"  resumed to n={report['rows']}, eigenvalues {report['eigenvalues']}\n")

# 3. batch reference on the full file
out = run("fit-weiszfeld", "--in", data, "--q", "2")
batch = json.loads(out)
print(f"  batch eigenvalues {batch['eigenvalues']}\n")

# 4. a small Monte Carlo table...
print(run("bench", "--d", "8", "--n", "300", "--delta", "0.1",
          "--scenario", "student_t2", "--q", "2", "--reps", "10",
          "--estimators", "pca,mcm_rplus", "--seed", "0"))

# 5. ...and a convergence curve, as plot-ready CSV
print(run("curve", "--d", "8", "--n", "600", "--delta", "0.1",
          "--scenario", "student_t2", "--q", "2", "--reps", "5",
          "--checkpoints", "150,300,600", "--seed", "0"))

print(f"scratch files under {tmp}")
