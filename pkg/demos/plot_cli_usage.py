"""
Checking problem files from the command line
============================================

Problem files are JSON documents.  The ``algebroidkit`` command writes the
built-in fixtures, runs a suite on a file, and explains each residual.
The same entry point is callable from Python, which is what we do here.
"""
# %%
import json
import tempfile
from pathlib import Path

from algebroidkit.cli import main

out = Path(tempfile.mkdtemp())
main(["fixtures", "--out", str(out)])

# %%
# Exit code 0: all checks pass.  Exit code 1: a check fails.
print("exit", main(["check", str(out / "e2.json"), "--suite", "hamiltonian-poisson"]))
print("exit", main(["check", str(out / "e2-broken-mu.json"), "--suite", "hamiltonian-poisson"]))

# %%
# Exit code 3: the suite needs a Poisson structure that e1 does not have.
print("exit", main(["check", str(out / "e1.json"), "--suite", "hamiltonian-poisson"]))

# %%
# The JSON report and the formula behind a check.
main(["check", str(out / "e6.json"), "--suite", "identities", "--json", str(out / "report.json")])
report = json.loads((out / "report.json").read_text())
print(report["schema"], report["verdicts"], report["input_digest"][:12])
main(["explain", "P3"])
