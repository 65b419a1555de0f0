"""
Driving the command-line tool
=============================

Every mode writes report.json (validated against the bundled schema) and
its data files into --out. Exit codes: 0 ok, 1 configuration error,
2 parameter constraint, 3 numerical failure.
"""

import json
import tempfile
from pathlib import Path

from fracsys import cli

configs = Path(__file__).resolve().parent.parent / "configs"
out = Path(tempfile.mkdtemp())

# %% a sweep across the p = 2 window, where no proportional solution exists
code = cli.main(["sweep", "--config", str(configs / "sweep_beta.ini"), "--out", str(out / "sweep")])
print("exit", code)
print((out / "sweep" / "sweep.csv").read_text())

# %% inside the window analyze stops with exit code 2
code = cli.main(["analyze", "--config", str(configs / "window_p2.ini"), "--out", str(out / "win")])
report = json.loads((out / "win" / "report.json").read_text())
print("exit", code, report["status"], report["nonexistence_window"])
