"""Driving the command line interface and reading its files.

The CLI turns the library into a reproducible batch tool: measures and
points come in through a JSON config, every subcommand writes JSON (and
CSV where tabular) into an output directory, timestamps stay out of the
payload files so reruns are byte-identical, and the exit code carries
the verdict (0 pass, 1 fail, 2 config error, 3 no convergence).
"""

import json
import math
import pathlib
import subprocess
import sys
import tempfile

PKG = pathlib.Path(__file__).resolve().parents[1]


def freesub(*args, out):
    cmd = [sys.executable, "-m", "freesub.cli", *args, "--out", str(out)]
    proc = subprocess.run(cmd, capture_output=True, text=True, cwd=PKG)
    print(f"$ freesub {' '.join(args)}   -> exit {proc.returncode}")
    for line in proc.stdout.strip().splitlines():
        print(f"    {line}")
    return proc


with tempfile.TemporaryDirectory() as tmp:
    out = pathlib.Path(tmp)
    sc = {"family": "semicircle", "params": [0.0, 1.0]}

    # -- additive convolution: subordination table plus density --------------
    cfg = out / "add.json"
    cfg.write_text(json.dumps({
        "mu": sc, "nu": sc, "eta_sequence": [2e-3, 1e-3, 5e-4],
    }))
    freesub("convolve-add", "--config", str(cfg), "--grid=-3:3:301",
            out=out / "add")
    summary = json.loads((out / "add" / "summary.json").read_text())
    print(f"    summary: pass={summary['pass']}, points={summary['points']}, "
          f"max residual {summary['max_residual']:.1e}")
    measure = json.loads((out / "add" / "measure.json").read_text())
    print(f"    measure.json carries {len(measure['density'])} density samples "
          f"on [{measure['grid']['lo']}, {measure['grid']['hi']}]")

    # -- transform evaluation at chosen points -------------------------------
    cfg = out / "eval.json"
    cfg.write_text(json.dumps({"measure": sc, "points": [[0.0, 1.0]]}))
    freesub("eval", "cauchy", "--config", str(cfg), out=out / "ev")
    row = json.loads((out / "ev" / "eval.json").read_text())["rows"][0]
    got = complex(*row["value"])
    exact = 1j * (1 - math.sqrt(5)) / 2
    print(f"    G(i) = {got:.9f}   (exact {exact:.9f})")

    # -- a verification experiment, report on disk ----------------------------
    freesub("verify", "lemma34", "--samples", "2000", "--seed", "7",
            out=out / "v1")
    report = json.loads((out / "v1" / "report.json").read_text())
    print(f"    report.json: verdict={report['verdict']}, "
          f"residuals={report['residuals']}")

    # -- reruns reproduce the payload byte for byte ---------------------------
    freesub("verify", "lemma34", "--samples", "2000", "--seed", "7",
            out=out / "v2")
    same = (out / "v1" / "report.json").read_bytes() == \
           (out / "v2" / "report.json").read_bytes()
    print(f"    rerun byte-identical: {same}")
