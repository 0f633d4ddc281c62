"""Sweeps to CSV, from Python rather than the command line.

Runs the analytic spacing preset, reads the file back, and runs a small
custom simulated sweep. Equivalent shell commands::

    vanetcap sweep --preset fig7b -o fig7b.csv
    vanetcap sweep --var p --values 0.05,0.1,0.2 --modes both --trials 20 --duration-s 300 -o p.csv
"""

import tempfile
from pathlib import Path

from vanetcap.sweep import PRESETS, SweepSpec, read_sweep_csv, run_sweeps

out = Path(tempfile.mkdtemp())

preset = PRESETS["fig7b"]
print(f"{preset.name}: {preset.description}")
run_sweeps(preset.sweeps, out / "fig7b.csv", preset=preset.name)
meta, rows = read_sweep_csv(out / "fig7b.csv")
for label in dict.fromkeys(r["label"] for r in rows):
    caps = ", ".join(f"{r['value'] / 1e3:g} km: {r['total_capacity'] / 1e6:.1f}" for r in rows if r["label"] == label)
    print(f"  {label:10s} {caps}  (Mb/s)")

spec = SweepSpec("p", (0.05, 0.1, 0.2), modes=("both",), trials=20, duration_s=300.0, label="demo")
rows = run_sweeps([spec], out / "p.csv")
print("\n  p   analytic   simulated      deviation")
for r in rows:
    print(f"{r['value']:5.2f} {r['analytic_value'] / 1e6:8.2f} {r['sim_mean'] / 1e6:8.2f} +- {r['sim_se'] / 1e6:4.2f}"
          f"   {r['rel_deviation']:.1%}")
print(f"\nfiles in {out}: {sorted(p.name for p in out.iterdir())}")
