"""Parameter sweeps, figure presets and the comparison CSV format.

CSV layout (UTF-8)::

    # vanetcap-sweep-csv v1
    # key: value           (metadata lines)
    swept_var,value,quantity,<breakdown fields>,analytic_value,sim_mean,sim_se,...
    p,0.01,capacity,...

Floats are written with ``repr`` so that reading a file back reproduces the
rows exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .analytic import BREAKDOWN_FIELDS, cycle_capacity, expected_pair_count
from .highway import NetworkParams, ParameterError, format_params_text
from .scheduler import empirical_pair_stats
from .simulator import SimConfig, run_experiment

log = logging.getLogger(__name__)

CSV_FORMAT = "vanetcap-sweep-csv v1"
SWEEP_VARS = {
    "p": "voi_fraction",
    "rho": None,  # total density, east/west ratio of the base kept
    "d": "infra_spacing_m",
    "Rc": "sensing_range_m",
    "wV": "v2v_rate_bps",
    "wI": "v2i_rate_bps",
}
QUANTITIES = ("capacity", "capacity_v2i_only", "pairs")
MODES = ("analytic", "simulate")
EPS_BPS = 1.0

DESK_PARAMS = NetworkParams()
DESK_TRIALS = 200
DESK_DURATION_S = 600.0
DESK_SLOT_S = 0.1
FULL_ROAD_LENGTH_M = 100_000.0
FULL_TRIALS = 2000


def apply_sweep_value(base: NetworkParams, variable: str, value: float) -> NetworkParams:
    if variable not in SWEEP_VARS:
        raise ValueError(f"unknown sweep variable {variable!r}; choose from {sorted(SWEEP_VARS)}")
    if variable == "rho":
        share = base.density_east_per_m / base.density
        return base.replace(density_east_per_m=value * share, density_west_per_m=value * (1 - share))
    return base.replace(**{SWEEP_VARS[variable]: float(value)})


def p_grid() -> list[float]:
    """Covering grid for VoI-fraction sweeps: log-spaced to 0.3, then linear."""
    low = np.geomspace(0.001, 0.3, 8)
    high = np.linspace(0.3, 1.0, 5)[1:]
    return [float(v) for v in np.concatenate([low, high])]


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    base: NetworkParams = DESK_PARAMS
    modes: tuple = ("analytic",)
    quantity: str = "capacity"
    trials: int = DESK_TRIALS
    duration_s: float = DESK_DURATION_S
    slot_s: float = DESK_SLOT_S
    seed: int = 0
    label: str = ""

    def __post_init__(self):
        if self.variable not in SWEEP_VARS:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        modes = set(self.modes)
        if "both" in modes:
            modes = (modes - {"both"}) | set(MODES)
        if not modes or not modes <= set(MODES):
            raise ValueError(f"modes must be a non-empty subset of {MODES + ('both',)}")
        object.__setattr__(self, "modes", tuple(m for m in MODES if m in modes))
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("sweep values must be non-empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", values)
        for v in values:
            apply_sweep_value(self.base, self.variable, v)

    @classmethod
    def grid(cls, variable: str, start: float, stop: float, count: int, **kw) -> "SweepSpec":
        return cls(variable, tuple(np.linspace(start, stop, count)), **kw)

    def points(self) -> list[NetworkParams]:
        return [apply_sweep_value(self.base, self.variable, v) for v in self.values]

    def sim_config(self, params: NetworkParams) -> SimConfig:
        return SimConfig(
            params,
            slot_s=self.slot_s,
            duration_s=self.duration_s,
            trials=self.trials,
            seed=self.seed,
            cooperative=self.quantity != "capacity_v2i_only",
        )


COLUMNS = (
    ("swept_var", "value", "quantity", "label")
    + BREAKDOWN_FIELDS
    + ("analytic_value", "sim_mean", "sim_se", "sim_east_mean", "sim_west_mean", "rel_deviation", "error")
)
_STR_COLUMNS = {"swept_var", "quantity", "label", "bottleneck", "error"}


def _analytic_value(params: NetworkParams, quantity: str, breakdown) -> float:
    if quantity == "pairs":
        return expected_pair_count(params) if params.voi_fraction < 1 else 0.0
    if quantity == "capacity_v2i_only":
        return params.n_cycles * breakdown.v2i_voi_rate
    return breakdown.total_capacity


def evaluate_point(spec: SweepSpec, value: float, params: NetworkParams) -> dict:
    """One ComparisonRow as a dict keyed by :data:`COLUMNS`."""
    row = dict.fromkeys(COLUMNS, math.nan)
    row.update(swept_var=spec.variable, value=float(value), quantity=spec.quantity, label=spec.label, error="")
    bd = cycle_capacity(params)
    row.update(bd.as_row())
    analytic = _analytic_value(params, spec.quantity, bd)
    row["analytic_value"] = analytic
    if "simulate" in spec.modes:
        if spec.quantity == "pairs":
            st = empirical_pair_stats(params, spec.trials, seed=spec.seed)
            row.update(sim_mean=st.mean_pairs, sim_se=st.stderr_pairs)
            row["rel_deviation"] = abs(st.mean_pairs - analytic) / max(analytic, 1e-12)
        else:
            res = run_experiment(spec.sim_config(params))
            row.update(
                sim_mean=res.capacity_mean,
                sim_se=res.capacity_stderr,
                sim_east_mean=res.mean("east_bps"),
                sim_west_mean=res.mean("west_bps"),
            )
            row["rel_deviation"] = abs(res.capacity_mean - analytic) / max(analytic, EPS_BPS)
    return row


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(column: str, text: str):
    if column in _STR_COLUMNS:
        return text
    return float(text)


class SweepWriter:
    """Serialized, line-buffered CSV writer; every row is flushed at once."""

    def __init__(self, path: str | Path, metadata: dict):
        self.path = Path(path)
        self._fh = open(self.path, "w", encoding="utf-8", newline="")
        self._fh.write(f"# {CSV_FORMAT}\n")
        for k, v in metadata.items():
            self._fh.write(f"# {k}: {v}\n")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(COLUMNS)
        self._fh.flush()

    def write(self, row: dict) -> None:
        self._writer.writerow([_fmt(row[c]) for c in COLUMNS])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_sweep_csv(path: str | Path) -> tuple[dict, list[dict]]:
    """Return ``(metadata, rows)`` from a file written by :class:`SweepWriter`."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines(keepends=True)
    if not lines or lines[0].strip() != f"# {CSV_FORMAT}":
        raise ValueError(f"{path}: not a {CSV_FORMAT} file")
    meta = {}
    body_start = 1
    for line in lines[1:]:
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition(": ")
        meta[key] = value
        body_start += 1
    reader = csv.DictReader(io.StringIO("".join(lines[body_start:])))
    rows = [{k: _parse(k, v) for k, v in r.items()} for r in reader]
    return meta, rows


def sweep_metadata(specs: Sequence[SweepSpec], preset: str | None = None) -> dict:
    meta = {
        "artifact_version": __version__,
        "preset": preset or "",
        "sweeps": len(specs),
    }
    for i, s in enumerate(specs):
        meta[f"sweep{i}"] = (
            f"var={s.variable} quantity={s.quantity} modes={'+'.join(s.modes)} "
            f"trials={s.trials} duration_s={s.duration_s!r} slot_s={s.slot_s!r} seed={s.seed} "
            f"label={s.label}"
        )
    return meta


def write_meta_sidecar(path: str | Path, specs: Sequence[SweepSpec], preset: str | None = None) -> Path:
    """Write ``<output>.meta`` with everything needed to rerun the sweep."""
    side = Path(str(path) + ".meta")
    out = [f"artifact_version = {__version__}", f"csv_format = {CSV_FORMAT}", f"preset = {preset or ''}"]
    out.append(
        f"scale_road_length = {DESK_PARAMS.road_length_m / FULL_ROAD_LENGTH_M!r}  "
        f"# desk L / full-scale L ({FULL_ROAD_LENGTH_M!r} m)"
    )
    out.append(f"scale_trials = {DESK_TRIALS / FULL_TRIALS!r}  # desk trials / full-scale repetitions ({FULL_TRIALS})")
    for i, s in enumerate(specs):
        out.append(f"\n[sweep{i}]")
        for f in dataclasses.fields(s):
            if f.name != "base":
                out.append(f"{f.name} = {getattr(s, f.name)!r}")
        out.append("trial_seeds = SeedSequence([seed, trial_index]) for trial_index in range(trials)")
        out.append("[sweep%d.base]" % i)
        out.append(format_params_text(s.base).rstrip("\n"))
    side.write_text("\n".join(out) + "\n", encoding="utf-8")
    return side


def run_sweeps(specs: Iterable[SweepSpec], output: str | Path, preset: str | None = None) -> list[dict]:
    """Evaluate every point of every sweep, streaming rows to ``output``.

    A failing point is recorded with its error message and the sweep moves
    on; completed rows survive an interrupt.
    """
    specs = list(specs)
    write_meta_sidecar(output, specs, preset)
    rows = []
    with SweepWriter(output, sweep_metadata(specs, preset)) as writer:
        for spec in specs:
            for value in spec.values:
                try:
                    params = apply_sweep_value(spec.base, spec.variable, value)
                    row = evaluate_point(spec, value, params)
                except (ParameterError, ValueError, ArithmeticError) as exc:
                    row = dict.fromkeys(COLUMNS, math.nan)
                    row.update(
                        swept_var=spec.variable, value=value, quantity=spec.quantity,
                        label=spec.label, bottleneck="", error=f"{type(exc).__name__}: {exc}",
                    )
                    log.warning("%s=%r failed: %s", spec.variable, value, row["error"])
                writer.write(row)
                rows.append(row)
    return rows


# --------------------------------------------------------------------------
# Figure presets (desk scale)
# --------------------------------------------------------------------------

PRESET_DENSITIES = (0.005, 0.01, 0.02)  # implementer-chosen grid


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    sweeps: tuple = field(repr=False)


def _presets() -> dict[str, Preset]:
    grid = tuple(p_grid())
    both = ("analytic", "simulate")
    fig3 = tuple(
        SweepSpec("p", grid, DESK_PARAMS.replace(sensing_range_m=rc), both, "pairs",
                  trials=10_000, label=f"Rc={rc:g}")
        for rc in (300.0, 400.0, 600.0)
    )
    fig4a = (SweepSpec("p", grid, DESK_PARAMS.replace(sensing_range_m=400.0), both, label="Rc=400"),)
    fig4b = (SweepSpec("p", grid, DESK_PARAMS.replace(sensing_range_m=300.0), both, label="Rc=300"),)
    fig5 = (
        SweepSpec("p", grid, DESK_PARAMS, both, "capacity", label="with coop"),
        SweepSpec("p", grid, DESK_PARAMS, both, "capacity_v2i_only", label="without coop"),
    )
    fig7a = tuple(
        SweepSpec("rho", tuple(np.geomspace(0.001, 0.05, 12)), DESK_PARAMS.replace(infra_spacing_m=d),
                  ("analytic",), label=f"d={d:g}")
        for d in (1_000.0, 2_000.0, 4_000.0, 5_000.0)
    )
    fig7b = tuple(
        SweepSpec("d", (1_000.0, 1_250.0, 2_000.0, 2_500.0, 4_000.0, 5_000.0, 10_000.0, 20_000.0),
                  apply_sweep_value(DESK_PARAMS, "rho", rho), ("analytic",), label=f"rho={rho:g}")
        for rho in PRESET_DENSITIES
    )
    return {
        "fig3": Preset("fig3", "E[N_p] vs p for Rc in {300, 400, 600} m (below, at, above 2*r0)", fig3),
        "fig4a": Preset("fig4a", "capacity and east/west split vs p, Rc = 400 m (>= 2*r0)", fig4a),
        "fig4b": Preset("fig4b", "capacity and east/west split vs p, Rc = 300 m (< 2*r0)", fig4b),
        "fig5": Preset("fig5", "cooperative vs V2I-only capacity vs p", fig5),
        "fig7a": Preset("fig7a", "per-cycle capacity vs rho for several d (analytic)", fig7a),
        "fig7b": Preset("fig7b", "total capacity vs d for rho in {0.005, 0.01, 0.02} (analytic)", fig7b),
    }


PRESETS = _presets()
