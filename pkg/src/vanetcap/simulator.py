"""Slot-stepped Monte-Carlo simulation of the cooperative download strategy.

Each slot, per cycle:

1. the infrastructure serves the leftmost covered VoI, or, if no VoI is
   covered, pushes ``w_I * dt`` bits into the cycle's helper buffer when at
   least one helper is covered;
2. (cooperative mode) the greedy scheduler picks helper-VoI pairs in the
   V2V area and each pair drains up to ``w_V * dt`` bits from the buffer;
3. all vehicles move ``dt`` seconds along the ring.

The first ``max(d/v1, d/v2)`` seconds of every trial are a warm-up whose
deliveries are not counted.
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .highway import NetworkParams, Snapshot, advance, cycles, indices_in, sample_snapshot
from .scheduler import select_pairs_opt

EAST, WEST = 0, 1


@dataclass(frozen=True)
class SimConfig:
    params: NetworkParams
    slot_s: float = 0.1
    duration_s: float = 600.0
    trials: int = 200
    seed: int = 0
    cooperative: bool = True
    buffer_scope: str = "cycle"
    warmup: bool = True
    engine: str = "numba"

    def __post_init__(self):
        p = self.params
        p.validate()
        if not self.slot_s > 0:
            raise ValueError(f"slot_s must be > 0, got {self.slot_s!r}")
        if max(p.speed_east_mps, p.speed_west_mps) * self.slot_s > p.vehicle_radio_m / 10:
            raise ValueError(
                "slot_s too long for the quasi-static assumption: "
                f"max speed * slot_s must be <= r0/10 = {p.vehicle_radio_m / 10!r} m"
            )
        if not self.duration_s > 0:
            raise ValueError("duration_s must be > 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.buffer_scope not in ("cycle", "global"):
            raise ValueError("buffer_scope must be 'cycle' or 'global'")
        if self.engine not in ("numba", "python"):
            raise ValueError("engine must be 'numba' or 'python'")

    @property
    def warmup_slots(self) -> int:
        if not self.warmup:
            return 0
        p = self.params
        warm_s = max(p.infra_spacing_m / p.speed_east_mps, p.infra_spacing_m / p.speed_west_mps)
        return int(math.ceil(warm_s / self.slot_s - 1e-9))

    @property
    def measured_slots(self) -> int:
        return max(1, int(round(self.duration_s / self.slot_s)))

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, eq=False)
class TrialStats:
    """Accumulated deliveries of one trial.

    ``v2i_bits``/``v2v_bits`` have shape ``(n_cycles, 2)`` with columns
    (east, west); ``counters`` has columns (q1 slots, q2 slots, pair-slots).
    Aggregates are derived from these arrays, so they always equal the sum
    of their parts.
    """

    duration_s: float
    measured_slots: int
    v2i_bits: np.ndarray
    v2v_bits: np.ndarray
    counters: np.ndarray
    fetched_bits_all: float
    v2v_bits_all: float
    buffer_end_bits: float
    buffer_min_bits: float

    @property
    def n_cycles(self) -> int:
        return self.v2i_bits.shape[0]

    @property
    def total_delivered_bits(self) -> float:
        return float(self.v2i_bits.sum() + self.v2v_bits.sum())

    @property
    def empirical_capacity_bps(self) -> float:
        return self.total_delivered_bits / self.duration_s

    @property
    def east_bits(self) -> float:
        return float(self.v2i_bits[:, EAST].sum() + self.v2v_bits[:, EAST].sum())

    @property
    def west_bits(self) -> float:
        return float(self.v2i_bits[:, WEST].sum() + self.v2v_bits[:, WEST].sum())

    @property
    def cycle_slots(self) -> int:
        return self.measured_slots * self.n_cycles

    @property
    def q1_slots(self) -> int:
        return int(self.counters[:, 0].sum())

    @property
    def q2_slots(self) -> int:
        return int(self.counters[:, 1].sum())

    @property
    def empirical_pair_mean(self) -> float:
        """Mean number of active pairs per V2V area per slot."""
        return float(self.counters[:, 2].sum()) / self.cycle_slots

    def summary(self) -> dict:
        return {
            "capacity_bps": self.empirical_capacity_bps,
            "v2i_bps": float(self.v2i_bits.sum()) / self.duration_s,
            "v2v_bps": float(self.v2v_bits.sum()) / self.duration_s,
            "east_bps": self.east_bits / self.duration_s,
            "west_bps": self.west_bits / self.duration_s,
            "pair_mean": self.empirical_pair_mean,
            "q1_fraction": self.q1_slots / self.cycle_slots,
            "q2_fraction": self.q2_slots / self.cycle_slots,
        }


def trial_seed(config: SimConfig, trial_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(config.seed), int(trial_index)])


def _run_numba(config: SimConfig, snap: Snapshot) -> TrialStats:
    p = config.params
    n_c = p.n_cycles
    v2i = np.zeros((n_c, 2))
    v2v = np.zeros((n_c, 2))
    counters = np.zeros((n_c, 3), dtype=np.int64)
    audit = np.zeros(4)
    _kernel.run_slots(
        snap.positions.copy(), snap.eastbound.copy(), snap.is_voi.copy(),
        p.road_length_m, p.infra_spacing_m, n_c, 2 * p.infra_radio_m,
        p.vehicle_radio_m, p.sensing_range_m,
        p.speed_east_mps, p.speed_west_mps, p.v2i_rate_bps, p.v2v_rate_bps, config.slot_s,
        config.warmup_slots, config.measured_slots, config.cooperative,
        config.buffer_scope == "global",
        v2i, v2v, counters, audit,
    )
    return TrialStats(
        duration_s=config.measured_slots * config.slot_s,
        measured_slots=config.measured_slots,
        v2i_bits=v2i,
        v2v_bits=v2v,
        counters=counters,
        fetched_bits_all=float(audit[0]),
        v2v_bits_all=float(audit[1]),
        buffer_end_bits=float(audit[2]),
        buffer_min_bits=float(audit[3]),
    )


def _run_python(config: SimConfig, snap: Snapshot, log=None) -> TrialStats:
    p = config.params
    geoms = cycles(p)
    n_c = len(geoms)
    v2i = np.zeros((n_c, 2))
    v2v = np.zeros((n_c, 2))
    counters = np.zeros((n_c, 3), dtype=np.int64)
    buffer = np.zeros(n_c)
    fetch_bits = p.v2i_rate_bps * config.slot_s
    pair_bits = p.v2v_rate_bps * config.slot_s
    fetched_all = v2v_all = 0.0
    buffer_min = 0.0
    n_warm = config.warmup_slots
    for s in range(n_warm + config.measured_slots):
        measuring = s >= n_warm
        records = []
        for c, geom in enumerate(geoms):
            b = 0 if config.buffer_scope == "global" else c
            covered = indices_in(snap, geom.v2i_interval)
            vois = covered[snap.is_voi[covered]]
            q1 = q2 = 0
            if len(vois):
                q1 = 1
                if measuring:
                    v2i[c, EAST if snap.eastbound[vois[0]] else WEST] += fetch_bits
                    counters[c, 0] += 1
            elif len(covered):
                q2 = 1
                buffer[b] += fetch_bits
                fetched_all += fetch_bits
                if measuring:
                    counters[c, 1] += 1
            n_pairs = 0
            if config.cooperative:
                schedule = select_pairs_opt(snap, geom)
                n_pairs = len(schedule)
                if measuring:
                    counters[c, 2] += n_pairs
                for pair in schedule.pairs:
                    amount = min(pair_bits, buffer[b])
                    if amount <= 0.0:
                        break
                    buffer[b] -= amount
                    v2v_all += amount
                    if measuring:
                        v2v[c, EAST if pair.receiver.direction == "east" else WEST] += amount
                buffer_min = min(buffer_min, buffer[b])
            if log is not None:
                records.append({"cycle": c, "q1": q1, "q2": q2, "pairs": n_pairs, "buffer_bits": buffer[b]})
        if log is not None:
            log.write(json.dumps({"slot": s, "time_s": snap.time_s, "measuring": measuring, "cycles": records}) + "\n")
        snap = advance(snap, config.slot_s)
    return TrialStats(
        duration_s=config.measured_slots * config.slot_s,
        measured_slots=config.measured_slots,
        v2i_bits=v2i,
        v2v_bits=v2v,
        counters=counters,
        fetched_bits_all=fetched_all,
        v2v_bits_all=v2v_all,
        buffer_end_bits=float(buffer.sum()),
        buffer_min_bits=buffer_min,
    )


def run_trial(config: SimConfig, trial_index: int, log=None) -> TrialStats:
    """Simulate one trial; deterministic given ``(config.seed, trial_index)``.

    ``log`` (a text stream) enables a JSON-lines record per slot and forces
    the pure-Python engine; meant for small runs.
    """
    snap = sample_snapshot(config.params, trial_seed(config, trial_index))
    if log is not None or config.engine == "python":
        return _run_python(config, snap, log)
    return _run_numba(config, snap)


@dataclass(frozen=True)
class ExperimentResult:
    config: SimConfig
    trials: list = field(repr=False)

    def _values(self, key: str) -> np.ndarray:
        return np.array([t.summary()[key] for t in self.trials])

    def mean(self, key: str = "capacity_bps") -> float:
        return float(self._values(key).mean())

    def stderr(self, key: str = "capacity_bps") -> float:
        v = self._values(key)
        return float(v.std(ddof=1) / math.sqrt(len(v)))

    @property
    def capacity_mean(self) -> float:
        return self.mean("capacity_bps")

    @property
    def capacity_stderr(self) -> float:
        return self.stderr("capacity_bps")

    def summary(self) -> dict:
        keys = self.trials[0].summary().keys()
        out = {}
        for k in keys:
            out[f"{k}_mean"] = self.mean(k)
            out[f"{k}_se"] = self.stderr(k)
        return out


def run_experiment(config: SimConfig, workers: int = 1) -> ExperimentResult:
    """Run ``config.trials`` independent trials and aggregate them."""
    if config.trials < 2:
        raise ValueError("run_experiment needs trials >= 2 for a standard error")
    indices = range(config.trials)
    if workers > 1:
        # the compiled kernel releases the GIL
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(lambda i: run_trial(config, i), indices))
    else:
        stats = [run_trial(config, i) for i in indices]
    return ExperimentResult(config, stats)
