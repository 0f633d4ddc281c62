"""Selection of simultaneously active helper-VoI pairs in a V2V area.

Transmitters (helpers) and receivers (VoIs) are both restricted to the
cycle's V2V area ``[origin, right border)``; VoIs in a V2I area are left to
the infrastructure.  Two transmitters must be at least ``R_c`` apart, a
receiver must be within ``r0`` of its transmitter, and no VoI receives from
two helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .highway import (
    CycleGeometry,
    NetworkParams,
    Snapshot,
    Vehicle,
    cycle_geometry,
    indices_in,
    sample_snapshot,
)

MAX_ORACLE_HELPERS = 25


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class HelperVoiPair:
    transmitter: Vehicle
    receiver: Vehicle
    tx_index: int
    rx_index: int

    @property
    def tx_position_m(self) -> float:
        return self.transmitter.position_m

    @property
    def rx_position_m(self) -> float:
        return self.receiver.position_m


@dataclass(frozen=True)
class PairSchedule:
    pairs: tuple[HelperVoiPair, ...]
    cycle: CycleGeometry

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def tx_positions(self) -> np.ndarray:
        return np.array([pr.tx_position_m for pr in self.pairs])


def _area_members(snapshot: Snapshot, cycle: CycleGeometry) -> tuple[np.ndarray, np.ndarray]:
    idx = indices_in(snapshot, cycle.v2v_interval)
    voi = snapshot.is_voi[idx]
    return idx[~voi], idx[voi]


def greedy_pairs(hpos, vpos, r0: float, rc: float) -> list[tuple[int, int]]:
    """Left-to-right greedy on sorted helper/VoI coordinates of one area.

    Returns ``(helper_slot, voi_slot)`` indices into ``hpos``/``vpos``.  A
    helper transmits if it is at least ``rc`` right of the last transmitter
    and reaches an unused VoI; it takes the leftmost such VoI.
    """
    used = np.zeros(len(vpos), dtype=bool)
    pairs = []
    last_tx = -math.inf
    lo = 0
    n_v = len(vpos)
    for i, h in enumerate(hpos):
        if h - last_tx < rc:
            continue
        while lo < n_v and vpos[lo] < h - r0:
            lo += 1
        j = lo
        while j < n_v and vpos[j] <= h + r0:
            if not used[j]:
                used[j] = True
                last_tx = h
                pairs.append((i, j))
                break
            j += 1
    return pairs


def select_pairs_opt(snapshot: Snapshot, cycle: CycleGeometry) -> PairSchedule:
    """Greedy optimal pair selection in the V2V area of ``cycle``."""
    p = snapshot.params
    helpers, vois = _area_members(snapshot, cycle)
    chosen = greedy_pairs(
        snapshot.positions[helpers], snapshot.positions[vois], p.vehicle_radio_m, p.sensing_range_m
    )
    pairs = tuple(
        HelperVoiPair(
            transmitter=snapshot.vehicle(helpers[i]),
            receiver=snapshot.vehicle(vois[j]),
            tx_index=int(helpers[i]),
            rx_index=int(vois[j]),
        )
        for i, j in chosen
    )
    schedule = PairSchedule(pairs, cycle)
    check_schedule(schedule, p)
    return schedule


def check_schedule(schedule: PairSchedule, params: NetworkParams) -> None:
    """Raise ``AssertionError`` unless the schedule is feasible."""
    lo, hi = schedule.cycle.v2v_interval
    rx_seen = set()
    tx_seen = set()
    last = -math.inf
    for pr in schedule.pairs:
        assert pr.transmitter.role == "helper" and pr.receiver.role == "voi"
        assert abs(pr.tx_position_m - pr.rx_position_m) <= params.vehicle_radio_m
        assert lo <= pr.tx_position_m < hi and lo <= pr.rx_position_m < hi
        assert pr.tx_position_m - last >= params.sensing_range_m
        assert pr.rx_index not in rx_seen
        rx_seen.add(pr.rx_index)
        tx_seen.add(pr.tx_index)
        last = pr.tx_position_m
    assert not (rx_seen & tx_seen)


# --------------------------------------------------------------------------
# Exhaustive oracle
# --------------------------------------------------------------------------


def _try_augment(h, adj, match_of_voi, seen) -> bool:
    for v in adj[h]:
        if v in seen:
            continue
        seen.add(v)
        if v not in match_of_voi or _try_augment(match_of_voi[v], adj, match_of_voi, seen):
            match_of_voi[v] = h
            return True
    return False


def max_pairs_exhaustive(hpos, vpos, r0: float, rc: float) -> int:
    """Maximum number of feasible pairs by depth-first search.

    Transmitter subsets are enumerated left to right under the spacing rule;
    each extension is kept only if a VoI matching covering all chosen
    helpers still exists (augmenting path).
    """
    vpos = np.asarray(vpos)
    adj = []
    cand = []
    for h in hpos:
        lo = np.searchsorted(vpos, h - r0, "left")
        hi = np.searchsorted(vpos, h + r0, "right")
        if hi > lo:
            cand.append(h)
            adj.append(list(range(lo, hi)))
    n = len(cand)
    if n == 0:
        return 0

    # suffix_pack[i]: max transmitters among cand[i:] under spacing alone
    suffix_pack = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        j = i + 1
        while j < n and cand[j] - cand[i] < rc:
            j += 1
        suffix_pack[i] = max(suffix_pack[i + 1], 1 + suffix_pack[j])

    best = 0

    def dfs(start: int, last: float, count: int, matching: dict) -> None:
        nonlocal best
        best = max(best, count)
        for i in range(start, n):
            if count + suffix_pack[i] <= best:
                return
            if cand[i] - last < rc:
                continue
            trial = dict(matching)
            if _try_augment(i, adj, trial, set()):
                dfs(i + 1, cand[i], count + 1, trial)

    dfs(0, -math.inf, 0, {})
    return best


def max_pairs_oracle(snapshot: Snapshot, cycle: CycleGeometry) -> int:
    """Exact maximum number of simultaneous pairs (small instances only)."""
    p = snapshot.params
    helpers, vois = _area_members(snapshot, cycle)
    if len(helpers) > MAX_ORACLE_HELPERS:
        raise InstanceTooLarge(
            f"{len(helpers)} helpers in the V2V area; exhaustive search is limited to {MAX_ORACLE_HELPERS}"
        )
    return max_pairs_exhaustive(
        snapshot.positions[helpers], snapshot.positions[vois], p.vehicle_radio_m, p.sensing_range_m
    )


def random_feasible_schedule(snapshot: Snapshot, cycle: CycleGeometry, rng) -> PairSchedule:
    """A random (generally suboptimal) feasible schedule, for lower-bound checks."""
    p = snapshot.params
    r0, rc = p.vehicle_radio_m, p.sensing_range_m
    helpers, vois = _area_members(snapshot, cycle)
    hpos = snapshot.positions[helpers]
    vpos = snapshot.positions[vois]
    used = set()
    chosen: dict[int, int] = {}
    for i in rng.permutation(len(helpers)):
        tx = sorted(chosen)
        k = np.searchsorted(hpos[tx], hpos[i]) if tx else 0
        if k > 0 and hpos[i] - hpos[tx[k - 1]] < rc:
            continue
        if k < len(tx) and hpos[tx[k]] - hpos[i] < rc:
            continue
        free = [j for j in range(len(vpos)) if j not in used and abs(vpos[j] - hpos[i]) <= r0]
        if not free or rng.random() < 0.2:
            continue
        j = int(rng.choice(free))
        used.add(j)
        chosen[int(i)] = j
    pairs = tuple(
        HelperVoiPair(
            transmitter=snapshot.vehicle(helpers[i]),
            receiver=snapshot.vehicle(vois[j]),
            tx_index=int(helpers[i]),
            rx_index=int(vois[j]),
        )
        for i, j in sorted(chosen.items())
    )
    schedule = PairSchedule(pairs, cycle)
    check_schedule(schedule, p)
    return schedule


# --------------------------------------------------------------------------
# Monte-Carlo pair statistics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PairStats:
    """Empirical pair-schedule statistics over independent snapshots.

    ``pmf_of_m[j]`` is the empirical probability that the next transmitter
    is the ``(j+1)``-th helper at or beyond ``S_k + R_c``; ``pmf_of_m0`` is
    the same for the first transmitter counted from the origin.
    """

    slots: int
    mean_pairs: float
    stderr_pairs: float
    mean_gap_m: float
    first_gap_m: float
    pmf_of_m: np.ndarray
    pmf_of_m0: np.ndarray
    n_gaps: int
    n_first: int


def empirical_pair_stats(params: NetworkParams, slots: int, seed=None) -> PairStats:
    """Run the greedy scheduler on ``slots`` independent one-cycle snapshots."""
    if slots < 1:
        raise ValueError("slots must be >= 1")
    one_cycle = params.replace(road_length_m=params.infra_spacing_m)
    cycle = cycle_geometry(one_cycle, 0)
    rc = params.sensing_range_m
    seeds = np.random.SeedSequence(seed).spawn(slots)
    counts = np.empty(slots)
    gaps, firsts, m_idx, m0_idx = [], [], [], []
    for s, ss in enumerate(seeds):
        snap = sample_snapshot(one_cycle, ss)
        sched = select_pairs_opt(snap, cycle)
        counts[s] = len(sched)
        if not sched.pairs:
            continue
        tx = sched.tx_positions
        helpers, _ = _area_members(snap, cycle)
        hpos = snap.positions[helpers]
        firsts.append(tx[0] - cycle.origin_m)
        m0_idx.append(int(np.searchsorted(hpos, tx[0], "right")))
        for a, b in zip(tx[:-1], tx[1:]):
            gaps.append(b - a)
            start = np.searchsorted(hpos, a + rc, "left")
            m_idx.append(int(np.searchsorted(hpos, b, "right") - start))
    m_idx = np.asarray(m_idx, dtype=np.int64)
    m0_idx = np.asarray(m0_idx, dtype=np.int64)
    pmf_m = np.bincount(m_idx, minlength=2)[1:] / max(len(m_idx), 1)
    pmf_m0 = np.bincount(m0_idx, minlength=2)[1:] / max(len(m0_idx), 1)
    return PairStats(
        slots=slots,
        mean_pairs=float(counts.mean()),
        stderr_pairs=float(counts.std(ddof=1) / math.sqrt(slots)) if slots > 1 else float("nan"),
        mean_gap_m=float(np.mean(gaps)) if gaps else float("nan"),
        first_gap_m=float(np.mean(firsts)) if firsts else float("nan"),
        pmf_of_m=pmf_m,
        pmf_of_m0=pmf_m0,
        n_gaps=len(gaps),
        n_first=len(firsts),
    )
