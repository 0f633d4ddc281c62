"""Compiled slot loop used by :func:`vanetcap.simulator.run_trial`.

Mirrors the pure-Python engine operation for operation (same accumulation
order, same half-open intervals) so both produce identical floats.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def greedy_count(hpos, n_h, vpos, n_v, r0, rc, used, tx_out, rx_out):
    for j in range(n_v):
        used[j] = False
    n_pairs = 0
    last_tx = -np.inf
    lo = 0
    for i in range(n_h):
        h = hpos[i]
        if h - last_tx < rc:
            continue
        while lo < n_v and vpos[lo] < h - r0:
            lo += 1
        j = lo
        while j < n_v and vpos[j] <= h + r0:
            if not used[j]:
                used[j] = True
                last_tx = h
                tx_out[n_pairs] = i
                rx_out[n_pairs] = j
                n_pairs += 1
                break
            j += 1
    return n_pairs


@njit(cache=True, nogil=True)
def run_slots(
    pos, east, voi,
    road_length, spacing, n_cycles, v2i_len, r0, rc,
    v_east, v_west, w_i, w_v, dt,
    n_warm, n_meas, cooperative, global_buffer,
    v2i_bits, v2v_bits, counters, audit,
):
    """Advance ``n_warm + n_meas`` slots in place.

    v2i_bits, v2v_bits : (n_cycles, 2) accumulators, column 0 east, 1 west
    counters : (n_cycles, 3) measured q1 slots, q2 slots, pair-slots
    audit : [fetched_all, v2v_all, buffer_end, buffer_min]
    """
    n = pos.shape[0]
    buffer = np.zeros(n_cycles)
    hpos = np.empty(n)
    vpos = np.empty(n)
    vdir = np.empty(n, dtype=np.bool_)
    used = np.empty(n, dtype=np.bool_)
    tx_out = np.empty(n, dtype=np.int64)
    rx_out = np.empty(n, dtype=np.int64)
    fetch_bits = w_i * dt
    pair_bits = w_v * dt
    buffer_min = 0.0
    for s in range(n_warm + n_meas):
        measuring = s >= n_warm
        k = 0
        for c in range(n_cycles):
            b = 0 if global_buffer else c
            start = c * spacing
            v2v_start = start + v2i_len
            stop = start + spacing
            while k < n and pos[k] < start:
                k += 1
            # V2I area [start, v2v_start)
            first_voi = -1
            any_helper = False
            while k < n and pos[k] < v2v_start:
                if voi[k]:
                    if first_voi < 0:
                        first_voi = k
                else:
                    any_helper = True
                k += 1
            if first_voi >= 0:
                if measuring:
                    v2i_bits[c, 0 if east[first_voi] else 1] += fetch_bits
                    counters[c, 0] += 1
            elif any_helper:
                buffer[b] += fetch_bits
                audit[0] += fetch_bits
                if measuring:
                    counters[c, 1] += 1
            # V2V area [v2v_start, stop)
            n_h = 0
            n_v = 0
            while k < n and pos[k] < stop:
                if voi[k]:
                    vpos[n_v] = pos[k]
                    vdir[n_v] = east[k]
                    n_v += 1
                else:
                    hpos[n_h] = pos[k]
                    n_h += 1
                k += 1
            if cooperative and n_h > 0 and n_v > 0:
                n_pairs = greedy_count(hpos, n_h, vpos, n_v, r0, rc, used, tx_out, rx_out)
                if measuring:
                    counters[c, 2] += n_pairs
                for q in range(n_pairs):
                    amount = min(pair_bits, buffer[b])
                    if amount <= 0.0:
                        break
                    buffer[b] -= amount
                    audit[1] += amount
                    if measuring:
                        v2v_bits[c, 0 if vdir[rx_out[q]] else 1] += amount
                if buffer[b] < buffer_min:
                    buffer_min = buffer[b]
        # advance and re-sort (stable, keeps tie order)
        for i in range(n):
            if east[i]:
                x = pos[i] + v_east * dt
            else:
                x = pos[i] - v_west * dt
            x = x % road_length
            if x >= road_length:
                x -= road_length
            pos[i] = x
        order = np.argsort(pos, kind="mergesort")
        pos[:] = pos[order]
        east[:] = east[order]
        voi[:] = voi[order]
    audit[2] = buffer.sum()
    audit[3] = buffer_min
