"""Closed-form capacity of the cooperative V2I/V2V strategy.

All rates are per cycle (one V2I area plus one V2V area) unless the name
says ``total``.  ``1 - exp(-x)`` is evaluated with ``expm1`` so that the
small-``p`` end of a sweep keeps its relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .highway import NetworkParams, ParameterError


class Bottleneck(str, Enum):
    FETCH_LIMITED = "fetch-limited"
    DELIVERY_LIMITED = "delivery-limited"
    SATURATED = "saturated"


def _one_minus_exp(x: float) -> float:
    return -math.expm1(-x)


def _require_helpers(params: NetworkParams) -> None:
    if not 0 < params.voi_fraction < 1:
        raise ParameterError(
            f"voi_fraction must satisfy 0 < p < 1 here (helpers required), got {params.voi_fraction!r}"
        )


@dataclass(frozen=True)
class DerivedConstants:
    c1: float
    c2: float
    eta_max_cycle: float


def derived_constants(params: NetworkParams) -> DerivedConstants:
    p, rho, r0 = params.voi_fraction, params.density, params.vehicle_radio_m
    no_voi_in_disk = _one_minus_exp(rho * 2 * r0)
    return DerivedConstants(
        c1=1 - p * no_voi_in_disk,
        c2=(1 - p) * p * rho * no_voi_in_disk,
        eta_max_cycle=eta_max(params),
    )


def eta_max(params: NetworkParams) -> float:
    """Per-cycle ceiling: infrastructure delivery rate to any covered vehicle."""
    return params.v2i_rate_bps * _one_minus_exp(params.density * 2 * params.infra_radio_m)


def v2i_voi_rate(params: NetworkParams) -> float:
    """Rate VoIs receive directly from one infrastructure point."""
    x = params.voi_fraction * params.density * 2 * params.infra_radio_m
    return params.v2i_rate_bps * _one_minus_exp(x)


def helper_fetch_rate(params: NetworkParams) -> float:
    """Rate helpers prefetch from one infrastructure point.

    Helpers are served only when no VoI but at least one helper is covered.
    """
    rho2ri = params.density * 2 * params.infra_radio_m
    p = params.voi_fraction
    # exp(-p x) - exp(-x) = exp(-p x) * (1 - exp(-(1-p) x))
    return params.v2i_rate_bps * math.exp(-p * rho2ri) * _one_minus_exp((1 - p) * rho2ri)


def _gap_excess(params: NetworkParams) -> float:
    """``p - p e^{-2 rho r0} + e^{-2 p rho r0}``, the excess-gap numerator."""
    p, rho, r0 = params.voi_fraction, params.density, params.vehicle_radio_m
    return p * _one_minus_exp(rho * 2 * r0) + math.exp(-p * rho * 2 * r0)


def expected_gap(params: NetworkParams) -> float:
    """Mean distance between consecutive scheduled transmitters."""
    _require_helpers(params)
    c2 = derived_constants(params).c2
    return params.sensing_range_m + _gap_excess(params) / c2


def expected_pair_count(params: NetworkParams) -> float:
    """Mean number of simultaneously active helper-VoI pairs in a V2V area.

    Delayed-renewal approximation ``(d - 2 r_I) / E[L_k]`` written in the
    simplified form that stays finite as ``c2 -> 0``.
    """
    _require_helpers(params)
    c2 = derived_constants(params).c2
    return c2 * params.v2v_length_m / (c2 * params.sensing_range_m + _gap_excess(params))


def v2v_unconstrained_rate(params: NetworkParams) -> float:
    return params.v2v_rate_bps * expected_pair_count(params)


@dataclass(frozen=True)
class CapacityBreakdown:
    v2i_voi_rate: float
    helper_fetch_rate: float
    v2v_unconstrained_rate: float
    v2v_effective_rate: float
    cycle_capacity: float
    total_capacity: float
    east_share: float
    west_share: float
    eta_max: float
    bottleneck: Bottleneck

    def as_row(self) -> dict:
        row = {k: getattr(self, k) for k in self.__dataclass_fields__}
        row["bottleneck"] = self.bottleneck.value
        return row


BREAKDOWN_FIELDS = tuple(CapacityBreakdown.__dataclass_fields__)


def cycle_capacity(params: NetworkParams) -> CapacityBreakdown:
    """Per-cycle capacity with the V2V term limited by helper prefetching.

    ``p = 1`` is accepted: there are no helpers, the V2V term is zero and the
    cycle saturates at ``eta_max``.
    """
    params.validate()
    v2i = v2i_voi_rate(params)
    fetch = helper_fetch_rate(params)
    unconstrained = 0.0 if params.voi_fraction == 1 else v2v_unconstrained_rate(params)
    v2v = min(fetch, unconstrained)
    cyc = v2i + v2v
    ceiling = eta_max(params)
    if fetch < unconstrained:
        bottleneck = Bottleneck.FETCH_LIMITED
    elif abs(cyc - ceiling) <= 1e-9 * ceiling:
        bottleneck = Bottleneck.SATURATED
    else:
        bottleneck = Bottleneck.DELIVERY_LIMITED
    east, west = directional_split(params, cyc)
    return CapacityBreakdown(
        v2i_voi_rate=v2i,
        helper_fetch_rate=fetch,
        v2v_unconstrained_rate=unconstrained,
        v2v_effective_rate=v2v,
        cycle_capacity=cyc,
        total_capacity=params.n_cycles * cyc,
        east_share=east,
        west_share=west,
        eta_max=ceiling,
        bottleneck=bottleneck,
    )


def total_capacity(params: NetworkParams) -> float:
    """Capacity of the whole road, ``(L/d)`` identical cycles."""
    return params.n_cycles * cycle_capacity(params).cycle_capacity


def directional_split(params: NetworkParams, cycle_capacity: float) -> tuple[float, float]:
    """Split a capacity between directions in proportion to their densities."""
    if cycle_capacity < 0:
        raise ValueError(f"cycle_capacity must be >= 0, got {cycle_capacity!r}")
    rho = params.density_east_per_m + params.density_west_per_m
    if rho <= 0:
        raise ParameterError("directional split needs a positive total density")
    # the larger share is >= half, so the difference is exact and the shares
    # sum back to cycle_capacity without rounding
    if params.density_east_per_m >= params.density_west_per_m:
        east = cycle_capacity * params.density_east_per_m / rho
        return east, cycle_capacity - east
    west = cycle_capacity * params.density_west_per_m / rho
    return cycle_capacity - west, west


# --------------------------------------------------------------------------
# Distributions of the transmitter gaps
# --------------------------------------------------------------------------


def _check_index(m) -> np.ndarray:
    m_arr = np.asarray(m)
    if np.any(m_arr < 1) or np.any(m_arr != np.floor(m_arr)):
        raise ValueError(f"m must be a positive integer, got {m!r}")
    return m_arr


def pmf_mk(m, params: NetworkParams):
    """Probability that the next transmitter is the ``m``-th helper past the exclusion point.

    Exact when ``R_c >= 2 r0``; otherwise it ignores that the previous
    receiver may sit inside the first helpers' coverage.
    """
    _require_helpers(params)
    m_arr = _check_index(m)
    p, rho, r0 = params.voi_fraction, params.density, params.vehicle_radio_m
    c1 = derived_constants(params).c1
    first = _one_minus_exp(p * rho * 2 * r0)
    later = math.exp(-p * rho * 2 * r0) * (1 - c1) * np.power(c1, m_arr - 2.0)
    out = np.where(m_arr == 1, first, later)
    return float(out) if out.ndim == 0 else out


def pmf_m0(m, params: NetworkParams):
    """Probability that the first transmitter is the ``m``-th helper right of the origin."""
    _require_helpers(params)
    m_arr = _check_index(m)
    p, rho, r0 = params.voi_fraction, params.density, params.vehicle_radio_m
    c1 = derived_constants(params).c1
    # E[exp(-p rho h00)] for the origin-truncated coverage h00 = min(l, r0) + r0
    first_clear = math.exp(-p * rho * r0) * (1 - p * _one_minus_exp(rho * r0))
    later = first_clear * (1 - c1) * np.power(c1, m_arr - 2.0)
    out = np.where(m_arr == 1, 1 - first_clear, later)
    return float(out) if out.ndim == 0 else out


def _geometric_tail_cutoff(head: float, c1: float, tail_bound: float) -> int:
    # sum_{m > M} head * (1 - c1) c1^{m-2} = head * c1^{M-1}
    if c1 <= 0 or head <= tail_bound:
        return 1
    return max(1, int(math.ceil(math.log(tail_bound / head) / math.log(c1))) + 1)


@dataclass(frozen=True)
class GapDistribution:
    """Erlang mixture law of ``L_k`` (``kind='Lk'``) or ``L_0`` (``kind='L0'``)."""

    kind: str
    params: NetworkParams
    series_cutoff: int
    tail_bound: float

    @property
    def helper_density(self) -> float:
        return (1 - self.params.voi_fraction) * self.params.density

    @property
    def shift(self) -> float:
        return self.params.sensing_range_m if self.kind == "Lk" else 0.0

    def weights(self) -> np.ndarray:
        m = np.arange(1, self.series_cutoff + 1)
        pmf = pmf_mk if self.kind == "Lk" else pmf_m0
        return pmf(m, self.params)

    def mean(self) -> float:
        """Mean of the truncated mixture (series form, not the closed form)."""
        m = np.arange(1, self.series_cutoff + 1)
        return self.shift + float(np.sum(self.weights() * m)) / self.helper_density


def gap_distribution(params: NetworkParams, kind: str = "Lk", tail_bound: float = 1e-9) -> GapDistribution:
    if kind not in ("Lk", "L0"):
        raise ValueError(f"kind must be 'Lk' or 'L0', got {kind!r}")
    _require_helpers(params)
    c1 = derived_constants(params).c1
    p, rho, r0 = params.voi_fraction, params.density, params.vehicle_radio_m
    if kind == "Lk":
        head = math.exp(-p * rho * 2 * r0)
    else:
        head = math.exp(-p * rho * r0) * (1 - p * _one_minus_exp(rho * r0))
    cutoff = _geometric_tail_cutoff(head, c1, tail_bound)
    return GapDistribution(kind, params, cutoff, tail_bound)


def pdf_gap(x, dist: GapDistribution):
    """Density of the transmitter gap at ``x`` metres (Erlang mixture)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("gap density is defined for x >= 0")
    alpha = dist.helper_density
    y = x_arr - dist.shift
    m = np.arange(1, dist.series_cutoff + 1)
    w = dist.weights()
    y_pos = np.maximum(y, 0.0)
    # Erlang(y; m, alpha) = alpha * Poisson(m - 1; alpha y)
    erl = alpha * stats.poisson.pmf(m - 1, alpha * y_pos[..., None])
    out = np.where(y >= 0, erl @ w, 0.0)
    if dist.kind == "Lk":
        out = np.where(y < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def mgf_h(t: float, params: NetworkParams) -> float:
    """MGF of ``min(l, 2 r0)`` with ``l`` exponential at the helper density."""
    alpha = (1 - params.voi_fraction) * params.density
    a = 2 * params.vehicle_radio_m
    eps = t - alpha
    x = eps * a
    # (t e^{x} - alpha) / eps == e^{x} + alpha * a * expm1(x) / x
    if abs(eps) < 1e-8 * alpha:
        exprel = 1 + x / 2 + x * x / 6
    else:
        exprel = math.expm1(x) / x
    return math.exp(x) + alpha * a * exprel


# --------------------------------------------------------------------------
# Renewal-sum oracle
# --------------------------------------------------------------------------


def _sample_index(rng, first: float, c1: float, size) -> np.ndarray:
    """Draw m with P(m=1)=first and P(m=j)=(1-first)(1-c1)c1^{j-2} for j >= 2."""
    m = np.ones(size, dtype=np.int64)
    later = rng.random(size) >= first
    m[later] = 1 + rng.geometric(1 - c1, size=int(np.count_nonzero(later)))
    return m


@dataclass(frozen=True)
class PairCountEstimate:
    mean: float
    stderr: float
    samples: int


def exact_pair_count_oracle(params: NetworkParams, samples: int, seed=None) -> PairCountEstimate:
    """Monte-Carlo value of the renewal sum ``sum_n P(L_0 + ... + L_{n-1} <= d - 2 r_I)``.

    ``L_0`` and the i.i.d. ``L_k`` are drawn from their Erlang mixtures by
    sampling the helper index first and then the Erlang distance.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _require_helpers(params)
    rng = np.random.default_rng(seed)
    p, rho, r0 = params.voi_fraction, params.density, params.vehicle_radio_m
    alpha = (1 - p) * rho
    c1 = derived_constants(params).c1
    span = params.v2v_length_m
    rc = params.sensing_range_m
    first_k = _one_minus_exp(p * rho * 2 * r0)
    first_0 = 1 - math.exp(-p * rho * r0) * (1 - p * _one_minus_exp(rho * r0))

    m0 = _sample_index(rng, first_0, c1, samples)
    l0 = rng.gamma(m0, 1 / alpha)
    # every L_k >= R_c, so at most span/R_c further renewals can fit
    k_max = int(math.floor(span / rc)) + 1
    mk = _sample_index(rng, first_k, c1, (samples, k_max))
    lk = rc + rng.gamma(mk, 1 / alpha)
    arrivals = np.cumsum(np.concatenate([l0[:, None], lk], axis=1), axis=1)
    counts = np.count_nonzero(arrivals <= span, axis=1)
    stderr = float(counts.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
    return PairCountEstimate(float(counts.mean()), stderr, samples)
