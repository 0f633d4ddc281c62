"""Road, vehicles and cycle geometry for a bi-directional highway ring.

The road is a ring of length ``road_length_m``.  Infrastructure point ``c``
sits at ``c * d + r_I`` so that cycle ``c`` occupies ``[c*d, (c+1)*d)``: the
V2I area ``[c*d, c*d + 2 r_I]`` followed by the V2V area
``(c*d + 2 r_I, (c+1)*d)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np


class ParameterError(ValueError):
    """Raised when a scenario violates one of the model invariants."""


class Direction(str, Enum):
    EAST = "east"
    WEST = "west"


class Role(str, Enum):
    VOI = "voi"
    HELPER = "helper"


@dataclass(frozen=True)
class NetworkParams:
    """Full scenario parameterization (SI units, rates in bit/s).

    Defaults are the desk-scale scenario: 20 km ring, 2 km infrastructure
    spacing, radio ranges 400 m / 200 m, 20 Mb/s V2I and 2 Mb/s V2V.
    """

    road_length_m: float = 20_000.0
    infra_spacing_m: float = 2_000.0
    infra_radio_m: float = 400.0
    vehicle_radio_m: float = 200.0
    sensing_range_m: float = 400.0
    density_east_per_m: float = 0.004
    density_west_per_m: float = 0.006
    voi_fraction: float = 0.1
    speed_east_mps: float = 20.0
    speed_west_mps: float = 25.0
    v2i_rate_bps: float = 20e6
    v2v_rate_bps: float = 2e6

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ParameterError(f"{f.name} must be a finite number, got {value!r}")
            if value <= 0:
                raise ParameterError(f"{f.name} must be > 0, got {value!r}")
        if self.voi_fraction > 1:
            raise ParameterError(f"voi_fraction must satisfy 0 < p <= 1, got {self.voi_fraction!r}")
        if self.infra_spacing_m <= 2 * self.infra_radio_m:
            raise ParameterError(
                "infra_spacing_m must exceed 2*infra_radio_m so that a V2V area exists "
                f"(d={self.infra_spacing_m!r}, r_I={self.infra_radio_m!r})"
            )
        ratio = self.road_length_m / self.infra_spacing_m
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
            raise ParameterError(
                "road_length_m must be an integer multiple of infra_spacing_m "
                f"(L={self.road_length_m!r}, d={self.infra_spacing_m!r})"
            )

    @property
    def density(self) -> float:
        """Pooled density of both directions."""
        return self.density_east_per_m + self.density_west_per_m

    @property
    def n_cycles(self) -> int:
        return int(round(self.road_length_m / self.infra_spacing_m))

    @property
    def v2v_length_m(self) -> float:
        return self.infra_spacing_m - 2 * self.infra_radio_m

    def replace(self, **changes) -> "NetworkParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(NetworkParams))


def parse_params_text(text: str, base: NetworkParams | None = None) -> NetworkParams:
    """Parse ``key = value`` lines into a :class:`NetworkParams`.

    Blank lines and ``#`` comments are ignored.  Keys not given keep the value
    from ``base`` (the desk defaults when ``base`` is None).
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in PARAM_FIELDS:
            raise ParameterError(f"line {lineno}: unknown parameter {key!r}")
        try:
            values[key] = float(value)
        except ValueError:
            raise ParameterError(f"line {lineno}: {key} is not a number: {value!r}") from None
    return (base or NetworkParams()).replace(**values)


def load_params(path: str | Path, base: NetworkParams | None = None) -> NetworkParams:
    return parse_params_text(Path(path).read_text(encoding="utf-8"), base)


def format_params_text(params: NetworkParams) -> str:
    return "".join(f"{k} = {v!r}\n" for k, v in params.to_dict().items())


@dataclass(frozen=True)
class Vehicle:
    position_m: float
    direction: Direction
    role: Role
    vid: int = -1


@dataclass(frozen=True)
class CycleGeometry:
    cycle_index: int
    infra_position_m: float
    v2i_interval: tuple[float, float]
    v2v_interval: tuple[float, float]

    @property
    def origin_m(self) -> float:
        """Left border of the V2V area."""
        return self.v2v_interval[0]


def cycle_geometry(params: NetworkParams, index: int) -> CycleGeometry:
    if not 0 <= index < params.n_cycles:
        raise ParameterError(f"cycle index {index} outside 0..{params.n_cycles - 1}")
    start = index * params.infra_spacing_m
    r_i = params.infra_radio_m
    return CycleGeometry(
        cycle_index=index,
        infra_position_m=start + r_i,
        v2i_interval=(start, start + 2 * r_i),
        v2v_interval=(start + 2 * r_i, start + params.infra_spacing_m),
    )


def cycles(params: NetworkParams) -> list[CycleGeometry]:
    return [cycle_geometry(params, c) for c in range(params.n_cycles)]


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Vehicles on the ring at one instant, stored column-wise.

    ``positions`` is sorted ascending; equal positions keep their previous
    (insertion) order.  ``vids`` are stable vehicle identities.
    """

    params: NetworkParams
    positions: np.ndarray
    eastbound: np.ndarray
    is_voi: np.ndarray
    vids: np.ndarray
    time_s: float = 0.0

    def __post_init__(self):
        n = len(self.positions)
        if not (len(self.eastbound) == len(self.is_voi) == len(self.vids) == n):
            raise ValueError("snapshot columns must have equal length")
        for arr in (self.positions, self.eastbound, self.is_voi, self.vids):
            arr.setflags(write=False)
        if n:
            if np.any(np.diff(self.positions) < 0):
                raise ValueError("snapshot positions must be sorted")
            if self.positions[0] < 0 or self.positions[-1] >= self.params.road_length_m:
                raise ValueError("snapshot positions must lie in [0, road_length_m)")

    def __len__(self) -> int:
        return len(self.positions)

    def vehicle(self, i: int) -> Vehicle:
        return Vehicle(
            position_m=float(self.positions[i]),
            direction=Direction.EAST if self.eastbound[i] else Direction.WEST,
            role=Role.VOI if self.is_voi[i] else Role.HELPER,
            vid=int(self.vids[i]),
        )

    @property
    def vehicles(self) -> list[Vehicle]:
        return [self.vehicle(i) for i in range(len(self))]

    def __iter__(self) -> Iterator[Vehicle]:
        return iter(self.vehicles)


def snapshot_from_vehicles(
    params: NetworkParams, vehicles: Sequence[Vehicle], time_s: float = 0.0
) -> Snapshot:
    """Build a snapshot from explicit vehicles (any order); handy for tests."""
    pos = np.array([v.position_m for v in vehicles], dtype=float)
    east = np.array([Direction(v.direction) is Direction.EAST for v in vehicles], dtype=bool)
    voi = np.array([Role(v.role) is Role.VOI for v in vehicles], dtype=bool)
    vids = np.array(
        [v.vid if v.vid >= 0 else i for i, v in enumerate(vehicles)], dtype=np.int64
    )
    order = np.argsort(pos, kind="stable")
    return Snapshot(params, pos[order], east[order], voi[order], vids[order], time_s)


def sample_snapshot(params: NetworkParams, seed=None) -> Snapshot:
    """Draw a stationary Poisson traffic realization on the ring.

    Each direction is an independent homogeneous Poisson process; every
    vehicle is independently a VoI with probability ``voi_fraction``.
    """
    params.validate()
    rng = np.random.default_rng(seed)
    length = params.road_length_m
    n_east = rng.poisson(params.density_east_per_m * length)
    n_west = rng.poisson(params.density_west_per_m * length)
    n = n_east + n_west
    pos = rng.uniform(0.0, length, size=n)
    east = np.arange(n) < n_east
    voi = rng.random(n) < params.voi_fraction
    order = np.argsort(pos, kind="stable")
    return Snapshot(params, pos[order], east[order], voi[order], order.astype(np.int64))


def wrap_positions(x: np.ndarray, length: float) -> np.ndarray:
    x = np.mod(x, length)
    # float mod of a tiny negative value can round up to exactly `length`
    x[x >= length] -= length
    return x


def advance(snapshot: Snapshot, dt: float) -> Snapshot:
    """Move every vehicle ``dt`` seconds along the ring at its constant speed."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    p = snapshot.params
    step = np.where(snapshot.eastbound, p.speed_east_mps * dt, -p.speed_west_mps * dt)
    pos = wrap_positions(snapshot.positions + step, p.road_length_m)
    order = np.argsort(pos, kind="stable")
    return Snapshot(
        p,
        pos[order],
        snapshot.eastbound[order],
        snapshot.is_voi[order],
        snapshot.vids[order],
        snapshot.time_s + dt,
    )


def _role_direction_mask(snapshot: Snapshot, role, direction) -> np.ndarray:
    mask = np.ones(len(snapshot), dtype=bool)
    if role is not None:
        mask &= snapshot.is_voi if Role(role) is Role.VOI else ~snapshot.is_voi
    if direction is not None:
        mask &= snapshot.eastbound if Direction(direction) is Direction.EAST else ~snapshot.eastbound
    return mask


def indices_in(snapshot: Snapshot, interval: tuple[float, float], role=None, direction=None) -> np.ndarray:
    """Indices of vehicles in the half-open interval ``[a, b)``, in position order.

    An interval with ``a > b`` wraps around the ring: ``[a, L) + [0, b)``.
    """
    a, b = interval
    length = snapshot.params.road_length_m
    if not (0 <= a <= length and 0 <= b <= length) or a == b:
        raise ValueError(f"malformed interval {interval!r} for road length {length!r}")
    pos = snapshot.positions
    if a < b:
        idx = np.arange(np.searchsorted(pos, a, "left"), np.searchsorted(pos, b, "left"))
    else:
        idx = np.concatenate([
            np.arange(np.searchsorted(pos, a, "left"), len(pos)),
            np.arange(0, np.searchsorted(pos, b, "left")),
        ])
    if role is None and direction is None:
        return idx
    return idx[_role_direction_mask(snapshot, role, direction)[idx]]


def vehicles_in(snapshot: Snapshot, interval, role=None, direction=None) -> list[Vehicle]:
    return [snapshot.vehicle(i) for i in indices_in(snapshot, interval, role, direction)]
