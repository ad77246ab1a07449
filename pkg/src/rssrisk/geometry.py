"""Straight-road frame: body-to-body gaps, pair roles and collision checks.

Longitudinal is ``x``, lateral is ``y``. "Left" is the car with the smaller
``y``, so a positive ``v_y`` on the left car points toward the right car and
no velocity re-signing is needed to match :mod:`rssrisk.rss_core`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .rss_core import InvalidInputError, LateralPairState, LongitudinalPairState


@dataclass(frozen=True)
class VehicleState:
    id: str
    x: float
    y: float
    v_x: float
    v_y: float = 0.0
    a_x: float = 0.0
    a_y: float = 0.0
    length: float = 4.5
    width: float = 1.8

    def __post_init__(self):
        for name in ("x", "y", "v_x", "v_y", "a_x", "a_y", "length", "width"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")
        if self.length <= 0 or self.width <= 0:
            raise InvalidInputError("length and width must be > 0")
        if self.v_x < 0:
            raise InvalidInputError("v_x must be >= 0")

    def evolve(self, **changes) -> "VehicleState":
        return replace(self, **changes)


@dataclass(frozen=True)
class PairGap:
    rear_id: str
    front_id: str
    left_id: str
    right_id: str
    d_lon: float
    d_lat: float
    overlapping_lon: bool
    overlapping_lat: bool


def _key(v: VehicleState):
    return str(v.id)


def order_lon(a: VehicleState, b: VehicleState) -> tuple[VehicleState, VehicleState]:
    """Return (rear, front); exact ties go to identifier order."""
    if a.x < b.x or (a.x == b.x and _key(a) <= _key(b)):
        return a, b
    return b, a


def order_lat(a: VehicleState, b: VehicleState) -> tuple[VehicleState, VehicleState]:
    """Return (left, right)."""
    if a.y < b.y or (a.y == b.y and _key(a) <= _key(b)):
        return a, b
    return b, a


def raw_gaps(a: VehicleState, b: VehicleState) -> tuple[float, float]:
    """Signed body-to-body gaps; negative means the extents overlap."""
    return (abs(a.x - b.x) - 0.5 * (a.length + b.length),
            abs(a.y - b.y) - 0.5 * (a.width + b.width))


def pair_gap(a: VehicleState, b: VehicleState) -> PairGap:
    gx, gy = raw_gaps(a, b)
    rear, front = order_lon(a, b)
    left, right = order_lat(a, b)
    return PairGap(
        rear_id=rear.id, front_id=front.id, left_id=left.id, right_id=right.id,
        d_lon=max(0.0, gx), d_lat=max(0.0, gy),
        overlapping_lon=gx <= 0.0, overlapping_lat=gy <= 0.0,
    )


def in_collision(a: VehicleState, b: VehicleState) -> bool:
    # touching counts as contact
    gx, gy = raw_gaps(a, b)
    return gx <= 0.0 and gy <= 0.0


def pair_states(a: VehicleState, b: VehicleState) -> tuple[LongitudinalPairState, LateralPairState]:
    gap = pair_gap(a, b)
    rear, front = order_lon(a, b)
    left, right = order_lat(a, b)
    return (LongitudinalPairState(rear.v_x, front.v_x, gap.d_lon),
            LateralPairState(left.v_y, right.v_y, gap.d_lat))
