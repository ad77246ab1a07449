"""Safe longitudinal/lateral distances and the risk indices built on them.

Everything here is a pure function of plain floats or small frozen
dataclasses, so it can be called from any thread.

Lateral sign convention: the lateral axis points from the left car toward
the right car. A positive ``v_left`` moves the left car toward the right car,
a positive ``v_right`` moves the right car away from the left car.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InvalidInputError(ValueError):
    """Non-finite or out-of-domain input to a risk computation."""


class ParameterError(ValueError):
    """Parameter set violating its invariants."""


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class LongitudinalParams:
    rho: float
    a_max_accel: float
    a_min_brake: float
    a_max_brake: float
    a_cap_brake: float

    def __post_init__(self):
        _check_finite(**self.__dict__)
        if self.rho <= 0:
            raise ParameterError("rho must be > 0")
        if self.a_max_accel < 0:
            raise ParameterError("a_max_accel must be >= 0")
        if self.a_min_brake <= 0 or self.a_max_brake <= 0:
            raise ParameterError("a_min_brake and a_max_brake must be > 0")
        if self.a_cap_brake < self.a_min_brake:
            raise ParameterError("a_cap_brake must be >= a_min_brake")


@dataclass(frozen=True)
class LateralParams:
    rho: float
    a_lat_max_accel: float
    a_lat_min_brake: float
    a_lat_cap_brake: float

    def __post_init__(self):
        _check_finite(**self.__dict__)
        if self.rho <= 0:
            raise ParameterError("rho must be > 0")
        if self.a_lat_max_accel < 0:
            raise ParameterError("a_lat_max_accel must be >= 0")
        if self.a_lat_min_brake <= 0:
            raise ParameterError("a_lat_min_brake must be > 0")
        if self.a_lat_cap_brake < self.a_lat_min_brake:
            raise ParameterError("a_lat_cap_brake must be >= a_lat_min_brake")


@dataclass(frozen=True)
class RiskParams:
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        _check_finite(beta=self.beta, gamma=self.gamma)
        if self.beta <= 0 or self.gamma <= 0:
            raise ParameterError("beta and gamma must be > 0")


@dataclass(frozen=True)
class LongitudinalPairState:
    v_rear: float
    v_front: float
    d_lon: float

    def __post_init__(self):
        _check_finite(**self.__dict__)
        if self.v_rear < 0 or self.v_front < 0:
            raise InvalidInputError("longitudinal speeds must be >= 0 (no reversing)")


@dataclass(frozen=True)
class LateralPairState:
    v_left: float
    v_right: float
    d_lat: float

    def __post_init__(self):
        _check_finite(**self.__dict__)


@dataclass(frozen=True)
class LateralResponseVelocities:
    v_left_rho: float
    v_right_rho: float

    @classmethod
    def from_state(cls, state: LateralPairState, p: LateralParams) -> "LateralResponseVelocities":
        return cls(
            state.v_left + p.rho * p.a_lat_max_accel,
            state.v_right - p.rho * p.a_lat_max_accel,
        )


@dataclass(frozen=True)
class RiskBreakdown:
    r_lon: float
    r_lat: float
    r: float
    d_lon_min: float
    d_lon_min_brake: float
    d_lat_min: float
    d_lat_min_brake: float

    FIELDS = ("r_lon", "r_lat", "r", "d_lon_min", "d_lon_min_brake", "d_lat_min", "d_lat_min_brake")

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in self.FIELDS)


# -- scalar kernels --------------------------------------------------------
# Plain-float versions used by the simulator's inner loop. The dataclass
# wrappers below validate and then delegate here.


def lon_safe_distance(v_rear, v_front, rho, a_max_accel, rear_brake, a_max_brake):
    """Safe longitudinal gap for a rear car braking at ``rear_brake``.

    Passing ``a_min_brake`` gives the safe distance, passing the capability
    ``a_cap_brake`` gives the tighter full-braking bound.
    """
    v_resp = v_rear + rho * a_max_accel
    raw = (
        v_rear * rho
        + 0.5 * rho * rho * a_max_accel
        + v_resp * v_resp / (2.0 * rear_brake)
        - v_front * v_front / (2.0 * a_max_brake)
    )
    return raw if raw > 0.0 else 0.0


def lat_safe_distance(v_left, v_right, rho, a_lat_max_accel, lat_brake):
    v_left_rho = v_left + rho * a_lat_max_accel
    v_right_rho = v_right - rho * a_lat_max_accel
    raw = (
        0.5 * (v_left + v_left_rho) * rho
        + v_left_rho * v_left_rho / (2.0 * lat_brake)
        - (0.5 * (v_right + v_right_rho) * rho - v_right_rho * v_right_rho / (2.0 * lat_brake))
    )
    return raw if raw > 0.0 else 0.0


def ramp_risk(d, d_min, d_min_brake, strict=False):
    """Piecewise-linear risk for a gap ``d`` between the two safe-distance bounds.

    Default policy: 0 for ``d >= d_min`` unless the bodies touch (``d <= 0``
    is always 1), linear on ``[d_min_brake, d_min]``, 1 below. A zero-width
    ramp collapses to a step at ``d_min``.

    ``strict=True`` applies the ``> 0`` guards literally, which maps
    ``d_min == 0`` (any gap is safe) to risk 1.
    """
    if strict:
        if d >= d_min > 0.0:
            return 0.0
        if d_min >= d >= d_min_brake > 0.0:
            return 1.0 - (d - d_min_brake) / (d_min - d_min_brake)
        return 1.0
    if d <= 0.0:
        return 1.0
    if d >= d_min:
        return 0.0
    if d >= d_min_brake:
        # d_min > d here, so d_min > d_min_brake and the width is nonzero
        return 1.0 - (d - d_min_brake) / (d_min - d_min_brake)
    return 1.0


def combine(r_lon: float, r_lat: float, beta: float = 1.0, gamma: float = 1.0) -> float:
    if r_lon == 0.0 or r_lat == 0.0:
        return 0.0
    return (r_lon ** beta) * (r_lat ** gamma)


def breakdown_scalar(v_rear, v_front, d_lon, v_left, v_right, d_lat,
                     lp: LongitudinalParams, tp: LateralParams, rp: RiskParams,
                     strict: bool = False) -> RiskBreakdown:
    """Unvalidated fast path of :func:`risk_breakdown` taking raw floats."""
    dlm = lon_safe_distance(v_rear, v_front, lp.rho, lp.a_max_accel, lp.a_min_brake, lp.a_max_brake)
    dlb = lon_safe_distance(v_rear, v_front, lp.rho, lp.a_max_accel, lp.a_cap_brake, lp.a_max_brake)
    dtm = lat_safe_distance(v_left, v_right, tp.rho, tp.a_lat_max_accel, tp.a_lat_min_brake)
    dtb = lat_safe_distance(v_left, v_right, tp.rho, tp.a_lat_max_accel, tp.a_lat_cap_brake)
    r_lon = ramp_risk(d_lon, dlm, dlb, strict)
    r_lat = ramp_risk(d_lat, dtm, dtb, strict)
    return RiskBreakdown(r_lon, r_lat, combine(r_lon, r_lat, rp.beta, rp.gamma), dlm, dlb, dtm, dtb)


# -- validated public operations ---------------------------------------------


def d_lon_min(state: LongitudinalPairState, p: LongitudinalParams) -> float:
    """Minimum safe longitudinal gap (rear car brakes at ``a_min_brake``)."""
    return lon_safe_distance(state.v_rear, state.v_front, p.rho, p.a_max_accel,
                             p.a_min_brake, p.a_max_brake)


def d_lon_min_brake(state: LongitudinalPairState, p: LongitudinalParams) -> float:
    """Gap below which even full braking (``a_cap_brake``) cannot avoid contact."""
    return lon_safe_distance(state.v_rear, state.v_front, p.rho, p.a_max_accel,
                             p.a_cap_brake, p.a_max_brake)


def r_lon(state: LongitudinalPairState, p: LongitudinalParams, strict: bool = False) -> float:
    return ramp_risk(state.d_lon, d_lon_min(state, p), d_lon_min_brake(state, p), strict)


def d_lat_min(state: LateralPairState, p: LateralParams) -> float:
    return lat_safe_distance(state.v_left, state.v_right, p.rho, p.a_lat_max_accel, p.a_lat_min_brake)


def d_lat_min_brake(state: LateralPairState, p: LateralParams) -> float:
    return lat_safe_distance(state.v_left, state.v_right, p.rho, p.a_lat_max_accel, p.a_lat_cap_brake)


def r_lat(state: LateralPairState, p: LateralParams, strict: bool = False) -> float:
    return ramp_risk(state.d_lat, d_lat_min(state, p), d_lat_min_brake(state, p), strict)


def unified_risk(r_lon: float, r_lat: float, rp: RiskParams) -> float:
    """``r_lon**beta * r_lat**gamma``; zero whenever either factor is zero."""
    _check_finite(r_lon=r_lon, r_lat=r_lat)
    if not (0.0 <= r_lon <= 1.0 and 0.0 <= r_lat <= 1.0):
        raise InvalidInputError("partial risks must lie in [0, 1]")
    if rp.beta <= 0 or rp.gamma <= 0:
        raise ParameterError("beta and gamma must be > 0")
    return combine(r_lon, r_lat, rp.beta, rp.gamma)


def risk_breakdown(lon: LongitudinalPairState, lat: LateralPairState,
                   lp: LongitudinalParams, tp: LateralParams, rp: RiskParams,
                   strict: bool = False) -> RiskBreakdown:
    return breakdown_scalar(lon.v_rear, lon.v_front, lon.d_lon,
                            lat.v_left, lat.v_right, lat.d_lat, lp, tp, rp, strict)
