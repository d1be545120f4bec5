"""Log-distance path-loss radio channel with gaussian shadowing."""
from __future__ import annotations

import math

from ..errors import InvalidDistance
from .scenario import ChannelParams


def rssi_at_distance(d_m: float, params: ChannelParams, noise_db: float = 0.0) -> float | None:
    """Received power at distance d: tx - pl0 - 10*n*log10(d/1m) + noise.

    Returns None when the sample falls below the detection floor (the radio
    never reports it). The shadowing term is passed in so the caller owns the
    random stream.
    """
    if d_m <= 0:
        raise InvalidDistance(f"d_m must be > 0, got {d_m}")
    rssi = (
        params.tx_power_dbm
        - params.pl0_db
        - 10.0 * params.path_loss_exponent * math.log10(d_m)
        + noise_db
    )
    if rssi < params.detection_floor_dbm:
        return None
    return rssi
