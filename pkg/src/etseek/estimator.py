"""Demodulation-based gradient estimation from the scalar measurement.

The estimate is the instantaneous product of the demodulation sinusoids
with the raw measured signal; no washout or low-pass stage is inserted.
Its one-period average recovers the pose-estimation error to first order,
which is what the averaged analysis relies on.
"""

from __future__ import annotations

import math

from etseek.vehicle import DitherParams

#: Gradient estimate: (signal per m, signal per m, signal per rad).
GradientEstimate = tuple[float, float, float]


def demodulation_vector(d: DitherParams, t: float) -> tuple[float, float, float]:
    """Demodulation sinusoids M(t); requires strictly positive amplitudes."""
    if d.a1 <= 0.0 or d.a2 <= 0.0 or d.a3 <= 0.0:
        raise ValueError("demodulation requires strictly positive dither amplitudes")
    return (
        -(4.0 / d.a1) * math.sin(d.omega1 * t),
        (4.0 / d.a2) * math.cos(d.omega2 * t),
        -(4.0 / d.a3) * math.sin(d.omega3 * t),
    )


def gradient_estimate(
    m: tuple[float, float, float], measured: float
) -> GradientEstimate:
    """Scale the demodulation vector by the measured signal value."""
    return (m[0] * measured, m[1] * measured, m[2] * measured)
