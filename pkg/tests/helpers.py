"""Shared constants and test-side measurement helpers."""

import numpy as np

REF_A = 0.02
REF_C3 = 0.32
REF_R = 0.1


def parabola_peak(phi: np.ndarray, lo: int, hi: int) -> tuple[float, float]:
    """Independent (test-side) pulse measurement: interpolated peak value and
    position of the largest |phi| extremum in [lo, hi)."""
    seg = np.asarray(phi[lo:hi], dtype=float)
    sign = 1.0 if seg.max() >= -seg.min() else -1.0
    y = sign * seg
    i = int(np.argmax(y))
    y0, ym, yp = y[i], y[i - 1], y[i + 1]
    denom = ym - 2.0 * y0 + yp
    delta = 0.5 * (ym - yp) / denom if denom != 0.0 else 0.0
    return sign * (y0 - 0.25 * (ym - yp) * delta), lo + i + delta
