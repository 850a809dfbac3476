"""Standard normal distribution and density.

Scalar versions go through ``math.erfc``, which keeps full relative accuracy
in the lower tail (``0.5 * (1 + erf(x))`` loses it for x << 0).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def norm_cdf_array(x):
    return special.ndtr(np.asarray(x, dtype=np.float64))


def norm_ppf_array(u):
    """Inverse of the normal CDF, elementwise; ``u`` must lie in (0, 1)."""
    return special.ndtri(np.asarray(u, dtype=np.float64))
