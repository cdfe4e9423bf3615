"""Laguerre and Jacobi (0, 1) polynomials, and the admissible Mexican-hat wavelet."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _sp_integrate

from .errors import NormalizationFailure


def laguerre(k: int, x):
    """Laguerre polynomial ``L_k(x)`` by the three-term recurrence.

    Accepts scalars or arrays for ``x``; a scalar in gives a float out.
    """
    k = int(k)
    if k < 0:
        raise ValueError("Laguerre degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return _unwrap(prev)
    cur = 1.0 - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
    return _unwrap(cur)


def jacobi01(n: int, x):
    """Jacobi polynomial ``P_n^{(0,1)}(x)``, normalized so that ``P_n(1) = 1``."""
    n = int(n)
    if n < 0:
        raise ValueError("Jacobi degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return _unwrap(prev)
    cur = 1.0 + 1.5 * (x - 1.0)
    for m in range(2, n + 1):
        nxt = (((4 * m * m - 1) * x - 1.0) * cur - (m - 1) * (2 * m + 1) * prev) / ((m + 1) * (2 * m - 1))
        prev, cur = cur, nxt
    return _unwrap(cur)


def _unwrap(a):
    return float(a) if np.ndim(a) == 0 else a


@dataclass(frozen=True)
class WaveletModel:
    """A real wavelet together with its Fourier transform.

    ``freq_profile`` uses the ``exp(2 pi i x xi)`` pairing with Lebesgue
    measure. After normalization, ``int_0^inf |freq_profile(t xi)|^2 dt/t = 1``
    for every ``xi != 0``.

    Attributes
    ----------
    time_profile, freq_profile : callable
        Normalized profiles (both already multiplied by ``normalization``).
    admissibility_constant : float
        ``int_0^inf |F psi_0(t)|^2 dt / t`` of the unnormalized profile.
    normalization : float
        The factor ``1 / sqrt(admissibility_constant)``.
    """

    time_profile: Callable
    freq_profile: Callable
    admissibility_constant: float
    normalization: float

    def admissibility_integral(self, xi: float = 1.0) -> float:
        """``int_0^inf |freq_profile(t xi)|^2 dt/t`` evaluated numerically."""
        return _admissibility(self.freq_profile, xi)


def _admissibility(freq_profile, xi=1.0):
    def integrand(s):
        # t = exp(s) removes the 1/t weight
        return abs(freq_profile(math.exp(min(s, 700.0)) * xi)) ** 2

    val, err, *rest = _sp_integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-14,
                                         epsrel=1e-12, limit=500, full_output=1)
    if len(rest) > 1 or not math.isfinite(val) or val <= 0:
        raise NormalizationFailure(f"admissibility integral failed (value {val!r}, error {err:.3g})")
    return val


def normalize_wavelet(time_profile: Callable, freq_profile: Callable) -> WaveletModel:
    """Scale an admissible wavelet so that its admissibility integral is one.

    Raises
    ------
    NormalizationFailure
        If the admissibility integral does not converge to a positive value.
    """
    if freq_profile(0.0) != 0.0:
        raise NormalizationFailure("an admissible wavelet needs a vanishing zero frequency")
    a = _admissibility(freq_profile)
    c = 1.0 / math.sqrt(a)
    return WaveletModel(
        time_profile=lambda t: c * time_profile(t),
        freq_profile=lambda xi: c * freq_profile(xi),
        admissibility_constant=a,
        normalization=c,
    )


def _hat_time(t):
    t2 = np.square(t)
    return (1.0 - t2) * np.exp(-0.5 * t2)


_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _hat_freq(xi):
    w2 = np.square(2.0 * math.pi * np.minimum(np.abs(np.asarray(xi, dtype=float)), 1e100))
    # beyond w2 ~ 1500 the Gaussian factor underflows anyway
    out = np.where(w2 < 1500.0, _SQRT_2PI * w2 * np.exp(-0.5 * np.minimum(w2, 1500.0)), 0.0)
    return _unwrap(out)


_hat_lock = threading.Lock()
_hat_cache: list[WaveletModel] = []


def mexican_hat() -> WaveletModel:
    """The Mexican-hat wavelet ``c (1 - t^2) exp(-t^2/2)``, admissibility-normalized.

    The constant is computed on the first call and reused afterwards.
    """
    if _hat_cache:
        return _hat_cache[0]
    with _hat_lock:
        if not _hat_cache:
            _hat_cache.append(normalize_wavelet(_hat_time, _hat_freq))
    return _hat_cache[0]
