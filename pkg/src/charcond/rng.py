"""Deterministic random number plumbing.

Reproducibility contract (also documented in the README):

* Bit stream: numpy's PCG64 wrapped in ``numpy.random.Generator``.  Only
  ``Generator.random`` is consumed, which maps each 64-bit word to a double
  in [0, 1) as ``(word >> 11) * 2**-53``.
* Uniform-to-variate transforms are implemented here, not delegated to
  numpy's distribution methods, so the exact draw sequence is pinned:

  - exponential:  ``-log(1 - u)``  (one uniform per variate, ``u in [0,1)``
    so the argument stays in (0, 1]);
  - normal: Box-Muller pairs ``r*cos(2*pi*u2)``, ``r*sin(2*pi*u2)`` with
    ``r = sqrt(-2*log(1 - u1))``, interleaved cos/sin, truncated to the
    requested length;
  - complex standard normal: ``r * exp(2i*pi*u2)`` with the same ``r``, so
    real and imaginary parts are independent N(0, 1) and E|z|^2 = 2.

* Seed derivation for sub-streams uses splitmix64 finalizer rounds
  (``derive_seed``), so per-trial streams are independent of scheduling
  and identical on every platform.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    """One splitmix64 finalizer round (Steele et al. mixing constants)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, *indices: int) -> int:
    """Derive a 64-bit sub-stream seed from a master seed and index path.

    Each index is absorbed with two splitmix64 rounds:
    ``x <- mix(x + GOLDEN); x <- mix(x ^ index)``.  Pure integer
    arithmetic, so the result is identical on every platform.
    """
    x = master_seed & _MASK64
    for idx in indices:
        x = _splitmix64((x + _GOLDEN) & _MASK64)
        x = _splitmix64(x ^ (idx & _MASK64))
    return x


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for the given 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def exponentials(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard exponential variates, one uniform each."""
    return -np.log1p(-rng.random(shape))


def standard_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` independent N(0, 1) variates via Box-Muller pairs."""
    m = (n + 1) // 2
    u1 = rng.random(m)
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    out = np.empty(2 * m)
    out[0::2] = r * np.cos(2.0 * np.pi * u2)
    out[1::2] = r * np.sin(2.0 * np.pi * u2)
    return out[:n]


def complex_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Complex entries with independent N(0, 1) real and imaginary parts."""
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.exp(2j * np.pi * u2)
