"""Complex Ginibre sampling and dense nonsymmetric eigenvalue extraction.

Matrices are plain ``numpy.ndarray`` of complex128; operations validate
shape and finiteness at entry.  The eigensolver is a single-shift
(Wilkinson) explicit QR iteration on the Hessenberg form, with trailing
2x2 active blocks solved by the quadratic formula.  Everything is
deterministic: the same input bits give the same output bits.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .polynomial import Polynomial
from .rng import make_rng

__all__ = [
    "Spectrum",
    "EigensolverError",
    "sample_ginibre",
    "eigenvalues",
    "ln_abs_det",
    "companion_matrix",
    "polynomial_roots",
]

DEFAULT_TOL = 1e-14
DEFAULT_MAX_SWEEPS = 40


class EigensolverError(RuntimeError):
    """QR iteration failed to deflate within its sweep budget.

    ``partial`` holds the eigenvalues that did deflate before the budget
    ran out (deflation order).
    """

    def __init__(self, message: str, partial: np.ndarray):
        super().__init__(message)
        self.partial = partial

    def __reduce__(self):  # keep ``partial`` across process boundaries
        return (EigensolverError, (self.args[0], self.partial))


@dataclass(frozen=True)
class Spectrum:
    """Computed eigenvalues plus quality diagnostics.

    ``eigenvalues`` is in deflation order, which carries no meaning;
    consumers must treat the spectrum as a multiset or sort explicitly.
    ``moduli_sorted`` is ascending.  ``max_residual`` is the largest
    relative subdiagonal magnitude accepted at a deflation, i.e. the
    deflation criterion value; it is 0 for directly solved 1x1/2x2 blocks.
    """

    eigenvalues: np.ndarray
    max_residual: float = 0.0
    moduli_sorted: np.ndarray = field(init=False)

    def __post_init__(self):
        eigs = np.asarray(self.eigenvalues, dtype=np.complex128)
        if eigs.ndim != 1 or eigs.size == 0:
            raise ValueError("spectrum needs at least one eigenvalue")
        if not np.all(np.isfinite(eigs)):
            raise ValueError("eigenvalues must be finite")
        eigs = eigs.copy()
        eigs.setflags(write=False)
        moduli = np.sort(np.abs(eigs))
        moduli.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eigs)
        object.__setattr__(self, "moduli_sorted", moduli)

    @property
    def n(self) -> int:
        return self.eigenvalues.size


def _as_square_matrix(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError("expected a nonempty square matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def sample_ginibre(n: int, seed: int) -> np.ndarray:
    """n x n matrix with i.i.d. entries x + iy, x, y ~ N(0, 1).

    E|entry|^2 = 2.  Deterministic in (n, seed); entries are drawn
    row-major via the Box-Muller transform documented in ``rng``.
    """
    if n < 1:
        raise ValueError("matrix dimension must be >= 1")
    rng = make_rng(seed)
    u1 = rng.random((n, n))
    u2 = rng.random((n, n))
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.exp(2j * np.pi * u2)


def _hessenberg(a: np.ndarray) -> np.ndarray:
    """Unitary similarity reduction to upper Hessenberg form (Householder).

    Columns already in Hessenberg form are skipped, so companion and
    diagonal matrices pass through at negligible cost.
    """
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k]
        if not np.any(x[1:]):
            continue
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        alpha = -phase * norm_x
        v = x.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        # P = I - 2 v v*; apply on the left to rows k+1: and on the right
        # to columns k+1: (similarity).
        h[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, k:])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        h[k + 1, k] = alpha
        h[k + 2 :, k] = 0.0
    return h


@njit(cache=True)
def _qr_sweep(h: np.ndarray, lo: int, hi: int, sigma: complex) -> None:
    """One explicit shifted QR step on the Hessenberg block h[lo:hi+1, ...].

    Factors h - sigma*I into Givens rotations along the subdiagonal, then
    applies them from the right (RQ + sigma*I).  In-place; preserves the
    Hessenberg structure of the block.  Compiled: this is the inner loop
    of the whole package.
    """
    m = hi - lo + 1
    for i in range(lo, hi + 1):
        h[i, i] -= sigma
    cas = np.empty(m - 1, dtype=np.complex128)
    sbs = np.empty(m - 1, dtype=np.complex128)
    for k in range(lo, hi):
        x = h[k, k]
        y = h[k + 1, k]
        r = np.hypot(abs(x), abs(y))
        if r == 0.0:
            cas[k - lo] = 1.0
            sbs[k - lo] = 0.0
            continue
        ca = x / r
        sb = y / r
        cac = ca.conjugate()
        sbc = sb.conjugate()
        for j in range(k, hi + 1):
            t0 = h[k, j]
            t1 = h[k + 1, j]
            h[k, j] = cac * t0 + sbc * t1
            h[k + 1, j] = ca * t1 - sb * t0
        cas[k - lo] = ca
        sbs[k - lo] = sb
    # right-multiplication pass, row-major for cache friendliness; the
    # update order per element matches the column-by-column formulation
    for i in range(lo, hi + 1):
        kstart = i - 1 if i - 1 > lo else lo
        for k in range(kstart, hi):
            ca = cas[k - lo]
            sb = sbs[k - lo]
            t0 = h[i, k]
            t1 = h[i, k + 1]
            h[i, k] = ca * t0 + sb * t1
            h[i, k + 1] = ca.conjugate() * t1 - sb.conjugate() * t0
    for i in range(lo, hi + 1):
        h[i, i] += sigma


def _eig2x2(a: complex, b: complex, c: complex, d: complex):
    """Eigenvalues of [[a, b], [c, d]] via the stable quadratic formula."""
    tr = a + d
    disc = cmath.sqrt((a - d) * (a - d) + 4.0 * b * c)
    # pick the sign that avoids cancellation in tr +/- disc
    if abs(tr + disc) >= abs(tr - disc):
        mu1 = 0.5 * (tr + disc)
    else:
        mu1 = 0.5 * (tr - disc)
    det = a * d - b * c
    mu2 = det / mu1 if mu1 != 0 else tr - mu1
    return mu1, mu2


def eigenvalues(
    a, tol: float = DEFAULT_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS
) -> Spectrum:
    """All eigenvalues of a dense complex matrix.

    Hessenberg reduction followed by explicit single-shift QR sweeps with
    the Wilkinson shift.  A subdiagonal entry h[k+1, k] deflates when
    |h[k+1, k]| <= tol * (|h[k, k]| + |h[k+1, k+1]|).  Active 2x2 blocks
    are solved directly.  Failure to deflate within ``max_sweeps * n``
    sweeps raises ``EigensolverError`` carrying the partial spectrum.
    """
    a = _as_square_matrix(a)
    n = a.shape[0]
    if n == 1:
        return Spectrum(np.array([a[0, 0]]), max_residual=0.0)
    if n == 2:
        mu1, mu2 = _eig2x2(
            complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1])
        )
        return Spectrum(np.array([mu1, mu2]), max_residual=0.0)

    h = _hessenberg(a)
    scale = float(np.sum(np.abs(h))) / n or 1.0  # fallback threshold scale
    eigs = np.empty(n, dtype=np.complex128)
    count = 0
    max_resid = 0.0
    budget = max_sweeps * n
    sweeps_used = 0
    stalled = 0
    hi = n - 1
    diag = [complex(h[i, i]) for i in range(n)]
    sub = [0.0] + [abs(complex(h[i, i - 1])) for i in range(1, n)]

    def refresh(lo: int, hi: int) -> None:
        for i in range(lo, hi + 1):
            diag[i] = complex(h[i, i])
            if i > lo:
                sub[i] = abs(complex(h[i, i - 1]))

    def threshold(k: int) -> float:
        denom = abs(diag[k - 1]) + abs(diag[k])
        return tol * denom if denom > 0.0 else tol * scale

    while hi >= 0:
        if hi == 0:
            eigs[count] = diag[0]
            count += 1
            break
        # deflate the bottom eigenvalue if its subdiagonal is negligible
        if sub[hi] <= threshold(hi):
            denom = abs(diag[hi - 1]) + abs(diag[hi])
            max_resid = max(max_resid, sub[hi] / denom if denom > 0 else 0.0)
            h[hi, hi - 1] = 0.0
            eigs[count] = diag[hi]
            count += 1
            hi -= 1
            stalled = 0
            continue
        # find the active block [lo, hi]
        lo = hi
        while lo > 0 and sub[lo] > threshold(lo):
            lo -= 1
        if lo > 0:
            h[lo, lo - 1] = 0.0
            sub[lo] = 0.0
        if hi - lo == 1:
            mu1, mu2 = _eig2x2(
                diag[lo], complex(h[lo, hi]), complex(h[hi, lo]), diag[hi]
            )
            eigs[count] = mu1
            eigs[count + 1] = mu2
            count += 2
            hi = lo - 1
            stalled = 0
            continue
        if sweeps_used >= budget:
            raise EigensolverError(
                f"no deflation within {budget} QR sweeps "
                f"({count} of {n} eigenvalues found)",
                partial=eigs[:count].copy(),
            )
        # one explicit shifted QR sweep on the active block
        if stalled > 0 and stalled % 10 == 0:
            # exceptional shift to break rare non-converging cycles
            sigma = diag[hi] + 0.75 * sub[hi]
        else:
            mu1, mu2 = _eig2x2(
                diag[hi - 1], complex(h[hi - 1, hi]), complex(h[hi, hi - 1]), diag[hi]
            )
            d = diag[hi]
            sigma = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2
        _qr_sweep(h, lo, hi, complex(sigma))
        refresh(lo, hi)
        sweeps_used += 1
        stalled += 1

    return Spectrum(eigs[:count], max_residual=max_resid)


def ln_abs_det(a) -> float:
    """ln |det A| via LU with partial pivoting, accumulated in log space.

    Pivot moduli are summed as logarithms rather than multiplied, so the value
    stays finite for matrices whose determinant overflows double precision.
    Returns -inf for singular input.
    """
    u = _as_square_matrix(a).copy()
    n = u.shape[0]
    acc = 0.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(u[k:, k])))
        if u[p, k] == 0:
            return -np.inf
        if p != k:
            u[[k, p], k:] = u[[p, k], k:]
        acc += float(np.log(abs(u[k, k])))
        if k + 1 < n:
            mult = u[k + 1 :, k] / u[k, k]
            u[k + 1 :, k + 1 :] -= np.outer(mult, u[k, k + 1 :])
    return acc


def companion_matrix(p: Polynomial) -> np.ndarray:
    """Companion matrix of a polynomial of degree >= 1 (upper Hessenberg)."""
    if p.is_zero:
        raise ValueError("zero polynomial has no companion matrix")
    n = p.degree
    if n < 1:
        raise ValueError("constant polynomial has no companion matrix")
    monic = p.coeffs / p.coeffs[-1]
    c = np.zeros((n, n), dtype=np.complex128)
    c[np.arange(1, n), np.arange(n - 1)] = 1.0
    c[:, n - 1] = -monic[:n]
    return c


def polynomial_roots(
    p: Polynomial, tol: float = DEFAULT_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS
) -> np.ndarray:
    """Roots of ``p`` as eigenvalues of its companion matrix."""
    if p.degree == 0:
        if p.is_zero:
            raise ValueError("zero polynomial has no well-defined roots")
        return np.empty(0, dtype=np.complex128)
    return eigenvalues(companion_matrix(p), tol=tol, max_sweeps=max_sweeps).eigenvalues
