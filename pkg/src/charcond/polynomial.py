"""Univariate complex polynomials in the monomial basis.

Coefficients are stored in ascending degree order (``coeffs[k]`` multiplies
``X**k``), which makes Horner evaluation and the coefficient norms direct.
Norms are exposed in natural-log scale: at the matrix sizes this package
targets, coefficient norms and condition numbers overflow double precision
long before the mathematics becomes uninteresting.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = ["Polynomial", "char_poly_from_spectrum"]

# exp(_LN_REPRESENTABLE) is the largest double; linear-scale accessors
# refuse anything beyond it rather than silently returning inf.
_LN_REPRESENTABLE = 709.782712893384


def _logsumexp(values: np.ndarray) -> float:
    """log(sum(exp(values))) with the max factored out; -inf entries drop."""
    m = float(np.max(values))
    if m == -np.inf:
        return -np.inf
    return m + float(np.log(np.sum(np.exp(values - m))))


def _ln_binomials(n: int) -> np.ndarray:
    """ln C(n, k) for k = 0..n via the exact log-space recursion."""
    if n == 0:
        return np.zeros(1)
    k = np.arange(n, dtype=float)
    steps = np.log(n - k) - np.log(k + 1.0)
    return np.concatenate(([0.0], np.cumsum(steps)))


class Polynomial:
    """Immutable univariate polynomial with complex coefficients.

    Trailing zero coefficients are trimmed at construction so the leading
    coefficient is nonzero unless the polynomial is identically zero.  All
    coefficients must be finite.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[complex]):
        arr = np.atleast_1d(np.asarray(list(coeffs), dtype=np.complex128))
        if arr.size == 0:
            raise ValueError("polynomial needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise ValueError("polynomial coefficients must be finite")
        last = int(np.max(np.nonzero(arr)[0])) if np.any(arr != 0) else 0
        arr = arr[: last + 1].copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("Polynomial is immutable")

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    def __repr__(self) -> str:
        return f"Polynomial(degree={self.degree})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and np.array_equal(
            self.coeffs, other.coeffs
        )

    def eval(self, z: complex) -> complex:
        """Evaluate at ``z`` by Horner's scheme."""
        return complex(self.eval_many(np.array([z], dtype=np.complex128))[0])

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        """Horner evaluation vectorized over an array of points."""
        z = np.asarray(z, dtype=np.complex128)
        acc = np.full(z.shape, self.coeffs[-1], dtype=np.complex128)
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc

    def derivative(self) -> "Polynomial":
        """Formal derivative; the derivative of a constant is the zero
        polynomial (``is_zero`` lets condition computations reject it)."""
        if self.degree == 0:
            return Polynomial([0.0])
        k = np.arange(1, self.coeffs.size)
        return Polynomial(self.coeffs[1:] * k)

    def ln_euclidean_norm(self) -> float:
        """0.5*ln(sum |a_k|^2), max-scaled: finite whenever max|a_k| is."""
        if self.is_zero:
            raise ValueError("zero polynomial has no log-norm")
        a = np.abs(self.coeffs)
        m = float(np.max(a))
        return float(np.log(m) + 0.5 * np.log(np.sum((a / m) ** 2)))

    def ln_weyl_norm(self) -> float:
        """0.5*ln(sum C(n,k)^-1 |a_k|^2) with log-space binomials."""
        if self.is_zero:
            raise ValueError("zero polynomial has no log-norm")
        with np.errstate(divide="ignore"):
            ln_a = np.log(np.abs(self.coeffs))
        return 0.5 * _logsumexp(2.0 * ln_a - _ln_binomials(self.degree))

    def euclidean_norm(self) -> float:
        """Linear-scale Euclidean norm; refuses unrepresentable values."""
        ln = self.ln_euclidean_norm()
        if ln > _LN_REPRESENTABLE:
            raise OverflowError("norm not representable in double precision")
        return float(np.exp(ln))

    def weyl_norm(self) -> float:
        """Linear-scale Weyl norm; refuses unrepresentable values."""
        ln = self.ln_weyl_norm()
        if ln > _LN_REPRESENTABLE:
            raise OverflowError("norm not representable in double precision")
        return float(np.exp(ln))


def char_poly_from_spectrum(eigs: Sequence[complex]) -> Polynomial:
    """Monic polynomial with the given zeros, by sequential expansion.

    Multiplies out (X - lam_1)...(X - lam_n) one factor at a time; the
    constant term is the product of the -lam_i up to accumulated rounding.
    An empty spectrum yields the constant 1.
    """
    lams = np.asarray(list(eigs), dtype=np.complex128)
    if lams.size and not np.all(np.isfinite(lams)):
        raise ValueError("eigenvalues must be finite")
    c = np.ones(1, dtype=np.complex128)
    for lam in lams:
        nxt = np.zeros(c.size + 1, dtype=np.complex128)
        nxt[1:] = c
        nxt[:-1] -= lam * c
        c = nxt
    return Polynomial(c)
