"""Special functions and distributional checks for Ginibre spectra.

The central fact being exercised: the multiset of squared eigenvalue
moduli of an n x n complex Ginibre matrix is distributed like a set of
independent chi-square variables with 2, 4, ..., 2n degrees of freedom
(Kostlan's theorem).  ``verify_kostlan`` turns that set-valued identity
into falsifiable statistics: two-sample KS tests on order statistics plus
the permutation-invariant log-determinant functional, whose expectation
is a digamma sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import EigensolverError, eigenvalues, sample_ginibre
from .rng import derive_seed, exponentials, make_rng, standard_normals

__all__ = [
    "digamma",
    "expected_ln_chi2",
    "sample_chi2",
    "ginibre_log_density",
    "ks_two_sample",
    "KostlanReport",
    "verify_kostlan",
]

KS_P_THRESHOLD = 1e-3

# asymptotic series coefficients for psi(x): -B_2k / (2k x^2k)
_PSI_SERIES = (
    -1.0 / 12.0,
    1.0 / 120.0,
    -1.0 / 252.0,
    1.0 / 240.0,
    -1.0 / 132.0,
    691.0 / 32760.0,
)


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function, for x > 0.

    Upward recursion psi(x+1) = psi(x) + 1/x until x >= 8, then the
    asymptotic series through the x^-12 term; absolute error below 1e-12
    on the whole positive axis.
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError("digamma requires a positive argument")
    acc = 0.0
    while x < 8.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for c in reversed(_PSI_SERIES):
        series = (series + c) * inv2
    return acc + math.log(x) - 0.5 / x + series


def expected_ln_chi2(dof: int) -> float:
    """E ln X for X chi-square with ``dof`` degrees of freedom."""
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return digamma(dof / 2.0) + math.log(2.0)


def sample_chi2(dof: int, count: int, seed: int) -> np.ndarray:
    """Chi-square draws, deterministic in the seed.

    Even degrees 2m are sums of m standard exponential variates times 2;
    an odd degree adds the square of one Box-Muller normal.  Draw order:
    the exponential block (count x m, row major) first, then the normals.
    """
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if count < 0:
        raise ValueError("count must be >= 0")
    if count == 0:
        return np.empty(0)
    rng = make_rng(seed)
    m = dof // 2
    total = np.zeros(count)
    if m > 0:
        total += 2.0 * np.sum(exponentials(rng, (count, m)), axis=1)
    if dof % 2 == 1:
        total += standard_normals(rng, count) ** 2
    return total


def ginibre_log_density(lambdas) -> float:
    """Log of the joint eigenvalue density of the complex Ginibre ensemble.

    ln C_n - 0.5 sum |lam_i|^2 + 2 sum_{i<j} ln |lam_i - lam_j| with
    ln C_n = -(n(n+1)/2 ln 2 + n ln pi + sum_k ln k!).  Coincident
    eigenvalues give -inf.
    """
    lams = np.asarray(lambdas, dtype=np.complex128)
    if lams.ndim != 1 or lams.size == 0:
        raise ValueError("need at least one eigenvalue")
    if not np.all(np.isfinite(lams)):
        raise ValueError("eigenvalues must be finite")
    n = lams.size
    ln_cn = -(
        0.5 * n * (n + 1) * math.log(2.0)
        + n * math.log(math.pi)
        + sum(math.lgamma(k + 1) for k in range(1, n + 1))
    )
    val = ln_cn - 0.5 * float(np.sum(np.abs(lams) ** 2))
    if n > 1:
        iu = np.triu_indices(n, k=1)
        gaps = np.abs(lams[:, None] - lams[None, :])[iu]
        if np.any(gaps == 0.0):
            return -np.inf
        val += 2.0 * float(np.sum(np.log(gaps)))
    return val


def _kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov survival function Q(lam)."""
    if lam <= 1e-12:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 101):
        term = sign * math.exp(-2.0 * k * k * lam * lam)
        total += term
        sign = -sign
        if abs(term) < 1e-16 * abs(total) or abs(term) < 1e-300:
            break
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(xs, ys) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

    The p-value uses the effective sample size sqrt(n1 n2/(n1+n2)) with
    the small-sample correction factor (en + 0.12 + 0.11/en).
    """
    x = np.sort(np.asarray(xs, dtype=float))
    y = np.sort(np.asarray(ys, dtype=float))
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be nonempty")
    grid = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, grid, side="right") / x.size
    cdf_y = np.searchsorted(y, grid, side="right") / y.size
    d = float(np.max(np.abs(cdf_x - cdf_y)))
    en = math.sqrt(x.size * y.size / (x.size + y.size))
    p = _kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
    return d, p


@dataclass(frozen=True)
class KostlanReport:
    """Outcome of the distributional verification of a Ginibre spectrum.

    ``order_stats`` holds one (k, ks_statistic, p_value) triple per tested
    order statistic (k is 1-based: k-th smallest squared modulus).
    """

    n: int
    trials: int
    trials_used: int
    dropped: int
    order_stats: tuple[tuple[int, float, float], ...]
    ln_det_sq_mean: float
    ln_det_sq_se: float
    ln_det_sq_theory: float
    ks_passed: bool
    det_passed: bool

    @property
    def passed(self) -> bool:
        return self.ks_passed and self.det_passed


def verify_kostlan(n: int, trials: int, seed: int) -> KostlanReport:
    """Monte Carlo check that squared Ginibre eigenvalue moduli match
    independent chi-squares with 2, 4, ..., 2n degrees of freedom.

    Per trial: one Ginibre spectrum (seed path (0, trial)) and one
    reference set (chi-square draws, seed path (1, dof index)).  For each
    order statistic k in {1, ceil(n/2), n} a two-sample KS test compares
    the k-th smallest squared moduli across trials against the k-th
    smallest reference values.  The mean of ln|det A|^2 = sum ln|lam_i|^2
    is compared against sum_i (psi(i) + ln 2) at 3 standard errors.
    """
    if trials < 200:
        raise ValueError("need at least 200 trials")
    if n < 1:
        raise ValueError("dimension must be >= 1")

    sq_rows = np.empty((trials, n))
    used = 0
    dropped = 0
    for t in range(trials):
        a = sample_ginibre(n, derive_seed(seed, 0, t))
        try:
            spec = eigenvalues(a)
        except EigensolverError:
            dropped += 1
            continue
        sq_rows[used] = spec.moduli_sorted**2
        used += 1
    sq_rows = sq_rows[:used]
    if used == 0:
        raise RuntimeError("eigensolver failed on every trial")

    ref = np.empty((trials, n))
    for i in range(1, n + 1):
        ref[:, i - 1] = sample_chi2(2 * i, trials, derive_seed(seed, 1, i))
    ref.sort(axis=1)

    ks = []
    for k in sorted({1, (n + 1) // 2 if n > 1 else 1, n}):
        stat, p = ks_two_sample(sq_rows[:, k - 1], ref[:, k - 1])
        ks.append((k, float(stat), float(p)))

    ln_det_sq = np.sum(np.log(sq_rows), axis=1)
    mean = float(np.mean(ln_det_sq))
    se = float(np.std(ln_det_sq, ddof=1) / math.sqrt(used)) if used > 1 else 0.0
    theory = float(sum(expected_ln_chi2(2 * i) for i in range(1, n + 1)))

    ks_passed = all(p > KS_P_THRESHOLD for _, _, p in ks)
    det_passed = abs(mean - theory) <= 3.0 * se if used > 1 else False
    return KostlanReport(
        n=n,
        trials=trials,
        trials_used=used,
        dropped=dropped,
        order_stats=tuple(ks),
        ln_det_sq_mean=mean,
        ln_det_sq_se=se,
        ln_det_sq_theory=theory,
        ks_passed=ks_passed,
        det_passed=det_passed,
    )
