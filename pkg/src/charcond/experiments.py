"""Monte Carlo harness for condition statistics of characteristic
polynomials of complex Ginibre matrices.

Per trial: sample a matrix, extract its spectrum, build the (monic)
characteristic polynomial from the computed eigenvalues, and profile the
condition numbers at every eigenvalue.  Per-trial seeds are derived from
the master seed and the (n, trial) pair, and aggregation reduces scalars
in trial order, so a run is byte-reproducible regardless of how many
worker processes execute it.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import average_ln_cond_bound, second_moment_ln_bound, universal_ln_cond_floor
from .condition import cond_profile
from .linalg import EigensolverError, eigenvalues, sample_ginibre
from .polynomial import char_poly_from_spectrum
from .rng import derive_seed, make_rng

__all__ = [
    "ALL_FLAVORS",
    "InvariantViolation",
    "ExperimentConfig",
    "ExperimentRow",
    "ExperimentTable",
    "run_cond_experiment",
    "NormalizedCurves",
    "normalized_curves",
    "BoundCheckRow",
    "BoundsReport",
    "verify_theorem_bounds",
    "SecondMomentReport",
    "run_second_moment_check",
    "emit_table",
]

ALL_FLAVORS = frozenset({"euclidean", "weyl", "componentwise", "projective"})

# slacks for the inline per-eigenvalue checks (absolute, log scale)
FLOOR_SLACK = 1e-9
CHAIN_SLACK = 1e-6

CSV_HEADER = (
    "n,trials,avg_ln_cond_min,se_min,avg_ln_cond_max,se_max,"
    "avg_ln_cw_max,se_cw,avg_ln_cond_mean_i,se_mean_i,dropped"
)


class InvariantViolation(RuntimeError):
    """A per-eigenvalue inequality that must hold mathematically failed.

    Carries the sampling seed so the offending trial can be replayed.
    """

    def __init__(self, message: str, seed: int, n: int):
        super().__init__(f"{message} (n={n}, trial seed={seed})")
        self._raw = message
        self.seed = seed
        self.n = n

    def __reduce__(self):  # survives the worker-to-parent pickle hop
        return (InvariantViolation, (self._raw, self.seed, self.n))


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one Monte Carlo sweep.

    ``entry_variance`` is E|z_ij|^2 of the sampled matrix entries.  The
    definitional ensemble (independent standard normal real and imaginary
    parts) has entry variance 2 and is the default; every closed-form
    bound checked by ``verify_theorem_bounds`` assumes it.  The reference
    values for the normalized growth curves (minimum curve near 0.05,
    maximum curve near 0.25) correspond to unit-variance complex entries;
    with entry variance 2 the minimum curve sits near 0.2.
    """

    n_min: int
    n_max: int
    trials_per_n: int
    master_seed: int
    flavors: frozenset = ALL_FLAVORS
    workers: int = 1
    max_drop_fraction: float = 0.05
    entry_variance: float = 2.0

    def validate(self) -> None:
        if not 2 <= self.n_min <= self.n_max:
            raise ValueError("need 2 <= n_min <= n_max")
        if self.trials_per_n < 1:
            raise ValueError("trials_per_n must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        unknown = set(self.flavors) - ALL_FLAVORS
        if unknown:
            raise ValueError(f"unknown flavors: {sorted(unknown)}")
        if not self.flavors:
            raise ValueError("at least one flavor must be enabled")
        if not self.entry_variance > 0:
            raise ValueError("entry_variance must be positive")


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    trials_used: int
    dropped: int
    avg_ln_cond_min: float
    se_min: float
    avg_ln_cond_max: float
    se_max: float
    avg_ln_cw_max: float
    se_cw: float
    avg_ln_cond_mean_i: float
    se_mean_i: float


@dataclass(frozen=True)
class ExperimentTable:
    config: ExperimentConfig
    rows: tuple[ExperimentRow, ...] = field(default_factory=tuple)

    def to_csv_text(self) -> str:
        """CSV with LF endings; floats via repr for byte reproducibility."""
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.trials_used},{r.avg_ln_cond_min!r},{r.se_min!r},"
                f"{r.avg_ln_cond_max!r},{r.se_max!r},{r.avg_ln_cw_max!r},"
                f"{r.se_cw!r},{r.avg_ln_cond_mean_i!r},{r.se_mean_i!r},"
                f"{r.dropped}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv_text())


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    m = float(np.mean(values))
    if values.size < 2:
        return m, float("nan")
    return m, float(np.std(values, ddof=1) / math.sqrt(values.size))


def _run_trial(args) -> tuple | None:
    """One Monte Carlo trial; returns per-trial scalars or None if dropped.

    Module-level so process pools can pickle it.  Raises
    InvariantViolation if a mathematically guaranteed inequality fails,
    which aborts the whole experiment with the offending seed.
    """
    n, seed, flavors, entry_variance = args
    a = sample_ginibre(n, seed)
    if entry_variance != 2.0:
        a = a * math.sqrt(entry_variance / 2.0)
    try:
        spec = eigenvalues(a)
    except EigensolverError:
        return None
    p = char_poly_from_spectrum(spec.eigenvalues)
    try:
        prof = cond_profile(p, spec)
    except ValueError:
        return None
    if prof.n_flagged > 0:
        return None
    floor = -math.log(n)
    for rec in prof.records:
        if rec.ln_cond < floor - FLOOR_SLACK:
            raise InvariantViolation(
                f"ln_cond={rec.ln_cond} below universal floor {floor}", seed, n
            )
        checks = []
        if "euclidean" in flavors:
            checks.append(("ln_cond", rec.ln_cond))
        if "weyl" in flavors:
            checks.append(("ln_cond_weyl", rec.ln_cond_weyl))
        if "projective" in flavors:
            checks.append(("ln_mu", rec.ln_mu))
        for name, val in checks:
            if val < rec.ln_pair_bound - CHAIN_SLACK:
                raise InvariantViolation(
                    f"{name}={val} below pair product bound {rec.ln_pair_bound}",
                    seed,
                    n,
                )
    return (
        prof.ln_cond_min,
        prof.ln_cond_max,
        prof.ln_cw_max,
        prof.mean_ln_cond,
    )


def run_cond_experiment(cfg: ExperimentConfig) -> ExperimentTable:
    """Average log-condition extremes over Ginibre samples for each n.

    Deterministic in the config: per-trial seeds are
    ``derive_seed(master_seed, n, trial)`` and the reduction is in trial
    order, so worker count never changes the output.  Trials whose
    eigensolve fails or whose spectrum contains a numerically multiple
    eigenvalue are dropped; more than ``max_drop_fraction`` dropped at any
    n aborts the run.
    """
    cfg.validate()
    pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    rows = []
    try:
        for n in range(cfg.n_min, cfg.n_max + 1):
            tasks = [
                (n, derive_seed(cfg.master_seed, n, t), cfg.flavors, cfg.entry_variance)
                for t in range(cfg.trials_per_n)
            ]
            if pool is None:
                results = [_run_trial(t) for t in tasks]
            else:
                chunk = max(1, len(tasks) // (cfg.workers * 4))
                results = list(pool.map(_run_trial, tasks, chunksize=chunk))
            kept = [r for r in results if r is not None]
            dropped = len(results) - len(kept)
            if dropped > cfg.max_drop_fraction * cfg.trials_per_n:
                raise RuntimeError(
                    f"{dropped}/{cfg.trials_per_n} trials dropped at n={n}; "
                    "eigensolver or multiplicity failures exceed the budget"
                )
            if not kept:
                raise RuntimeError(f"no usable trials at n={n}")
            arr = np.array(kept)
            mins, maxs, cws, means = arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]
            nan = float("nan")
            if "euclidean" in cfg.flavors:
                avg_min, se_min = _mean_se(mins)
                avg_max, se_max = _mean_se(maxs)
                avg_mean, se_mean = _mean_se(means)
            else:
                avg_min = se_min = avg_max = se_max = avg_mean = se_mean = nan
            if "componentwise" in cfg.flavors:
                avg_cw, se_cw = _mean_se(cws)
            else:
                avg_cw = se_cw = nan
            rows.append(
                ExperimentRow(
                    n=n,
                    trials_used=len(kept),
                    dropped=dropped,
                    avg_ln_cond_min=avg_min,
                    se_min=se_min,
                    avg_ln_cond_max=avg_max,
                    se_max=se_max,
                    avg_ln_cw_max=avg_cw,
                    se_cw=se_cw,
                    avg_ln_cond_mean_i=avg_mean,
                    se_mean_i=se_mean,
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return ExperimentTable(config=cfg, rows=tuple(rows))


@dataclass(frozen=True)
class NormalizedCurves:
    """The three growth-rate curves plotted from an experiment table."""

    cond_min_over_n: tuple[tuple[int, float], ...]
    cond_max_normalized: tuple[tuple[int, float], ...]  # /(n ln n ln ln n), n >= 4
    cw_max_over_ln_n: tuple[tuple[int, float], ...]


def normalized_curves(table: ExperimentTable) -> NormalizedCurves:
    """Normalize the per-n averages by their conjectured growth rates.

    Rows with n < 4 are excluded from the ln-ln normalized curve, where
    ln ln n is not positive.
    """
    if not table.rows:
        raise ValueError("experiment table is empty")
    c1, c2, c3 = [], [], []
    for r in table.rows:
        c1.append((r.n, r.avg_ln_cond_min / r.n))
        if r.n >= 4:
            c2.append(
                (r.n, r.avg_ln_cond_max / (r.n * math.log(r.n) * math.log(math.log(r.n))))
            )
        c3.append((r.n, r.avg_ln_cw_max / math.log(r.n)))
    return NormalizedCurves(tuple(c1), tuple(c2), tuple(c3))


@dataclass(frozen=True)
class BoundCheckRow:
    n: int
    avg_ln_cond_mean_i: float
    se_mean_i: float
    average_bound: float
    average_bound_passed: bool
    avg_ln_cond_min: float
    floor: float
    floor_passed: bool


@dataclass(frozen=True)
class BoundsReport:
    rows: tuple[BoundCheckRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.average_bound_passed and r.floor_passed for r in self.rows)


def verify_theorem_bounds(table: ExperimentTable) -> BoundsReport:
    """Check each row against the closed-form lower bounds.

    Per n: the trial average of the per-matrix mean of ln cond must sit
    above the average-bound formula minus 3 standard errors, and the
    average of ln cond_min must sit above the universal floor -ln n.
    Failures are reported, not raised.
    """
    if not table.rows:
        raise ValueError("experiment table is empty")
    checks = []
    for r in table.rows:
        if r.trials_used < 100:
            raise ValueError(
                f"row n={r.n} has {r.trials_used} trials; bound checks need >= 100"
            )
        bound = average_ln_cond_bound(r.n)
        floor = universal_ln_cond_floor(r.n)
        checks.append(
            BoundCheckRow(
                n=r.n,
                avg_ln_cond_mean_i=r.avg_ln_cond_mean_i,
                se_mean_i=r.se_mean_i,
                average_bound=bound,
                average_bound_passed=bool(
                    r.avg_ln_cond_mean_i + 3.0 * r.se_mean_i >= bound
                ),
                avg_ln_cond_min=r.avg_ln_cond_min,
                floor=floor,
                floor_passed=bool(r.avg_ln_cond_min >= floor),
            )
        )
    return BoundsReport(rows=tuple(checks))


@dataclass(frozen=True)
class SecondMomentReport:
    """Log-scale sample second moment of cond against its lower bound."""

    n: int
    trials: int
    trials_used: int
    dropped: int
    ln_mean_cond_sq: float
    ln_lower_bound: float
    passed: bool
    ln_cond_sq: np.ndarray  # per-trial 2*ln_cond values, trial order


def run_second_moment_check(n: int, trials: int, seed: int) -> SecondMomentReport:
    """Sample mean of cond^2 under the matrix-then-uniform-eigenvalue draw.

    Each trial samples a Ginibre matrix, picks one eigenvalue uniformly
    (floor(u * n) from the trial's own stream), and contributes
    exp(2 ln_cond).  The mean is accumulated as a log-sum-exp, so nothing
    overflows.  Restricted to n in {2, 3}: the integrand's heavy tail
    makes desk-scale Monte Carlo meaningless for larger n.
    """
    if n not in (2, 3):
        raise ValueError("second-moment check is defined for n in {2, 3}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    vals = np.empty(trials)
    used = 0
    dropped = 0
    for t in range(trials):
        tseed = derive_seed(seed, n, t)
        a = sample_ginibre(n, tseed)
        try:
            spec = eigenvalues(a)
        except EigensolverError:
            dropped += 1
            continue
        p = char_poly_from_spectrum(spec.eigenvalues)
        try:
            prof = cond_profile(p, spec)
        except ValueError:
            dropped += 1
            continue
        if prof.n_flagged > 0:
            dropped += 1
            continue
        u = make_rng(derive_seed(seed, n, t, 1)).random()
        idx = min(int(u * spec.n), spec.n - 1)
        vals[used] = 2.0 * prof.records[idx].ln_cond
        used += 1
    if used == 0:
        raise RuntimeError("no usable trials")
    vals = vals[:used]
    m = float(np.max(vals))
    ln_mean = m + math.log(float(np.sum(np.exp(vals - m)))) - math.log(used)
    bound = second_moment_ln_bound(n)
    return SecondMomentReport(
        n=n,
        trials=trials,
        trials_used=used,
        dropped=dropped,
        ln_mean_cond_sq=ln_mean,
        ln_lower_bound=bound,
        passed=bool(ln_mean >= bound),
        ln_cond_sq=vals,
    )


def emit_table(curve, path) -> None:
    """Write a curve as two-column text: ``n value`` per line, LF endings.

    Values are fixed-notation with 6 significant digits (``%#.6g``), the
    format consumed by the plotting pipeline.  An empty curve is an error
    and creates no file.
    """
    points = list(curve)
    if not points:
        raise ValueError("refusing to emit an empty curve")
    lines = [f"{int(n)} {value:#.6g}" for n, value in points]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
