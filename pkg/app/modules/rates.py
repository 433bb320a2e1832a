from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress, norm

from .dirichlet import Arrangement, DirichletSolver, build_medium, homogenized_for
from .errors import SolverError, ValidationError
from .grids import IntervalGrid, cells_for
from .operators import OperatorSpec, constituents

logger = logging.getLogger(__name__)

NORMS = ("sup", "l2", "l1")
_NORM_ALIASES = {"sup": "sup", "inf": "sup", "max": "sup", "l2": "l2", "2": "l2", "l1": "l1", "1": "l1"}
DEFAULT_EPS = (1 / 10, 1 / 20, 1 / 40, 1 / 80, 1 / 160, 1 / 320)
Z90 = float(norm.ppf(0.95))
MAX_FAILURE_SHARE = 0.10

SyntheticErrors = Callable[[float, int], Dict[str, float]]


def parse_norm(raw: str) -> str:
    key = str(raw).strip().lower()
    if key not in _NORM_ALIASES:
        raise ValidationError(f"unknown norm {raw!r}; expected one of sup, l2, l1")
    return _NORM_ALIASES[key]


def sample_seed(base_seed: int, eps_index: int, sample: int) -> int:
    """Independent 64-bit seed per (eps, sample) derived from the base seed."""
    state = np.random.SeedSequence(base_seed, spawn_key=(eps_index, sample)).generate_state(1, dtype=np.uint64)
    return int(state[0])


def error_norms(diff: np.ndarray, eps: float) -> Dict[str, float]:
    """Raw discrete sums plus their integral-consistent scalings by sqrt(eps) and eps."""
    diff = np.abs(np.asarray(diff, dtype=float))
    l2_raw = float(np.sqrt(np.sum(diff * diff)))
    l1_raw = float(np.sum(diff))
    return {"sup": float(diff.max()), "l2": l2_raw * np.sqrt(eps), "l1": l1_raw * eps,
            "l2_raw": l2_raw, "l1_raw": l1_raw}


def fit_rate(eps: Sequence[float], err: Sequence[float]) -> float:
    """Least-squares slope of log(err) against log(eps)."""
    eps_arr = np.asarray(eps, dtype=float)
    err_arr = np.asarray(err, dtype=float)
    if eps_arr.shape != err_arr.shape:
        raise ValidationError("eps and error lists differ in length")
    keep = (eps_arr > 0.0) & (err_arr > 0.0) & np.isfinite(err_arr)
    if not keep.all():
        logger.warning("dropping %d non-positive or non-finite error values from the fit", int((~keep).sum()))
    if keep.sum() < 2:
        raise ValidationError("a rate fit needs at least 2 positive error values")
    return float(linregress(np.log(eps_arr[keep]), np.log(err_arr[keep])).slope)


def confidence_interval(samples: Sequence[float], z: float = Z90) -> Tuple[float, float]:
    """Normal interval mean +/- z * s / sqrt(m); the default is 90%."""
    values = np.asarray(samples, dtype=float)
    if values.size < 2:
        raise ValidationError("a confidence interval needs at least 2 samples")
    mean = float(values.mean())
    half = z * float(values.std(ddof=1)) / np.sqrt(values.size)
    return (mean - half, mean + half)


@dataclass(frozen=True)
class RateStudyConfig:
    op: OperatorSpec
    arrangement: Arrangement = Arrangement.PERIODIC
    eps_list: Tuple[float, ...] = DEFAULT_EPS
    samples: int = 20
    base_seed: int = 0
    rhs: float = 2.0
    norms: Tuple[str, ...] = NORMS
    tol: float = 1e-10
    max_iter: int = 10_000_000
    workers: int = 1

    def __post_init__(self) -> None:
        if self.op.dim != 1:
            raise ValidationError("rate studies run on 1D operators")
        eps = tuple(float(e) for e in self.eps_list)
        if len(eps) < 2:
            raise ValidationError("need at least 2 eps values")
        for e in eps:
            cells_for(e)
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValidationError(f"eps_list must be strictly decreasing, got {list(eps)}")
        if self.samples < 1 or self.workers < 1:
            raise ValidationError("samples and workers must be at least 1")
        object.__setattr__(self, "eps_list", eps)
        object.__setattr__(self, "norms", tuple(parse_norm(n) for n in self.norms))
        object.__setattr__(self, "arrangement", Arrangement.parse(self.arrangement))

    @property
    def effective_samples(self) -> int:
        return 1 if self.arrangement is Arrangement.PERIODIC else self.samples

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["op"] = self.op.to_dict()
        data["arrangement"] = self.arrangement.value
        data["eps_list"] = list(self.eps_list)
        data["norms"] = list(self.norms)
        data["samples"] = self.effective_samples
        return data


@dataclass(frozen=True)
class SampleErrors:
    eps: float
    sample: int
    seed: Optional[int]
    errors: Dict[str, float]
    iterations: int = 0


@dataclass(frozen=True)
class _Job:
    pair: Tuple[OperatorSpec, OperatorSpec]
    arrangement: Arrangement
    eps_index: int
    eps: float
    sample: int
    seed: Optional[int]
    rhs: float
    r: float
    tol: float
    max_iter: int


def _run_job(job: _Job) -> Tuple[Optional[SampleErrors], Optional[str]]:
    try:
        medium = build_medium(job.eps, job.arrangement, job.seed)
        grid = IntervalGrid(medium.cells)
        exact = 0.5 * job.r * grid.nodes * (grid.nodes - 1.0)
        solution = DirichletSolver(job.tol, job.max_iter).solve(job.pair, medium, job.rhs, u0=exact)
    except SolverError as exc:
        return None, str(exc)
    errors = error_norms(solution.values - exact, medium.eps)
    return SampleErrors(job.eps, job.sample, job.seed, errors, solution.iterations), None


@dataclass
class RateStudyResult:
    config: Dict[str, Any]
    rows: List[SampleErrors]
    failures: List[Dict[str, Any]]
    slopes: Dict[str, float]
    raw_slopes: Dict[str, float]
    pooled_slopes: Dict[str, float] = field(default_factory=dict)
    slope_ci: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    error_bars: Dict[str, List[Dict[str, float]]] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)

    def csv_rows(self) -> Iterator[Tuple[float, int, str, float]]:
        """(eps, sample, norm, error) in (eps, sample) order."""
        for row in self.rows:
            for name, value in row.errors.items():
                yield row.eps, row.sample, name, value

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "slopes": self.slopes,
            "raw_slopes": self.raw_slopes,
            "pooled_slopes": self.pooled_slopes,
            "slope_ci": {k: list(v) for k, v in self.slope_ci.items()},
            "error_bars": self.error_bars,
            "failures": self.failures,
            "seeds": [{"eps": r.eps, "sample": r.sample, "seed": r.seed} for r in self.rows],
            "meta": self.meta,
        }


class RateStudy:
    """Sweeps eps, compares u^eps against the homogenized solution, and fits log-log slopes.

    ``synthetic`` replaces the solves with a function (eps, sample) -> errors per norm.
    """

    def __init__(self, config: RateStudyConfig, synthetic: Optional[SyntheticErrors] = None) -> None:
        self.config = config
        self.synthetic = synthetic

    def jobs(self, r: float) -> List[_Job]:
        cfg = self.config
        pair = constituents(cfg.op)
        random = cfg.arrangement is Arrangement.RANDOM
        return [
            _Job(pair, cfg.arrangement, i, eps, s, sample_seed(cfg.base_seed, i, s) if random else None,
                 cfg.rhs, r, cfg.tol, cfg.max_iter)
            for i, eps in enumerate(cfg.eps_list)
            for s in range(cfg.effective_samples)
        ]

    def _execute(self, jobs: List[_Job]) -> List[Tuple[Optional[SampleErrors], Optional[str]]]:
        if self.synthetic is not None:
            return [(SampleErrors(j.eps, j.sample, j.seed, dict(self.synthetic(j.eps, j.sample))), None) for j in jobs]
        if self.config.workers > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                return list(pool.map(_run_job, jobs))
        return [_run_job(job) for job in jobs]

    def run(self) -> RateStudyResult:
        cfg = self.config
        homogenized = homogenized_for(cfg.op, cfg.rhs)
        jobs = self.jobs(homogenized.r)
        logger.info("rate study %s %s: %d eps x %d samples, rhs=%g, r=%.12g", cfg.op.kind.value,
                    cfg.arrangement.value, len(cfg.eps_list), cfg.effective_samples, cfg.rhs, homogenized.r)

        rows: List[SampleErrors] = []
        failures: List[Dict[str, Any]] = []
        for job, (row, message) in zip(jobs, self._execute(jobs)):
            if row is None:
                logger.warning("eps=%g sample=%d failed: %s", job.eps, job.sample, message)
                failures.append({"eps": job.eps, "sample": job.sample, "seed": job.seed, "error": message})
            else:
                rows.append(row)
        if len(failures) > MAX_FAILURE_SHARE * len(jobs):
            raise SolverError(f"rate study aborted: {len(failures)} of {len(jobs)} samples failed")

        result = RateStudyResult(cfg.to_dict(), rows, failures, {}, {},
                                 meta={"r": homogenized.r, "rhs": cfg.rhs,
                                       "grid": "one node per cell at the cell midpoint, zero boundary values",
                                       "z": Z90})
        for name in cfg.norms:
            self._summarize(result, name)
        return result

    def _summarize(self, result: RateStudyResult, name: str) -> None:
        cfg = self.config
        by_eps = {eps: [row.errors[name] for row in result.rows if row.eps == eps and name in row.errors]
                  for eps in cfg.eps_list}
        present = [eps for eps in cfg.eps_list if by_eps[eps]]
        if not present:
            return
        pooled = fit_rate(present, [float(np.mean(by_eps[eps])) for eps in present])
        result.slopes[name] = result.pooled_slopes[name] = pooled
        raw_key = f"{name}_raw"
        if result.rows and all(raw_key in row.errors for row in result.rows):
            raw = {eps: [row.errors[raw_key] for row in result.rows if row.eps == eps] for eps in present}
            result.raw_slopes[name] = fit_rate(present, [float(np.mean(raw[eps])) for eps in present])
        if cfg.effective_samples < 2:
            return

        bars = []
        for eps in present:
            values = by_eps[eps]
            lo, hi = confidence_interval(values) if len(values) > 1 else (values[0], values[0])
            bars.append({"eps": eps, "mean": float(np.mean(values)), "lo": lo, "hi": hi})
        result.error_bars[name] = bars

        per_sample = []
        for s in range(cfg.effective_samples):
            points = [(row.eps, row.errors[name]) for row in result.rows if row.sample == s and name in row.errors]
            if len(points) >= 2:
                per_sample.append(fit_rate(*zip(*points)))
        if len(per_sample) >= 2:
            # the point estimate is the centre of the per-sample interval
            result.slopes[name] = float(np.mean(per_sample))
            result.slope_ci[name] = confidence_interval(per_sample)


def run_study(cfg: RateStudyConfig, synthetic: Optional[SyntheticErrors] = None) -> RateStudyResult:
    return RateStudy(cfg, synthetic).run()
