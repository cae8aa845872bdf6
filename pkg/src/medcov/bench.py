"""Monte Carlo benchmark harness, streaming fit pipeline, and report IO.

Estimator names used throughout:

* ``pca``       -- classical PCA: eigenvectors of the one-pass empirical
                   covariance (non-robust reference),
* ``mcm_w``     -- batch Weiszfeld median + Weiszfeld MCM,
* ``mcm_r``     -- streaming averaged-SGD MCM, raw steps,
* ``mcm_rplus`` -- streaming averaged-SGD MCM with the PSD step clip.

Every replication r of a benchmark draws its sample with seed
``base_seed + r``, so replications are independent, reproducible, and
safe to farm out to a process pool; results are reduced in replication
order, which makes the report CSV byte-identical no matter how many
workers ran (wall-clock timings go to the JSON sidecar, never the CSV).
The worker count is capped by the ``MEDCOV_MAX_WORKERS`` environment
variable (default 1).
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DataError, MedcovError
from .geomedian import StepSchedule, weiszfeld_median
from .linalg import eigh_descending
from .mcm import MedianCovariationSGD, weiszfeld_mcm
from .metrics import SummaryStats, eigenspace_error, mc_summary
from .online_pca import OnlineEigenTracker
from .simgen import ScenarioConfig, brownian_cov, draw_sample

ESTIMATORS = ("pca", "mcm_w", "mcm_r", "mcm_rplus")
SNAPSHOT_FORMAT = "medcov-snapshot"
SNAPSHOT_VERSION = 1

REPORT_COLUMNS = (
    "estimator", "scenario", "delta", "d", "n", "q",
    "reps", "excluded", "median_R", "q1_R", "q3_R", "mean_R", "seed",
)

CURVE_COLUMNS = ("checkpoint", "series", "mean_R", "reps")

WORKERS_ENV = "MEDCOV_MAX_WORKERS"

_FAIL_EXC = (MedcovError, ValueError, ArithmeticError, np.linalg.LinAlgError)


# ---------------------------------------------------------------------------
# CSV data files (observations; no header by default)

def _fmt(x):
    return repr(float(x))


def write_csv(path, rows, header=False):
    """Write observations (2-D array) as CSV, one row per observation.

    Values are written with shortest round-trip precision.  ``header``
    adds a first line x1,...,xd.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError(f"expected a 2-D sample array, got shape {rows.shape}")
    with open(path, "w", encoding="utf-8") as fh:
        _write_csv_stream(fh, rows, header)


def _write_csv_stream(fh, rows, header):
    if header:
        fh.write(",".join(f"x{j + 1}" for j in range(rows.shape[1])) + "\n")
    for row in rows:
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def iter_csv_rows(path, *, skip_header=False):
    """Yield (line_number, vector) for each observation row of a CSV.

    Raises :class:`DataError` with the offending line (and column) on
    ragged rows or cells that do not parse to a finite float.
    """
    with open(path, "r", encoding="utf-8") as fh:
        dim = None
        for line_no, line in enumerate(fh, start=1):
            if skip_header and line_no == 1:
                continue
            cells = line.rstrip("\n").split(",")
            if dim is None:
                dim = len(cells)
            elif len(cells) != dim:
                raise DataError(
                    f"{path}: line {line_no}: expected {dim} columns, got {len(cells)}"
                )
            vec = np.empty(len(cells))
            for col, cell in enumerate(cells):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: line {line_no}, column {col + 1}: "
                        f"not a number: {cell.strip()!r}"
                    ) from None
                if not np.isfinite(value):
                    raise DataError(
                        f"{path}: line {line_no}, column {col + 1}: "
                        f"non-finite value {cell.strip()!r}"
                    )
                vec[col] = value
            yield line_no, vec


# ---------------------------------------------------------------------------
# Classical PCA baseline

class StreamingCovariance:
    """One-pass mean and covariance (Welford update).

    ``covariance`` divides the scatter by n (population convention);
    eigenvectors are unaffected by the n vs n-1 choice.
    """

    def __init__(self, dim):
        d = int(dim)
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self._d = d
        self._n = 0
        self._mean = np.zeros(d)
        self._scatter = np.zeros((d, d))

    @property
    def n(self):
        return self._n

    @property
    def mean(self):
        return self._mean.copy()

    @property
    def covariance(self):
        if self._n == 0:
            raise ValueError("no observations")
        return self._scatter / self._n

    def update(self, x):
        x = np.asarray(x, dtype=np.float64)
        self._n += 1
        delta = x - self._mean
        self._mean += delta / self._n
        self._scatter += np.outer(delta, x - self._mean)
        return self

    def update_many(self, xs):
        for row in np.asarray(xs, dtype=np.float64):
            self.update(row)
        return self


# ---------------------------------------------------------------------------
# Streaming robust PCA orchestrator (MCM + eigenvector tracking)

class StreamingRobustPCA:
    """Joint one-pass pipeline: median + MCM recursion feeding the
    online eigenvector tracker.

    The tracker warms up on the first q numerically distinct centered
    observations (centered at the running median average), holds until
    the averaged MCM has absorbed ``eigen_lag`` updates, and then takes
    one step per observation against the running averaged MCM.

    The lag matters: the tracker's first step has gain 1, i.e. it is a
    full power step onto the averaged matrix of that moment, and the
    averaging gain 1/(n+1) forgets the starting basis only like 1/n.
    Starting against a matrix that has seen too few observations locks
    noise in for a long stretch of the stream.  The default lag of one
    update per dimension is a pilot-calibrated compromise; pass 0 to
    start tracking immediately.
    """

    def __init__(self, dim, q, *, median_schedule=None, cov_schedule=None,
                 psd_mode=True, known_median=None, eigen_seed=0,
                 eigen_lag=None):
        self.mcm = MedianCovariationSGD(
            dim,
            median_schedule=median_schedule,
            cov_schedule=cov_schedule,
            psd_mode=psd_mode,
            known_median=known_median,
        )
        self.tracker = OnlineEigenTracker(dim, q, seed=eigen_seed)
        lag = int(dim) if eigen_lag is None else int(eigen_lag)
        if lag < 0:
            raise ConfigError(f"eigen_lag must be >= 0, got {eigen_lag}")
        self._eigen_lag = lag
        self._rows = 0

    @property
    def rows(self):
        """Observations consumed (including the one that seeds the median)."""
        return self._rows

    @property
    def eigen_lag(self):
        """MCM updates absorbed before the tracker takes its first step."""
        return self._eigen_lag

    def _center_view(self):
        med = self.mcm._median
        return med._mbar if med is not None else self.mcm._known_m

    def update(self, x):
        self.mcm.update(x)
        self._rows += 1
        if self.mcm.n_updates < 1:
            return self
        if not self.tracker.ready:
            self.tracker.offer(np.asarray(x, dtype=np.float64) - self._center_view())
        elif self.mcm.n_updates > self._eigen_lag:
            self.tracker.step(self.mcm._vbar)
        return self

    def state_dict(self):
        return {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "rows": self._rows,
            "eigen_lag": self._eigen_lag,
            "mcm": self.mcm.state_dict(),
            "tracker": self.tracker.state_dict(),
        }

    @classmethod
    def from_state_dict(cls, state):
        if state.get("format") != SNAPSHOT_FORMAT:
            raise DataError(f"not a medcov snapshot: format={state.get('format')!r}")
        if state.get("version") != SNAPSHOT_VERSION:
            raise DataError(f"unsupported snapshot version {state.get('version')!r}")
        model = cls.__new__(cls)
        model.mcm = MedianCovariationSGD.from_state_dict(state["mcm"])
        model.tracker = OnlineEigenTracker.from_state_dict(state["tracker"])
        model._eigen_lag = int(state["eigen_lag"])
        model._rows = int(state["rows"])
        return model


def save_snapshot(state, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state, fh)
        fh.write("\n")


def load_snapshot(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            state = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(state, dict):
        raise DataError(f"{path}: snapshot must be a JSON object")
    return state


# ---------------------------------------------------------------------------
# Benchmark configuration and report rows

def calibrated_schedules(d, *, c_median=None, c_mcm=None, alpha=0.75):
    """Step schedules matched to the benchmark generator's scale.

    The recursions are scale-equivariant (scaling the data by s maps the
    sensible constants c_median -> s*c_median and c_mcm -> s^2*c_mcm), so
    a useful first step is one comparable to the typical residual it
    divides: under the Brownian-path design the residual norms grow like
    ``sqrt(d)/2`` for the median and like ``d/2`` for the rank-one
    centered outer products the covariation recursion consumes.  With
    constants of that size the estimation error is essentially dimension
    free, and the PSD step clip actually engages on early iterations.
    Explicit ``c_median``/``c_mcm`` values override the calibration.
    """
    if d < 1:
        raise ConfigError(f"dimension must be >= 1, got {d}")
    if c_median is None:
        c_median = 0.5 * float(np.sqrt(d))
    if c_mcm is None:
        c_mcm = 0.5 * float(d)
    return StepSchedule(c_median, alpha), StepSchedule(c_mcm, alpha)


@dataclass(frozen=True)
class RunConfig:
    """One Monte Carlo experiment: scenario x sample size x estimators.

    ``seed`` is the master seed: replication r draws its sample from the
    scenario reseeded with seed + r (the scenario's own seed field is
    only used for standalone sampling).  Schedules left as None are
    filled in by :func:`calibrated_schedules` for the scenario dimension.
    """

    scenario: ScenarioConfig
    n: int = 200
    q: int = 2
    replications: int = 100
    estimators: tuple = ESTIMATORS
    median_schedule: StepSchedule | None = None
    cov_schedule: StepSchedule | None = None
    output_path: str | None = None
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.scenario, ScenarioConfig):
            raise ConfigError("scenario must be a ScenarioConfig")
        if self.median_schedule is None or self.cov_schedule is None:
            med, cov = calibrated_schedules(self.scenario.d)
            if self.median_schedule is None:
                object.__setattr__(self, "median_schedule", med)
            if self.cov_schedule is None:
                object.__setattr__(self, "cov_schedule", cov)
        if self.n < 1:
            raise ConfigError(f"sample size must be >= 1, got {self.n}")
        if not (1 <= self.q <= self.scenario.d):
            raise ConfigError(
                f"q must be in [1, {self.scenario.d}], got {self.q}"
            )
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        requested = tuple(self.estimators)
        unknown = [e for e in requested if e not in ESTIMATORS]
        if unknown:
            raise ConfigError(
                f"unknown estimators {unknown}; choose from {', '.join(ESTIMATORS)}"
            )
        if not requested:
            raise ConfigError("estimators must be nonempty")
        canonical = tuple(e for e in ESTIMATORS if e in requested)
        object.__setattr__(self, "estimators", canonical)


@dataclass(frozen=True)
class ReportRow:
    estimator: str
    scenario: str
    delta: float
    d: int
    n: int
    q: int
    reps: int
    excluded: int
    median_R: float
    q1_R: float
    q3_R: float
    mean_R: float
    seed: int
    wall_time_ms: float


@lru_cache(maxsize=32)
def _true_projector(d, q):
    _, vectors = eigh_descending(brownian_cov(d))
    u = vectors[:, :q]
    p = u @ u.T
    p.setflags(write=False)
    return p


def top_q_projector(mat, q):
    """Orthogonal projector onto the span of the top-q eigenvectors."""
    values, vectors = eigh_descending(mat)
    if not (1 <= q <= vectors.shape[1]):
        raise ValueError(f"q must be in [1, {vectors.shape[1]}], got {q}")
    u = vectors[:, :q]
    return u @ u.T


def _fit_pca(x, cfg):
    cov = StreamingCovariance(x.shape[1]).update_many(x).covariance
    return top_q_projector(cov, cfg.q)


def _fit_mcm_w(x, cfg):
    m_hat = weiszfeld_median(x)
    gamma = weiszfeld_mcm(x, m_hat)
    return top_q_projector(gamma, cfg.q)


def _fit_mcm_stream(x, cfg, psd_mode):
    est = MedianCovariationSGD(
        x.shape[1],
        median_schedule=cfg.median_schedule,
        cov_schedule=cfg.cov_schedule,
        psd_mode=psd_mode,
    )
    est.update_many(x)
    return top_q_projector(est.estimate, cfg.q)


_FITTERS = {
    "pca": _fit_pca,
    "mcm_w": _fit_mcm_w,
    "mcm_r": lambda x, cfg: _fit_mcm_stream(x, cfg, False),
    "mcm_rplus": lambda x, cfg: _fit_mcm_stream(x, cfg, True),
}


def _run_replication(task):
    cfg, r = task
    scen = dataclasses.replace(cfg.scenario, seed=cfg.seed + r)
    x = draw_sample(scen, cfg.n)
    p_true = _true_projector(cfg.scenario.d, cfg.q)
    errors = {}
    times = {}
    for est in cfg.estimators:
        t0 = time.perf_counter()
        try:
            errors[est] = eigenspace_error(_FITTERS[est](x, cfg), p_true)
        except _FAIL_EXC:
            errors[est] = None
        times[est] = (time.perf_counter() - t0) * 1000.0
    return errors, times


def resolve_workers(workers=None):
    """Worker-count policy: explicit argument, else MEDCOV_MAX_WORKERS, else 1."""
    if workers is None:
        raw = os.environ.get(WORKERS_ENV)
        if raw is None or raw.strip() == "":
            return 1
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigError(
                f"{WORKERS_ENV} must be an integer, got {raw!r}"
            ) from None
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1, got {workers}")
    return workers


def _pool_map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))  # order preserved: deterministic reduce


def run_benchmark(cfg, *, workers=None):
    """Run the Monte Carlo experiment and aggregate per-estimator rows.

    A replication whose fit fails (overflow on wild draws, eigensolver
    breakdown) is excluded from that estimator's aggregation and counted
    in the ``excluded`` column.  Writes the report CSV and JSON sidecar
    when the config has an output path.
    """
    workers = resolve_workers(workers)
    results = _pool_map(
        _run_replication, [(cfg, r) for r in range(cfg.replications)], workers
    )
    rows = []
    for est in cfg.estimators:
        values = [errs[est] for errs, _ in results if errs[est] is not None]
        excluded = cfg.replications - len(values)
        if values:
            stats = mc_summary(values)
        else:
            stats = SummaryStats(float("nan"), float("nan"), float("nan"), float("nan"))
        wall = sum(times[est] for _, times in results)
        rows.append(ReportRow(
            estimator=est,
            scenario=cfg.scenario.contamination,
            delta=cfg.scenario.delta,
            d=cfg.scenario.d,
            n=cfg.n,
            q=cfg.q,
            reps=cfg.replications,
            excluded=excluded,
            median_R=stats.median,
            q1_R=stats.q1,
            q3_R=stats.q3,
            mean_R=stats.mean,
            seed=cfg.seed,
            wall_time_ms=wall,
        ))
    if cfg.output_path:
        write_report(rows, cfg.output_path, cfg=cfg, workers=workers)
    return rows


def report_lines(rows):
    """Report CSV lines (header + one line per row, fixed column order).

    Timing fields are deliberately absent so the CSV is byte-identical
    for identical configs regardless of worker count.
    """
    lines = [",".join(REPORT_COLUMNS)]
    for row in rows:
        cells = []
        for col in REPORT_COLUMNS:
            value = getattr(row, col)
            cells.append(_fmt(value) if isinstance(value, float) else str(value))
        lines.append(",".join(cells))
    return lines


def write_report(rows, path, *, cfg=None, workers=None):
    """Write report rows as CSV (fixed column order, no timings) plus a
    ``<path>.meta.json`` sidecar with the config and wall-clock times."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in report_lines(rows):
            fh.write(line + "\n")
    meta = {
        "format": "medcov-report-meta",
        "version": 1,
        "columns": list(REPORT_COLUMNS),
        "config": None if cfg is None else _config_dict(cfg),
        "workers": workers,
        "wall_time_ms": {row.estimator: row.wall_time_ms for row in rows},
        "excluded": {row.estimator: row.excluded for row in rows},
    }
    with open(path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def _config_dict(cfg):
    out = dataclasses.asdict(cfg)
    out["estimators"] = list(cfg.estimators)
    return out


# ---------------------------------------------------------------------------
# Convergence curves

@dataclass(frozen=True)
class CurvePoint:
    checkpoint: int
    series: str
    mean_R: float
    reps: int


CURVE_SERIES = ("pca", "mcm", "mcm_online", "online_vs_batch")


def _curve_replication(task):
    cfg, checkpoints, psd_mode, eigen_lag, r = task
    scen = dataclasses.replace(cfg.scenario, seed=cfg.seed + r)
    x = draw_sample(scen, cfg.n)
    p_true = _true_projector(cfg.scenario.d, cfg.q)
    model = StreamingRobustPCA(
        cfg.scenario.d, cfg.q,
        median_schedule=cfg.median_schedule,
        cov_schedule=cfg.cov_schedule,
        psd_mode=psd_mode,
        eigen_seed=cfg.seed + r,
        eigen_lag=eigen_lag,
    )
    cov = StreamingCovariance(cfg.scenario.d)
    marks = set(checkpoints)
    out = {}
    try:
        for t in range(1, cfg.n + 1):
            model.update(x[t - 1])
            cov.update(x[t - 1])
            if t not in marks:
                continue
            if not model.tracker.ready:
                model.tracker.force_ready()
            p_pca = top_q_projector(cov.covariance, cfg.q)
            p_batch = top_q_projector(model.mcm.estimate, cfg.q)
            p_online = model.tracker.projector()
            out[t] = {
                "pca": eigenspace_error(p_pca, p_true),
                "mcm": eigenspace_error(p_batch, p_true),
                "mcm_online": eigenspace_error(p_online, p_true),
                "online_vs_batch": eigenspace_error(p_online, p_batch),
            }
    except _FAIL_EXC:
        return None
    return out


def convergence_curve(cfg, checkpoints, *, psd_mode=True, eigen_lag=None,
                      workers=None):
    """Record eigenspace errors along the stream at the given checkpoints,
    averaged over the config's replications.

    Series: classical PCA, batch eigendecomposition of the averaged MCM,
    the online tracker, and the online-vs-batch agreement error.
    ``eigen_lag`` is forwarded to :class:`StreamingRobustPCA` (None keeps
    its per-dimension default).  Failed replications are dropped from
    every series to keep averages aligned.
    """
    checkpoints = [int(c) for c in checkpoints]
    if not checkpoints:
        raise ConfigError("checkpoints must be nonempty")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ConfigError(f"checkpoints must be strictly increasing, got {checkpoints}")
    if checkpoints[0] < 2:
        raise ConfigError("checkpoints must start at 2 or later")
    if checkpoints[-1] > cfg.n:
        raise ConfigError(
            f"last checkpoint {checkpoints[-1]} exceeds the sample size {cfg.n}"
        )
    workers = resolve_workers(workers)
    tasks = [(cfg, tuple(checkpoints), psd_mode, eigen_lag, r)
             for r in range(cfg.replications)]
    results = [res for res in _pool_map(_curve_replication, tasks, workers) if res is not None]
    if not results:
        raise MedcovError("every curve replication failed")
    points = []
    for t in checkpoints:
        for series in CURVE_SERIES:
            mean = float(np.mean([res[t][series] for res in results]))
            points.append(CurvePoint(t, series, mean, len(results)))
    if cfg.output_path:
        write_curve(points, cfg.output_path)
    return points


def curve_lines(points):
    lines = [",".join(CURVE_COLUMNS)]
    for p in points:
        lines.append(f"{p.checkpoint},{p.series},{_fmt(p.mean_R)},{p.reps}")
    return lines


def write_curve(points, path):
    with open(path, "w", encoding="utf-8") as fh:
        for line in curve_lines(points):
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# Streaming fit of a CSV file

def fit_stream(csv_in, *, q=2, median_schedule=None, cov_schedule=None,
               psd_mode=True, eigen_seed=0, eigen_lag=None, resume=None,
               scores_out=None, skip_header=False):
    """Single pass over a CSV of observations.

    Returns ``(snapshot, report)``: the versioned serialized state of
    the joint median/MCM/eigen pipeline, and a small report dict with
    the row count, the median estimate, and the top-q eigenvalue
    estimates (None until the tracker has warmed up).

    ``resume`` takes a snapshot (dict or path) from a previous partial
    pass; feeding rows 1..k, snapshotting, then resuming with rows
    k+1..n reproduces the single-pass state bit for bit.  With
    ``scores_out``, per-row principal-component scores and the
    orthogonal distance are streamed to a sidecar CSV (rows seen before
    the tracker is ready get nan entries).
    """
    model = None
    if resume is not None:
        state = load_snapshot(resume) if isinstance(resume, (str, os.PathLike)) else resume
        model = StreamingRobustPCA.from_state_dict(state)
        q = model.tracker.q  # the snapshot's geometry wins over the arguments
        psd_mode = model.mcm.psd_mode
    rows = 0
    sidecar = open(scores_out, "w", encoding="utf-8") if scores_out else None
    try:
        if sidecar:
            sidecar.write(",".join([f"pc{j + 1}" for j in range(q)] + ["ortho_dist"]) + "\n")
        for line_no, vec in iter_csv_rows(csv_in, skip_header=skip_header):
            if model is None:
                model = StreamingRobustPCA(
                    vec.shape[0], q,
                    median_schedule=median_schedule,
                    cov_schedule=cov_schedule,
                    psd_mode=psd_mode,
                    eigen_seed=eigen_seed,
                    eigen_lag=eigen_lag,
                )
            try:
                model.update(vec)
            except ValueError as exc:
                raise DataError(f"{csv_in}: line {line_no}: {exc}") from exc
            rows += 1
            if sidecar:
                if model.tracker.ready:
                    scores, dist = model.tracker.scores(vec, model._center_view())
                    cells = [_fmt(v) for v in scores] + [_fmt(dist)]
                else:
                    cells = ["nan"] * (model.tracker.q + 1)
                sidecar.write(",".join(cells) + "\n")
    finally:
        if sidecar:
            sidecar.close()
    if model is None:
        raise DataError(f"{csv_in}: file contains no observations")
    snapshot = model.state_dict()
    report = {
        "rows": model.rows,
        "rows_this_pass": rows,
        "updates": model.mcm.n_updates,
        "q": q,
        "psd_mode": bool(psd_mode),
        "median": model.mcm.median_estimate.tolist(),
        "eigenvalues": (model.tracker.eigenvalues.tolist()
                        if model.tracker.ready else None),
    }
    return snapshot, report
