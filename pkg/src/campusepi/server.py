"""HTTP service exposing simulation, fitting and policy sweeps as jobs.

Desk-scale design: jobs run on an in-process worker pool, job state lives in
memory behind a lock, and results are persisted as JSON files under the
output directory so completed jobs survive a restart.  Parameter-range
problems return 400; state-invariant violations return 422.
"""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import abc as abc_mod
from . import dataio
from . import ensemble as ensemble_mod
from . import policy as policy_mod
from .model import CompartmentState, ModelParams, QuarantineLedger, simulate
from .peaks import MatchThresholds, detect_peaks, weekly_cases

DEFAULT_POSTERIOR_ID = "default"


@dataclass
class JobRecord:
    id: str
    kind: str                 # fit | sweep | ensemble
    status: str = "queued"    # queued -> running -> done | failed
    progress: float = 0.0
    result_location: str | None = None
    error: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


class JobStore:
    """Thread-safe registry of jobs; completed results live on disk."""

    _ALLOWED = {
        "queued": {"running"},
        "running": {"done", "failed"},
        "done": set(),
        "failed": set(),
    }

    def __init__(self, output_dir: Path):
        self._lock = threading.Lock()
        self._jobs: dict[str, JobRecord] = {}
        self.output_dir = output_dir
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._restore()

    def _restore(self):
        for record_file in self.output_dir.glob("jobs/*/record.json"):
            try:
                payload = json.loads(record_file.read_text())
                record = JobRecord(**payload)
            except (json.JSONDecodeError, TypeError):
                continue
            if record.status == "done":
                self._jobs[record.id] = record

    def create(self, kind: str) -> JobRecord:
        record = JobRecord(id=uuid.uuid4().hex[:12], kind=kind)
        with self._lock:
            self._jobs[record.id] = record
        return record

    def get(self, job_id: str) -> JobRecord | None:
        with self._lock:
            record = self._jobs.get(job_id)
            return JobRecord(**record.as_dict()) if record else None

    def set_status(self, job_id: str, status: str, *, error: str | None = None,
                   result_location: str | None = None) -> None:
        with self._lock:
            record = self._jobs[job_id]
            if status != record.status and status not in self._ALLOWED[record.status]:
                raise RuntimeError(f"illegal transition {record.status} -> {status}")
            record.status = status
            if error is not None:
                record.error = error
            if result_location is not None:
                record.result_location = result_location
            if status == "done":
                record.progress = 1.0

    def set_progress(self, job_id: str, progress: float) -> None:
        with self._lock:
            record = self._jobs[job_id]
            record.progress = max(record.progress, min(1.0, progress))

    def job_dir(self, job_id: str) -> Path:
        path = self.output_dir / "jobs" / job_id
        path.mkdir(parents=True, exist_ok=True)
        return path

    def persist(self, job_id: str, payload: dict) -> str:
        """Write the result file, mark the job done, snapshot its record."""
        job_dir = self.job_dir(job_id)
        result_path = job_dir / "result.json"
        with result_path.open("w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.set_status(job_id, "done", result_location=str(result_path))
        with (job_dir / "record.json").open("w") as fh:
            json.dump(self.get(job_id).as_dict(), fh, indent=2, sort_keys=True)
        return str(result_path)


class _BadRequest(ValueError):
    """Malformed or out-of-range request content (HTTP 400)."""


def _require(payload: dict, key: str, kind, default=None):
    if key not in payload:
        if default is not None:
            return default
        raise _BadRequest(f"missing field '{key}'")
    value = payload[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if not isinstance(value, kind):
        raise _BadRequest(f"field '{key}' has wrong type")
    return value


def _parse_params(payload: dict) -> ModelParams:
    allowed = {
        "beta", "alpha", "mu", "gamma", "sigma", "tau_f", "tau_s", "tau_r",
        "r_i", "r_q", "n_cc", "i_out", "n_total", "break_return_day",
    }
    unknown = set(payload) - allowed
    if unknown:
        raise _BadRequest(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    try:
        return ModelParams(**payload)
    except ValueError as err:
        raise _BadRequest(str(err)) from None


def _parse_init(payload: dict, n_total: int) -> CompartmentState:
    allowed = {
        "s", "s_q", "e", "i_a", "i_s", "i_t", "q_i", "r_d", "r_u",
        "q_q_exposed", "q_q_infectious", "q_q_recovered",
    }
    unknown = set(payload) - allowed
    if unknown:
        raise _BadRequest(f"unknown init field(s): {', '.join(sorted(unknown))}")
    ledger = QuarantineLedger(
        exposed=payload.get("q_q_exposed", 0),
        infectious=payload.get("q_q_infectious", 0),
        recovered=payload.get("q_q_recovered", 0),
    )
    counts = {k: v for k, v in payload.items() if not k.startswith("q_q_")}
    if "s" not in counts:
        seeded = sum(counts.values()) + ledger.total
        if seeded > n_total:
            raise HTTPException(422, f"init seeds {seeded} > n_total {n_total}")
        counts["s"] = n_total - seeded
    state = CompartmentState(q_q=ledger.total, q_q_ledger=ledger, **counts)
    try:
        state.validate_total(n_total)
    except ValueError as err:
        raise HTTPException(422, str(err)) from None
    return state


def _parse_posterior_inline(draws) -> abc_mod.PosteriorSample:
    if not isinstance(draws, list) or not draws:
        raise _BadRequest("inline posterior must be a non-empty list of [alpha, beta, i_out]")
    try:
        arr = np.array(draws, dtype=float).reshape(len(draws), 3)
    except (ValueError, TypeError):
        raise _BadRequest("inline posterior rows must be [alpha, beta, i_out]") from None
    return abc_mod.PosteriorSample.from_draws(arr)


def create_app(output_dir="server_out", static_dir=None, n_jobs: int = 1) -> FastAPI:
    app = FastAPI(title="campusepi", version=dataio.package_version())
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = JobStore(Path(output_dir))
    executor = ThreadPoolExecutor(max_workers=2)
    posteriors: dict[str, abc_mod.PosteriorSample] = {}
    posteriors[DEFAULT_POSTERIOR_ID] = _load_default_posterior()

    @app.exception_handler(_BadRequest)
    async def _bad_request_handler(_req: Request, err: _BadRequest):
        return JSONResponse(status_code=400, content={"detail": str(err)})

    @app.post("/api/simulate")
    async def api_simulate(payload: dict):
        params = _parse_params(_require(payload, "params", dict, default={}))
        init = _parse_init(_require(payload, "init", dict, default={}), params.n_total)
        horizon = _require(payload, "horizon", int, default=112)
        seed = _require(payload, "seed", int, default=0)
        if horizon < 1:
            raise _BadRequest("horizon must be >= 1")
        trajectory = simulate(params, init, horizon, seed=seed)
        weekly = weekly_cases(trajectory)
        peaks = detect_peaks(weekly)
        compartments = {
            name: [int(v) for v in trajectory.states[:, idx]]
            for idx, name in enumerate(
                ("s", "s_q", "e", "i_a", "i_s", "i_t", "q_i", "q_q", "r_d", "r_u")
            )
        }
        return {
            "weekly_cases": [int(v) for v in weekly],
            "daily_cases": [int(v) for v in trajectory.daily_cases],
            "compartments": compartments,
            "peaks": peaks.as_records(),
            "seed": seed,
        }

    @app.post("/api/fit", status_code=202)
    async def api_fit(payload: dict):
        cases = _require(payload, "observed", list)
        if not cases or not all(isinstance(v, int) and v >= 0 for v in cases):
            raise _BadRequest("observed must be a non-empty list of non-negative weekly counts")
        seed = _require(payload, "seed", int, default=0)
        n_traj = _require(payload, "n_traj", int, default=200)
        points = _require(payload, "grid_points", int, default=11)
        if n_traj < 1 or points < 2:
            raise _BadRequest("n_traj must be >= 1 and grid_points >= 2")
        thresholds = MatchThresholds()
        observed = detect_peaks(np.array(cases), thresholds.peak_floor)
        if observed.count == 0:
            raise _BadRequest("observed series has no qualifying peaks")
        grid = abc_mod.build_grid(abc_mod.PriorGrid(
            alpha=abc_mod.PriorAxis(0.0, 1.0, points),
            beta=abc_mod.PriorAxis(0.2, 1.0, points),
            i_out=abc_mod.PriorAxis(1, 200, points),
        ))
        record = store.create("fit")

        def work():
            store.set_status(record.id, "running")
            try:
                posterior, surface = abc_mod.run_abc(
                    grid, observed, n_traj, abc_mod.SimConfig(), seed, n_jobs=n_jobs
                )
                store.set_progress(record.id, 0.9)
                try:
                    intervals = abc_mod.marginal_ci(posterior).as_dict()
                except abc_mod.NoAcceptancesError:
                    intervals = None
                posteriors[record.id] = posterior
                payload = {
                    "intervals": intervals,
                    "total_accepted": posterior.total_accepted,
                    "max_acceptance_rate": surface.max_rate,
                    "posterior_id": record.id,
                    "seed": seed,
                }
                store.persist(record.id, payload)
            except Exception as err:  # pragma: no cover - defensive
                store.set_status(record.id, "failed", error=str(err))

        executor.submit(work)
        return {"job_id": record.id}

    @app.post("/api/sweep", status_code=202)
    async def api_sweep(payload: dict):
        strategies_raw = _require(payload, "strategies", list)
        if not strategies_raw:
            raise _BadRequest("strategy list is empty")
        strategies = []
        for entry in strategies_raw:
            if not isinstance(entry, dict):
                raise _BadRequest("each strategy must be an object")
            try:
                strategies.append(policy_mod.Strategy(
                    sigma=float(entry.get("sigma", -1)),
                    interval_days=float(entry.get("interval_days", 0)),
                    label=str(entry.get("label", "")),
                ))
            except (ValueError, TypeError) as err:
                raise _BadRequest(f"invalid strategy: {err}") from None
        seed = _require(payload, "seed", int, default=0)
        n_draws = _require(payload, "n_per_strategy", int, default=200)
        if n_draws < 1:
            raise _BadRequest("n_per_strategy must be >= 1")
        if "posterior" in payload:
            posterior = _parse_posterior_inline(payload["posterior"])
        else:
            posterior_id = _require(payload, "posterior_id", str, default=DEFAULT_POSTERIOR_ID)
            posterior = posteriors.get(posterior_id)
            if posterior is None:
                raise HTTPException(404, f"unknown posterior '{posterior_id}'")
        record = store.create("sweep")

        def work():
            store.set_status(record.id, "running")
            try:
                reports = policy_mod.run_policy_sweep(
                    strategies, posterior, n_draws, abc_mod.SimConfig(), seed
                )
                store.persist(record.id, dataio.policy_report_payload(reports))
            except Exception as err:  # pragma: no cover - defensive
                store.set_status(record.id, "failed", error=str(err))

        executor.submit(work)
        return {"job_id": record.id}

    @app.post("/api/ensemble", status_code=202)
    async def api_ensemble(payload: dict):
        seed = _require(payload, "seed", int, default=0)
        k = _require(payload, "curves", int, default=200)
        if k < 4:
            raise _BadRequest("curves must be >= 4")
        if "posterior" in payload:
            posterior = _parse_posterior_inline(payload["posterior"])
        else:
            posterior_id = _require(payload, "posterior_id", str, default=DEFAULT_POSTERIOR_ID)
            posterior = posteriors.get(posterior_id)
            if posterior is None:
                raise HTTPException(404, f"unknown posterior '{posterior_id}'")
        record = store.create("ensemble")

        def work():
            store.set_status(record.id, "running")
            try:
                rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, 5))))
                draws = ensemble_mod.draw_posterior_params(posterior, k, rng)
                matrix = ensemble_mod.simulate_ensemble(draws, abc_mod.SimConfig(), seed)
                band = ensemble_mod.functional_band(matrix)
                store.persist(record.id, {
                    "weeks": list(range(1, matrix.curves.shape[1] + 1)),
                    "median": [int(v) for v in band.median],
                    "band_low": [float(v) for v in band.band_low],
                    "band_high": [float(v) for v in band.band_high],
                    "fence_low": [float(v) for v in band.fence_low],
                    "fence_high": [float(v) for v in band.fence_high],
                    "outliers": [int(i) for i in band.outliers],
                    "seed": seed,
                })
            except Exception as err:  # pragma: no cover - defensive
                store.set_status(record.id, "failed", error=str(err))

        executor.submit(work)
        return {"job_id": record.id}

    @app.get("/api/jobs/{job_id}")
    async def api_job(job_id: str):
        record = store.get(job_id)
        if record is None:
            raise HTTPException(404, f"unknown job '{job_id}'")
        return record.as_dict()

    @app.get("/api/jobs/{job_id}/result")
    async def api_job_result(job_id: str):
        record = store.get(job_id)
        if record is None:
            raise HTTPException(404, f"unknown job '{job_id}'")
        if record.status != "done":
            raise HTTPException(409, f"job '{job_id}' is {record.status}")
        content = Path(record.result_location).read_bytes()
        return Response(content=content, media_type="application/json")

    @app.get("/api/posterior/{posterior_id}")
    async def api_posterior(posterior_id: str):
        posterior = posteriors.get(posterior_id)
        if posterior is None:
            raise HTTPException(404, f"unknown posterior '{posterior_id}'")
        return {
            "grid": [[float(a), float(b), float(i)] for a, b, i in posterior.grid],
            "accepted": [int(v) for v in posterior.accepted],
            "attempted": [int(v) for v in posterior.attempted],
            "total_accepted": posterior.total_accepted,
        }

    @app.get("/api/strategies/default")
    async def api_default_strategies():
        return {
            "strategies": [
                {"sigma": s.sigma, "interval_days": s.interval_days, "label": s.label}
                for s in policy_mod.default_strategy_grid()
            ]
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")

    return app


def _load_default_posterior() -> abc_mod.PosteriorSample:
    """Posterior shipped with the package (fit of the bundled synthetic data)."""
    from importlib import resources

    with resources.files("campusepi").joinpath("data/default_posterior.json").open() as fh:
        payload = json.load(fh)
    return abc_mod.PosteriorSample(
        grid=np.array(payload["grid"], dtype=float),
        accepted=np.array(payload["accepted"], dtype=np.int64),
        attempted=np.array(payload["attempted"], dtype=np.int64),
    )
