"""HTTP face of the engine: validate, run, diff, and fuzz over JSON.

The service is stateless; every request carries its own catalog and
scenario documents.  Malformed documents come back as 422 with the
loader's message, never as a 500.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..catalog import CatalogError, catalog_from_dict
from ..engine import RunResult, run_simulation
from ..fuzz import run_fuzz
from ..logdiff import DiffResult, LogDiffError, diff_logs
from ..oracle import run_oracle
from ..renderlog import RenderLogError, log_from_jsonl
from ..scenario import ScenarioError, check_against_catalog, scenario_from_dict
from .schemas import (
    CatalogSummaryOut,
    DiffIn,
    DiffOut,
    FuzzIn,
    FuzzOut,
    HealthOut,
    MessageOut,
    MismatchOut,
    NetworkStatsOut,
    RunIn,
    RunOut,
    SegmentOut,
    TapTipOut,
    ValidateIn,
    ValidateOut,
)

_INPUT_ERRORS = (CatalogError, ScenarioError, RenderLogError, LogDiffError)


def _diff_out(diff: DiffResult) -> DiffOut:
    return DiffOut(
        equal=diff.equal,
        mismatch_count=len(diff.mismatches),
        total_mismatch_ms=diff.total_mismatch_ms,
        max_mismatch_ms=diff.max_mismatch_ms,
        mismatches=[MismatchOut(**m.to_dict()) for m in diff.mismatches],
    )


def _run_out(result: RunResult, include_messages: bool) -> RunOut:
    log = result.render_log
    return RunOut(
        duration_ms=log.duration_ms,
        devices=list(log.devices),
        segments=[SegmentOut(**s.to_dict()) for s in log.segments],
        metrics=result.metrics.to_dict(),
        tap_tips=[
            TapTipOut(
                t_ms=tip.t_ms,
                device_id=tip.device_id,
                wall_id=tip.wall_id,
                target_ids=list(tip.target_ids),
                tip_duration_ms=tip.tip_duration_ms,
            )
            for tip in result.tap_tips
        ],
        network=NetworkStatsOut(**vars(result.network_stats)),
        messages=(
            [
                MessageOut(
                    t_ms=m.t_ms,
                    sender_id=m.sender_id,
                    type=m.message.type.name,
                    seq=m.message.seq,
                    datagram_hex=m.datagram.hex(),
                )
                for m in result.messages
            ]
            if include_messages
            else None
        ),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="audiospace", version=__version__)

    @app.get("/health", response_model=HealthOut)
    def health() -> HealthOut:
        return HealthOut(version=__version__)

    @app.post("/validate", response_model=ValidateOut)
    def validate(body: ValidateIn) -> ValidateOut:
        try:
            catalog = catalog_from_dict(body.catalog)
        except CatalogError as exc:
            return ValidateOut(ok=False, problems=[str(exc)])
        summary = CatalogSummaryOut(
            rooms=len(catalog.rooms),
            walls=len(catalog.walls),
            targets=len(catalog.targets_by_id),
            clips=len(catalog.clips),
            orphan_clip_ids=list(catalog.orphan_clip_ids),
        )
        problems: list[str] = []
        if body.scenario is not None:
            try:
                scenario = scenario_from_dict(body.scenario)
            except ScenarioError as exc:
                problems.append(str(exc))
            else:
                problems.extend(check_against_catalog(scenario, catalog))
        return ValidateOut(ok=not problems, problems=problems, catalog=summary)

    @app.post("/run", response_model=RunOut)
    def run(body: RunIn) -> RunOut:
        try:
            catalog = catalog_from_dict(body.catalog)
            scenario = scenario_from_dict(body.scenario)
            result = run_simulation(catalog, scenario)
            out = _run_out(result, body.include_messages)
            if body.oracle:
                out.oracle = _diff_out(
                    diff_logs(result.render_log, run_oracle(catalog, scenario))
                )
        except _INPUT_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return out

    @app.post("/diff", response_model=DiffOut)
    def diff(body: DiffIn) -> DiffOut:
        try:
            result = diff_logs(log_from_jsonl(body.log_a), log_from_jsonl(body.log_b))
        except _INPUT_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return _diff_out(result)

    @app.post("/fuzz", response_model=FuzzOut)
    def fuzz(body: FuzzIn) -> FuzzOut:
        try:
            catalog = catalog_from_dict(body.catalog)
        except CatalogError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        report = run_fuzz(catalog, seed=body.seed, events_per_run=body.events, runs=body.runs)
        return FuzzOut(**report.to_dict())

    return app


app = create_app()
