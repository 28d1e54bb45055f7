"""HTTP API for submitting samples and reading results (prefix /api/v1)."""

from __future__ import annotations

import shlex
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from ..runner.adapters import BUILTIN_ADAPTERS
from ..runner.spec import (
    CommandTemplateBackend,
    ConfigurationError,
    PackageSpec,
    ReplayBackend,
    TracedSubprocessBackend,
)
from ..rules.parser import RuleSyntaxError, parse_ruleset
from .store import JobStore, job_to_dict
from .worker import ServiceConfig

API_PREFIX = "/api/v1"


def create_app(
    store: JobStore,
    config: ServiceConfig = ServiceConfig(),
    static_dir: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="packsift", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get(f"{API_PREFIX}/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post(f"{API_PREFIX}/jobs", status_code=201)
    async def submit_job(
        ecosystem: str | None = Form(None),
        name: str | None = Form(None),
        version: str | None = Form(None),
        backend: str | None = Form(None),
        template: str | None = Form(None),
        timeout_s: float | None = Form(None),
        rescan_of: str | None = Form(None),
        bundle: UploadFile | None = File(None),
        payload: UploadFile | None = File(None),
    ) -> dict:
        if rescan_of is not None:
            # resubmit an existing job's spec and backend (the analyst's
            # edit-rules-and-rescan loop); the stored inputs are reused
            previous = store.get_job(rescan_of)
            if previous is None:
                raise HTTPException(status_code=404, detail="unknown job")
            job = store.submit_job(previous.spec, previous.backend, previous.timeout_s)
            return {"id": job.id, "state": job.state}

        if not ecosystem:
            raise HTTPException(
                status_code=400, detail={"errors": ["ecosystem: required"]}
            )
        upload = bundle or payload
        data: bytes | None = None
        if upload is not None:
            data = await upload.read()
            if len(data) > config.max_upload_bytes:
                raise HTTPException(
                    status_code=413,
                    detail=f"upload exceeds {config.max_upload_bytes} bytes",
                )

        backend_kind = backend or ("replay" if bundle is not None else "subprocess")
        errors: list[str] = []
        if backend_kind == "replay" and bundle is None:
            errors.append("bundle: a replay submission needs a bundle file")
        if backend_kind == "template" and not template:
            errors.append("template: required for the template backend")
        if backend_kind not in ("replay", "subprocess", "template"):
            errors.append(f"backend: unknown backend {backend_kind!r}")
        if backend_kind != "replay" and ecosystem not in BUILTIN_ADAPTERS:
            known = ", ".join(sorted(BUILTIN_ADAPTERS))
            errors.append(f"ecosystem: unknown ecosystem {ecosystem!r} (known: {known})")
        if backend_kind != "replay" and not name and payload is None:
            errors.append("name: required unless a payload file is submitted")
        if errors:
            raise HTTPException(status_code=400, detail={"errors": errors})

        # payload paths become concrete only once the job directory exists,
        # so reserve the id first, then write files, then persist the job
        job_id = store.new_job_id()
        store.job_dir(job_id).mkdir(parents=True, exist_ok=True)
        local_path = None
        bundle_path = None
        if upload is not None and data is not None:
            saved = store.save_upload(job_id, upload.filename or "payload", data)
            if backend_kind == "replay":
                bundle_path = saved
            else:
                local_path = saved

        try:
            # for replay jobs the bundle is the sample payload; the package
            # identity in the report comes from the bundle manifest
            spec = PackageSpec(
                ecosystem=ecosystem,
                name=name,
                version=version,
                local_path=local_path or bundle_path,
            )
            if backend_kind == "replay":
                backend_spec = ReplayBackend(bundle_path)
            elif backend_kind == "template":
                backend_spec = CommandTemplateBackend(tuple(shlex.split(template or "")))
            else:
                backend_spec = TracedSubprocessBackend()
        except ConfigurationError as exc:
            raise HTTPException(status_code=400, detail={"errors": [str(exc)]}) from exc

        job = store.submit_job(spec, backend_spec, timeout_s)
        return {"id": job.id, "state": job.state}

    @app.get(f"{API_PREFIX}/jobs")
    def list_jobs(state: str | None = None, page: int = 1, page_size: int = 20) -> dict:
        result = store.list_jobs(state=state or None, page=page, page_size=page_size)
        return {
            "jobs": [job_to_dict(j) for j in result.jobs],
            "page": result.page,
            "page_size": result.page_size,
            "total": result.total,
            "pages": result.pages,
        }

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}")
    def get_job(job_id: str) -> dict:
        job = store.get_job(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job")
        return job_to_dict(job)

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}/report")
    def get_report(job_id: str) -> Response:
        job = store.get_job(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job")
        if job.state != "succeeded":
            raise HTTPException(
                status_code=404, detail=f"report not ready: job is {job.state}"
            )
        text = store.load_report_text(job_id)
        if text is None:
            raise HTTPException(status_code=404, detail="report missing from store")
        return Response(content=text, media_type="application/json")

    @app.get(f"{API_PREFIX}/rules")
    def get_rules() -> PlainTextResponse:
        return PlainTextResponse(store.get_rules_source())

    @app.put(f"{API_PREFIX}/rules", status_code=204)
    async def put_rules(request: Request) -> Response:
        source = (await request.body()).decode("utf-8", "replace")
        try:
            parse_ruleset(source)
        except RuleSyntaxError as exc:
            return JSONResponse(
                status_code=400,
                content={"error": exc.message, "line": exc.line, "col": exc.col},
            )
        store.put_rules_source(source)
        return Response(status_code=204)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="dashboard")

    return app
