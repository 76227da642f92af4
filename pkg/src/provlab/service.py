"""HTTP API exposing the repository, store, graphs, workflows, and decks.

This is the boundary the web client consumes. All responses are JSON
except blob, preview, and deck downloads. With a bearer token configured,
every mutating request must carry it; reads stay open only when
``public_read`` is set.
"""

from __future__ import annotations

import ipaddress
import json
import logging
import threading
import uuid
from dataclasses import dataclass
from typing import Any

from fastapi import Depends, FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse

from .core.identity import qr_payload
from .core.records import ObjectRecord
from .core.repository import Repository
from .deck import build_slide_deck
from .errors import NotFoundError, ProvlabError
from .graph import build_graph, export_json, filter_by_element
from .store import BlobStore, register_linked_dataset
from .workflows import run_stress_strain, scheduler_tick

log = logging.getLogger("provlab.service")

_STATUS_BY_CODE = {
    "NOTFOUND": 404,
    "CYCLE": 409,
    "VALIDATION": 422,
    "VOCAB": 422,
    "SCHEMA": 422,
    "PARSE": 400,
    "TRUNCATED": 400,
    "ENCODING": 400,
    "BADTYPE": 400,
    "SYNTAX": 400,
    "HEADER": 400,
    "SHAPE": 400,
    "DOMAIN": 400,
    "EMPTY": 400,
    "CORRUPT": 500,
    "IO": 500,
    "ERROR": 500,
}


@dataclass
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8750
    token: str = ""
    journal_path: str = ""
    blob_root: str = ""
    public_read: bool = False
    scheduler_interval: float | None = None

    def validate(self) -> None:
        try:
            loopback = ipaddress.ip_address(self.host).is_loopback
        except ValueError:
            loopback = self.host == "localhost"
        if not loopback and not self.token:
            raise ProvlabError("a bearer token is required when binding beyond loopback")


class JobRegistry:
    """Tracks workflow runs executed off the request path."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[str, dict[str, Any]] = {}

    def start(self, target, *args) -> str:
        job_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._jobs[job_id] = {"state": "running", "outcomes": []}

        def runner():
            try:
                result = target(*args)
                outcomes = [o.to_dict() for o in (result if isinstance(result, list) else [result])]
                with self._lock:
                    self._jobs[job_id] = {"state": "done", "outcomes": outcomes}
            except Exception as exc:
                log.warning(json.dumps({"event": "job_failed", "job": job_id, "error": str(exc)}))
                with self._lock:
                    self._jobs[job_id] = {"state": "failed", "error": str(exc), "outcomes": []}

        threading.Thread(target=runner, name=f"provlab-job-{job_id}", daemon=True).start()
        return job_id

    def status(self, job_id: str) -> dict[str, Any]:
        with self._lock:
            if job_id not in self._jobs:
                raise NotFoundError(f"no job {job_id}")
            return dict(self._jobs[job_id])


def create_app(repo: Repository, store: BlobStore, config: ApiConfig | None = None) -> FastAPI:
    config = config or ApiConfig()
    app = FastAPI(title="provlab", docs_url=None, redoc_url=None)
    jobs = JobRegistry()

    def _authorized(request: Request) -> bool:
        if not config.token:
            return True
        header = request.headers.get("authorization", "")
        return header == f"Bearer {config.token}"

    def require_write(request: Request) -> None:
        if not _authorized(request):
            raise _unauthorized()

    def require_read(request: Request) -> None:
        if config.public_read:
            return
        if not _authorized(request):
            raise _unauthorized()

    def _unauthorized():
        from fastapi import HTTPException

        return HTTPException(status_code=401, detail="missing or invalid bearer token")

    @app.exception_handler(ProvlabError)
    async def domain_error_handler(_request: Request, exc: ProvlabError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        body = {"error": {"code": exc.code, "message": exc.message}}
        if getattr(exc, "report", None) is not None:
            body["error"]["violations"] = exc.report.to_dict()["violations"]
        return JSONResponse(status_code=status, content=body)

    # -- objects -----------------------------------------------------------

    @app.post("/objects", dependencies=[Depends(require_write)])
    async def post_object(body: dict):
        properties = body.get("properties", {})
        space = body.get("space", "DEFAULT")
        parents = tuple(body.get("parents", ()))
        if body.get("perm_id"):
            current = repo.get_object(body["perm_id"])
            record = ObjectRecord(
                perm_id=current.perm_id,
                type_name=body.get("type_name", current.type_name),
                properties={**current.properties, **properties},
                space=body.get("space", current.space),
            )
            repo.put_object(record, actor=body.get("actor", "api"))
            for parent in parents:
                repo.link(parent, record.perm_id)
            return repo.get_object(record.perm_id).to_dict()
        record = repo.create_object(
            type_name=body["type_name"],
            properties=properties,
            space=space,
            parents=parents,
            actor=body.get("actor", "api"),
        )
        return record.to_dict()

    @app.get("/objects", dependencies=[Depends(require_read)])
    async def list_objects(type: str | None = None, q: str | None = None):
        records = list(repo.objects())
        if type:
            records = [r for r in records if r.type_name == type]
        if q:
            needle = q.lower()
            records = [
                r for r in records
                if needle in str(r.properties.get("name", "")).lower()
                or needle in r.perm_id
            ]
        return {"objects": [r.to_dict() for r in records]}

    @app.get("/objects/{perm_id}", dependencies=[Depends(require_read)])
    async def get_object(perm_id: str):
        record = repo.get_object(perm_id).to_dict()
        record["datasets"] = [d.dataset_id for d in repo.datasets_of(perm_id)]
        return record

    @app.post("/links", dependencies=[Depends(require_write)])
    async def post_link(body: dict):
        repo.link(body["parent"], body["child"])
        return {"parent": body["parent"], "child": body["child"], "linked": True}

    @app.get("/vocabularies/{name}", dependencies=[Depends(require_read)])
    async def get_vocabulary(name: str):
        return repo.get_vocabulary(name).to_dict()

    # -- graph ---------------------------------------------------------------

    @app.get("/graph", dependencies=[Depends(require_read)])
    async def get_graph(
        root: str | None = None,
        direction: str = "both",
        depth: int | None = None,
        element: str | None = None,
    ):
        if element:
            graph = filter_by_element(repo, element)
        elif root:
            graph = build_graph(repo, root, direction=direction, max_depth=depth)
        else:
            raise ProvlabError("graph query needs either root or element")
        return Response(content=export_json(graph), media_type="application/json")

    # -- datasets ---------------------------------------------------------------

    @app.post("/datasets", dependencies=[Depends(require_write)])
    async def post_dataset(
        file: UploadFile = File(...),
        entry: str = Form(...),
        type: str = Form(...),
        format: str = Form("none"),
        dry_run: bool = Form(False),
    ):
        data = await file.read()
        parser = None if format in ("none", "", "auto") else format
        if format == "auto":
            from .extract import detect_format

            detected = detect_format(data[:64])
            parser = None if detected == "Unknown" else detected
        if dry_run:
            from .extract import extract_metadata

            warnings: list[str] = []
            if parser is None:
                return {"dry_run": True, "vendor": "Unknown", "unified": {}, "warnings": []}
            result = extract_metadata(data, parser)
            return {"dry_run": True, **result.to_dict()}
        warnings = []
        record = register_linked_dataset(
            repo,
            store,
            owner_entry=entry,
            data=data,
            dataset_type=type,
            parser_choice=parser,
            original_filename=file.filename or "upload.bin",
            warnings=warnings,
        )
        log.info(json.dumps({"event": "dataset_registered", "dataset": record.dataset_id}))
        return {**record.to_dict(), "warnings": warnings}

    @app.get("/datasets", dependencies=[Depends(require_read)])
    async def list_datasets(entry: str | None = None):
        records = repo.datasets_of(entry) if entry else list(repo.datasets())
        return {"datasets": [d.to_dict() for d in records]}

    @app.get("/datasets/{dataset_id}", dependencies=[Depends(require_read)])
    async def get_dataset(dataset_id: str):
        return repo.get_dataset(dataset_id).to_dict()

    @app.get("/datasets/{dataset_id}/blob", dependencies=[Depends(require_read)])
    async def get_dataset_blob(dataset_id: str):
        record = repo.get_dataset(dataset_id)
        data = store.get_blob(record.blob)
        headers = {
            "Content-Disposition": f'attachment; filename="{record.original_filename or dataset_id}"'
        }
        return Response(content=data, media_type="application/octet-stream", headers=headers)

    @app.get("/datasets/{dataset_id}/preview", dependencies=[Depends(require_read)])
    async def get_dataset_preview(dataset_id: str):
        record = repo.get_dataset(dataset_id)
        if record.preview is None:
            raise NotFoundError(f"dataset {dataset_id} has no preview")
        return Response(content=store.get_blob(record.preview), media_type="image/png")

    # -- workflows -----------------------------------------------------------------

    @app.post("/workflows/tick", dependencies=[Depends(require_write)])
    async def post_tick():
        job_id = jobs.start(scheduler_tick, repo, store)
        return {"job": job_id}

    @app.post("/workflows/stress-strain/{entry}", dependencies=[Depends(require_write)])
    async def post_stress_strain(entry: str):
        repo.get_object(entry)  # fail fast with 404 before going async
        job_id = jobs.start(run_stress_strain, repo, store, entry)
        return {"job": job_id}

    @app.get("/workflows/status/{job_id}", dependencies=[Depends(require_read)])
    async def get_job_status(job_id: str):
        return jobs.status(job_id)

    # -- decks and QR ---------------------------------------------------------------

    @app.post("/decks", dependencies=[Depends(require_write)])
    async def post_deck(body: dict):
        html, record = build_slide_deck(
            repo,
            store,
            dataset_ids=list(body.get("dataset_ids", ())),
            title=body.get("title", "Selected datasets"),
        )
        headers = {
            "X-Deck-Dataset": record.dataset_id,
            "Content-Disposition": 'attachment; filename="slide_deck.html"',
        }
        return Response(content=html, media_type="text/html", headers=headers)

    @app.get("/qr/{perm_id}", dependencies=[Depends(require_read)])
    async def get_qr(perm_id: str):
        repo.get_object(perm_id)
        return Response(content=qr_payload(perm_id), media_type="text/plain")

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    return app


def serve(repo: Repository, store: BlobStore, config: ApiConfig, lock_path: str | None = None):
    """Run the API (blocking), optionally with a periodic scheduler loop."""
    import uvicorn

    config.validate()
    app = create_app(repo, store, config)
    stop = threading.Event()

    if config.scheduler_interval:
        def loop():
            from filelock import FileLock, Timeout

            lock = FileLock(lock_path) if lock_path else None
            while not stop.wait(config.scheduler_interval):
                try:
                    if lock is not None:
                        with lock.acquire(timeout=0):
                            outcomes = scheduler_tick(repo, store)
                    else:
                        outcomes = scheduler_tick(repo, store)
                    executed = sum(1 for o in outcomes if not o.skipped)
                    log.info(json.dumps({"event": "scheduler_tick", "executed": executed}))
                except Timeout:
                    log.info(json.dumps({"event": "scheduler_tick_skipped", "reason": "locked"}))
                except Exception as exc:
                    log.warning(json.dumps({"event": "scheduler_tick_failed", "error": str(exc)}))

        threading.Thread(target=loop, name="provlab-scheduler", daemon=True).start()

    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    finally:
        stop.set()
