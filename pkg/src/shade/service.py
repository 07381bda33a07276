"""HTTP JSON API over the annotation workflow.

Annotators exchange their registered name for a bearer token once, then
drive their task queue through /api/task and the per-entity actions. Every
workflow and store error maps to one status code: stale ids and completion
conflicts are 409, invalid submissions are 422, unknown names 403.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .annostore import (
    AlreadyCompleted,
    AlreadySkipped,
    AnnotationStore,
    Annotator,
    EmptyLabel,
    EntityPage,
    UnknownEntity,
)
from .workflow import (
    AlreadyManual,
    AnnotationSession,
    LabelNotInList,
    ManualLocked,
    StaleTask,
    Workflow,
    labels_for,
)

_STATUS_BY_ERROR = [
    (StaleTask, 409),
    (AlreadyCompleted, 409),
    (AlreadySkipped, 409),
    (AlreadyManual, 422),
    (LabelNotInList, 422),
    (ManualLocked, 422),
    (EmptyLabel, 422),
    (UnknownEntity, 404),
]


class ApiError(Exception):
    def __init__(self, status: int, detail: str) -> None:
        self.status = status
        self.detail = detail


def _task_view(page: EntityPage, session: AnnotationSession) -> dict:
    return {
        "entity_id": page.id,
        "entity_name": page.entity_name,
        "first_paragraph": page.first_paragraph,
        "stage": session.stage.value,
        "labels": labels_for(page, session.stage),
    }


def create_app(store: AnnotationStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="shade", docs_url=None, redoc_url=None)
    flow = Workflow(store)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.detail})

    def translate(exc: Exception) -> ApiError:
        for error_type, status in _STATUS_BY_ERROR:
            if isinstance(exc, error_type):
                return ApiError(status, f"{type(exc).__name__}: {exc}")
        raise exc

    async def authenticated(request: Request) -> Annotator:
        header = request.headers.get("Authorization", "")
        scheme, _, token = header.partition(" ")
        annotator = (
            store.annotator_by_token(token.strip())
            if scheme.lower() == "bearer" and token
            else None
        )
        if annotator is None:
            raise ApiError(401, "missing or invalid bearer token")
        return annotator

    @app.post("/api/session")
    async def open_session(request: Request):
        try:
            payload = await request.json()
        except Exception:
            payload = None
        if not isinstance(payload, dict) or not isinstance(payload.get("name"), str):
            raise ApiError(400, "body must be a JSON object with a 'name' field")
        annotator = store.annotator_by_name(payload["name"])
        if annotator is None:
            raise ApiError(403, "unknown annotator name")
        return {"token": annotator.token}

    @app.get("/api/task")
    def get_task(annotator: Annotator = Depends(authenticated)):
        opened = flow.open_task(annotator.id)
        if opened is None:
            return Response(status_code=204)
        page, session = opened
        return _task_view(page, session)

    @app.post("/api/task/{entity_id}/reject")
    def reject(entity_id: int, annotator: Annotator = Depends(authenticated)):
        try:
            page, session = flow.reject_list(annotator.id, entity_id)
        except Exception as exc:
            raise translate(exc) from exc
        return _task_view(page, session)

    @app.post("/api/task/{entity_id}/annotate")
    async def annotate(
        entity_id: int, request: Request, annotator: Annotator = Depends(authenticated)
    ):
        try:
            payload = await request.json()
        except Exception:
            payload = None
        if not isinstance(payload, dict) or not isinstance(payload.get("label_text"), str):
            raise ApiError(422, "body must carry a 'label_text' string")
        index = payload.get("selection_index")
        if index is not None and not isinstance(index, int):
            raise ApiError(422, "'selection_index' must be an integer")
        try:
            annotation = flow.submit_label(
                annotator.id, entity_id, payload["label_text"], selection_index=index
            )
        except Exception as exc:
            raise translate(exc) from exc
        return {"weight": annotation.weight, "source": annotation.source.value}

    @app.post("/api/task/{entity_id}/skip")
    def skip(entity_id: int, annotator: Annotator = Depends(authenticated)):
        try:
            flow.skip_task(annotator.id, entity_id)
        except Exception as exc:
            raise translate(exc) from exc
        return {"skipped": entity_id}

    @app.get("/api/stats")
    def stats(annotator: Annotator = Depends(authenticated)):
        return {
            "breakdown": store.breakdown_by_source(),
            "skipped": store.skipped_count(),
            "first_link_agreement": store.first_link_agreement(),
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
