"""HTTP API over the annotation store.

The service owns no logic of its own: every judgment shown to a client
comes from the guideline engine, every state change goes through the
event-sourced store. The companion browser UI consumes this API
exclusively.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..events import (
    AnnotationStore,
    AuthorizationError,
    ConflictError,
    UnknownRoundError,
    WorkflowError,
)
from ..guidelines import NotLevelableError, validate_choice
from ..levels import LEVEL_NAMES, ReadabilityLevel, load_grade_bands
from ..text import detect_features
from . import schemas


def create_app(store: AnnotationStore, frontend_dir=None) -> FastAPI:
    app = FastAPI(title="miqyas annotation service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    bands = load_grade_bands()

    def _judgment_model(judgment) -> schemas.JudgmentModel:
        return schemas.JudgmentModel(**judgment.to_dict())

    @app.get("/health")
    def health():
        return {"status": "ok", "sentences": len(store.corpus.sentences)}

    @app.get("/levels", response_model=list[schemas.LevelInfo])
    def levels():
        out = []
        for index in range(1, 20):
            level = ReadabilityLevel(index)
            out.append(
                schemas.LevelInfo(
                    index=index,
                    name=level.name,
                    grade=bands.grade_for(index),
                    readership=bands.readership_for(index),
                    collapsed={str(g): store.gmap.collapse(index, g) for g in (7, 5, 3)},
                )
            )
        return out

    @app.get("/batches/{annotator}", response_model=list[schemas.BatchModel])
    def batches_for(annotator: str):
        return [schemas.BatchModel(**b) for b in store.annotator_batches(annotator)]

    @app.post("/batches", response_model=schemas.BatchModel)
    def create_batch(request: schemas.BatchRequest):
        try:
            batch = store.create_batch(
                request.annotator,
                size=request.size,
                seed=request.seed,
                allow_partial=request.allow_partial,
                include_annotated=request.include_annotated,
            )
        except WorkflowError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return schemas.BatchModel(**batch)

    @app.post("/batches/{batch_id}/submit", response_model=schemas.BatchModel)
    def submit_batch(batch_id: str):
        try:
            return schemas.BatchModel(**store.submit_batch(batch_id))
        except WorkflowError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/sentences/{sentence_id}", response_model=schemas.SentenceModel)
    def sentence(sentence_id: str):
        record = store.corpus.sentences.get(sentence_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown sentence {sentence_id}")
        return schemas.SentenceModel(
            sentence_id=record.sentence_id,
            doc_id=record.doc_id,
            text=record.text,
            word_count=record.word_count,
            split=record.split,
            flags=record.flags,
            excluded=record.excluded,
        )

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(request: schemas.ValidateRequest):
        """Stateless candidate-level check powering the live UI feedback."""
        if request.text is not None:
            text = request.text
        elif request.sentence_id is not None:
            record = store.corpus.sentences.get(request.sentence_id)
            if record is None:
                raise HTTPException(status_code=404,
                                    detail=f"unknown sentence {request.sentence_id}")
            text = record.text
        else:
            raise HTTPException(status_code=422, detail="need text or sentence_id")
        features = detect_features(text, store.profile.detectors)
        features.asserted_features |= set(request.asserted_features)
        judgment = validate_choice(request.candidate_level, features, store.profile)
        return schemas.ValidateResponse(
            word_count=features.word_count, judgment=_judgment_model(judgment)
        )

    @app.post("/annotations", response_model=schemas.AnnotationResponse,
              responses={409: {"model": schemas.ConflictResponse}})
    def submit_annotation(request: schemas.AnnotationRequest):
        try:
            event, judgment, word_count = store.submit_annotation(
                request.sentence_id,
                request.annotator,
                request.version,
                level=request.level,
                asserted_features=request.asserted_features,
                flags=request.flags,
                note=request.note,
            )
        except AuthorizationError as exc:
            raise HTTPException(status_code=403, detail=str(exc))
        except ConflictError as exc:
            payload = {"detail": str(exc), "latest": exc.latest}
            raise HTTPException(status_code=409, detail=payload)
        except (WorkflowError, NotLevelableError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.AnnotationResponse(
            event=schemas.AnnotationEventModel(**{
                k: event[k] for k in schemas.AnnotationEventModel.model_fields
            }),
            word_count=word_count,
            judgment=_judgment_model(judgment) if judgment else None,
        )

    @app.post("/unification/rounds", response_model=schemas.RoundModel)
    def open_round(request: schemas.UnificationRoundRequest):
        try:
            view = store.open_unification(request.sentence_ids, request.annotators)
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except WorkflowError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.RoundModel(**view)

    @app.get("/unification/rounds/{round_id}", response_model=schemas.RoundModel)
    def round_view(round_id: str):
        try:
            return schemas.RoundModel(**store.round_view(round_id))
        except WorkflowError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/unification/{round_id}/ul", response_model=schemas.UnificationRecordModel)
    def record_ul(round_id: str, request: schemas.UlRequest):
        try:
            record = store.record_ul(round_id, request.sentence_id,
                                     request.ul, request.rationale)
        except UnknownRoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except WorkflowError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return schemas.UnificationRecordModel(**record.to_dict())

    @app.get("/export")
    def export(split: str | None = None, status: str | None = None):
        return PlainTextResponse(
            store.export_bytes(split=split, status=status),
            media_type="application/x-ndjson",
        )

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
