"""Pydantic request/response models for the annotation HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class LevelInfo(BaseModel):
    index: int
    name: str
    grade: str
    readership: str
    collapsed: dict[str, int]


class TraceStepModel(BaseModel):
    rule: str
    dimension: str
    rule_floor: int
    floor_after: int


class ViolationModel(BaseModel):
    kind: str
    severity: str
    message: str


class JudgmentModel(BaseModel):
    floor: int
    floor_name: str
    trace: list[TraceStepModel]
    violations: list[ViolationModel]


class ValidateRequest(BaseModel):
    candidate_level: int = Field(ge=1, le=19)
    sentence_id: str | None = None
    text: str | None = None
    asserted_features: list[str] = Field(default_factory=list)


class ValidateResponse(BaseModel):
    word_count: int
    judgment: JudgmentModel


class BatchRequest(BaseModel):
    annotator: str
    size: int = Field(default=100, ge=1)
    seed: int | None = None
    allow_partial: bool = False
    include_annotated: bool = False


class BatchModel(BaseModel):
    batch_id: str
    annotator: str
    sentence_ids: list[str]
    status: str
    created: str | None = None
    submitted: str | None = None


class SentenceModel(BaseModel):
    sentence_id: str
    doc_id: str
    text: str
    word_count: int
    split: str
    flags: list[str] = Field(default_factory=list)
    excluded: bool = False


class AnnotationRequest(BaseModel):
    sentence_id: str
    annotator: str
    version: int = Field(ge=1)
    level: int | None = Field(default=None, ge=1, le=19)
    asserted_features: list[str] = Field(default_factory=list)
    flags: list[str] = Field(default_factory=list)
    note: str = ""


class AnnotationEventModel(BaseModel):
    seq: int
    ts: str
    sentence_id: str
    annotator: str
    batch_id: str
    level: int | None
    asserted_features: list[str]
    flags: list[str]
    note: str
    version: int


class AnnotationResponse(BaseModel):
    event: AnnotationEventModel
    word_count: int
    judgment: JudgmentModel | None = None


class ConflictResponse(BaseModel):
    detail: str
    latest: AnnotationEventModel | None = None


class UnificationRoundRequest(BaseModel):
    sentence_ids: list[str]
    annotators: list[str] = Field(default_factory=list)


class RoundSentenceModel(BaseModel):
    sentence_id: str
    text: str
    labels: dict[str, int]
    max_min: int
    al_suggestion: int | None
    ul: int | None = None


class RoundModel(BaseModel):
    round_id: str
    status: str
    annotators: list[str]
    sentences: list[RoundSentenceModel]


class UlRequest(BaseModel):
    sentence_id: str
    ul: int = Field(ge=1, le=19)
    rationale: str = ""


class UnificationRecordModel(BaseModel):
    sentence_id: str
    labels: dict[str, int]
    ul: int
    al: int
    max_min: int
    within_range: bool
    matches_annotator: bool


class ExportRecordModel(BaseModel):
    sentence_id: str
    doc_id: str
    text: str
    level: int
    status: str
    split: str
