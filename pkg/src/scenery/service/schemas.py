"""Request/response models for the scene toolchain service.

Scene documents travel as UTF-8 XML strings; binary streams as base64.
Every endpoint is stateless: anything a request needs (inline files,
generator parameters, simulation scripts) rides along in the body.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class SceneDocument(BaseModel):
    xml: str


class ParseResponse(BaseModel):
    xml: str


class DiagnosticModel(BaseModel):
    line: int
    column: int
    code: str
    message: str


class IssueModel(BaseModel):
    code: str
    path: str
    message: str


class ValidateResponse(BaseModel):
    ok: bool
    errors: list[IssueModel] = []
    warnings: list[IssueModel] = []


class StatsRequest(BaseModel):
    xml: str
    inlines: dict[str, str] = {}


class StatsResponse(BaseModel):
    shape_count: int
    image_texture_count: int
    audio_clip_count: int
    inline_count: int
    node_count_by_kind: dict[str, int]


class EncodeRequest(BaseModel):
    xml: str
    compress: bool = True
    dedup: bool = True


class EncodeResponse(BaseModel):
    s3db_b64: str
    xml_bytes: int
    binary_bytes: int
    reduction_pct: float


class DecodeRequest(BaseModel):
    s3db_b64: str


class RoundTripRequest(BaseModel):
    """Either an XML document (xml -> binary -> xml check) or a binary
    stream (decode -> re-encode -> decode check); exactly one is set."""

    xml: Optional[str] = None
    s3db_b64: Optional[str] = None


class RoundTripResponse(BaseModel):
    ok: bool
    xml_bytes: int
    binary_bytes: int
    reduction_pct: float
    detail: Optional[str] = None


class BenchRow(BaseModel):
    label: str
    xml_bytes: int = Field(gt=0)
    binary_bytes: int = Field(ge=0)


class BenchReportRequest(BaseModel):
    rows: list[BenchRow]


class BenchFile(BaseModel):
    label: str
    xml: str


class BenchRunRequest(BaseModel):
    files: list[BenchFile]
    compress: bool = True


class BenchRowResult(BenchRow):
    reduction_pct: float


class BenchResponse(BaseModel):
    rows: list[BenchRowResult]
    average_reduction_pct: float
    table: str


class GenParamsModel(BaseModel):
    car_count: int = 2
    building_count: int = 12
    mesh_density: int = 500
    include_debug_backdrop: bool = False
    include_debug_camera_cube: bool = False
    savannah_offset: tuple[float, float, float] = (0.0, -500.0, 0.0)


class GenerateRequest(BaseModel):
    target: Literal["georgia", "savannah", "composite", "bench-corpus"]
    params: GenParamsModel = GenParamsModel()


class CorpusSizing(BaseModel):
    target_bytes: int
    xml_bytes: int
    within_window: bool
    detail: int


class GenerateResponse(BaseModel):
    files: dict[str, str]
    manifest: Optional[dict] = None
    sizing: Optional[dict[str, CorpusSizing]] = None


class SimConfigModel(BaseModel):
    sample_rate: float = 30.0
    transition_duration: float = 2.0
    verbosity: Literal["full", "changes"] = "full"


class SimulateRequest(BaseModel):
    xml: str
    inlines: dict[str, str] = {}
    script: list[dict] = []
    until: float
    config: SimConfigModel = SimConfigModel()


class SimulateResponse(BaseModel):
    trace: str  # JSON lines, summary footer included
    record_count: int
    summary: dict


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorPayload(BaseModel):
    error: str
    message: str
    diagnostics: list[DiagnosticModel] = []
