"""FastAPI service exposing the toolchain; every endpoint is a pure
function of its request body.

Domain failures map to HTTP 400 with an ErrorPayload body whose `error`
field is one of: parse, decode, validate, params, simulation.  The CLI is
a thin client over these handlers (in-process by default, HTTP with
--server).
"""

from __future__ import annotations

import base64
import binascii
import logging

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bench import compression_report, render_table
from ..binarycodec import BinaryDecodeError, EncodeOptions, decode_binary, encode_binary
from ..scene import scene_stats, validate
from ..scene.stats import dict_resolver
from ..scene.types import Vec3
from ..scenegen import (
    GenParams,
    generate_bench_corpus,
    generate_bundle,
)
from ..runtime import (
    ScriptError,
    SimConfig,
    Simulation,
    SimulationError,
    event_from_dict,
    render_trace,
    run_summary,
)
from ..runtime.inline import InlineCollisionError
from ..xmlcodec import XmlParseError, parse_xml, semantic_equal, serialize_xml
from . import schemas as S

log = logging.getLogger(__name__)


def _fail(error: str, message: str, diagnostics=()):
    payload = S.ErrorPayload(
        error=error,
        message=message,
        diagnostics=[
            S.DiagnosticModel(line=d.line, column=d.column, code=d.code, message=d.message)
            for d in diagnostics
        ],
    )
    raise HTTPException(status_code=400, detail=payload.model_dump())


def _parse(xml: str):
    try:
        return parse_xml(xml.encode("utf-8"))
    except XmlParseError as exc:
        _fail("parse", str(exc), exc.diagnostics)


def _resolver_from(inlines: dict):
    scenes = {}
    for url, text in inlines.items():
        try:
            scenes[url] = parse_xml(text.encode("utf-8"))
        except XmlParseError as exc:
            log.warning("inline %r does not parse (%s); treated as missing", url, exc)
    return dict_resolver(scenes)


def _reduction(xml_bytes: int, binary_bytes: int) -> float:
    return round((1.0 - binary_bytes / xml_bytes) * 100.0, 2)


def handle_health() -> S.HealthResponse:
    return S.HealthResponse(status="ok", version=__version__)


def handle_parse(req: S.SceneDocument) -> S.ParseResponse:
    scene = _parse(req.xml)
    return S.ParseResponse(xml=serialize_xml(scene).decode("utf-8"))


def handle_validate(req: S.SceneDocument) -> S.ValidateResponse:
    scene = _parse(req.xml)
    report = validate(scene)
    conv = lambda issues: [
        S.IssueModel(code=i.code, path=i.path, message=i.message) for i in issues
    ]
    return S.ValidateResponse(
        ok=report.ok, errors=conv(report.errors), warnings=conv(report.warnings)
    )


def handle_stats(req: S.StatsRequest) -> S.StatsResponse:
    scene = _parse(req.xml)
    stats = scene_stats(scene, _resolver_from(req.inlines))
    return S.StatsResponse(
        shape_count=stats.shape_count,
        image_texture_count=stats.image_texture_count,
        audio_clip_count=stats.audio_clip_count,
        inline_count=stats.inline_count,
        node_count_by_kind=stats.node_count_by_kind,
    )


def handle_promote(req: S.SceneDocument) -> S.ParseResponse:
    from ..scene import PromotionError, promote_static_groups

    scene = _parse(req.xml)
    try:
        promoted = promote_static_groups(scene)
    except PromotionError as exc:
        _fail("validate", str(exc))
    return S.ParseResponse(xml=serialize_xml(promoted).decode("utf-8"))


def handle_encode(req: S.EncodeRequest) -> S.EncodeResponse:
    scene = _parse(req.xml)
    blob = encode_binary(
        scene, EncodeOptions(compress_payload=req.compress, string_table_dedup=req.dedup)
    )
    xml_bytes = len(req.xml.encode("utf-8"))
    return S.EncodeResponse(
        s3db_b64=base64.b64encode(blob).decode("ascii"),
        xml_bytes=xml_bytes,
        binary_bytes=len(blob),
        reduction_pct=_reduction(xml_bytes, len(blob)),
    )


def handle_decode(req: S.DecodeRequest) -> S.ParseResponse:
    try:
        blob = base64.b64decode(req.s3db_b64, validate=True)
    except (binascii.Error, ValueError) as exc:
        _fail("decode", f"payload is not valid base64: {exc}")
    try:
        scene = decode_binary(blob)
    except BinaryDecodeError as exc:
        _fail("decode", f"{type(exc).__name__}: {exc}")
    return S.ParseResponse(xml=serialize_xml(scene).decode("utf-8"))


def _first_xml_difference(a: bytes, b: bytes) -> str:
    for i, (la, lb) in enumerate(zip(a.splitlines(), b.splitlines()), 1):
        if la != lb:
            return f"first difference at canonical XML line {i}: {la!r} != {lb!r}"
    return f"canonical XML lengths differ: {len(a)} vs {len(b)} bytes"


def handle_roundtrip(req: S.RoundTripRequest) -> S.RoundTripResponse:
    if (req.xml is None) == (req.s3db_b64 is None):
        _fail("params", "provide exactly one of xml or s3db_b64")

    if req.s3db_b64 is not None:
        # binary route: decode, re-encode, decode, compare
        try:
            blob = base64.b64decode(req.s3db_b64, validate=True)
        except (binascii.Error, ValueError) as exc:
            _fail("decode", f"payload is not valid base64: {exc}")
        try:
            scene = decode_binary(blob)
        except BinaryDecodeError as exc:
            return S.RoundTripResponse(
                ok=False,
                xml_bytes=0,
                binary_bytes=len(blob),
                reduction_pct=0.0,
                detail=f"decode failed: {type(exc).__name__}: {exc}",
            )
        xml = serialize_xml(scene)
    else:
        scene = _parse(req.xml)
        xml = req.xml.encode("utf-8")

    blob = encode_binary(scene)
    xml_bytes = len(xml)
    try:
        decoded = decode_binary(blob)
    except BinaryDecodeError as exc:
        return S.RoundTripResponse(
            ok=False,
            xml_bytes=xml_bytes,
            binary_bytes=len(blob),
            reduction_pct=_reduction(xml_bytes, len(blob)),
            detail=f"decode failed: {type(exc).__name__}: {exc}",
        )
    ok = semantic_equal(scene, decoded)
    detail = None
    if not ok:
        detail = _first_xml_difference(serialize_xml(scene), serialize_xml(decoded))
    elif serialize_xml(decoded) != serialize_xml(scene):
        ok = False
        detail = _first_xml_difference(serialize_xml(scene), serialize_xml(decoded))
    return S.RoundTripResponse(
        ok=ok,
        xml_bytes=xml_bytes,
        binary_bytes=len(blob),
        reduction_pct=_reduction(xml_bytes, len(blob)),
        detail=detail,
    )


def _bench_response(report) -> S.BenchResponse:
    return S.BenchResponse(
        rows=[
            S.BenchRowResult(
                label=r.label,
                xml_bytes=r.xml_bytes,
                binary_bytes=r.binary_bytes,
                reduction_pct=r.reduction_pct,
            )
            for r in report.rows
        ],
        average_reduction_pct=report.average_reduction_pct,
        table=render_table(report),
    )


def handle_bench_report(req: S.BenchReportRequest) -> S.BenchResponse:
    try:
        report = compression_report(
            [(r.label, r.xml_bytes, r.binary_bytes) for r in req.rows]
        )
    except ValueError as exc:
        _fail("params", str(exc))
    return _bench_response(report)


def handle_bench_run(req: S.BenchRunRequest) -> S.BenchResponse:
    pairs = []
    for f in req.files:
        scene = _parse(f.xml)
        blob = encode_binary(scene, EncodeOptions(compress_payload=req.compress))
        pairs.append((f.label, len(f.xml.encode("utf-8")), len(blob)))
    return _bench_response(compression_report(pairs))


def _gen_params(model: S.GenParamsModel) -> GenParams:
    try:
        return GenParams(
            car_count=model.car_count,
            building_count=model.building_count,
            mesh_density=model.mesh_density,
            include_debug_backdrop=model.include_debug_backdrop,
            include_debug_camera_cube=model.include_debug_camera_cube,
            savannah_offset=Vec3(*model.savannah_offset),
        )
    except ValueError as exc:
        _fail("params", str(exc))


def handle_generate(req: S.GenerateRequest) -> S.GenerateResponse:
    p = _gen_params(req.params)
    if req.target == "bench-corpus":
        artifacts = generate_bench_corpus(p)
        files = {
            f"{a.label.replace(' ', '')}.x3d": serialize_xml(a.scene).decode("utf-8")
            for a in artifacts
        }
        sizing = {
            a.label: S.CorpusSizing(
                target_bytes=a.target_bytes,
                xml_bytes=a.xml_bytes,
                within_window=a.within_window,
                detail=a.detail,
            )
            for a in artifacts
        }
        return S.GenerateResponse(files=files, sizing=sizing)
    try:
        files, manifest = generate_bundle(req.target, p)
    except ValueError as exc:
        _fail("params", str(exc))
    return S.GenerateResponse(
        files={name: serialize_xml(sc).decode("utf-8") for name, sc in files.items()},
        manifest=manifest.as_dict(),
    )


def handle_simulate(req: S.SimulateRequest) -> S.SimulateResponse:
    scene = _parse(req.xml)
    try:
        config = SimConfig(
            sample_rate=req.config.sample_rate,
            transition_duration=req.config.transition_duration,
            verbosity=req.config.verbosity,
        )
        events = [event_from_dict(e) for e in req.script]
        events.sort(key=lambda e: e.at)
        sim = Simulation(scene, config, _resolver_from(req.inlines))
        records = sim.step_to(req.until, events)
    except (ScriptError, SimulationError, InlineCollisionError, ValueError) as exc:
        _fail("simulation", str(exc))
    summary = run_summary(sim, records)
    return S.SimulateResponse(
        trace=render_trace(records, summary),
        record_count=len(records),
        summary=summary,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="scenery",
        version=__version__,
        description="Scene-graph toolchain: codecs, validation, statistics, "
        "compression benchmarking, deterministic simulation, scene generation.",
    )
    app.get("/health", response_model=S.HealthResponse)(handle_health)
    app.post("/scenes/parse", response_model=S.ParseResponse)(handle_parse)
    app.post("/scenes/validate", response_model=S.ValidateResponse)(handle_validate)
    app.post("/scenes/stats", response_model=S.StatsResponse)(handle_stats)
    app.post("/scenes/promote", response_model=S.ParseResponse)(handle_promote)
    app.post("/codec/encode", response_model=S.EncodeResponse)(handle_encode)
    app.post("/codec/decode", response_model=S.ParseResponse)(handle_decode)
    app.post("/codec/roundtrip", response_model=S.RoundTripResponse)(handle_roundtrip)
    app.post("/bench/report", response_model=S.BenchResponse)(handle_bench_report)
    app.post("/bench/run", response_model=S.BenchResponse)(handle_bench_run)
    app.post("/generate", response_model=S.GenerateResponse)(handle_generate)
    app.post("/simulate", response_model=S.SimulateResponse)(handle_simulate)
    return app


app = create_app()
