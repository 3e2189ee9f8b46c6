"""Command-line client for the scenery service.

Subcommands cover the whole pipeline: gen, parse, validate, stats, encode,
decode, roundtrip, bench, simulate (plus serve).  By default requests are
dispatched to the service handlers in-process; --server (or SCENERY_SERVER)
switches to HTTP against a running instance, with identical behavior.

Exit codes: 0 success; 1 validation or round-trip failure; 2 usage error;
3 I/O or format error.  Machine-readable output goes to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import base64
import json
import os
import sys
from pathlib import Path

import click

from .runtime.model import CONFIG_ENV_VAR
from .service import schemas as S
from .service.app import (
    handle_bench_report,
    handle_bench_run,
    handle_decode,
    handle_encode,
    handle_generate,
    handle_parse,
    handle_promote,
    handle_roundtrip,
    handle_simulate,
    handle_stats,
    handle_validate,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

_HANDLERS = {
    "/scenes/parse": (handle_parse, S.SceneDocument),
    "/scenes/validate": (handle_validate, S.SceneDocument),
    "/scenes/stats": (handle_stats, S.StatsRequest),
    "/scenes/promote": (handle_promote, S.SceneDocument),
    "/codec/encode": (handle_encode, S.EncodeRequest),
    "/codec/decode": (handle_decode, S.DecodeRequest),
    "/codec/roundtrip": (handle_roundtrip, S.RoundTripRequest),
    "/bench/report": (handle_bench_report, S.BenchReportRequest),
    "/bench/run": (handle_bench_run, S.BenchRunRequest),
    "/generate": (handle_generate, S.GenerateRequest),
    "/simulate": (handle_simulate, S.SimulateRequest),
}


class ServiceError(Exception):
    def __init__(self, payload: dict):
        self.kind = payload.get("error", "unknown")
        self.message = payload.get("message", "")
        self.diagnostics = payload.get("diagnostics", [])
        super().__init__(self.message)


class Client:
    """Thin transport: in-process handler calls, or HTTP when server set."""

    def __init__(self, server: str | None):
        self.server = server

    def call(self, path: str, payload: dict) -> dict:
        if self.server:
            import httpx
            from fastapi import HTTPException

            try:
                resp = httpx.post(
                    self.server.rstrip("/") + path, json=payload, timeout=300.0
                )
            except httpx.HTTPError as exc:
                raise ServiceError({"error": "transport", "message": str(exc)}) from exc
            if resp.status_code == 400:
                raise ServiceError(resp.json().get("detail", {}))
            resp.raise_for_status()
            return resp.json()
        handler, model = _HANDLERS[path]
        from fastapi import HTTPException

        try:
            result = handler(model.model_validate(payload))
        except HTTPException as exc:
            raise ServiceError(exc.detail if isinstance(exc.detail, dict) else {})
        return result.model_dump()


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_IO)


def _write_file(path: str, data: bytes):
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        click.echo(f"error: cannot write {path}: {exc}", err=True)
        sys.exit(EXIT_IO)


def _fail_service(err: ServiceError):
    for d in err.diagnostics:
        click.echo(
            f"{d.get('line')}:{d.get('column')}: {d.get('code')}: {d.get('message')}",
            err=True,
        )
    click.echo(f"error ({err.kind}): {err.message}", err=True)
    sys.exit(EXIT_FAILED if err.kind in ("validate",) else EXIT_IO)


def _sibling_inlines(path: Path) -> dict:
    """All sibling .x3d files, keyed by filename: the inline resolution map
    shipped with stats/simulate requests."""
    inlines = {}
    for sibling in sorted(path.parent.glob("*.x3d")):
        if sibling == path:
            continue
        try:
            inlines[sibling.name] = sibling.read_text(encoding="utf-8")
        except OSError as exc:
            click.echo(f"warning: skipping inline {sibling.name}: {exc}", err=True)
    return inlines


@click.group()
@click.option(
    "--server",
    envvar="SCENERY_SERVER",
    default=None,
    help="Base URL of a running scenery service; default is in-process.",
)
@click.pass_context
def main(ctx, server):
    """Scene-graph toolchain: generate, convert, validate, bench, simulate."""
    ctx.obj = Client(server)


@main.command()
@click.argument(
    "target", type=click.Choice(["georgia", "savannah", "composite", "bench-corpus"])
)
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@click.option("--car-count", default=2, show_default=True)
@click.option("--building-count", default=12, show_default=True)
@click.option("--mesh-density", default=500, show_default=True)
@click.option("--debug-backdrop", is_flag=True)
@click.option("--debug-camera-cube", is_flag=True)
@click.option("--json", "as_json", is_flag=True, help="Emit a JSON summary to stdout.")
@click.pass_obj
def gen(client, target, out_dir, car_count, building_count, mesh_density,
        debug_backdrop, debug_camera_cube, as_json):
    """Generate a scene bundle (or the bench corpus) into a directory."""
    req = {
        "target": target,
        "params": {
            "car_count": car_count,
            "building_count": building_count,
            "mesh_density": mesh_density,
            "include_debug_backdrop": debug_backdrop,
            "include_debug_camera_cube": debug_camera_cube,
        },
    }
    try:
        result = client.call("/generate", req)
    except ServiceError as err:
        _fail_service(err)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, xml in result["files"].items():
        _write_file(str(out / name), xml.encode("utf-8"))
    if result.get("manifest") is not None:
        _write_file(
            str(out / "manifest.json"),
            json.dumps(result["manifest"], indent=2).encode("utf-8"),
        )
    if result.get("sizing") is not None:
        _write_file(
            str(out / "sizing.json"),
            json.dumps(result["sizing"], indent=2).encode("utf-8"),
        )
    if as_json:
        click.echo(json.dumps({"files": sorted(result["files"])}))
    else:
        for name in sorted(result["files"]):
            click.echo(str(out / name))


@main.command()
@click.argument("file", type=click.Path())
@click.option("--out", "out_file", default=None, help="Write canonical XML here.")
@click.pass_obj
def parse(client, file, out_file):
    """Parse a .x3d file and emit its canonical serialization."""
    xml = _read_file(file).decode("utf-8", errors="replace")
    try:
        result = client.call("/scenes/parse", {"xml": xml})
    except ServiceError as err:
        _fail_service(err)
    data = result["xml"].encode("utf-8")
    if out_file:
        _write_file(out_file, data)
    else:
        click.echo(data.decode("utf-8"), nl=False)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def validate(client, file, as_json):
    """Validate a scene; exit 1 when it has errors."""
    xml = _read_file(file).decode("utf-8", errors="replace")
    try:
        result = client.call("/scenes/validate", {"xml": xml})
    except ServiceError as err:
        _fail_service(err)
    if as_json:
        click.echo(json.dumps(result, sort_keys=True))
    else:
        for issue in result["errors"]:
            click.echo(f"error {issue['code']} at {issue['path']}: {issue['message']}")
        for issue in result["warnings"]:
            click.echo(f"warning {issue['code']} at {issue['path']}: {issue['message']}")
        click.echo("OK" if result["ok"] else f"{len(result['errors'])} error(s)")
    sys.exit(EXIT_OK if result["ok"] else EXIT_FAILED)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--out", "out_file", default=None, help="Write the promoted scene here.")
@click.pass_obj
def promote(client, file, out_file):
    """Rewrite provably-static Groups to StaticGroups (scene must be valid)."""
    xml = _read_file(file).decode("utf-8", errors="replace")
    try:
        result = client.call("/scenes/promote", {"xml": xml})
    except ServiceError as err:
        _fail_service(err)
    data = result["xml"].encode("utf-8")
    if out_file:
        _write_file(out_file, data)
        click.echo(out_file)
    else:
        click.echo(data.decode("utf-8"), nl=False)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def stats(client, file, as_json):
    """Scene statistics with sibling .x3d files as the inline map."""
    path = Path(file)
    xml = _read_file(file).decode("utf-8", errors="replace")
    try:
        result = client.call(
            "/scenes/stats", {"xml": xml, "inlines": _sibling_inlines(path)}
        )
    except ServiceError as err:
        _fail_service(err)
    if as_json:
        click.echo(json.dumps(result, sort_keys=True))
    else:
        click.echo(f"shapes:         {result['shape_count']}")
        click.echo(f"image textures: {result['image_texture_count']}")
        click.echo(f"audio clips:    {result['audio_clip_count']}")
        click.echo(f"inlines:        {result['inline_count']}")
        for kind, n in sorted(result["node_count_by_kind"].items()):
            click.echo(f"  {kind}: {n}")


@main.command()
@click.argument("file", type=click.Path())
@click.option("--out", "out_file", default=None, help="Output .s3db path.")
@click.option("--no-compress", is_flag=True, help="Skip the payload compression stage.")
@click.option("--no-dedup", is_flag=True, help="Skip string-table deduplication.")
@click.pass_obj
def encode(client, file, out_file, no_compress, no_dedup):
    """Encode a .x3d file to the S3DB1 binary format."""
    xml = _read_file(file).decode("utf-8", errors="replace")
    try:
        result = client.call(
            "/codec/encode",
            {"xml": xml, "compress": not no_compress, "dedup": not no_dedup},
        )
    except ServiceError as err:
        _fail_service(err)
    out_path = out_file or str(Path(file).with_suffix(".s3db"))
    _write_file(out_path, base64.b64decode(result["s3db_b64"]))
    click.echo(
        f"{out_path}: {result['binary_bytes']:,} bytes "
        f"({result['reduction_pct']:.2f}% smaller than the XML)",
        err=True,
    )
    click.echo(out_path)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--out", "out_file", default=None, help="Output .x3d path.")
@click.pass_obj
def decode(client, file, out_file):
    """Decode an .s3db file back to canonical XML."""
    blob = _read_file(file)
    try:
        result = client.call(
            "/codec/decode", {"s3db_b64": base64.b64encode(blob).decode("ascii")}
        )
    except ServiceError as err:
        _fail_service(err)
    data = result["xml"].encode("utf-8")
    if out_file:
        _write_file(out_file, data)
        click.echo(out_file)
    else:
        click.echo(data.decode("utf-8"), nl=False)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def roundtrip(client, file, as_json):
    """Round-trip check; exit 1 on any mismatch.

    Takes a .x3d file (xml -> binary -> xml) or an .s3db stream
    (decode -> re-encode -> decode).
    """
    raw = _read_file(file)
    if raw[:4] == b"S3DB":
        payload = {"s3db_b64": base64.b64encode(raw).decode("ascii")}
    else:
        payload = {"xml": raw.decode("utf-8", errors="replace")}
    try:
        result = client.call("/codec/roundtrip", payload)
    except ServiceError as err:
        _fail_service(err)
    if as_json:
        click.echo(json.dumps(result, sort_keys=True))
    else:
        status = "round-trip OK" if result["ok"] else "round-trip FAILED"
        click.echo(
            f"{status}: xml {result['xml_bytes']:,} B, binary {result['binary_bytes']:,} B "
            f"({result['reduction_pct']:.2f}% reduction)"
        )
        if result.get("detail"):
            click.echo(f"  {result['detail']}")
    sys.exit(EXIT_OK if result["ok"] else EXIT_FAILED)


@main.command()
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(), help="Directory of .x3d files.")
@click.option("--table/--json", "as_table", default=True, help="Text table (default) or JSON.")
@click.option("--no-compress", is_flag=True)
@click.pass_obj
def bench(client, corpus_dir, as_table, no_compress):
    """Compression benchmark over every .x3d file in a directory."""
    paths = sorted(Path(corpus_dir).glob("*.x3d"))
    if not paths:
        click.echo(f"error: no .x3d files in {corpus_dir}", err=True)
        sys.exit(EXIT_IO)
    files = [
        {"label": p.stem, "xml": p.read_text(encoding="utf-8")} for p in paths
    ]
    try:
        result = client.call("/bench/run", {"files": files, "compress": not no_compress})
    except ServiceError as err:
        _fail_service(err)
    if as_table:
        click.echo(result["table"])
    else:
        click.echo(
            json.dumps(
                {
                    "rows": result["rows"],
                    "average_reduction_pct": result["average_reduction_pct"],
                },
                sort_keys=True,
            )
        )


@main.command()
@click.argument("file", type=click.Path())
@click.option("--script", "script_file", required=True, type=click.Path(), help="JSONL event script.")
@click.option("--until", required=True, type=float, help="Simulation end time (seconds).")
@click.option("--tick-rate", default=None, type=float, help="Sampling rate override (Hz).")
@click.option("--config", "config_file", default=None, type=click.Path(),
              help=f"JSON config file (default ${CONFIG_ENV_VAR}).")
@click.option("--out", "out_file", default=None, help="Write the trace here instead of stdout.")
@click.pass_obj
def simulate(client, file, script_file, until, tick_rate, config_file, out_file):
    """Run the event model and emit the trace (JSON lines + summary)."""
    path = Path(file)
    xml = _read_file(file).decode("utf-8", errors="replace")
    script_lines = []
    for lineno, line in enumerate(_read_file(script_file).decode("utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            script_lines.append(json.loads(line))
        except json.JSONDecodeError as exc:
            click.echo(f"error: {script_file}:{lineno}: invalid JSON: {exc}", err=True)
            sys.exit(EXIT_IO)

    config = {}
    config_path = config_file or os.environ.get(CONFIG_ENV_VAR)
    if config_path:
        try:
            config = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: cannot load config {config_path}: {exc}", err=True)
            sys.exit(EXIT_IO)
    if tick_rate is not None:
        config["sample_rate"] = tick_rate

    req = {
        "xml": xml,
        "inlines": _sibling_inlines(path),
        "script": script_lines,
        "until": until,
        "config": config or {},
    }
    try:
        result = client.call("/simulate", req)
    except ServiceError as err:
        _fail_service(err)
    if out_file:
        _write_file(out_file, result["trace"].encode("utf-8"))
        click.echo(f"{result['record_count']} records -> {out_file}", err=True)
    else:
        click.echo(result["trace"], nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("scenery.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
