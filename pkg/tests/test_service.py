import base64
import json

import pytest
from fastapi.testclient import TestClient

from scenery.service import create_app
from scenery.xmlcodec import serialize_xml


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


BOX_XML = "<X3D><Scene><Shape><Box size='1 1 1'/></Shape></Scene></X3D>"


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok" and body["version"]


def test_parse_returns_canonical_xml(client):
    resp = client.post("/scenes/parse", json={"xml": BOX_XML})
    assert resp.status_code == 200
    assert 'size="1 1 1"' in resp.json()["xml"]


def test_parse_error_payload_carries_diagnostics(client):
    resp = client.post(
        "/scenes/parse", json={"xml": "<X3D><Scene><Cylinder/></Scene></X3D>"}
    )
    assert resp.status_code == 400
    detail = resp.json()["detail"]
    assert detail["error"] == "parse"
    assert detail["diagnostics"][0]["code"] == "UNSUPPORTED_ELEMENT"
    assert detail["diagnostics"][0]["line"] >= 1


def test_validate_reports_static_route_target(client):
    xml = (
        "<X3D><Scene>"
        "<StaticGroup><Transform DEF='T'/></StaticGroup>"
        "<PositionInterpolator DEF='PI' key='0 1' keyValue='0 0 0 1 1 1'/>"
        "<ROUTE fromNode='PI' fromField='value_changed' toNode='T' toField='set_translation'/>"
        "</Scene></X3D>"
    )
    resp = client.post("/scenes/validate", json={"xml": xml})
    assert resp.status_code == 200
    body = resp.json()
    assert not body["ok"]
    assert body["errors"][0]["code"] == "STATIC_ROUTE_TARGET"


def test_stats_with_inline_map(client):
    inline_xml = "<X3D><Scene><Shape><Box/></Shape></Scene></X3D>"
    xml = "<X3D><Scene><Inline url='\"sub.x3d\"'/></Scene></X3D>"
    resp = client.post(
        "/scenes/stats", json={"xml": xml, "inlines": {"sub.x3d": inline_xml}}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["shape_count"] == 1 and body["inline_count"] == 1


def test_promote(client):
    xml = "<X3D><Scene><Group><Shape><Box/></Shape></Group></Scene></X3D>"
    resp = client.post("/scenes/promote", json={"xml": xml})
    assert resp.status_code == 200
    assert "<StaticGroup>" in resp.json()["xml"]


def test_encode_decode_cycle(client):
    enc = client.post("/codec/encode", json={"xml": BOX_XML}).json()
    assert enc["binary_bytes"] < enc["xml_bytes"]
    blob = base64.b64decode(enc["s3db_b64"])
    assert blob[:4] == b"S3DB"
    dec = client.post("/codec/decode", json={"s3db_b64": enc["s3db_b64"]})
    assert dec.status_code == 200
    canonical = client.post("/scenes/parse", json={"xml": BOX_XML}).json()["xml"]
    assert dec.json()["xml"] == canonical


def test_decode_bad_magic_maps_to_error(client):
    blob = base64.b64encode(b"X3DB" + bytes(20)).decode()
    resp = client.post("/codec/decode", json={"s3db_b64": blob})
    assert resp.status_code == 400
    assert resp.json()["detail"]["error"] == "decode"
    assert "BadMagic" in resp.json()["detail"]["message"]


def test_roundtrip_ok(client):
    resp = client.post("/codec/roundtrip", json={"xml": BOX_XML})
    body = resp.json()
    assert body["ok"] is True and body["detail"] is None


def test_roundtrip_corrupted_binary_reports_failure(client):
    enc = client.post("/codec/encode", json={"xml": BOX_XML}).json()
    blob = bytearray(base64.b64decode(enc["s3db_b64"]))
    blob[-1] ^= 0xFF
    resp = client.post(
        "/codec/roundtrip", json={"s3db_b64": base64.b64encode(bytes(blob)).decode()}
    )
    body = resp.json()
    assert body["ok"] is False
    assert "decode failed" in body["detail"]


def test_roundtrip_requires_exactly_one_input(client):
    resp = client.post("/codec/roundtrip", json={})
    assert resp.status_code == 400
    resp = client.post(
        "/codec/roundtrip", json={"xml": BOX_XML, "s3db_b64": "QUJD"}
    )
    assert resp.status_code == 400


def test_bench_report_reproduces_reference_numbers(client):
    rows = [
        {"label": "Georgia Scene", "xml_bytes": 11791, "binary_bytes": 4808},
        {"label": "Savannah Scene", "xml_bytes": 98078, "binary_bytes": 37494},
        {"label": "Train Station", "xml_bytes": 54717, "binary_bytes": 25481},
        {"label": "Train Engine", "xml_bytes": 502209, "binary_bytes": 63766},
        {"label": "Train Car", "xml_bytes": 391858, "binary_bytes": 73575},
    ]
    resp = client.post("/bench/report", json={"rows": rows})
    body = resp.json()
    assert [r["reduction_pct"] for r in body["rows"]] == [59.22, 61.77, 53.43, 87.30, 81.22]
    assert body["average_reduction_pct"] == 68.59
    assert "Average Reduction" in body["table"]


def test_bench_run_encodes_files(client):
    resp = client.post(
        "/bench/run", json={"files": [{"label": "box", "xml": BOX_XML}]}
    )
    body = resp.json()
    assert body["rows"][0]["label"] == "box"
    assert body["rows"][0]["binary_bytes"] > 0


def test_generate_composite(client):
    resp = client.post(
        "/generate", json={"target": "composite", "params": {"mesh_density": 64}}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert sorted(body["files"]) == [
        "Georgia.x3d",
        "Savannah.x3d",
        "Station.x3d",
        "TrainCar.x3d",
        "TrainEngine.x3d",
    ]
    assert len(body["manifest"]["viewpoints"]) == 9


def test_generate_rejects_bad_params(client):
    resp = client.post(
        "/generate", json={"target": "georgia", "params": {"car_count": 0}}
    )
    assert resp.status_code == 400
    assert resp.json()["detail"]["error"] == "params"


def test_generate_unknown_target_is_422(client):
    resp = client.post("/generate", json={"target": "atlanta"})
    assert resp.status_code == 422


def test_simulate_end_to_end(client):
    gen = client.post(
        "/generate", json={"target": "composite", "params": {"mesh_density": 64}}
    ).json()
    files = gen["files"]
    resp = client.post(
        "/simulate",
        json={
            "xml": files["Georgia.x3d"],
            "inlines": {k: v for k, v in files.items() if k != "Georgia.x3d"},
            "script": [{"at": 1.0, "kind": "touch", "node": "TrainBody"}],
            "until": 2.0,
            "config": {"sample_rate": 10},
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["record_count"] > 0
    lines = body["trace"].strip().splitlines()
    assert json.loads(lines[-1])["summary"]["records"] == body["record_count"]
    assert any("TrainTouch.touchTime" in ln for ln in lines)


def test_simulate_bad_script_maps_to_error(client):
    resp = client.post(
        "/simulate",
        json={
            "xml": BOX_XML,
            "script": [{"at": -1, "kind": "touch", "node": "X"}],
            "until": 1.0,
        },
    )
    assert resp.status_code == 400
    assert resp.json()["detail"]["error"] == "simulation"


def test_cli_against_live_http_server(tmp_path):
    """The thin client speaks real HTTP with --server."""
    import socket
    import threading
    import time as _time

    import uvicorn
    from click.testing import CliRunner

    from scenery.cli import main
    from scenery.service import create_app

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()

    config = uvicorn.Config(create_app(), host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        for _ in range(200):
            if server.started:
                break
            _time.sleep(0.05)
        assert server.started, "uvicorn failed to start"
        base = ["--server", f"http://127.0.0.1:{port}"]
        runner = CliRunner()
        result = runner.invoke(
            main, base + ["gen", "georgia", "--out", str(tmp_path), "--mesh-density", "32"]
        )
        assert result.exit_code == 0, result.output
        result = runner.invoke(main, base + ["validate", str(tmp_path / "Georgia.x3d")])
        assert result.exit_code == 0, result.output
        result = runner.invoke(main, base + ["roundtrip", str(tmp_path / "Georgia.x3d")])
        assert result.exit_code == 0, result.output
    finally:
        server.should_exit = True
        thread.join(timeout=10)
