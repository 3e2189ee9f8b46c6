import json

import pytest

from scenery.bench import compression_report, render_table, report_as_dict

PAPER_ROWS = [
    ("Georgia Scene", 11_791, 4_808),
    ("Savannah Scene", 98_078, 37_494),
    ("Train Station", 54_717, 25_481),
    ("Train Engine", 502_209, 63_766),
    ("Train Car", 391_858, 73_575),
]
EXPECTED = [59.22, 61.77, 53.43, 87.30, 81.22]


def test_reference_rows_exact():
    report = compression_report(PAPER_ROWS)
    assert [r.reduction_pct for r in report.rows] == EXPECTED
    assert report.average_reduction_pct == 68.59


def test_rounding_is_two_decimals():
    report = compression_report([("x", 3, 1)])
    assert report.rows[0].reduction_pct == 66.67


def test_zero_xml_size_rejected():
    with pytest.raises(ValueError):
        compression_report([("x", 0, 1)])
    with pytest.raises(ValueError):
        compression_report([("x", -5, 1)])


def test_empty_report():
    report = compression_report([])
    assert report.rows == () and report.average_reduction_pct == 0.0


def test_table_layout():
    table = render_table(compression_report(PAPER_ROWS))
    lines = table.splitlines()
    assert lines[0].startswith("File Size (in bytes)")
    assert ".x3d" in lines[0] and ".s3db" in lines[0] and "% Reduction" in lines[0]
    assert lines[2].startswith("Georgia Scene")
    assert "11,791" in lines[2] and "4,808" in lines[2] and lines[2].endswith("59.22")
    assert lines[-1].startswith("Average Reduction")
    assert lines[-1].endswith("68.59")
    # columns align: every row ends at the same width for the last column
    assert "87.30" in table  # two-decimal rendering, trailing zero kept


def test_report_as_dict_json_safe():
    d = report_as_dict(compression_report(PAPER_ROWS))
    json.dumps(d)
    assert d["average_reduction_pct"] == 68.59
    assert d["rows"][3]["reduction_pct"] == 87.30
