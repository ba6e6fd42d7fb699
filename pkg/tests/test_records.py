import io
import json

from analytics.records import (
    DETUNING_HEADER,
    CheckResult,
    DetuningRow,
    SchemeRecord,
    csv_text,
    dumps,
    fmt,
    write_csv,
)


def test_fmt_keeps_17_digits():
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3
    assert fmt(7) == "7"


def test_csv_header_and_rows():
    text = csv_text(DETUNING_HEADER, [DetuningRow(0.0, 0.25, 1.0, 1.0)])
    assert text.splitlines() == ["detuning,weight,fidelity_before,fidelity_after", "0,0.25,1,1"]


def test_write_csv_accepts_tuples():
    buf = io.StringIO()
    write_csv(("a", "b"), [(0.5, 2)], buf)
    assert buf.getvalue() == "a,b\n0.5,2\n"


def test_optional_fields_are_dropped():
    record = SchemeRecord(chi=0.02, pump=10.0, detector=10.0, detection_weight=1.6e-7, fidelity=1.0)
    payload = json.loads(dumps(record))
    assert "chi_exponent" not in payload and "chi_values" not in payload


def test_dumps_round_trips_doubles():
    record = SchemeRecord(chi=0.1, pump=10.0, detector=10.0, detection_weight=1 / 3, fidelity=0.1 + 0.2)
    payload = json.loads(dumps(record))
    assert payload["detection_weight"] == 1 / 3
    assert payload["fidelity"] == 0.1 + 0.2


def test_check_result_status():
    assert CheckResult("x", "pass").passed
    assert CheckResult("x", "skipped").passed
    assert not CheckResult("x", "fail").passed
