import json
import math

import numpy as np
import pytest

from extgev.cli import main
from extgev.io import SchemaError, dumps, read_signal, signal_from_dict, signal_to_dict, write_signal
from extgev.testfn import hermite
from extgev.tfr import Axis, SampledSignal


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_weights_csv(capsys):
    rc, out, _ = run(capsys, "weights", "--tau", "1", "--sigma", "2", "--pmax", "50", "--format", "csv")
    assert rc == 0
    rows = out.strip().splitlines()
    assert rows[0].startswith("p,log_M")
    assert len(rows) == 52  # header plus p = 0..50
    p, log_m = rows[3].split(",")[:2]
    assert p == "2" and float(log_m) == pytest.approx(4 * math.log(2), rel=1e-15)


def test_weights_json(capsys):
    rc, out, _ = run(capsys, "weights", "--tau", "0.5", "--sigma", "3", "--pmax", "20", "--format", "json")
    doc = json.loads(out)
    assert rc == 0 and doc["conditions"]["all_hold"] is True
    assert len(doc["table"]) == 21


@pytest.mark.parametrize("argv", [
    ("weights", "--tau", "0", "--sigma", "2"),
    ("weights", "--tau", "1", "--sigma", "2", "--pmax", "2"),
    ("weights", "--tau", "1", "--sigma", "1"),
    ("weights", "--tau", "abc", "--sigma", "2"),
    ("verify", "--suite", "nope"),
    ("lambert", "--xmin", "5", "--xmax", "1"),
    ("bogus",),
])
def test_input_errors_exit_2(capsys, argv):
    try:
        rc = main(list(argv))
    except SystemExit as exc:
        rc = exc.code
    assert rc == 2


def test_lambert_verb(capsys):
    rc, out, _ = run(capsys, "lambert", "--x", "0", "--x", str(math.e), "--format", "json")
    doc = json.loads(out)
    assert rc == 0
    assert doc[0]["W"] == 0.0 and abs(doc[1]["W"] - 1) <= 1e-12 and doc[1]["certified"] == 1


def test_assoc_verb(capsys):
    rc, out, _ = run(capsys, "assoc", "--tau", "1", "--sigma", "2", "--xmin", "2", "--xmax", "1e6",
                     "--count", "20", "--sandwich", "--dual", "5", "--format", "json")
    doc = json.loads(out)
    assert rc == 0 and doc["sandwich"]["validated"] is True
    assert doc["dual"]["value"] == pytest.approx(doc["dual"]["log_M"], abs=1e-6)


def test_tfr_fixture_values(capsys, fixture_signal):
    rc, out, _ = run(capsys, "tfr", "--kind", "wigner", "--signal", fixture_signal,
                     "--x-center", "0", "--x-step", "0.0625", "--x-count", "1",
                     "--w-center", "0", "--w-step", "0.1", "--w-count", "1")
    assert rc == 0
    re, im = json.loads(out)["values"][0]
    assert re == pytest.approx(2.0, abs=1e-12) and abs(im) <= 1e-12

    rc, out, _ = run(capsys, "tfr", "--kind", "stft", "--signal", fixture_signal, "--mode", "fast",
                     "--format", "csv")
    assert rc == 0
    row = next(r for r in out.splitlines()[1:] if r.startswith("0,0,"))
    assert float(row.split(",")[2]) == pytest.approx(1.0, abs=1e-12)


def test_tfr_exit_codes(capsys, fixture_signal, tmp_path):
    rc, _, err = run(capsys, "tfr", "--kind", "stft", "--signal", fixture_signal,
                     "--x-center", "0.01", "--x-step", "0.0625", "--x-count", "2", "--mode", "fast")
    assert rc == 3 and "lattice" in err
    rc, _, _ = run(capsys, "tfr", "--kind", "stft", "--signal", str(tmp_path / "missing.json"))
    assert rc == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"axis": {"center": 0, "step": 0.1, "count": 4}, "values": [[0, 0]]}))
    rc, _, err = run(capsys, "tfr", "--kind", "stft", "--signal", str(bad))
    assert rc == 2 and "values" in err


def test_outputs_are_byte_identical(tmp_path, fixture_signal):
    paths = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        assert main(["tfr", "--kind", "grossmann-royer", "--signal", fixture_signal, "--mode", "fast",
                     "--out", str(p)]) == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]
    a = tmp_path / "w1.csv"
    b = tmp_path / "w2.csv"
    main(["weights", "--tau", "2", "--sigma", "1.5", "--out", str(a)])
    main(["weights", "--tau", "2", "--sigma", "1.5", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_fit_verb(capsys):
    rc, out, _ = run(capsys, "fit", "--family", "hermite", "--k", "2", "--K", "6", "--no-l2")
    doc = json.loads(out)
    assert rc == 0 and doc["finite"] is True and doc["l2"] is None


def test_verify_lambert(capsys, tmp_path):
    rep = tmp_path / "rep.json"
    rc, out, _ = run(capsys, "verify", "--suite", "lambert", "--json", str(rep))
    assert rc == 0 and "W(e) = 1" in out
    doc = json.loads(rep.read_text())
    assert doc["pass"] is True
    assert all(r["anchor"] for r in doc["records"])
    assert doc["config"]["seed"] == 20240917


@pytest.mark.parametrize("payload", [
    [],
    {"axis": {"center": 0, "step": 0.1}, "values": []},
    {"axis": {"center": 0, "step": 0.1, "count": 2}, "values": [[1, 0], [1]]},
    {"axis": {"center": 0, "step": 0.1, "count": 2}, "values": [[1, 0], ["a", 0]]},
    {"axis": {"center": 0, "step": -0.1, "count": 2}, "values": [[1, 0], [1, 0]]},
    {"axis": {"center": True, "step": 0.1, "count": 2}, "values": [[1, 0], [1, 0]]},
])
def test_schema_errors(payload):
    with pytest.raises(SchemaError):
        signal_from_dict(payload)


def test_signal_round_trip(tmp_path):
    s = SampledSignal.from_function(hermite(3), Axis(0.25, 0.05, 64))
    p = tmp_path / "s.json"
    write_signal(s, p)
    back = read_signal(p)
    assert back.axis == s.axis and np.array_equal(back.values, s.values)
    assert signal_to_dict(back) == signal_to_dict(s)


def test_dumps_float_format():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps([math.nan, math.inf]) == '["nan", "inf"]'
    assert dumps({"b": 1, "a": [1.5, 2]}) == '{\n  "b": 1,\n  "a": [1.5, 2]\n}'


def test_verify_all_report(tmp_path, capsys):
    import time

    rep = tmp_path / "all.json"
    t0 = time.perf_counter()
    rc = main(["verify", "--suite", "all", "--json", str(rep)])
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    doc = json.loads(rep.read_text())
    assert elapsed < 60
    assert all(r["anchor"] for r in doc["records"])
    assert doc["pass"] == all(r["pass"] for r in doc["records"])
    # the integrability records are the known failures at cutoffs 1e4 / 1e6
    failing = {r["anchor"] for r in doc["records"] if not r["pass"]}
    assert failing <= {"integrability-condition"}
    assert rc == (0 if doc["pass"] else 1)
