import csv
import io
import json

import pytest

from isoq.cli import emit_table, fmt_number, load_descriptor, parse_complex, run
from isoq.curves import Bryant, StandardCycle
from isoq.meshio import read_ply


def parse_out(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_and_format_complex():
    assert parse_complex("1+0i") == 1
    assert parse_complex("0.5-2i") == 0.5 - 2j
    assert parse_complex("3") == 3
    assert parse_complex(fmt_number(0.1 + 1 / 3j)) == 0.1 + 1 / 3j
    with pytest.raises(Exception):
        parse_complex("abc")


def test_emit_table_csv_and_json():
    buf = io.StringIO()
    emit_table([{"a": 1, "b": 2 + 1j}], "csv", buf)
    text = buf.getvalue()
    assert "\r\n" in text
    assert text.splitlines()[0] == "a,b"
    buf = io.StringIO()
    emit_table([{"a": 1}], "json", buf)
    assert json.loads(buf.getvalue()) == [{"a": 1}]


def test_load_descriptor(tmp_path, caplog):
    assert isinstance(load_descriptor('{"type":"cycle"}'), StandardCycle)
    assert isinstance(load_descriptor('{"type":"bryant","g":"z","h":"z^3"}'), Bryant)
    p = tmp_path / "c.json"
    p.write_text('{"type":"cycle"}')
    assert isinstance(load_descriptor(str(p)), StandardCycle)
    with caplog.at_level("WARNING"):
        load_descriptor('{"type":"wcurve","m":3,"n":1}')
    assert "cycle" in caplog.text


def test_invariants_bending(capsys):
    assert run(["invariants", "--curve", '{"type":"wcurve","m":5,"n":1}', "--at", "1+0i"]) == 0
    row = parse_out(capsys.readouterr().out)[0]
    assert abs(parse_complex(row["kappa"]) + 3.01785714) < 1e-7


def test_table_wcurves(capsys):
    assert run(["table", "wcurves", "--q", "5,7,5/3"]) == 0
    rows = parse_out(capsys.readouterr().out)
    assert len(rows) == 3
    for r in rows:
        for key in ("delta", "gamma"):
            got, want = parse_complex(r[key]), parse_complex(r[key + "_formula"])
            assert abs(got - want) < 1e-8 * max(1, abs(want))


def test_mesh_obj(tmp_path):
    out = tmp_path / "c.obj"
    assert run(["mesh", "--curve", "cycle", "--kind", "cmc1_h3", "--view", "3d", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("v ")
    assert any(line.startswith("f ") for line in text.splitlines())


def test_mesh_ply(tmp_path):
    out = tmp_path / "s.ply"
    assert run(["mesh", "--curve", '{"type":"wcurve","m":5,"n":1}', "--kind", "super_s4",
                "--r-in", "0.3", "--nu", "8", "--nv", "8", "--out", str(out)]) == 0
    V, _, _ = read_ply(out)
    assert V.shape == (64, 5)


def test_synthesize_and_deform(tmp_path, capsys):
    save = tmp_path / "f.json"
    assert run(["synthesize", "--D", "1", "--G", "0.5+0.3*z", "--at", "0.3+0.2i",
                "--save", str(save)]) == 0
    capsys.readouterr()
    assert run(["deform", "--curve", str(save), "--ahat", "exp(0.1*z)", "--at", "0.3+0.2i",
                "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["contact_order"] == 4


def test_contact_with_osculating_cycle(capsys):
    assert run(["contact", "--curve", '{"type":"wcurve","m":5,"n":1}', "--other", "osculating",
                "--at", "1+0.3i", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["contact_order"] == 5


def test_ends(capsys):
    assert run(["ends", "--curve", '{"type":"cycle"}', "--kind", "cmc1_h3", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 1


def test_exit_codes(capsys):
    assert run(["invariants", "--curve", '{"type":"nope"}']) == 2
    assert run(["bogus"]) == 2
    assert run(["synthesize", "--D", "z", "--G", "0"]) == 3
    assert run(["selftest", "--only", "1"]) == 0
    capsys.readouterr()
