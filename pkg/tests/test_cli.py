import json

from pytest import raises

from heckelie import cli, heckeverify
from heckelie.cli import SCHEMA_VERSION, build_parser, main, table_row


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_verify_json(capsys):
    code, out = run(capsys, "verify", "--p", "7", "--r", "2", "--format", "json")
    assert code == 0
    document = json.loads(out)
    assert document["schema_version"] == SCHEMA_VERSION
    assert document["generated_for"] == [["7", "2"]]
    entry = document["entries"][0]
    assert (entry["h"], entry["n_diff"], entry["n_sum"]) == ("1", "7", "25")
    assert (entry["n_plus"], entry["n_minus"]) == ("16", "9")
    assert entry["invariant_multiplicities"] == {
        "zero": "6",
        "u": "25",
        "v": "25",
        "split": "22",
        "nonsplit": "28",
    }
    assert entry["checks"]
    assert document["summary"]["failed"] == "0"
    assert "generated_at" not in document

    # Byte-deterministic and stable under a parse / serialise round trip
    assert json.dumps(document, indent=2, sort_keys=True) + "\n" == out
    assert run(capsys, "verify", "--p", "7", "--r", "2", "--format", "json")[1] == out


def test_verify_formats(capsys):
    code, out = run(capsys, "verify", "--p", "5", "--r", "2")
    assert code == 0
    assert json.loads(out)["entries"][0]["n_diff"] == "0"

    code, out = run(capsys, "verify", "--p", "3", "5", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,r,h,n_diff,n_sum,n_plus,n_minus,parity_ok"
    assert lines[1] == "3,2,1,1,1,1,0,true"
    assert lines[2] == "5,2,-,0,8,4,4,true"

    code, out = run(capsys, "verify", "--p", "3", "--format", "text")
    assert code == 0
    assert out.startswith("p=3 r=2 h=1 n_diff=1 n_sum=1 n_plus=1 n_minus=0\n")


def test_verify_options(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out = run(capsys, "verify", "--p", "7", "--out", str(target), "--timestamp")
    assert code == 0
    assert out == ""
    document = json.loads(target.read_text(encoding="utf-8"))
    assert "generated_at" in document

    code, out = run(capsys, "verify", "--p", "7", "--nonresidue", "5")
    assert code == 0
    assert json.loads(out)["entries"][0]["n_diff"] == "7"

    code, out = run(capsys, "-v", "verify", "--p", "3", "--deep")
    assert code == 0


def test_verify_invalid_input(capsys):
    assert run(capsys, "verify", "--p", "9", "--r", "2")[0] == 2
    assert run(capsys, "verify", "--p", "7", "--r", "1")[0] == 2
    assert run(capsys, "verify", "--p", "7", "--nonresidue", "2")[0] == 2
    with raises(SystemExit) as info:
        main(["verify"])
    assert info.value.code == 2


def test_table(capsys):
    code, out = run(capsys, "table", "--pmax", "11", "--r", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,r,h,n_diff,n_sum,n_plus,n_minus,parity_ok"
    assert "7,2,1,7,25,16,9,true" in lines
    assert "11,2,1,11,105,58,47,true" in lines
    assert len(lines) == 5

    code, out = run(capsys, "table", "--pmax", "3", "--r", "2")
    assert out.splitlines()[1:] == ["3,2,1,1,1,1,0,true"]

    code, out = run(capsys, "table", "--pmax", "7", "--format", "json", "--nonresidue", "3")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [row["p"] for row in rows] == ["3", "5", "7"]

    code, out = run(capsys, "table", "--pmax", "5", "--format", "text")
    assert code == 0
    assert len(out.splitlines()) == 3

    assert run(capsys, "table", "--pmax", "2")[0] == 2


def test_table_row():
    assert table_row(23, 2) == {
        "p": "23",
        "r": "2",
        "h": "3",
        "n_diff": "69",
        "n_sum": "1001",
        "n_plus": "535",
        "n_minus": "466",
        "parity_ok": "true",
    }
    assert table_row(13, 3)["h"] == "-"


def test_table_row_single_n_diff(monkeypatch):
    calls = []
    original = heckeverify.n_diff_formula

    def counted(*args, **kwargs):
        calls.append(args)
        return original(*args, **kwargs)

    monkeypatch.setattr(cli, "n_diff_formula", counted)
    monkeypatch.setattr(heckeverify, "n_diff_formula", counted)
    assert table_row(31, 3)["n_diff"] == str(31**3 * 3)
    assert calls == [(31, 3, None)]


def test_classnum(capsys):
    code, out = run(capsys, "classnum", "--p", "23")
    assert code == 0
    assert out == "3\ndirichlet: true\ngross: true\n"

    code, out = run(capsys, "classnum", "--p", "7", "--format", "json")
    assert code == 0
    assert json.loads(out)["h"] == "1"

    code, out = run(capsys, "classnum", "--p", "3")
    assert code == 0
    assert out.startswith("1\n")

    assert run(capsys, "classnum", "--p", "13")[0] == 2


def test_parser():
    args = build_parser().parse_args(["table", "--pmax", "31"])
    assert args.r == 2
    assert args.format == "csv"
    args = build_parser().parse_args(["verify", "--p", "7"])
    assert args.r == [2]
    assert args.format == "json"
    assert not args.deep
