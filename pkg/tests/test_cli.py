import json
from pathlib import Path

import pytest

from ioconf import cli
from ioconf.models import model_to_json, validate_model

from conftest import BCT_LTS, IMPL_A_EXTRA, IMPL_B, SPEC_A, SPEC_B, IMPL_A


def _write(tmp_path: Path, name: str, raw: dict) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def _run(capsys, *argv) -> tuple[int, dict]:
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else {})


def test_validate_ok(tmp_path, capsys):
    path = _write(tmp_path, "m.json", BCT_LTS)
    code, payload = _run(capsys, "validate", path)
    assert code == 0
    assert payload == {"valid": True, "states": 5, "transitions": 8}


def test_validate_rejects_then_normalizes(tmp_path, capsys):
    raw = dict(BCT_LTS, transitions=BCT_LTS["transitions"] + [["s1", "tau", "s1"]])
    path = _write(tmp_path, "bad.json", raw)
    code, payload = _run(capsys, "validate", path)
    assert code == 2
    assert payload["valid"] is False
    out_path = tmp_path / "fixed.json"
    code, payload = _run(capsys, "validate", path, "--normalize",
                         "--out", str(out_path))
    assert code == 0
    assert payload["valid"] is True
    fixed = validate_model(json.loads(out_path.read_text()))
    assert len(fixed.transitions) == 8


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["conf"])  # missing positionals
    assert exc.value.code == 1


def test_conf_command(tmp_path, capsys):
    spec = _write(tmp_path, "spec.json", SPEC_A)
    impl = _write(tmp_path, "impl.json", IMPL_A)
    code, payload = _run(capsys, "conf", spec, impl,
                         "--D", "(a+b)*ax", "--F", "ba*b")
    assert code == 3
    assert payload["outcome"] == "violates"
    assert payload["clause"] == "F"
    code, payload = _run(capsys, "conf", spec, impl)
    assert code == 0
    assert payload == {"outcome": "conforms", "witness": None, "clause": None}


def test_conf_with_fsa_file(tmp_path, capsys):
    from ioconf.automata import fsa_to_json, parse_regex

    spec = _write(tmp_path, "spec.json", SPEC_A)
    impl = _write(tmp_path, "impl.json", IMPL_A)
    fsa = parse_regex("(a+b)*ax", {"a", "b", "x"})
    dfile = tmp_path / "d.json"
    dfile.write_text(fsa_to_json(fsa))
    code_re, payload_re = _run(capsys, "conf", spec, impl, "--D", "(a+b)*ax")
    code_file, payload_file = _run(capsys, "conf", spec, impl,
                                   "--D", f"@{dfile}")
    assert (code_re, payload_re) == (code_file, payload_file)


def test_ioco_command(tmp_path, capsys):
    spec = _write(tmp_path, "spec.json", SPEC_A)
    impl = _write(tmp_path, "impl.json", IMPL_A_EXTRA)
    code, payload = _run(capsys, "ioco", spec, impl)
    assert code == 3
    assert payload["outcome"] == "violates"
    assert payload["witness"] == ["b", "x"]
    code, _ = _run(capsys, "ioco", spec, spec)
    assert code == 0


def test_gen_and_run_roundtrip(tmp_path, capsys):
    spec = _write(tmp_path, "spec.json", SPEC_B)
    impl = _write(tmp_path, "impl.json", IMPL_B)
    fm_dir = tmp_path / "fm"
    code, payload = _run(capsys, "gen", spec, "--m", "1",
                         "--kind", "faultmodel", "--transforms", "all",
                         "--out", str(fm_dir))
    assert code == 0
    assert payload["purposes"] > 0
    # generated files re-validate as tester models
    for tp_file in sorted(fm_dir.glob("tp*.json")):
        code_v, _ = _run(capsys, "validate", str(tp_file))
        assert code_v == 0
    code, report = _run(capsys, "run", impl, str(fm_dir))
    assert code == 3
    assert report["aggregate"] == "fail"
    code, report = _run(capsys, "run", spec, str(fm_dir))
    assert code == 0
    assert report["aggregate"] == "pass"


def test_gen_single_purpose(tmp_path, capsys):
    spec = _write(tmp_path, "spec.json", SPEC_B)
    out = tmp_path / "tp"
    code, payload = _run(capsys, "gen", spec, "--kind", "singletp",
                         "--out", str(out))
    assert code == 0
    assert payload["purposes"] == 1
    raw = json.loads((out / "tp00000.json").read_text())
    assert ["fail", "x", "fail"] in raw["transitions"]


def test_gen_capped_to_zero(tmp_path, capsys):
    spec = _write(tmp_path, "spec.json", SPEC_B)
    out = tmp_path / "fm0"
    code, payload = _run(capsys, "gen", spec, "--m", "1",
                         "--max-purposes", "0", "--out", str(out))
    assert code == 0
    assert payload == {"kind": "faultmodel", "purposes": 0, "capped": True,
                       "out": str(out)}
    assert (out / "provenance.json").exists()
    code, report = _run(capsys, "run", _write(tmp_path, "impl.json", IMPL_B),
                        str(out))
    assert code == 0  # empty fault model passes everything


def test_gen_schemes(tmp_path, capsys):
    spec = _write(tmp_path, "spec.json", SPEC_B)
    out = tmp_path / "ss"
    code, payload = _run(capsys, "gen", spec, "--m", "1",
                         "--kind", "schemes", "--out", str(out))
    assert code == 0
    assert payload["kind"] == "schemes"
    assert payload["purposes"] > 0


def test_lowerbound_command(capsys):
    code, payload = _run(capsys, "lowerbound", "--m", "5")
    assert code == 0
    assert payload["F_m"] == 8
    assert payload["F_m"] >= payload["bound"]


def test_defeat_command(tmp_path, capsys):
    spec_raw = {"inputs": ["a"], "outputs": ["x"], "states": ["s0"],
                "initial": "s0", "transitions": [["s0", "a", "s0"]]}
    spec = _write(tmp_path, "spec.json", spec_raw)
    fm_dir = tmp_path / "fm"
    code, _ = _run(capsys, "gen", spec, "--m", "2", "--out", str(fm_dir))
    assert code == 0
    code, impl_raw = _run(capsys, "defeat", str(fm_dir))
    assert code == 0
    impl = _write(tmp_path, "impl.json", impl_raw)
    code, report = _run(capsys, "run", impl, str(fm_dir))
    assert code == 0
    code, verdict = _run(capsys, "ioco", spec, impl)
    assert code == 3


def test_classify_command(tmp_path, capsys):
    from ioconf.runner import loop_spec_01x
    from ioconf.models import model_to_dict

    path = _write(tmp_path, "spec.json", model_to_dict(loop_spec_01x()))
    code, payload = _run(capsys, "classify", path)
    assert code == 0
    assert payload["input_enabled"] is True
    assert payload["deterministic"] is True


def test_delta_command(tmp_path, capsys):
    from conftest import DELTA_BASE

    path = _write(tmp_path, "m.json", DELTA_BASE)
    code, payload = _run(capsys, "delta", path)
    assert code == 0
    assert ["s1", "delta", "s1"] in payload["transitions"]
    assert ["s3", "delta", "s3"] in payload["transitions"]
    assert "delta" in payload["outputs"]


def test_otr_command(tmp_path, capsys):
    path = _write(tmp_path, "m.json", BCT_LTS)
    code, payload = _run(capsys, "otr", path)
    assert code == 0
    assert payload["finals"] == payload["states"]
    assert ["s3", "eps", "s0"] in payload["transitions"]
    code = cli.main(["otr", path, "--dot"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("digraph")
    assert "doublecircle" in out


def test_outputs_are_deterministic(tmp_path, capsys):
    spec = _write(tmp_path, "spec.json", SPEC_B)
    runs = set()
    for _ in range(2):
        code = cli.main(["otr", spec])
        runs.add(capsys.readouterr().out)
    assert len(runs) == 1
