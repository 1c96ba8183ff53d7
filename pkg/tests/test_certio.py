import json

import pytest
from conftest import GOLDEN

from conerigid import certio
from conerigid.cli import main

JOBS = GOLDEN / "jobs"
CERTS = sorted(GOLDEN.glob("*.cert.json"))
MINIMAL = {"schema": 1, "kind": "untwist",
           "payload": {"model": "V", "n": 3, "m": 1, "marks": [{"id": "l", "kind": "section_pair", "mult": "4"}]}}


def emit(job_path):
    job = certio.parse_job(job_path.read_text())
    return certio.emit_certificate(certio.run_job(job), job)


@pytest.mark.parametrize("cert", CERTS, ids=lambda p: p.name)
def test_golden_stable(cert):
    job = JOBS / cert.name.replace(".cert.json", ".json")
    first, second = emit(job), emit(job)
    assert first == second == cert.read_text()
    assert certio.verify(first).ok


def test_untwist_golden_step_line():
    d = json.loads((GOLDEN / "untwist_n3_nu4.cert.json").read_text())
    assert d["result"]["steps"][0]["line"].startswith("n: 3 -> 1 via tau_l")


def test_terminal_empty_word():
    d = json.loads((GOLDEN / "untwist_terminal.cert.json").read_text())
    assert d["result"]["word"] == "[]" and d["result"]["steps"] == []


def test_q2_golden_final_line():
    d = json.loads((GOLDEN / "exclude_q2.cert.json").read_text())
    assert d["result"]["verdict"] == "excluded"
    assert d["result"]["trace"][-1]["name"] == "alpha1 > 2n^2 contradiction"


def test_schema_round_trip():
    job = certio.parse_job(json.dumps(MINIMAL))
    again = certio.parse_job(certio.serialize_job(job))
    assert again == job
    assert certio.serialize_job(again) == certio.serialize_job(job)


def test_schema_errors():
    with pytest.raises(certio.SchemaError, match="missing job kind"):
        certio.parse_job("")
    with pytest.raises(certio.SchemaError, match="missing job kind"):
        certio.parse_job("{}")
    bad = dict(MINIMAL, schema=99)
    with pytest.raises(certio.SchemaError, match="schema"):
        certio.parse_job(json.dumps(bad))
    dec = json.loads(json.dumps(MINIMAL))
    dec["payload"]["marks"][0]["mult"] = 4.5
    with pytest.raises(certio.SchemaError):
        certio.parse_job(json.dumps(dec))


def test_ladder_error():
    job = certio.parse_job((JOBS / "exclude_q2.json").read_text())
    payload = json.loads(certio.serialize_job(job))["payload"]
    payload["graph"]["nu"] = ["2", "3"]
    with pytest.raises(certio.SchemaError, match="ladder not non-increasing"):
        certio.typed(certio.make_job("exclude", payload))


def test_verify_detects_tampering():
    text = (GOLDEN / "exclude_general.cert.json").read_text()
    d = json.loads(text)
    d["result"]["verdict"] = "not-excluded"
    assert not certio.verify(certio.dumps(d)).ok
    d = json.loads((GOLDEN / "untwist_n3_nu4.cert.json").read_text())
    d["result"]["steps"][0]["n_after"] = "2"
    assert not certio.verify(certio.dumps(d)).ok


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["untwist", str(JOBS / "untwist_n3_nu4.json")]) == 0
    assert main(["untwist", str(JOBS / "untwist_two_maximal.json")]) == 2
    assert "Prop (iii)" in capsys.readouterr().err
    assert main(["exclude", str(JOBS / "exclude_infeasible.json")]) == 2
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert main(["untwist", str(empty)]) == 2
    assert "missing job kind" in capsys.readouterr().err
    assert main(["verify", str(GOLDEN / "exclude_q2.cert.json")]) == 0
    assert capsys.readouterr().out.strip() == "verified"
    assert main(["chi", "--n", "2", "--m", "0"]) == 0
    assert capsys.readouterr().out.strip() == "15"
    assert main(["lattice", "triple", "--div", "1", "0", "--div", "1", "0", "--div", "1", "0"]) == 0
    assert capsys.readouterr().out.strip() == "4"
