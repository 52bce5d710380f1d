"""
Command-line front end: reports, exit codes and input errors
"""

import json
import shutil

import pytest

from cli import build_parser, main, parse_caps
from errors import SpecFileError
from models import Caps


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def spec(data_dir):
    return lambda name: str(data_dir / name)


class TestCommands:
    def test_algebra_info(self, capsys, spec):
        code, report = _run(capsys, "algebra-info", spec("a2.json"))
        assert code == 0
        assert report["results"]["dim"] == 3
        assert report["results"]["vertices"] == ["1", "2"]
        assert report["results"]["provenance"] == "quiver"

    def test_resolve(self, capsys, spec):
        code, report = _run(capsys, "resolve", spec("a2.json"), spec("modules/a2_s1.json"), "--steps", "3")
        assert code == 0
        assert report["results"]["tower_dims"] == [1, 1, 0, 0]
        assert report["results"]["pd"] == "1"
        assert report["results"]["decompositions"][1] == [{"summand": "S(2)", "dim": 1, "multiplicity": 1}]

    def test_resolve_rotation(self, capsys, spec):
        code, report = _run(capsys, "resolve", spec("lambda_i.json"), spec("modules/lambda_i_s1.json"), "--caps", '{"pd_cap": 4}')
        assert code == 3
        assert report["results"]["tower_dims"] == [1, 1, 1, 1]
        assert [d[0]["summand"] for d in report["results"]["decompositions"]] == ["S(1)", "S(2)", "S(3)", "S(1)"]
        assert any(w.startswith("Inconclusive") for w in report["warnings"])

    def test_recollement(self, capsys, spec):
        code, report = _run(capsys, "recollement", spec("a2.json"), "--idem", "2")
        assert code == 0
        assert report["results"]["dims"] == {"algebra": 3, "corner": 1, "quotient": 1, "ideal": 2, "eA": 1}
        assert report["results"]["exactness"]["q_exact"] is True

    def test_itcert_standalone(self, capsys, spec):
        code, report = _run(capsys, "itcert", spec("lambda_i.json"))
        assert code == 0
        assert report["results"]["kind"] == "syzygy-finite"
        assert report["results"]["it_interval"] == [0, 0]

    def test_itcert_inconclusive_strategy(self, capsys, spec):
        code, report = _run(capsys, "itcert", spec("lambda_i.json"), "--strategy", "gldim", "--caps", '{"pd_cap": 4}')
        assert code == 3
        assert report["checks"][0]["verdict"] == "inconclusive"

    def test_itcert_pipeline(self, capsys, spec):
        code, report = _run(capsys, "itcert", spec("a2.json"), "--idem", "2", "--caps", '{"pd_cap": 6}')
        assert code == 0
        assert report["results"]["standing_hypothesis"] is True
        assert report["results"]["clauses"]["3"]["fires"] is True

    def test_json_output(self, capsys, spec, tmp_path):
        target = tmp_path / "report.json"
        code, report = _run(capsys, "algebra-info", spec("k.json"), "--json", str(target))
        assert code == 0
        assert json.loads(target.read_text()) == report


class TestInputErrors:
    def test_missing_spec(self, capsys, tmp_path):
        code, report = _run(capsys, "algebra-info", str(tmp_path / "absent.json"))
        assert code == 2
        assert report is None

    def test_unknown_idem_vertex(self, capsys, spec):
        code, _ = _run(capsys, "recollement", spec("a2.json"), "--idem", "9")
        assert code == 2

    def test_empty_idem(self, capsys, spec):
        code, _ = _run(capsys, "recollement", spec("a2.json"), "--idem", ",")
        assert code == 2

    def test_bad_caps(self, capsys, spec):
        code, _ = _run(capsys, "algebra-info", spec("a2.json"), "--caps", "{oops")
        assert code == 2
        code, _ = _run(capsys, "algebra-info", spec("a2.json"), "--caps", '{"pd_cap": -1}')
        assert code == 2

    def test_bad_environment(self, capsys, spec, monkeypatch):
        monkeypatch.setenv("RECOLL_PRIME", "32004")
        code, _ = _run(capsys, "algebra-info", spec("a2.json"))
        assert code == 2

    def test_run_prime_reaches_the_algebra(self, capsys, spec, monkeypatch):
        monkeypatch.setenv("RECOLL_PRIME", "7")
        code, report = _run(capsys, "algebra-info", spec("a2.json"))
        assert code == 0
        assert report["prime"] == 7
        assert report["results"]["dim"] == 3

    def test_spec_prime_disagrees_with_run_prime(self, capsys, tmp_path, data_dir, monkeypatch):
        data = json.loads((data_dir / "a2.json").read_text())
        target = tmp_path / "a2_p5.json"
        target.write_text(json.dumps({**data, "prime": 5}))
        monkeypatch.setenv("RECOLL_PRIME", "7")
        code, _ = _run(capsys, "algebra-info", str(target))
        assert code == 2

    def test_bad_log_level(self, capsys, spec):
        code, _ = _run(capsys, "algebra-info", spec("a2.json"), "--log-level", "LOUD")
        assert code == 2


class TestHelpers:
    def test_parse_caps(self):
        base = Caps()
        assert parse_caps(None, base) is base
        assert parse_caps('{"tor_cap": 5}', base).tor_cap == 5
        with pytest.raises(SpecFileError) as exc:
            parse_caps("[1]", base)
        assert exc.value.location == "--caps"
        with pytest.raises(SpecFileError) as exc:
            parse_caps('{"decompose_trials": 0}', base)
        assert exc.value.location == "--caps.decompose_trials"

    def test_parser_requires_idem_for_recollement(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["recollement", "a2.json"])


class TestGoldenSuite:
    def _golden(self, capsys, *extra):
        return _run(capsys, "verify-paper-example", *extra)

    def test_all_lines_pass(self, capsys):
        code, report = self._golden(capsys)
        failing = [c["name"] for c in report["checks"] if c["verdict"] != "pass"]
        assert failing == []
        assert code == 0
        assert report["results"]["dimensions"] == {"Lambda": 18, "eLe": 6, "L/LeL": 6, "LeL": 12, "eL": 6}

    def test_verdicts_do_not_depend_on_seed(self, capsys):
        _, first = self._golden(capsys, "--seed", "0")
        _, second = self._golden(capsys, "--seed", "17")
        assert [(c["name"], c["verdict"]) for c in first["checks"]] == [(c["name"], c["verdict"]) for c in second["checks"]]

    def test_corrupted_data_dir(self, capsys, data_dir, tmp_path):
        corrupt = tmp_path / "data"
        shutil.copytree(data_dir, corrupt)
        (corrupt / "paper_example.json").write_text("{}")
        code, report = self._golden(capsys, "--data-dir", str(corrupt))
        assert code == 1
        failed = [c for c in report["checks"] if c["verdict"] == "fail"]
        assert failed
        assert all("SpecFileError" in (c["detail"] or "") for c in failed)
        assert any(c["verdict"] == "pass" for c in report["checks"])
