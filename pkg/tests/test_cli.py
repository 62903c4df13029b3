import json
import re
from importlib import resources

from folioid import cli


def config_path(name: str):
    return resources.files("folioid") / "configs" / name


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def strip_wall_times(text: str) -> str:
    return re.sub(r'"wall_time_s": [-+0-9.eE]+,?\n', "", text)


class TestRun:
    def test_bundled_basegp_pipeline(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = cli.main(["run", str(config_path("ex_basegp.json")),
                         "--out", str(out), "--samples", "10"])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["schema"] == 1
        assert report["passed"] is True
        names = [r["name"] for r in report["results"]]
        assert "check_condition6" in names and "validate_quotient_groupoid" in names
        quotient = next(r for r in report["results"]
                        if r["name"] == "validate_quotient_groupoid")
        # the quotient label algebra is the pair groupoid on the line
        assert quotient["details"]["object_label_dim"] == 1
        assert quotient["details"]["arrow_label_dim"] == 2
        assert quotient["max_residual"] <= 1e-6

    def test_bundled_vb_pipeline(self, tmp_path):
        out = tmp_path / "report.json"
        code = cli.main(["run", str(config_path("ex_vb.json")),
                         "--out", str(out), "--samples", "10"])
        assert code == 0
        assert json.loads(out.read_text())["passed"] is True

    def test_bundled_finite_pipelines(self, tmp_path):
        for name in ("finite_ex_basegp.json", "finite_ex_vb.json"):
            out = tmp_path / "report.json"
            assert cli.main(["run", str(config_path(name)), "--out", str(out)]) == 0
            report = json.loads(out.read_text())
            assert report["passed"] is True

    def test_negative_tolerance_exits_2(self, tmp_path, capsys):
        path = write_config(tmp_path, {
            "family": "pair", "params": {},
            "numeric": {"tol_rank": -1.0},
            "pipeline": ["validate_groupoid"],
        })
        assert cli.main(["run", path]) == 2
        assert "positive" in capsys.readouterr().err

    def test_unknown_family_exits_2(self, tmp_path, capsys):
        path = write_config(tmp_path, {"family": "bogus", "pipeline": ["validate_groupoid"]})
        assert cli.main(["run", path]) == 2

    def test_unknown_check_exits_2(self, tmp_path, capsys):
        path = write_config(tmp_path, {"family": "pair", "pipeline": ["not_a_check"]})
        assert cli.main(["run", path]) == 2

    def test_missing_file_exits_2(self, tmp_path, capsys):
        assert cli.main(["run", str(tmp_path / "nope.json")]) == 2

    def test_failing_check_exits_1(self, tmp_path, capsys):
        # quotient residuals on this scenario are honest floating-point noise;
        # a sub-epsilon tolerance cannot be met, so the run must report failure
        path = write_config(tmp_path, {
            "family": "group_action_pair", "params": {},
            "numeric": {"samples": 8, "seed": 3, "tol_leaf": 1e-18, "tol_axiom": 1e-18},
            "pipeline": ["validate_quotient_groupoid"],
        })
        out = tmp_path / "report.json"
        assert cli.main(["run", path, "--out", str(out)]) == 1
        report = json.loads(out.read_text())
        assert report["passed"] is False

    def test_seeded_reports_byte_stable(self, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        cfg = str(config_path("presymplectic_dirac.json"))
        assert cli.main(["run", cfg, "--out", str(out1), "--samples", "8"]) == 0
        assert cli.main(["run", cfg, "--out", str(out2), "--samples", "8"]) == 0
        assert strip_wall_times(out1.read_text()) == strip_wall_times(out2.read_text())

    def test_hypothesis_violation_short_circuits_with_partial_report(self, tmp_path,
                                                                      monkeypatch):
        from folioid.errors import RankDrift
        from folioid.report import CheckReport

        def fine(scenario, cfg, rng):
            return CheckReport("validate_groupoid", True, 0.0)

        def drifts(scenario, cfg, rng):
            raise RankDrift("injected drift", location=None)

        registry = dict(cli.CHECKS)
        registry["validate_groupoid"] = (fine, "ok")
        registry["check_rank_structure"] = (drifts, "boom")
        monkeypatch.setattr(cli, "CHECKS", registry)
        path = write_config(tmp_path, {
            "family": "pair", "params": {},
            "pipeline": ["validate_groupoid", "check_rank_structure",
                         "check_involutive"],
        })
        out = tmp_path / "report.json"
        assert cli.main(["run", path, "--out", str(out)]) == 1
        report = json.loads(out.read_text())
        names = [r["name"] for r in report["results"]]
        assert names == ["validate_groupoid", "check_rank_structure"]
        assert report["results"][-1]["short_circuited_pipeline"] is True
        assert report["results"][-1]["witness"]["error"] == "RankDrift"
        assert report["passed"] is False

    def test_seed_override_changes_samples_not_structure(self, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        cfg = str(config_path("finite_ex_basegp.json"))
        assert cli.main(["run", cfg, "--out", str(out1), "--seed", "1"]) == 0
        assert cli.main(["run", cfg, "--out", str(out2), "--seed", "2"]) == 0
        r1, r2 = json.loads(out1.read_text()), json.loads(out2.read_text())
        assert r1["passed"] and r2["passed"]
        assert r1["config"]["numeric"]["seed"] == 1
        assert r2["config"]["numeric"]["seed"] == 2


class TestIntrospection:
    def test_list_checks(self, capsys):
        assert cli.main(["list-checks"]) == 0
        text = capsys.readouterr().out
        assert "check_condition6" in text
        assert "pushforward_dirac" in text

    def test_every_pipeline_name_maps_to_an_operation(self):
        import folioid.dirac, folioid.fingroupoid, folioid.leafspace, folioid.multdist
        import folioid.liegroupoid
        modules = [folioid.dirac, folioid.fingroupoid, folioid.leafspace,
                   folioid.multdist, folioid.liegroupoid]
        for name in cli.CHECKS:
            if name == "validate_groupoid":
                assert hasattr(folioid.fingroupoid, name)
                assert hasattr(folioid.liegroupoid, "validate_smooth_groupoid")
                continue
            assert any(hasattr(m, name) for m in modules), name

    def test_describe_family_vb(self, capsys):
        assert cli.main(["describe-family", "vb_trivial"]) == 0
        text = capsys.readouterr().out
        for token in ("k", "w_basis", "f_basis"):
            assert token in text

    def test_describe_family_unknown(self, capsys):
        assert cli.main(["describe-family", "bogus"]) == 2
