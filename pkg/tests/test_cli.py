import json
import shutil
from pathlib import Path

import pytest

from timelike.cli import main, run
from timelike.config import ConfigError, load_config
from timelike.ratfunc import RationalFunction

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

REF = """
[factor1]
g = {num = [0, -1]}
f = {num = [-1], den = [0, 0, 1]}

[factor2]
g = {num = [0, -1]}
f = {num = [-1], den = [0, 0, 1]}

[domain]
x1 = [-3, 3]
x4 = [-3, 3]
grid = 40
delta = 0.05
base = "raw"
"""


def write(tmp_path, text, name="job.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def invoke(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestConfig:
    def test_bundled_configs_parse(self):
        for p in sorted(CONFIGS.glob("*.toml")):
            load_config(p)

    @pytest.mark.parametrize(
        "extra, message",
        [
            ("[domain]\ngrid = 1\n", "grid"),
            ("[domain]\ndelta = 0.0\n", "delta"),
            ("[domain]\nx1 = [2, 1]\n", "x1"),
        ],
    )
    def test_invalid(self, tmp_path, extra, message):
        base = REF.split("[domain]")[0]
        with pytest.raises(ConfigError, match=message):
            load_config(write(tmp_path, base + extra))

    def test_missing_data(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write(tmp_path, "[domain]\ngrid = 4\n"))

    def test_exit_code_two(self, tmp_path, capsys):
        code, _, err = invoke(capsys, "check", "--config", str(tmp_path / "missing.toml"))
        assert code == 2 and "config error" in err
        code, _, _ = invoke(capsys, "check", "--config", write(tmp_path, "not = [valid"))
        assert code == 2


class TestCheck:
    def test_example_modes(self, tmp_path, capsys):
        cfg = write(tmp_path, REF)
        code, out, _ = invoke(capsys, "check", "--config", cfg, "--out", str(tmp_path / "o"))
        rep = json.loads(out)
        assert code == 0 and rep["pass"]
        assert not rep["factors"][0]["strict"]["pass"]
        code, _, _ = invoke(capsys, "check", "--config", cfg, "--mode", "strict", "--out", str(tmp_path / "o"))
        assert code == 1

    def test_imaginary_residue_reported(self, tmp_path, capsys):
        text = REF.replace("f = {num = [-1], den = [0, 0, 1]}", "f = {num = [[0, 1]], den = [0, 0, 1]}", 1)
        cfg = write(tmp_path, text)
        code, out, _ = invoke(capsys, "verify", "--config", cfg, "--out", str(tmp_path / "o"))
        rep = json.loads(out)
        assert code == 1
        fail = [f for f in rep["period_failures"] if "residue" in f]
        assert fail[0]["component"] == 2 and fail[0]["residue"] == ["0", "-2"]


class TestSolve:
    def test_trivial(self, tmp_path):
        cfg = write(tmp_path, '[solve.factor1]\ng = {num = [0, -1]}\npoles = []\n[solve.factor2]\ng = {num = [0, -1]}\npoles = []\n')
        rep, code = run(["solve", "--config", cfg, "--out", str(tmp_path / "o")])
        assert code == 0
        assert rep["factor1"]["nullspace_dimension"] == 1
        f = RationalFunction.from_config(rep["factor1"]["F"])
        assert f.is_polynomial() and f.numerator.degree == 0

    def test_round_trip_and_weak_complete(self, tmp_path):
        out = tmp_path / "o"
        rep, code = run(["solve", "--config", str(CONFIGS / "solve_n3.toml"), "--out", str(out)])
        assert code == 0 and rep["all_weak_complete"] and rep["strict_pass"]
        solved = load_config(out / "solved.toml")
        f1 = RationalFunction.from_config(rep["factor1"]["F"])
        assert solved.factors[0][1] == f1
        assert solved.ends == ((1, 1), (-1, -1))

    def test_augments_forced_zero(self, tmp_path):
        text = (
            '[solve]\naugment = "zero"\n'
            '[solve.factor1]\ng = {num = [1, -1, 1], den = [-1, 1]}\npoles = ["1", "3"]\n'
            '[solve.factor2]\ng = {num = [1, -1, 1], den = [-1, 1]}\npoles = ["1", "3"]\n'
        )
        rep, code = run(["solve", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")])
        assert rep["factor1"]["a_zero"] == [2]
        assert len(rep["factor1"]["augmented_ends"]) == 1
        assert rep["strict_pass"]
        end3 = [e for e in rep["ends"] if e["end"] == ["3", "3"]][0]
        assert end3["F1_pole"] and not end3["g1_pole"] and not end3["weak_complete"]
        assert code == 1


class TestEvalMeshSing:
    def test_eval(self, tmp_path, capsys):
        code, out, _ = invoke(capsys, "eval", "2", "1", "--config", write(tmp_path, REF))
        X = json.loads(out)["X"]
        assert code == 0 and X == pytest.approx([8 / 3, 1.0986122886681098, -4 / 3], abs=1e-14)

    def test_eval_light_cone(self, tmp_path, capsys):
        code, out, _ = invoke(capsys, "eval", "1", "1", "--config", write(tmp_path, REF))
        assert code == 1 and json.loads(out)["error"] == "LightConeHit"

    def test_mesh_four_components(self, tmp_path):
        out = tmp_path / "m"
        rep, code = run(["mesh", "--config", write(tmp_path, REF), "--out", str(out), "--grid", "100"])
        assert code == 0 and len(rep["files"]) == 4
        assert sorted(p.name for p in out.glob("*.obj")) == sorted(rep["files"])

    def test_mesh_single_component(self, tmp_path):
        text = REF.replace("x1 = [-3, 3]", "x1 = [1, 3]").replace("x4 = [-3, 3]", "x4 = [-0.5, 0.5]")
        rep, _ = run(["mesh", "--config", write(tmp_path, text), "--out", str(tmp_path / "m")])
        assert len(rep["files"]) == 1

    def test_mesh_all_excluded(self, tmp_path, caplog):
        text = REF.replace("x1 = [-3, 3]", "x1 = [-0.01, 0.01]").replace("x4 = [-3, 3]", "x4 = [-0.01, 0.01]")
        rep, code = run(["mesh", "--config", write(tmp_path, text), "--out", str(tmp_path / "m")])
        assert code == 0 and rep["files"] == [] and "warning" in rep
        assert "no mesh written" in caplog.text

    def test_mesh_deterministic(self, tmp_path):
        cfg = write(tmp_path, REF)
        run(["mesh", "--config", cfg, "--out", str(tmp_path / "a")])
        run(["mesh", "--config", cfg, "--out", str(tmp_path / "b")])
        for p in sorted((tmp_path / "a").iterdir()):
            assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()

    def test_mesh_components_respect_signs(self, tmp_path):
        out = tmp_path / "m"
        run(["mesh", "--config", write(tmp_path, REF), "--out", str(out)])
        rows = (out / "surface_samples.csv").read_text().splitlines()[1:]
        seen = {}
        for row in rows:
            comp, x1, x4 = row.split(",")[:3]
            if comp:
                key = (float(x1) + float(x4) > 0, float(x1) - float(x4) > 0)
                assert seen.setdefault(key, comp) == comp
        assert len(seen) == 4

    def test_sing(self, tmp_path):
        rep, code = run(["sing", "--config", write(tmp_path, REF), "--out", str(tmp_path / "s")])
        assert code == 0 and rep["residual"] <= 1e-10 and rep["max_abs_h_hat"] <= 1e-9
        assert rep["compactness"]["classification"] == "curve"
        assert (tmp_path / "s" / "singular.csv").exists()


class TestEndsVerify:
    def test_ends(self, tmp_path):
        rep, code = run(["ends", "--config", write(tmp_path, REF), "--out", str(tmp_path / "e")])
        (e,) = rep["ends"]
        assert code == 0 and e["combined_type"] == 1
        assert [(f["a"], f["c"]) for f in e["factors"]] == [("-1", "2"), ("-1", "2")]
        assert e["ratios_decreasing"] and len(e["radii"]) == 4
        assert all(b < a for a, b in zip(e["residuals"], e["residuals"][1:]))

    def test_ends_not_simple(self, tmp_path):
        text = REF.replace("den = [0, 0, 1]", "den = [0, 0, 0, 1]")
        rep, code = run(["ends", "--config", write(tmp_path, text), "--out", str(tmp_path / "e")])
        assert code == 0 and rep["ends"][0]["error"] == "NotSimpleEnd"

    def test_verify_example(self, tmp_path):
        rep, code = run(["verify", "--config", write(tmp_path, REF), "--out", str(tmp_path / "v")])
        assert code == 0 and rep["pass"]
        names = {c["name"] for c in rep["checks"]}
        assert {"reference_golden", "path_independence", "conformality_order2", "wave_equation"} <= names

    def test_verify_deterministic_report(self, tmp_path):
        cfg = write(tmp_path, REF)
        run(["verify", "--config", cfg, "--out", str(tmp_path / "a")])
        run(["verify", "--config", cfg, "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "verify_report.json").read_bytes() == (tmp_path / "b" / "verify_report.json").read_bytes()
