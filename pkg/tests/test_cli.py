import json
import subprocess
import sys

import numpy as np
import pytest

from orderflow.cli import EXIT_CAP, EXIT_INTERNAL, EXIT_IO, EXIT_OK, EXIT_OUTSIDE, main, read_point, resolve_seed
from orderflow.networks import count_nodes_formula
from orderflow.relations import Relation, characteristic_vector
from orderflow.stats import ChoiceData


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestBuild:
    def test_weak_five(self, capsys):
        code, out, _ = run(capsys, "build", "--n", "5", "--kind", "wo")
        assert code == EXIT_OK
        assert "|A|=211" in out

    def test_linear_one(self, capsys):
        code, out, _ = run(capsys, "build", "--n", "1", "--kind", "LO")
        assert code == EXIT_OK
        assert "|N|=2" in out and "|A|=1 " in out

    def test_lp_export(self, capsys, tmp_path):
        path = tmp_path / "io5.lp"
        code, out, _ = run(capsys, "build", "--n", "5", "--kind", "io", "--format", "lp", "--out", str(path))
        assert code == EXIT_OK
        text = path.read_text()
        assert text.count(" >= 0\n") == 810
        # nothing structured on stdout
        assert "Subject To" not in out

    @pytest.mark.parametrize("fmt", ["json", "dot"])
    def test_other_formats(self, capsys, tmp_path, fmt):
        path = tmp_path / f"net.{fmt}"
        assert run(capsys, "build", "--n", "3", "--kind", "so", "--format", fmt, "--out", str(path))[0] == EXIT_OK
        if fmt == "json":
            obj = json.loads(path.read_text())
            assert obj["kind"] == "so" and len(obj["nodes"]) == count_nodes_formula(3, "so") == 38
        else:
            assert path.read_text().startswith("digraph")

    def test_semiorder_reports_both_counts(self, capsys):
        code, out, _ = run(capsys, "build", "--n", "4", "--kind", "so")
        assert code == EXIT_OK
        assert "|A|=304" in out and "520" in out

    def test_cap(self, capsys):
        assert run(capsys, "build", "--n", "8", "--kind", "so")[0] == EXIT_CAP
        assert run(capsys, "build", "--n", "3", "--kind", "so", "--cap-override", "2")[0] == EXIT_CAP

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "build", "--n", "2", "--kind", "lo", "--out", str(tmp_path / "no" / "x.json"))
        assert code == EXIT_IO and "error" in err

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["build", "--n", "2", "--kind", "partial"])
        assert info.value.code == EXIT_IO


class TestVerify:
    def test_semiorder_four(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "4", "--kind", "so")
        assert code == EXIT_OK
        assert "projected vertices=183" in out and "pass" in out

    def test_interval_two(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "2", "--kind", "io")
        assert code == EXIT_OK and "paths=6 projected vertices=3" in out

    def test_weak_five(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "5", "--kind", "wo")
        assert code == EXIT_OK and "projected vertices=541" in out

    def test_cap(self, capsys):
        assert run(capsys, "verify", "--n", "9", "--kind", "lo")[0] == EXIT_CAP


class TestMember:
    def write(self, tmp_path, obj):
        path = tmp_path / "p.json"
        path.write_text(json.dumps(obj))
        return str(path)

    def test_weak_vertex_inside(self, capsys, tmp_path):
        r = Relation.from_utility([0, 2, 1, 1])
        path = self.write(tmp_path, r.to_json())
        code, out, _ = run(capsys, "member", "--n", "4", "--kind", "wo", "--in", path)
        assert code == EXIT_OK and out.strip().endswith("inside")

    def test_cyclic_outside(self, capsys, tmp_path):
        path = self.write(tmp_path, {"n": 3, "p": {"0,1": 1, "1,2": 1, "2,0": 1}})
        out_path = tmp_path / "m.json"
        code, out, _ = run(capsys, "member", "--n", "3", "--kind", "lo", "--in", path, "--out", str(out_path))
        assert code == EXIT_OUTSIDE
        report = json.loads(out_path.read_text())
        assert report["distance"] >= 1 / np.sqrt(6) - 1e-6 and report["inside"] is False

    def test_tolerance_flag(self, capsys, tmp_path):
        path = self.write(tmp_path, {"n": 2, "p": {"0,1": 0.5, "1,0": 0.5001}})
        assert run(capsys, "member", "--n", "2", "--kind", "lo", "--in", path)[0] == EXIT_OUTSIDE
        assert run(capsys, "member", "--n", "2", "--kind", "lo", "--in", path, "--tol", "1e-3")[0] == EXIT_OK

    def test_bad_inputs(self, capsys, tmp_path):
        assert run(capsys, "member", "--n", "3", "--kind", "lo", "--in", str(tmp_path / "missing"))[0] == EXIT_IO
        bad = self.write(tmp_path, {"n": 2, "p": {"0,1": 1}})
        assert run(capsys, "member", "--n", "3", "--kind", "lo", "--in", bad)[0] == EXIT_IO
        (tmp_path / "junk.json").write_text("{not json")
        assert run(capsys, "member", "--n", "3", "--kind", "lo", "--in", str(tmp_path / "junk.json"))[0] == EXIT_IO

    def test_read_point(self):
        np.testing.assert_array_equal(read_point({"n": 2, "p": {"1, 0": 0.25}}), [0, 0.25])
        r = Relation.from_ranking([1, 0])
        np.testing.assert_array_equal(read_point(r.to_json()), characteristic_vector(r))
        with pytest.raises(ValueError):
            read_point({"n": 2, "p": {"0,0": 1}})


class TestMleAndBayes:
    def data_file(self, tmp_path, data):
        path = tmp_path / "data.json"
        path.write_text(data.dumps())
        return str(path)

    def test_mle_zero_counts(self, capsys, tmp_path):
        path = self.data_file(tmp_path, ChoiceData.zeros(3))
        out_path = tmp_path / "fit.json"
        code, out, _ = run(capsys, "mle", "--kind", "wo", "--in", path, "--out", str(out_path))
        assert code == EXIT_OK and "log-likelihood=0" in out
        assert json.loads(out_path.read_text())["objective"] == 0

    def test_mle_rejects_ties_for_linear(self, capsys, tmp_path):
        path = self.data_file(tmp_path, ChoiceData.from_counts(2, {(0, 1): (1, 1, 1)}))
        assert run(capsys, "mle", "--kind", "lo", "--in", path)[0] == EXIT_IO

    def test_bayes_is_byte_identical(self, capsys, tmp_path):
        path = self.data_file(tmp_path, ChoiceData.from_counts(3, {(0, 1): (5, 1, 0), (1, 2): (4, 2, 0)}))
        outs = []
        for k in range(2):
            out_path = tmp_path / f"b{k}.json"
            code, out, _ = run(capsys, "bayes", "--kind", "lo", "--in", path, "--samples", "200",
                               "--seed", "3", "--out", str(out_path))
            assert code == EXIT_OK
            outs.append((out, out_path.read_bytes()))
        assert outs[0] == outs[1]
        assert json.loads(outs[0][1])["seed"] == 3

    def test_seed_environment(self, capsys, tmp_path, monkeypatch):
        path = self.data_file(tmp_path, ChoiceData.zeros(3))
        monkeypatch.setenv("ORDERFLOW_SEED", "7")
        _, out, _ = run(capsys, "bayes", "--kind", "wo", "--in", path, "--samples", "20")
        assert "seed=7" in out
        _, out, _ = run(capsys, "bayes", "--kind", "wo", "--in", path, "--samples", "20", "--seed", "1")
        assert "seed=1" in out

    def test_resolve_seed(self):
        assert resolve_seed(None, {}) == 0
        assert resolve_seed(None, {"ORDERFLOW_SEED": "12"}) == 12
        assert resolve_seed(4, {"ORDERFLOW_SEED": "12"}) == 4
        with pytest.raises(ValueError):
            resolve_seed(None, {"ORDERFLOW_SEED": "abc"})


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "orderflow", "build", "--n", "3", "--kind", "io"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "|A|=54" in proc.stdout


def test_exit_code_values():
    assert (EXIT_OK, EXIT_IO, EXIT_INTERNAL, EXIT_CAP, EXIT_OUTSIDE) == (0, 1, 2, 3, 4)
