import io
from contextlib import redirect_stderr, redirect_stdout

import pytest

from hyperreg import (
    family_from_text,
    family_to_text,
    instance_from_text,
    instance_to_text,
    kgraph_from_text,
    kgraph_to_text,
)
from hyperreg.cli import main

from conftest import planted


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def gen_prefix(tmp_path):
    prefix = str(tmp_path / "case")
    code, out, err = run([
        "gen", "--n", "120", "--a", "3", "--density", "1/2",
        "--epsilon", "1/10", "--seed", "17", "--out", prefix,
    ])
    assert code == 0, err
    return prefix


class TestGenCheck:
    def test_round_trip_passes(self, gen_prefix):
        code, out, _ = run([
            "check", "--hypergraph", gen_prefix + ".hg",
            "--instance", gen_prefix + ".ri",
            "--family", gen_prefix + ".pf", "--seed", "23",
        ])
        assert code == 0
        last = out.strip().split("\n")[-1]
        assert last.startswith("witness pass worst_deviation ")

    def test_measure_prints_epsilon(self, tmp_path):
        code, out, _ = run([
            "gen", "--n", "60", "--a", "3", "--density", "1/2",
            "--measure", "--seed", "5", "--out", str(tmp_path / "m"),
        ])
        assert code == 0
        assert out.startswith("achieved_epsilon ")

    def test_wrong_density_fails_with_exit_1(self, gen_prefix, tmp_path):
        R = instance_from_text(open(gen_prefix + ".ri").read())
        from hyperreg import DensityFunction, RegularityInstance
        wrong = RegularityInstance(
            R.epsilon, R.a, DensityFunction.constant(R.a, 1)
        )
        bad = tmp_path / "wrong.ri"
        bad.write_text(instance_to_text(wrong))
        code, out, _ = run([
            "check", "--hypergraph", gen_prefix + ".hg",
            "--instance", str(bad),
            "--family", gen_prefix + ".pf", "--seed", "23",
        ])
        assert code == 1
        assert "witness fail" in out

    def test_corrupted_family_exit_2_with_line(self, gen_prefix, tmp_path):
        text = open(gen_prefix + ".pf").read().split("\n")
        text[1] = "1 zzz : 0 1"
        bad = tmp_path / "bad.pf"
        bad.write_text("\n".join(text))
        code, _, err = run([
            "check", "--hypergraph", gen_prefix + ".hg",
            "--instance", gen_prefix + ".ri",
            "--family", str(bad), "--seed", "23",
        ])
        assert code == 2
        assert "line 2" in err

    def test_missing_file_exit_2(self, gen_prefix):
        code, _, err = run([
            "check", "--hypergraph", gen_prefix + ".nope",
            "--instance", gen_prefix + ".ri",
            "--family", gen_prefix + ".pf", "--seed", "23",
        ])
        assert code == 2


class TestCount:
    def test_ic_all_classes_is_one(self, gen_prefix):
        code, out, _ = run([
            "count", "--ic", "--instance", gen_prefix + ".ri",
            "--all-classes", "3",
        ])
        assert code == 0
        assert out.strip() == "ic_family 1"

    def test_pr_of_pattern(self, gen_prefix, tmp_path):
        from hyperreg import KGraph
        pat = tmp_path / "tri.hg"
        pat.write_text(kgraph_to_text(KGraph(2, 3, {(0, 1), (0, 2), (1, 2)})))
        code, out, _ = run([
            "count", "--pattern", str(pat), "--hypergraph", gen_prefix + ".hg",
        ])
        assert code == 0
        assert out.startswith("pr ")


class TestTransformCommands:
    def test_refine_then_reconstruct(self, gen_prefix, tmp_path):
        fine = str(tmp_path / "fine.pf")
        code, _, err = run([
            "refine", "--family", gen_prefix + ".pf", "--b", "6",
            "--seed", "3", "--out", fine,
        ])
        assert code == 0, err
        rec = str(tmp_path / "rec.pf")
        code, _, err = run([
            "reconstruct", "--family", gen_prefix + ".pf",
            "--refined", fine, "--nu", "0", "--out", rec,
        ])
        assert code == 0, err
        assert family_from_text(open(rec).read()).a == (3,)

    def test_equalize(self, gen_prefix, tmp_path):
        out_path = str(tmp_path / "eq.pf")
        code, _, _ = run([
            "equalize", "--family", gen_prefix + ".pf", "--out", out_path,
        ])
        assert code == 0
        F = family_from_text(open(out_path).read())
        sizes = [len(c) for c in F.vertex_classes]
        assert max(sizes) - min(sizes) <= 1

    def test_slice(self, gen_prefix, tmp_path):
        out_prefix = str(tmp_path / "sl")
        code, _, err = run([
            "slice", "--hypergraph", gen_prefix + ".hg",
            "--family", gen_prefix + ".pf", "--address", "1,2",
            "--d", "1/2", "--epsilon", "1/10", "--probs", "1/2,1/2",
            "--seed", "9", "--out", out_prefix,
        ])
        assert code == 0, err
        for i in range(3):
            kgraph_from_text(open(f"{out_prefix}.{i}.hg").read())

    def test_sample(self, gen_prefix, tmp_path):
        out_prefix = str(tmp_path / "sub")
        code, _, err = run([
            "sample", "--hypergraph", gen_prefix + ".hg",
            "--family", gen_prefix + ".pf", "--q", "40",
            "--seed", "2", "--out", out_prefix,
        ])
        assert code == 0, err
        H = kgraph_from_text(open(out_prefix + ".hg").read())
        F = family_from_text(open(out_prefix + ".pf").read())
        assert H.n == 40 and F.n == 40 and F.relaxed


class TestExperimentCommand:
    def test_runs_and_writes_csv(self, gen_prefix, tmp_path):
        csv = str(tmp_path / "stats.csv")
        code, out, err = run([
            "experiment", "--instance", gen_prefix + ".ri",
            "--n", "120", "--q", "60", "--delta", "3/10",
            "--trials", "2", "--seed", "31", "--out", csv,
        ])
        assert code == 0, err
        assert out.startswith("q1_rate ")
        lines = open(csv).read().strip().split("\n")
        assert lines[0] == "trial,direction,pass,lambda,worst_deviation"
        assert len(lines) == 5


class TestSeedDiscipline:
    def test_missing_seed_rejected(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["gen", "--n", "20", "--a", "3", "--density", "1/2",
                  "--out", str(tmp_path / "x")])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_same_seed_same_bytes(self, tmp_path):
        a = str(tmp_path / "a")
        b = str(tmp_path / "b")
        for prefix in (a, b):
            run(["gen", "--n", "40", "--a", "4", "--density", "2/5",
                 "--seed", "77", "--out", prefix])
        for ext in (".hg", ".pf", ".ri"):
            assert open(a + ext).read() == open(b + ext).read()


class TestSerializationIdentity:
    def test_parse_serialize_fixed_point(self, gen_prefix):
        hg = open(gen_prefix + ".hg").read()
        pf = open(gen_prefix + ".pf").read()
        ri = open(gen_prefix + ".ri").read()
        assert kgraph_to_text(kgraph_from_text(hg)) == hg
        assert family_to_text(family_from_text(pf)) == pf
        assert instance_to_text(instance_from_text(ri)) == ri
