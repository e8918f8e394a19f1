import json
import subprocess
import sys

import pytest

from corank1.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def germ_file(tmp_path):
    def write(text, name="g.txt"):
        p = tmp_path / name
        p.write_text(text + "\n")
        return str(p)
    return write


class TestClassify:
    def test_crosscap(self, capsys, germ_file):
        code, rep, _ = run(capsys, "classify", germ_file("(x, y, x*z, y*z, z^2)"))
        assert code == 0
        assert rep["orbit"] == "XZ_YZ_Z2"
        assert rep["topological_type"] == "SubstantialSurface"
        assert rep["point_type"] == "M3"
        assert rep["D"] == "1"
        assert rep["schema"] == 1 and rep["command"] == "classify"

    def test_zero_orbit(self, capsys, germ_file):
        code, rep, _ = run(capsys, "classify", germ_file("(x, y, 0, 0, 0)"))
        assert code == 0 and rep["topological_type"] == "Point"

    def test_parse_error(self, capsys, germ_file):
        code, rep, err = run(capsys, "classify", germ_file("(x, y, x*z, y*z"))
        assert code == 2 and rep is None and "error" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "classify", str(tmp_path / "nope.txt"))
        assert code == 2

    def test_corank(self, capsys, germ_file):
        code, _, err = run(capsys, "classify", germ_file("(x, y, z, 0, 0)"))
        assert code == 3 and "corank 0" in err

    def test_deterministic(self, capsys, germ_file):
        f = germ_file("(x, y, x*z + y^2, y*z, z^2)")
        main(["classify", f])
        a = capsys.readouterr().out
        main(["classify", f])
        assert capsys.readouterr().out == a


class TestLocus:
    def test_obj_export(self, capsys, germ_file, tmp_path):
        out = tmp_path / "m.obj"
        code, rep, _ = run(capsys, "locus", germ_file("(x, y, x*z, y*z, z^2)"),
                           "--grid", "10x6", "--out", str(out))
        assert code == 0
        assert rep["points"] == 60
        assert rep["artifacts"] == [str(out)]
        assert out.read_text().startswith("# germ")

    def test_degree_forms(self, capsys, germ_file):
        code, rep, _ = run(capsys, "locus", germ_file("(x, y, x*z, y*z, z^2)"), "--degree", "2")
        assert rep["vanishing_forms"]["dimension"] == 1

    def test_unwritable(self, capsys, germ_file, tmp_path):
        code, _, _ = run(capsys, "locus", germ_file("(x, y, x*z, y*z, z^2)"),
                         "--out", str(tmp_path / "missing" / "m.obj"))
        assert code == 4

    def test_bad_grid(self, capsys, germ_file):
        code, _, _ = run(capsys, "locus", germ_file("(x, y, x*z, y*z, z^2)"), "--grid", "ten")
        assert code == 2


class TestLift:
    def test_residual(self, capsys, germ_file):
        code, rep, _ = run(capsys, "lift", germ_file("(x, y, x*z, y*z, z^2)"), "--grid", "30x20")
        assert code == 0
        assert rep["blowup_residual"] <= 1e-9
        assert rep["blowup_residual_exact"] == "0"


class TestNet:
    def test_discriminant(self, capsys):
        code, rep, _ = run(capsys, "net", "discriminant", "<x^2, y^2, z^2 + 2*x*y>")
        assert code == 0 and rep["monge_point_type"] == "M3"

    def test_label(self, capsys):
        code, rep, _ = run(capsys, "net", "label", "c=0", "g=0")
        assert rep["label"] == "C"

    def test_label_bad(self, capsys):
        code, _, _ = run(capsys, "net", "label", "c=zero", "g=1")
        assert code == 2

    def test_example44(self, capsys):
        code, rep, _ = run(capsys, "net", "example44")
        assert code == 0 and rep["chain_verified"]


class TestIso:
    def test_inequivalent(self, capsys, germ_file):
        a = germ_file("(x, y, x*z, y*z, z^2)", "a.txt")
        b = germ_file("(x, y, x*z, y*z, 2*z^2)", "b.txt")
        code, rep, _ = run(capsys, "iso", a, b)
        assert code == 0 and rep["equivalent"] is False and rep["certificate"] == "c4"

    def test_loci(self, capsys, germ_file):
        a = germ_file("(x, y, x*z, y*z, z^2)", "a.txt")
        code, rep, _ = run(capsys, "iso", a, a, "--loci")
        assert rep["equivalent"] and rep["locus_isometries"]

    def test_unsupported(self, capsys, germ_file):
        a = germ_file("(x, y, x*z, y*z, z^2)", "a.txt")
        b = germ_file("(x, y, z^2, x*z, 0)", "b.txt")
        code, _, _ = run(capsys, "iso", a, b)
        assert code == 5


def test_module_entry_point(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("(x, y, z^2, 0, 0)")
    r = subprocess.run([sys.executable, "-m", "corank1", "classify", str(f)],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert json.loads(r.stdout)["orbit"] == "Z2"
