import pytest

from apdfilter.cli import main
from apdfilter.domspec import parse_domain_spec
from apdfilter.render import parse_pgm
from apdfilter.tdx import load_transducer

D18_ONLY = """\
alphabet 0 1
domain D18
  state p q
  trans p 0 q
  trans q 0 p
  trans q 1 p
end
"""

RUNS = """\
alphabet 0 1
domain zeros cyclic 0
domain ones cyclic 1
domain alt cyclic 01
"""


@pytest.fixture
def d18_file(tmp_path):
    path = tmp_path / "d18.dom"
    path.write_text(D18_ONLY)
    return str(path)


@pytest.fixture
def runs_file(tmp_path):
    path = tmp_path / "runs.dom"
    path.write_text(RUNS)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBuildRun:
    def test_build_then_run(self, tmp_path, capsys, d18_file):
        out = tmp_path / "f.tdx"
        code, _out, err = run_cli(capsys, "build", "--domains", d18_file, "-o", str(out))
        assert code == 0 and out.exists()
        t, digest = load_transducer(out.read_text())
        assert digest is not None
        code, stdout, _err = run_cli(
            capsys, "run", "--filter", str(out), "--input", "10011"
        )
        assert code == 0
        assert stdout.strip() == "1,1,1,-1,-1"

    def test_run_pgm(self, tmp_path, capsys, d18_file):
        out = tmp_path / "f.tdx"
        run_cli(capsys, "build", "--domains", d18_file, "-o", str(out))
        pgm = tmp_path / "row.pgm"
        code, _o, _e = run_cli(
            capsys,
            "run", "--filter", str(out), "--input", "10011",
            "--format", "pgm", "-o", str(pgm),
        )
        assert code == 0
        assert parse_pgm(pgm.read_bytes()) == [[255, 255, 255, 0, 0]]

    def test_run_circular(self, tmp_path, capsys):
        dom = tmp_path / "c.dom"
        dom.write_text("alphabet 0 1\ndomain C cyclic 001\n")
        out = tmp_path / "f.tdx"
        run_cli(capsys, "build", "--domains", str(dom), "-o", str(out))
        code, stdout, _e = run_cli(
            capsys, "run", "--filter", str(out), "--input", "001001", "--circular"
        )
        assert code == 0
        assert stdout.strip() == "1,1,1,1,1,1"

    def test_run_bidi_needs_domains(self, tmp_path, capsys, d18_file):
        out = tmp_path / "f.tdx"
        run_cli(capsys, "build", "--domains", d18_file, "-o", str(out))
        code, _o, err = run_cli(
            capsys, "run", "--filter", str(out), "--input", "0110", "--bidi"
        )
        assert code == 1
        assert "--domains" in err

    def test_run_bidi(self, tmp_path, capsys, d18_file):
        out = tmp_path / "f.tdx"
        run_cli(capsys, "build", "--domains", d18_file, "-o", str(out))
        code, stdout, _e = run_cli(
            capsys,
            "run", "--filter", str(out), "--input", "0101010",
            "--bidi", "--domains", d18_file,
        )
        assert code == 0
        assert stdout.strip() == "1,1,1,1,1,1,1"
        # a 1-00-1 gap: both edges plus the enclosed zeros are marked
        code, stdout, _e = run_cli(
            capsys,
            "run", "--filter", str(out), "--input", "0100100",
            "--bidi", "--domains", d18_file,
        )
        assert stdout.strip() == "1,-1,-1,-1,-1,1,1"

    def test_bidi_warns_on_digest_mismatch(self, tmp_path, capsys, d18_file, runs_file):
        out = tmp_path / "f.tdx"
        run_cli(capsys, "build", "--domains", d18_file, "-o", str(out))
        code, _o, err = run_cli(
            capsys,
            "run", "--filter", str(out), "--input", "01",
            "--bidi", "--domains", runs_file,
        )
        assert "different domain file" in err


class TestStack:
    def test_local(self, capsys, d18_file):
        code, stdout, _e = run_cli(
            capsys, "stack", "--domains", d18_file, "--input", "0011"
        )
        assert code == 0
        assert stdout.splitlines() == ["1,3", "4,4"]

    def test_periodic_header(self, capsys, d18_file):
        code, stdout, _e = run_cli(
            capsys, "stack", "--domains", d18_file, "--input", "01", "--periodic"
        )
        assert code == 0
        assert stdout.splitlines() == ["whole_string=true"]
        code, stdout, _e = run_cli(
            capsys, "stack", "--domains", d18_file, "--input", "11", "--periodic"
        )
        assert stdout.splitlines() == ["whole_string=false", "1,1", "2,2"]

    def test_input_from_file(self, tmp_path, capsys, d18_file):
        data = tmp_path / "sigma.txt"
        data.write_text("0011\n")
        code, stdout, _e = run_cli(
            capsys, "stack", "--domains", d18_file, "--input", f"@{data}"
        )
        assert stdout.splitlines() == ["1,3", "4,4"]


class TestOptimize:
    def test_optimize_emits_parseable_split_domains(self, tmp_path, capsys, runs_file):
        out = tmp_path / "split.dom"
        code, _o, err = run_cli(capsys, "optimize", "--domains", runs_file, "-o", str(out))
        assert code == 0
        assert "states_before=4, states_after=8" in err
        _alphabet, parsed = parse_domain_spec(out.read_text())
        assert [pd.name for pd in parsed] == ["zeros", "ones", "alt"]
        assert sum(pd.domain.fa.state_count for pd in parsed) == 8
        assert any("." in name for pd in parsed for name in pd.state_names)

    def test_build_optimize_flag(self, tmp_path, capsys, runs_file):
        out = tmp_path / "f.tdx"
        code, _o, _e = run_cli(
            capsys, "build", "--domains", runs_file, "-o", str(out), "--optimize"
        )
        assert code == 0
        t, _digest = load_transducer(out.read_text())
        assert t.input_complete()

    def test_pass_cap_env(self, tmp_path, capsys, runs_file, monkeypatch):
        monkeypatch.setenv("APDFILTER_MAX_OPTIMIZE_PASSES", "0")
        out = tmp_path / "split.dom"
        code, _o, err = run_cli(capsys, "optimize", "--domains", runs_file, "-o", str(out))
        assert code == 2
        assert "did not stabilize" in err


class TestCa:
    def test_ca_pipeline(self, tmp_path, capsys):
        st = tmp_path / "st.txt"
        code, _o, _e = run_cli(
            capsys,
            "ca", "--rule", "110", "--width", "28", "--steps", "20",
            "--init", "word:00010011011111^2", "-o", str(st),
        )
        assert code == 0
        lines = st.read_text().splitlines()
        assert len(lines) == 21 and all(len(l) == 28 for l in lines)

        dom = tmp_path / "d.dom"
        dom.write_text("alphabet 0 1\ndomain w cyclic 00010011011111\n")
        filt = tmp_path / "f.tdx"
        run_cli(capsys, "build", "--domains", str(dom), "-o", str(filt))
        pgm = tmp_path / "out.pgm"
        code, _o, _e = run_cli(
            capsys,
            "ca-filter", "--method", "transducer", "--filter", str(filt),
            "--input", str(st), "-o", str(pgm),
        )
        assert code == 0
        grid = parse_pgm(pgm.read_bytes())
        assert all(v == 255 for row in grid for v in row)

    def test_build_byte_identical(self, tmp_path, capsys, runs_file):
        a, b = tmp_path / "a.tdx", tmp_path / "b.tdx"
        for path in (a, b):
            run_cli(capsys, "build", "--domains", runs_file, "-o", str(path))
        assert a.read_bytes() == b.read_bytes()

    def test_ca_random_reproducible(self, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for path in (a, b):
            run_cli(
                capsys,
                "ca", "--rule", "110", "--width", "40", "--steps", "10",
                "--init", "random:42", "-o", str(path),
            )
        assert a.read_text() == b.read_text()

    def test_ca_filter_stack_csv(self, tmp_path, capsys, d18_file):
        st = tmp_path / "st.txt"
        run_cli(
            capsys,
            "ca", "--rule", "18", "--width", "16", "--steps", "6",
            "--init", "random:9", "-o", str(st),
        )
        code, stdout, _e = run_cli(
            capsys,
            "ca-filter", "--method", "stack", "--domains", d18_file,
            "--input", str(st), "--format", "csv",
        )
        assert code == 0
        rows = stdout.strip().splitlines()
        assert len(rows) == 7
        assert all(c in ("1", "0", "-1") for row in rows for c in row.split(","))

    def test_ca_word_width_mismatch(self, capsys):
        code, _o, err = run_cli(
            capsys,
            "ca", "--rule", "110", "--width", "10", "--steps", "2",
            "--init", "word:01",
        )
        assert code == 1
        assert "does not match" in err


class TestErrors:
    def test_unknown_flag(self, capsys):
        code, _o, err = run_cli(capsys, "stack", "--nope")
        assert code == 1

    def test_alphabet_violation_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.dom"
        bad.write_text("alphabet 0 1\ndomain D\n state p\n trans p 2 p\nend\n")
        code, _o, err = run_cli(capsys, "stack", "--domains", str(bad), "--input", "0")
        assert code == 2
        assert "line 4" in err

    def test_missing_file_exit_2(self, capsys):
        code, _o, err = run_cli(capsys, "stack", "--domains", "missing.dom", "--input", "0")
        assert code == 2
