import numpy as np
import pytest

from losrkit import catalog, save_box, save_state, uniform_box
from losrkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSchmidt:
    def test_two_bell(self, capsys):
        code, out, _ = run(capsys, "schmidt", "two_bell", "A|BC")
        assert code == 0
        assert out == "0.25 0.25 0.25 0.25\n"

    def test_ghz(self, capsys):
        code, out, _ = run(capsys, "schmidt", "ghz", "A|BC")
        assert code == 0
        assert out == "0.5 0.5\n"

    def test_phi_plus(self, capsys):
        code, out, _ = run(capsys, "schmidt", "phi_plus", "A|B")
        assert code == 0
        assert out == "0.5 0.5\n"

    def test_state_from_file(self, capsys, tmp_path):
        path = tmp_path / "st.txt"
        save_state(path, catalog.phi_plus())
        code, out, _ = run(capsys, "schmidt", str(path), "A|B")
        assert code == 0
        assert out == "0.5 0.5\n"

    def test_bad_bipartition_is_input_error(self, capsys):
        code, _, err = run(capsys, "schmidt", "phi_plus", "A|X")
        assert code == 2
        assert "error" in err

    def test_box_is_not_a_state(self, capsys):
        code, _, err = run(capsys, "schmidt", "pr_box", "A|B")
        assert code == 2


class TestCompare:
    def test_incomparable_pair(self, capsys):
        code, out, _ = run(capsys, "compare", "phi_plus", "partial(0.3927)")
        assert code == 0
        assert out.splitlines()[0].startswith("Incomparable")

    def test_two_bell_vs_ghz(self, capsys):
        code, out, _ = run(capsys, "compare", "two_bell", "ghz")
        assert code == 0
        assert out.splitlines()[0].startswith("Incomparable")

    def test_self_compare(self, capsys):
        code, out, _ = run(capsys, "compare", "phi_plus", "phi_plus")
        assert code == 0
        assert out.splitlines()[0] == "Equivalent Decided"

    def test_unknown_state(self, capsys):
        code, _, err = run(capsys, "compare", "phi_plus", "nonsense")
        assert code == 2
        assert "catalog" in err


class TestFactor:
    def test_max4_over_bell(self, capsys):
        code, out, _ = run(capsys, "factor", "max_entangled(4)", "phi_plus")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "found 0.5 0.5"
        assert lines[1].startswith("residual")

    def test_not_found(self, capsys):
        code, out, _ = run(capsys, "factor", "phi_plus", "partial(0.3)")
        assert code == 0
        assert out.splitlines()[0] == "not_found FactorizationFailed"

    def test_multipartite_requires_bipartition(self, capsys):
        code, _, err = run(capsys, "factor", "two_bell", "ghz")
        assert code == 2
        code, out, _ = run(capsys, "factor", "two_bell", "ghz", "--bipartition", "A|BC")
        assert code == 0
        assert out.splitlines()[0] == "found 0.5 0.5"


class TestMultiCheck:
    def test_ghz_two_bell(self, capsys):
        code, out, _ = run(capsys, "--long", "multi-check", "ghz", "two_bell")
        assert code == 0
        assert out.splitlines()[0] == "Incomparable RankRatioNonInteger"
        assert "MarginalContradiction" in out

    def test_rejects_bipartite(self, capsys):
        code, _, err = run(capsys, "multi-check", "phi_plus", "phi_plus")
        assert code == 2


class TestBoxCommands:
    def test_box_local_pr(self, capsys):
        code, out, _ = run(capsys, "box-local", "pr_box")
        assert code == 0
        assert out.startswith("Nonlocal margin 2 ")

    def test_box_local_uniform_from_file(self, capsys, tmp_path):
        path = tmp_path / "uni.txt"
        save_box(path, uniform_box((2, 2), (2, 2)))
        code, out, _ = run(capsys, "box-local", str(path))
        assert code == 0
        assert out.startswith("Local reconstruction_error")

    def test_box_eval_chsh(self, capsys):
        code, out, _ = run(capsys, "box-eval", "tsirelson_box", "chsh")
        assert code == 0
        assert out.strip() == f"{2 * np.sqrt(2):.10g}"

    def test_box_eval_shape_mismatch(self, capsys):
        code, _, err = run(capsys, "box-eval", "pr_box", "mermin")
        assert code == 2

    def test_state_is_not_a_box(self, capsys):
        code, _, err = run(capsys, "box-local", "ghz")
        assert code == 2


class TestYield:
    def test_chsh_phi_plus(self, capsys):
        code, out, _ = run(capsys, "--restarts", "8", "--seed", "5", "yield", "phi_plus", "chsh")
        assert code == 0
        value = float(out.split()[0])
        assert value == pytest.approx(2 * np.sqrt(2), abs=1e-6)

    def test_hardy_phi_plus(self, capsys):
        code, out, _ = run(capsys, "--restarts", "4", "yield", "phi_plus", "hardy")
        assert code == 0
        assert float(out.split()[0]) <= 1e-6

    def test_unknown_functional(self, capsys):
        code, _, err = run(capsys, "yield", "phi_plus", "klrate")
        assert code == 2

    def test_byte_identical_reruns(self, capsys):
        _, out1, _ = run(capsys, "--restarts", "6", "--seed", "3", "yield", "partial(0.43)", "hardy")
        _, out2, _ = run(capsys, "--restarts", "6", "--seed", "3", "yield", "partial(0.43)", "hardy")
        assert out1 == out2


class TestSelftestScan:
    def test_chsh_scan(self, capsys):
        code, out, _ = run(
            capsys,
            "--restarts",
            "8",
            "selftest-scan",
            "chsh",
            f"{2 * np.sqrt(2):.12f}",
            "phi_plus",
            "phi_plus",
            "partial(0.3927)",
        )
        assert code == 0
        assert "satisfied on candidate set: True" in out


class TestDemos:
    def test_catalysis_demo_passes(self, capsys):
        code, out, _ = run(capsys, "demo", "catalysis")
        assert code == 0
        assert "demo result: pass" in out

    def test_ghz_mermin_demo_passes(self, capsys):
        code, out, _ = run(capsys, "demo", "ghz_mermin")
        assert code == 0
        assert "demo result: pass" in out

    def test_flag_selftest_demo_passes(self, capsys):
        code, out, _ = run(capsys, "demo", "flag_selftest")
        assert code == 0
        assert "demo result: pass" in out

    def test_anomaly_demo_passes(self, capsys):
        code, out, _ = run(capsys, "demo", "anomaly")
        assert code == 0
        assert "demo result: pass" in out

    def test_unknown_demo_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["demo", "unknown"])
        assert exc.value.code == 2

    def test_failing_demo_exits_one(self, capsys, monkeypatch):
        from losrkit import demos

        monkeypatch.setitem(demos.DEMOS, "always_fails", lambda seed=0: (["FAIL: forced"], False))
        code, out, _ = run(capsys, "demo", "always_fails")
        assert code == 1
        assert "demo result: fail" in out
