import json
import subprocess
import sys

from wavesym.cli import main
from wavesym.expr import parse


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_algebra_default(capsys):
    code, out, _ = run_cli(capsys, "--output", "json", "verify-algebra")
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1
    assert report["max_closing_k"] == 2
    assert report["all_relations_exact"] is True


def test_verify_algebra_paper_source_reports_discrepancies(capsys):
    code, out, _ = run_cli(capsys, "--source", "paper", "--output", "json",
                           "verify-algebra")
    assert code == 0
    report = json.loads(out)
    assert report["max_closing_k"] == 2
    printed = report["printed"]
    assert printed["all_relations_exact"] is False
    assert printed["failing_relations"]
    assert printed["max_closing_k"] == 1


def test_verify_algebra_small_k_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "--K", "1", "verify-algebra")
    assert code == 1
    assert "usage error" in err


def test_rank_first_order(capsys):
    code, out, _ = run_cli(capsys, "--output", "json", "rank", "--order", "1")
    assert code == 0
    report = json.loads(out)
    assert (report["rank"], report["invariant_count"]) == (7, 0)


def test_rank_second_order(capsys):
    code, out, _ = run_cli(capsys, "--output", "json", "rank", "--order", "2")
    assert code == 0
    report = json.loads(out)
    assert (report["rank"], report["invariant_count"]) == (8, 2)


def test_rank_out_of_scope_order(capsys):
    code, _, err = run_cli(capsys, "rank", "--order", "3")
    assert code == 1
    assert "order" in err


def test_json_output_is_byte_identical(capsys):
    _, first, _ = run_cli(capsys, "--output", "json", "rank", "--order", "1")
    _, second, _ = run_cli(capsys, "--output", "json", "rank", "--order", "1")
    assert first == second


def test_env_override_and_flag_priority(capsys, monkeypatch):
    monkeypatch.setenv("WAVESYM_SEED", "42")
    _, out, _ = run_cli(capsys, "--output", "json", "rank", "--order", "1")
    assert json.loads(out)["seed"] == 42
    _, out, _ = run_cli(capsys, "--seed", "7", "--output", "json",
                        "rank", "--order", "1")
    assert json.loads(out)["seed"] == 7


def test_invariants_verify_bundle(capsys):
    code, out, _ = run_cli(capsys, "--output", "json", "invariants", "verify")
    assert code == 0
    report = json.loads(out)
    derived = report["derived"]["candidates"]
    assert derived["R"]["overall"] == "relative"
    assert derived["R2"]["overall"] == "absolute"
    assert derived["R1_printed"]["overall"] == "relative"
    assert report["paper_printed"]["discrepancies"]
    assert report["notes"]


def test_invariants_verify_constant(capsys):
    code, out, _ = run_cli(capsys, "--output", "json",
                           "invariants", "verify", "--expr", "1")
    assert code == 0
    assert json.loads(out)["report"]["overall"] == "absolute"


def test_invariants_search_shorthand(capsys):
    code, out, _ = run_cli(capsys, "--output", "json", "invariants", "search",
                           "--blocks", "sigma,R,sigma^2*f_sigmasigma")
    assert code == 0
    report = json.loads(out)
    kernel = [tuple(v) for v in report["kernel"]]
    assert kernel == [(0, 1, -1)] or kernel == [(0, -1, 1)]
    assert len(report["candidates"]) == 1


def test_invariants_search_non_relative_block(capsys):
    code, _, err = run_cli(capsys, "invariants", "search", "--blocks", "f")
    assert code == 1
    assert "not relative" in err


def test_equiv_verdicts(capsys):
    code, out, _ = run_cli(capsys, "--output", "json",
                           "equiv", "sigma^2", "3*sigma^2")
    assert code == 0
    assert json.loads(out)["verdict"] == "equivalent-per-criterion"
    code, out, _ = run_cli(capsys, "--output", "json",
                           "equiv", "sigma^2", "sigma^3")
    assert json.loads(out)["verdict"] == "not-equivalent"
    code, out, _ = run_cli(capsys, "--output", "json", "equiv", "sigma", "sigma")
    assert json.loads(out)["verdict"] == "both-degenerate"


def test_equiv_signature_strings_reparse(capsys):
    _, out, _ = run_cli(capsys, "--output", "json",
                        "equiv", "u + sigma", "sigma^2")
    sig = json.loads(out)["a"]
    parse(sig["rho2"], ("u", "sigma"))


def test_equiv_parse_error(capsys):
    code, _, err = run_cli(capsys, "equiv", "sigma +* 2", "sigma")
    assert code == 1
    assert "parse error" in err


def test_equiv_orbit_search(capsys):
    code, out, _ = run_cli(capsys, "--output", "json", "equiv",
                           "u*sigma^2", "(u - 1)*sigma^2", "--orbit-search")
    assert code == 0
    report = json.loads(out)
    assert report["verdict"] == "not-equivalent"
    assert report["orbit_search"]["heuristic"] is True
    assert report["orbit_search"]["found"] is True


def test_classify(tmp_path, capsys):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("sigma^2\n3*sigma^2\nsigma^3\n")
    code, out, _ = run_cli(capsys, "--output", "json", "classify", str(corpus))
    assert code == 0
    report = json.loads(out)
    ids = [r["class_id"] for r in report["records"]]
    assert len(set(ids)) == 2
    assert not any(r["degenerate"] for r in report["records"])


def test_classify_empty_file(tmp_path, capsys):
    corpus = tmp_path / "empty.txt"
    corpus.write_text("")
    code, out, _ = run_cli(capsys, "--output", "json", "classify", str(corpus))
    assert code == 0
    assert json.loads(out)["records"] == []


def test_classify_unreadable_path(capsys):
    code, _, err = run_cli(capsys, "classify", "/nonexistent/corpus.txt")
    assert code == 1
    assert "i/o error" in err


def test_config_file(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"seed": 321, "samples": 4}))
    _, out, _ = run_cli(capsys, "--config", str(config), "--output", "json",
                        "rank", "--order", "1")
    report = json.loads(out)
    assert report["seed"] == 321
    assert report["samples_used"] == 4


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wavesym.cli", "rank", "--order", "0"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "rank" in proc.stdout
