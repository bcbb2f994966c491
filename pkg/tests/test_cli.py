import io
import math
import json

import pytest

from motiveforge.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run
from motiveforge.poly import pmul

SEXTIC = ["--alpha", "1/2,1/3,2/3,1/6,5/6", "--beta", "1,1,1,1,1", "--z", "-1/512000"]


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def call_json(*argv):
    code, text = call(*argv, "--format", "json", "--compare")
    return code, json.loads(text) if text else None


def test_lfactor_example_l7():
    code, doc = call_json("hgm", "lfactor", *SEXTIC, "--p", "7", "--allow-degenerate")
    assert code == EXIT_OK
    expected = pmul(pmul([1, 49], [1, 0, -7 ** 4]), [1, -35, 7 ** 4])
    assert doc["result"]["factors"][0]["coeffs"] == expected
    assert doc["config"]["z"] == "-1/512000"
    assert "timestamp" not in doc["header"]


def test_degenerate_prime_needs_flag():
    code, _ = call("hgm", "lfactor", *SEXTIC, "--p", "7")
    assert code == EXIT_FAIL


def test_match_verify_row9():
    code, doc = call_json("match", "verify", "--row", "9", "--pmax", "200", "--mode", "trace", "--offline")
    assert code == EXIT_OK
    res = doc["result"]
    assert res["eps"] == -3 and res["eps_refit"]
    assert doc["config"]["offline"] is True


def test_series_check_rama2_label():
    code, text = call("series", "check", "--id", "rama2", "--digits", "40")
    assert code == EXIT_OK
    assert "identity conjectural" in text and "pass" in text


def test_mutually_exclusive_flags():
    code, _ = call("hgm", "trace", "--row", "1", "--alpha", "1/2", "--p", "3")
    assert code == EXIT_USAGE
    code, _ = call("lfunc", "check", "--row", "3", "--zeta")
    assert code == EXIT_USAGE


def test_usage_errors():
    assert call("bogus")[0] == EXIT_USAGE
    assert call("hgm", "lfactor", "--alpha", "1/2", "--p", "3")[0] == EXIT_USAGE
    assert call("match", "verify", "--row", "x")[0] == EXIT_USAGE


def test_computation_failure_is_machine_readable():
    code, doc = call_json("hgm", "lfactor", "--alpha", "1/3,1/2", "--beta", "1,1", "--z", "2", "--p", "5")
    assert code == EXIT_FAIL
    assert doc["diagnostic"]["error"] == "NotCyclotomic"


def test_compare_mode_is_byte_identical():
    a = call("match", "recover", "--row", "1", "--p", "11", "--format", "json", "--compare")
    b = call("match", "recover", "--row", "1", "--p", "11", "--format", "json", "--compare")
    assert a == b and a[0] == EXIT_OK
    doc = json.loads(a[1])
    assert doc["result"]["slopes"] == ["0", "1", "3", "4"]
    assert doc["result"]["matches_fixture"]


def test_trace_and_asai_commands():
    code, doc = call_json("hgm", "trace", "--row", "1", "--p", "3,7", "--rmax", "2")
    assert code == EXIT_OK
    assert [t["p"] for t in doc["result"]["traces"]] == [3, 7]
    code, doc = call_json("asai", "factor", "--row", "1", "--p", "11", "--tate", "1")
    assert doc["result"]["factors"][0]["coeffs"] == [1, 16, -19074, 234256, 214358881]


def test_jobs_preserve_order():
    code, doc = call_json("hgm", "lfactor", "--row", "1", "--p", "7,3", "--jobs", "2")
    assert code == EXIT_OK
    assert [f["p"] for f in doc["result"]["factors"]] == [7, 3]


def test_series_eval_and_congruence():
    code, doc = call_json("series", "eval", "--id", "rama1", "--digits", "20")
    assert code == EXIT_OK
    assert abs(float(doc["result"]["value"]) - 16 / (math.pi * math.sqrt(3))) < 1e-15
    code, doc = call_json("congruence", "scan", "--pmax", "40")
    assert code == EXIT_OK and doc["result"]["pass"]


def test_zeta_check():
    code, doc = call_json("lfunc", "check", "--zeta")
    assert code == EXIT_OK and doc["result"]["residual"] < 1e-10


def test_offline_fetch_fails_cleanly(tmp_path):
    code, doc = call_json("fixtures", "fetch", "--label", "2.2.5.1-16.1-a", "--offline", "--cache", str(tmp_path))
    assert code == EXIT_FAIL
    assert doc["diagnostic"]["error"] == "NotFound"


def test_fixtures_override(tmp_path):
    code, _ = call("match", "verify", "--row", "1", "--fixtures", str(tmp_path))
    assert code == EXIT_FAIL


def test_row_without_eigenform_reports_and_passes():
    # row 8 has no eigenform; the report says so and exits 0
    code, text = call("match", "verify", "--row", "8")
    assert code == EXIT_OK and "no eigenform" in text


@pytest.mark.parametrize("argv", [["--version"], ["hgm", "--help"]])
def test_informational_exit_zero(argv, capsys):
    assert call(*argv)[0] == EXIT_OK
