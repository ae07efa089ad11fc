import pytest

from kdvexp import selftest
from kdvexp.exceptions import OracleMismatch
from kdvexp.selftest import SUITES, SuiteResult, check, run_selftests


@pytest.mark.parametrize("name", list(SUITES))
def test_suite_passes(name):
    (result,) = run_selftests(3, samples=2, suites=[name])

    assert result.name == name
    assert result.passed, f"{name}: worst {result.worst:.3e} > {result.tolerance:.1e}"
    assert result.cases > 0


def test_run_selftests_all():
    results = run_selftests(0, samples=1, suites=["key-identity", "isometry"])
    assert [result.name for result in results] == ["key-identity", "isometry"]


def test_run_selftests_streams_independent_of_selection():
    alone = run_selftests(5, samples=1, suites=["isometry"])
    together = run_selftests(5, samples=1, suites=["key-identity", "isometry"])
    assert alone[0] == together[1]


def test_run_selftests_unknown_suite():
    with pytest.raises(KeyError):
        run_selftests(0, suites=["nonexistent"])


def test_check():
    passed = SuiteResult(name="isometry", passed=True, worst=0.0, tolerance=1e-13, cases=3)
    failed = SuiteResult(name="zero-mode", passed=False, worst=1.0, tolerance=1e-12, cases=3)

    check([passed])
    with pytest.raises(OracleMismatch, match="zero-mode"):
        check([passed, failed])


def test_key_identity_is_exact():
    result = selftest.key_identity(None, 0)
    assert result.passed
    assert result.worst == 0
    assert result.cases == 2001**2
