import pytest

from monomorph.suites import SUITES, SuiteResult, random_mixed, run_suite

SMALL = {
    "oracle": dict(samples=24, n=6),
    "thresholds": dict(samples=12, digraphs=6, binaries=0),
    "2k+1": dict(samples=18, n_max=8),
    "intervals": dict(samples=24, n=8),
    "consistency": dict(samples=12, n=6),
    "ramsey": dict(samples=5),
    "tournament": dict(samples=2, n_max=7),
}


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_small_run(name):
    res = run_suite(name, seed=3, **SMALL[name])
    assert res.passed, res.violations[:3]
    assert res.line().startswith("PASS  " + name)


def test_suites_are_deterministic():
    a = run_suite("oracle", samples=10, n=5, seed=4)
    b = run_suite("oracle", samples=10, n=5, seed=4)
    assert (a.samples, a.violations, a.report) == (b.samples, b.violations, b.report)


def test_unknown_suite_and_empty_result():
    with pytest.raises(ValueError):
        run_suite("nope")
    assert not SuiteResult("x").passed


def test_random_mixed_sizes():
    assert all(random_mixed(i, 5, i).n == 5 for i in range(12))
