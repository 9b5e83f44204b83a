"""Acceptance gate: each criterion at its stated bound, one PASS/FAIL line each.

Run directly with ``python3 tests/test_acceptance.py`` or through pytest; the
lines are printed either way.
"""

import sys

import pytest

from multiquad import acceptance

RESULTS = {}


@pytest.fixture
def report(capsys):
    def emit(result):
        RESULTS[result.number] = result
        with capsys.disabled():
            print("\n" + result.line())
            for msg in result.failures[:10]:
                print(f"    {msg}")
        return result

    return emit


def test_criterion_1_degree_formula(report):
    r = report(acceptance.degree_formula(p_max=10**6, tolerance=0.10, time_limit=10.0))
    assert r.passed, r.detail


def test_criterion_2_counting_theorem(report):
    r = report(acceptance.counting_theorem(time_limit=60.0))
    assert r.passed, r.detail


def test_criterion_3_isomorphism(report):
    r = report(acceptance.isomorphism(p_member=10**5, p_max=10**6, tolerance=0.10))
    assert r.passed, r.detail


def test_criterion_4_main_term(report):
    r = report(acceptance.main_term(N=10**6, tolerance=0.10, time_limit=30.0))
    assert r.passed, r.detail


def test_criterion_5_subgroup_structure(report):
    r = report(acceptance.subgroup_structure())
    assert r.passed, r.detail


def test_criterion_6_cancellation_identity(report):
    r = report(acceptance.cancellation_identity(count=50))
    assert r.passed, r.detail


def test_criterion_7_symbol_oracle(report):
    r = report(acceptance.symbol_oracle(s_bound=30, d_bound=120, samples=20))
    assert r.passed, r.detail


if __name__ == "__main__":
    results = acceptance.run_all(p_max=10**6)
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
