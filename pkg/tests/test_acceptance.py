"""Acceptance gate: every criterion from the registry, one test each.

Run with -s to see the per-criterion PASS/FAIL lines; the same lines
come out of `aliaslab verify all`.  The context is session scoped so
the reconstruction runs shared between criteria happen once.
"""

import os

import pytest

from aliaslab.acceptance import AcceptanceContext, format_line, run_criteria


@pytest.fixture(scope="session")
def context():
    return AcceptanceContext(threads=int(os.environ.get("ALIASLAB_TEST_THREADS", "2")))


@pytest.fixture
def check(context, capfd):
    def _check(number):
        (result,) = run_criteria([number], context=context)
        line = format_line(result)
        # escape capture so the line shows up in plain pytest logs too
        with capfd.disabled():
            print(line, flush=True)
        assert result.passed, line

    return _check


def test_criterion_01_psi_identities(check):
    check(1)


def test_criterion_02_psi_oracle(check):
    check(2)


def test_criterion_03_psi_asymptotics(check):
    check(3)


def test_criterion_04_psi_decay(check):
    check(4)


def test_criterion_05_hurwitz_tail(check):
    check(5)


def test_criterion_06_sqrt_coefficient(check):
    check(6)


def test_criterion_07_tangency_geometry(check):
    check(7)


def test_criterion_08_crt_fidelity(check):
    check(8)


def test_criterion_09_crt_convergence(check):
    check(9)


def test_criterion_10_grt_convergence(check):
    check(10)


def test_criterion_11_eta_robustness(check):
    check(11)


def test_criterion_12_determinism(check):
    check(12)
