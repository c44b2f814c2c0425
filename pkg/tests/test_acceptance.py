"""Acceptance gate: runs every acceptance criterion at full size and prints
one PASS/FAIL line per criterion (visible with pytest -s or -rA).

The criteria are implemented in randfield.validation (also reachable via
``randfield validate --suite full``); here each one becomes its own test so
the gate reports them individually.  Criterion 12 additionally checks the
installed command line entry point end to end.
"""

import subprocess
import sys

import pytest

from randfield import validation


@pytest.fixture(scope="module")
def full_suite():
    return validation.run_suite(suite="full", seed=0, threads=1)


def check(results, index, name):
    result = results[index - 1]
    assert result.index == index
    assert result.name == name
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} criterion {index:02d} {name}: {result.detail}")
    assert result.passed, f"criterion {index:02d} {name}: {result.detail}"


def test_criterion_01_bonferroni_reference(full_suite):
    check(full_suite, 1, "bonferroni_reference")


def test_criterion_02_pointwise_false_positive_rate(full_suite):
    check(full_suite, 2, "pointwise_false_positive_rate")


def test_criterion_03_topology_oracles(full_suite):
    check(full_suite, 3, "topology_oracles")


def test_criterion_04_ec_density_identities(full_suite):
    check(full_suite, 4, "ec_density_identities")


def test_criterion_05_expected_ec_vs_monte_carlo(full_suite):
    check(full_suite, 5, "expected_ec_vs_monte_carlo")


def test_criterion_06_fwer_calibration(full_suite):
    check(full_suite, 6, "fwer_calibration")


def test_criterion_07_threshold_ordering(full_suite):
    check(full_suite, 7, "threshold_ordering")


def test_criterion_08_smoothness_recovery(full_suite):
    check(full_suite, 8, "smoothness_recovery")


def test_criterion_09_rice_upcrossings(full_suite):
    check(full_suite, 9, "rice_upcrossings")


def test_criterion_10_integral_variance(full_suite):
    check(full_suite, 10, "integral_variance")


def test_criterion_11_mean_ec_curve_shape(full_suite):
    check(full_suite, 11, "mean_ec_curve_shape")


def test_criterion_12_determinism(full_suite):
    check(full_suite, 12, "determinism")
    cmd = [sys.executable, "-m", "randfield", "validate", "--suite", "quick", "--seed", "0"]
    first = subprocess.run(cmd, capture_output=True, text=True)
    second = subprocess.run(cmd, capture_output=True, text=True)
    threaded = subprocess.run(cmd + ["--threads", "2"], capture_output=True, text=True)
    assert first.returncode == 0
    assert second.returncode == 0
    assert threaded.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout == threaded.stdout
    assert first.stdout.strip().splitlines()[-1] == "RESULT PASS 12/12"
    print("PASS criterion 12 extra: validate reports byte-identical across runs and thread counts")
