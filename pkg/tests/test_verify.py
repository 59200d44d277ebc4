import math

import pytest

from schattenlab.ensembles import EnsembleParams
from schattenlab import verify as vf


def test_identity_suite_quadrature():
    for reports in (
        vf.identity_suite_for(EnsembleParams(2, 1, 0, 2), 2.0),
        vf.identity_suite_for(EnsembleParams(2, 1, 1, 2), 2.0),
        vf.identity_suite_for(EnsembleParams(2, 2, 1, 2), 1.0),
    ):
        for rep in reports:
            assert rep.passed, rep


def test_identity_lhs_coefficient_example():
    # (2,1,0), n=2, p=2: the degree-2 identity carries coefficient 5
    rep = vf.check_identity1(EnsembleParams(2, 1, 0, 2), 2.0)
    params = EnsembleParams(2, 1, 0, 2)
    assert (2 * params.d + 2) / 2 == 5.0
    assert rep.passed


def test_identity_requires_even_a_and_finite_p():
    with pytest.raises(ValueError):
        vf.check_identity1(EnsembleParams(1, 2, 0, 2), 2.0)
    with pytest.raises(ValueError):
        vf.check_identity2(EnsembleParams(2, 1, 0, 2), math.inf)


def test_identity_mc_route():
    rep = vf.check_identity1(EnsembleParams(2, 1, 0, 4), 2.0, method="mc",
                             budget=60_000, seed=3)
    assert rep.method == "mc"
    assert rep.passed, rep


def test_int_by_parts_cases():
    assert vf.check_int_by_parts(EnsembleParams(2, 1, 0, 2), 2.0, xi=2, f_id="one").passed
    assert vf.check_int_by_parts(EnsembleParams(1, 2, 0, 2), 2.0, xi=2, f_id="one").passed
    assert vf.check_int_by_parts(EnsembleParams(2, 2, 1, 2), 2.0, xi=2,
                                 f_id="norm2_sq").passed
    # degenerate n=1: reduces to the Gamma recurrence
    assert vf.check_int_by_parts(EnsembleParams(1, 1, 0, 1), 2.0, xi=2, f_id="one").passed


def test_zeta_bounds():
    rep = vf.check_zeta_bounds(2, 2, trials=50_000, seed=1)
    assert rep.passed
    # a = xi = 2 collapses the envelope to equality
    assert rep.lhs == pytest.approx(1.0, abs=1e-9)
    assert rep.rhs == pytest.approx(1.0, abs=1e-9)
    assert vf.check_zeta_bounds(2, 4, trials=50_000, seed=2).passed
    assert vf.check_zeta_bounds(1, 2, trials=50_000, seed=3).passed


def test_holder_band():
    assert vf.check_holder_band(3.0, 10, trials=20_000, seed=4).passed


def test_gamma_checks():
    assert vf.check_gamma_gap_positive().passed
    assert vf.check_gamma_sandwich().passed
    assert vf.check_gamma_discrepancy().passed


def test_entry_identities_check():
    rep = vf.check_entry_identities(per_field=60, seed=5)
    assert rep.passed
    assert rep.lhs <= 1e-9


def test_hermitian_split_examples():
    assert vf.check_hermitian_split(2, 2.0, xi=2).passed
    assert vf.check_hermitian_split(3, 2.0, xi=2, tol=1e-4).passed
    assert vf.check_hermitian_split(2, math.inf, xi=4).passed


def test_cross_term_negative_small():
    rep = vf.check_cross_term_negative(1, 0, 4, budget=30_000, seed=6)
    assert rep.passed
    assert rep.details["z"] < -3.0


def test_neg_correlation_p2():
    rep = vf.check_neg_correlation_threshold(1, 0, 2.0, n_grid=(16,), budget=60_000, seed=7)
    assert rep.passed
    r = rep.details["grid"][0]["ratio"]
    assert abs(r - 2.0) < 0.2


def test_antisym_normalization_small():
    rep = vf.check_antisym_normalization(4, 3.0, budget=6000, seed=8)
    assert rep.details["pair_worst"] <= 1e-10
    assert rep.details["norm_worst"] <= 1e-10
    assert rep.passed


def test_entry_correlations_p2():
    rep = vf.check_entry_correlations("R", 2.0, n=4, budget=30_000, seed=9)
    assert rep.passed
    assert abs(rep.details["quartic_z"]) <= 3.0


def test_isotropic_constant():
    rep = vf.check_isotropic_constant_limit("R", 16, budget=30_000, seed=10)
    assert rep.passed
    assert rep.rhs == pytest.approx(1.0 / math.sqrt(math.pi * math.exp(1.5)), rel=1e-12)


def test_k2_isotropy_report_runs():
    rep = vf.report_k2_isotropy("ComplexSymmetric", n=2, budget=3000, seed=11)
    assert rep.passed
    assert rep.provenance == "report-only"


def test_reports_are_reproducible():
    a = vf.check_cross_term_negative(1, 0, 4, budget=5000, seed=12)
    b = vf.check_cross_term_negative(1, 0, 4, budget=5000, seed=12)
    assert a.to_record() == b.to_record()


def test_run_suite_unknown():
    with pytest.raises(KeyError):
        vf.run_suite("bogus")


def test_suite_gamma():
    reports = vf.run_suite("gamma")
    assert len(reports) == 3
    assert all(r.passed for r in reports)
