import math

import numpy as np
import pytest

from randstab.discrete import SibuyaBernoulli, discrete_gen_sml, discrete_ml
from randstab.stability import (
    GridSpec,
    check_class_L_decomposition,
    closed_form_scale,
    solve_scale,
    verify,
    verify_continuous,
    verify_discrete,
)
from randstab.transforms import (
    BernoulliShift,
    Degenerate,
    DomainError,
    Gamma,
    GeneralizedLinnik,
    Geometric1,
    Harris,
    MittagLeffler,
    PositiveStable,
    ScaleFunction,
    SemiML,
)

LT = GridSpec("linear", 0.1, 20.0, 200)


def test_harris_gamma():
    assert verify(Harris(3, 2), Gamma(0.5), 1 / 3, LT).max_residual <= 1e-13


def test_geometric_ml():
    assert verify(Geometric1(0.5), MittagLeffler(0.5, 1.0), 0.25, LT).max_residual <= 1e-13


def test_harris_gl():
    phi = GeneralizedLinnik(1.0, 0.7854, 0.5, 1.0)
    rep = verify(Harris(2, 2), phi, 0.5, GridSpec("linear", -30, 30, 200))
    assert rep.equation == "continuous-cf"
    assert rep.max_residual <= 1e-13


@pytest.mark.parametrize("a", [1.5, 2.0, math.e, 10.0])
def test_harris_gl_every_a(a):
    phi = GeneralizedLinnik(1.0, math.pi / 4, 0.5)
    assert verify(Harris(a, 2), phi, 1 / a).max_residual <= 1e-12


def test_negative_control():
    assert verify(Geometric1(0.5), Gamma(1.0), 0.3).max_residual > 1e-2


def test_discrete_geometric_ml():
    rep = verify_discrete(Geometric1(0.25), discrete_ml(1.0, 0.5), 0.0625)
    assert rep.equation == "discrete"
    assert rep.max_residual <= 1e-13


def test_discrete_harris_gen_sml():
    alpha = 0.6
    Q = discrete_gen_sml(ScaleFunction.pure_power(1.0, alpha), 0.5)
    assert verify(Harris(2, 2), Q, 2 ** (-1 / alpha)).max_residual <= 1e-13


def test_bernoulli_shift_sibuya_bernoulli():
    s = np.linspace(0, 1, 50)
    P, Q = BernoulliShift(0.5), SibuyaBernoulli(1.0, 0.5)
    assert np.max(np.abs(P(Q(s)) - SibuyaBernoulli(0.5, 0.5)(s))) <= 1e-15


def test_lt_rejects_c_above_one():
    with pytest.raises(DomainError, match="0 < c < 1"):
        verify_continuous(Geometric1(0.5), Gamma(1.0), 1.5)


def test_report_json_keys():
    d = verify(Harris(3, 2), Gamma(0.5), 1 / 3).to_dict()
    assert list(d) == ["equation", "compounder", "transform", "c", "tolerance",
                       "max_residual", "pass", "grid", "residuals"]
    assert d["grid"] == {"kind": "geometric", "lo": 1e-3, "hi": 1e2, "n": 200}
    assert len(d["residuals"]) == 200


def test_report_csv():
    lines = verify(Harris(3, 2), Gamma(0.5), 1 / 3, "0.1:1:5").to_csv().splitlines()
    assert lines[0] == "grid,residual"
    assert len(lines) == 6


def test_grid_parse():
    assert GridSpec.parse("0:1:3").points().tolist() == [0.0, 0.5, 1.0]
    assert GridSpec.parse("geometric:1:100:3").points() == pytest.approx([1, 10, 100])
    with pytest.raises(DomainError):
        GridSpec.parse("1:2")


class TestScale:
    def test_harris_ml(self):
        assert closed_form_scale(Harris(4, 1), MittagLeffler(0.5)) == pytest.approx(0.0625)

    def test_degenerate_stable(self):
        sol = solve_scale(Degenerate(4), PositiveStable(0.5))
        assert sol.closed_form and sol.stable
        assert sol.c == pytest.approx(0.0625)

    def test_log_periodic_matching_a(self):
        psi = ScaleFunction.log_periodic(1.0, 0.5, 0.25, 0.05)
        assert closed_form_scale(Geometric1(0.5), SemiML.from_psi(psi)) == 0.25

    def test_known_pairing_short_circuits(self):
        sol = solve_scale(Geometric1(0.3), Gamma(1.0))
        assert sol.closed_form
        assert sol.c == pytest.approx(0.3)

    def test_search_without_closed_form(self, monkeypatch):
        import randstab.stability as st
        monkeypatch.setattr(st, "closed_form_scale", lambda P, X: None)
        sol = st.solve_scale(Geometric1(0.3), Gamma(1.0), tol=1e-9)
        assert not sol.closed_form
        assert sol.c == pytest.approx(0.3, rel=1e-7)
        assert sol.stable

    def test_geometric_gamma_half_has_no_scale(self):
        sol = solve_scale(Geometric1(0.5), Gamma(0.5))
        assert not sol.stable
        assert sol.max_residual > 1e-3


class TestClassL:
    def test_cauchy_type(self):
        assert check_class_L_decomposition(GeneralizedLinnik(1.0, 0.0, 1.0), 2.0) <= 1e-13

    def test_skewed(self):
        assert check_class_L_decomposition(GeneralizedLinnik(0.5, 0.3, 0.5), 5.0) <= 1e-13

    def test_nu_must_be_reciprocal_integer(self):
        with pytest.raises(DomainError):
            check_class_L_decomposition(GeneralizedLinnik(1.0, 0.0, 0.4), 2.0)
