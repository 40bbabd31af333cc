import pytest

from riemann_entropy.entropy import E
from riemann_entropy.errors import WrongConfiguration
from riemann_entropy.model import validate
from riemann_entropy.optimizer import minimize
from riemann_entropy.profile import build
from riemann_entropy.verifier import check_c0p_condition, check_cpp_condition, default_tol, verify


def test_c00_step():
    rep = verify(build(validate([0, 1], [3], [0]), [3.0]))
    (check,) = rep.per_jump
    assert check.config == "c00" and check.config_residual == 0.0
    assert rep.passed


def test_c00_wrong_speed_fails():
    rep = verify(build(validate([0, 1], [3], [0]), [2.5]))
    assert not rep.passed
    assert rep.per_jump[0].config_residual == -0.5


def test_merged_shock_hand_values():
    rep = verify(build(validate([0, 0.5, 1], [1, -1], [0, 0]), [0.0, 0.0]))
    (check,) = rep.per_jump
    assert check.config == "group"
    assert check.rh_flux_residual == 0.0
    assert check.oleinik_margins == [0.5]
    assert rep.min_inequality_margin == 0.5 and rep.passed


def test_cpp_at_minimizer():
    p = validate([0, 1, 2], [1, -1], [1, 1])
    pr = build(p, minimize(p).xi)
    rep = verify(pr)
    assert rep.per_jump[0].config == "c++"
    assert abs(check_cpp_condition(pr, 1)) <= rep.tol
    assert rep.passed


def test_cpp_symmetric():
    pr = build(validate([0, 1, 2], [0, 0], [1, 1]), [0.0])
    assert abs(check_cpp_condition(pr, 1)) < 1e-16


def test_cpp_sign_is_gradient():
    p = validate([0, 1, 2], [0, 0], [1, 1])
    r = check_cpp_condition(build(p, [0.3]), 1)
    assert r != 0
    fd = (E(p, [0.3 + 1e-6]) - E(p, [0.3 - 1e-6])) / 2e-6
    assert r == pytest.approx(fd, rel=1e-6)
    # stepping against the residual lowers the entropy
    assert E(p, [0.3 - 1e-3 * r]) < E(p, [0.3])


def test_c0p_at_minimizer_and_monotone():
    p = validate([0, 1, 2], [1, -1], [0, 0.6])
    xi = minimize(p).xi
    assert abs(check_c0p_condition(build(p, xi), 1)) <= 1e-9
    rs = [check_c0p_condition(build(p, xi + s), 1) for s in (-0.1, 0.0, 0.1)]
    assert rs[0] > rs[1] > rs[2]
    assert rs[2] < 0 < rs[0]


def test_c_plus_zero_reported_impossible():
    p = validate([0, 1, 2, 3], [0, 1, 2], [0.5, 0, 0])
    pr = build(p, [0.0, 1.0, 2.0])
    with pytest.raises(WrongConfiguration):
        check_c0p_condition(pr, 1)
    with pytest.raises(WrongConfiguration):
        check_cpp_condition(pr, 1)
    # an isolated c+0 speed never satisfies its jump condition
    check = verify(pr).per_jump[0]
    assert check.config == "c+0"
    assert check.rh_flux_residual == pytest.approx(check.jump.Aflux_minus) and check.jump.Aflux_minus > 0
    assert not verify(pr).passed


def test_group_member_rejected():
    pr = build(validate([0, 0.5, 1], [1, -1], [0, 0]), [0.0, 0.0])
    with pytest.raises(WrongConfiguration):
        check_c0p_condition(pr, 1)


def test_default_tol_scaling():
    pr = build(validate([0, 2], [-3], [0]), [-3.0])
    assert default_tol(pr) == pytest.approx(1e-8 * 4 * 2)


def test_rh_A_exact_and_report_serialisable():
    p = validate([0, 0.3, 1.0, 1.6], [1.0, -0.5, 0.2], [0.4, 0.0, 0.7])
    pr = build(p, minimize(p).xi)
    rep = verify(pr)
    assert all(c.rh_A_residual <= 1e-14 for c in rep.per_jump)
    d = rep.to_dict()
    assert d["passed"] == rep.passed and len(d["jumps"]) == len(rep.per_jump)


def test_independent_of_entropy_module():
    import riemann_entropy.verifier as mod

    source = open(mod.__file__).read()
    assert "from .entropy" not in source and "from .optimizer" not in source
    assert "E_gradient" not in source
