import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riemann_entropy.errors import (
    LengthMismatch,
    NegativeDiffusion,
    NonIncreasingBreakpoints,
    OutOfRange,
    ProblemError,
)
from riemann_entropy.model import is_hyperbolic, load_problem, problem_from_dict, validate


def test_d_for_positive_last_diffusion():
    assert validate([0, 1], [0], [1]).d == 0


def test_d_for_zero_last_diffusion():
    assert validate([0, 1], [0], [0]).d == 1


def test_repeated_breakpoint_rejected():
    with pytest.raises(NonIncreasingBreakpoints):
        validate([0, 0], [0], [1])


def test_negative_diffusion_rejected():
    with pytest.raises(NegativeDiffusion) as info:
        validate([0, 1], [0], [-0.1])
    assert info.value.field == "a"


@pytest.mark.parametrize("u, v, a, field", [([0, 1, 2], [0], [1], "u"), ([0, 1], [0], [1, 1], "a"), ([0], [], [], "v")])
def test_length_mismatch_names_field(u, v, a, field):
    with pytest.raises(LengthMismatch) as info:
        validate(u, v, a)
    assert info.value.field == field


def test_phi_values():
    p = validate([0, 0.5, 1], [1, -1], [0, 0])
    assert p.phi(0.5) == pytest.approx(0.5, abs=1e-15)
    assert p.phi(0.0) == 0.0
    assert p.phi(1.0) == pytest.approx(0.0, abs=1e-15)


def test_A_values():
    assert validate([0, 1], [0], [1]).A(1.0) == 1.0
    assert validate([0, 1], [0], [0]).A(1.0) == 0.0
    assert validate([0, 0.5, 1], [0, 0], [0, 2]).A(1.0) == pytest.approx(2.0, rel=1e-15)


def test_out_of_range():
    p = validate([0, 1], [0], [1])
    with pytest.raises(OutOfRange):
        p.phi(1.5)
    with pytest.raises(OutOfRange):
        p.A(np.array([0.5, -0.1]))


def test_problem_is_immutable():
    p = validate([0, 1], [0], [1])
    with pytest.raises(ValueError):
        p.u[0] = 3.0


def test_file_round_trip(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"u": [0, 0.5, 1], "v": [1, -1], "a": [0, 0.3]}))
    p = load_problem(path)
    assert p == validate([0, 0.5, 1], [1, -1], [0, 0.3])
    assert problem_from_dict(p.to_dict()) == p


@pytest.mark.parametrize(
    "data, field",
    [({"u": [0, 1], "v": [0]}, "a"), ({"u": [0, 1], "v": ["x"], "a": [0]}, "v"), ({"u": 3, "v": [0], "a": [0]}, "u")],
)
def test_parse_errors_name_field(data, field):
    with pytest.raises(ProblemError) as info:
        problem_from_dict(data)
    assert info.value.field == field
    assert field in str(info.value)


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ProblemError):
        load_problem(path)


def test_is_hyperbolic():
    assert is_hyperbolic(validate([0, 1, 2], [0, 1], [0, 0]))
    assert not is_hyperbolic(validate([0, 1, 2], [0, 1], [0, 0.1]))


problems = st.integers(1, 6).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0.05, 2.0), min_size=n, max_size=n),
        st.lists(st.floats(-3, 3), min_size=n, max_size=n),
        st.lists(st.one_of(st.just(0.0), st.floats(0.01, 2.0)), min_size=n, max_size=n),
    )
)


@settings(max_examples=60, deadline=None)
@given(problems, st.floats(0, 1), st.floats(0, 1))
def test_fluxes_affine_between_breakpoints(data, s, r):
    du, v, a = data
    u = np.concatenate([[0.0], np.cumsum(du)])
    p = validate(u, v, a)
    k = min(int(s * p.n), p.n - 1)
    x = u[k] + r * (u[k + 1] - u[k])
    y = u[k + 1] - 0.3 * r * (u[k + 1] - u[k])
    for f in (p.phi, p.A):
        assert f((x + y) / 2) == pytest.approx((f(x) + f(y)) / 2, abs=1e-14 * (1 + abs(f(x))))
    grid = np.linspace(p.alpha, p.beta, 200)
    assert np.all(np.diff(p.A(grid)) >= 0)
    assert p.d == p.n - int(a[-1] > 0)
