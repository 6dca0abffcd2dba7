import numpy as np
import pytest

from auerbach import (
    INFINITY,
    BasisMatrix,
    DomainError,
    RankError,
    ShapeError,
    bj_directional,
    bj_minimization_oracle,
    bj_orthogonal_smooth,
    criticality_residual,
    dual_basis,
    golden_section_min,
    hadamard2_basis,
    identity_basis,
    is_auerbach,
    jinf_basis,
    jp_basis,
    p_map,
    solve_rp,
    unit_rows,
)
from conftest import verified_bases
from pairs import polyhedral_pairs, smooth_pairs


# -- examples -------------------------------------------------------------------

def test_smooth_examples():
    assert bj_orthogonal_smooth([1, 1], [1, -1], 3)
    v = bj_orthogonal_smooth([1, 0], [1, 0], 3)
    assert not v and v.witness == pytest.approx(1.0)
    r = solve_rp(3).value
    assert bj_orthogonal_smooth([1, 1, -r], [1, -r, 1], 3)


def test_smooth_rejects_zero_x_and_nonsmooth_p():
    with pytest.raises(DomainError):
        bj_orthogonal_smooth([0, 0], [1, 0], 3)
    with pytest.raises(DomainError):
        bj_orthogonal_smooth([1, 0], [1, 0], "inf")


def test_zero_y_is_orthogonal_to_everything():
    assert bj_orthogonal_smooth([1, 2], [0, 0], 3)
    assert bj_directional([1, 2], [0, 0], "inf")


def test_directional_examples():
    assert bj_directional([1, 1, 1], [-1, 1, 1], "inf")
    assert bj_directional([1, 1, 0], [0, 0, 5], "1")
    assert not bj_directional([1, 0, 0], [1, 0, 0], "1")
    assert not bj_directional([1, 0.5], [1, 0], "inf")
    with pytest.raises(DomainError):
        bj_directional([1, 0], [0, 1], 3)
    with pytest.raises(DomainError):
        bj_directional([0, 0], [0, 1], "inf")


def test_orthogonality_is_not_symmetric():
    # x = (1, 0.5) at p = inf: active set {0}; y = (0, 1) gives no first-order change
    assert bj_directional([1, 0.5], [0, 1], "inf")
    assert not bj_directional([0, 1], [1, 0.5], "inf")


def test_oracle_examples():
    # the norm grows like |lambda|^2.7 here, so lambda* is only resolvable to ~eps^(1/2.7)
    v = bj_minimization_oracle([1, 0], [0, 1], 2.7)
    assert v and abs(v.witness) < 1e-5
    v = bj_minimization_oracle([1, 1], [1, 1], 3)
    assert not v and v.witness == pytest.approx(-1.0, abs=1e-6)
    # witness is reported in caller units
    v = bj_minimization_oracle([2, 2], [1, 1], 3)
    assert v.witness == pytest.approx(-2.0, abs=1e-6)


def test_golden_section_finds_minimum():
    assert golden_section_min(lambda t: (t - 0.3) ** 2, -4, 4) == pytest.approx(0.3, abs=1e-8)
    assert golden_section_min(lambda t: abs(t + 1.25), -4, 4) == pytest.approx(-1.25, abs=1e-8)


# -- criterion versus oracle ------------------------------------------------------

@pytest.mark.parametrize("p", [2.5, 3.0, 5.0])
def test_smooth_criterion_agrees_with_oracle(p, rng):
    pairs = smooth_pairs(p, 300, rng)
    verdicts = [(bool(bj_orthogonal_smooth(x, y, p)), bool(bj_minimization_oracle(x, y, p))) for x, y in pairs]
    assert all(a == b for a, b in verdicts)
    assert 50 < sum(a for a, _ in verdicts) < 250


@pytest.mark.parametrize("p", ["1", "inf"])
def test_directional_criterion_agrees_with_oracle(p, rng):
    pairs = polyhedral_pairs(300, rng)
    verdicts = [(bool(bj_directional(x, y, p)), bool(bj_minimization_oracle(x, y, p))) for x, y in pairs]
    assert all(a == b for a, b in verdicts)
    assert 20 < sum(a for a, _ in verdicts) < 280


@pytest.mark.parametrize("p", [2.5, 3.0, 5.0])
def test_verdict_is_scale_insensitive(p, rng):
    for x, y in smooth_pairs(p, 60, rng):
        base = bool(bj_orthogonal_smooth(x, y, p))
        for a, b in ((3.0, 1.0), (-1e-4, 7.0), (1e5, -2.0)):
            assert bool(bj_orthogonal_smooth(a * x, b * y, p)) == base


def test_large_exponent_does_not_overflow():
    x = np.array([1e3, 2e3, -1e3])
    y = np.array([1.0, 0.0, 1.0])
    assert bj_orthogonal_smooth(x, y, 200.0).witness == pytest.approx(0.0, abs=1e-12)


# -- dual bases and the Auerbach check ------------------------------------------------

def test_dual_basis_examples():
    np.testing.assert_allclose(dual_basis(identity_basis(3, 3)).rows, np.eye(3))
    for p, q in ((3.0, 1.5), (4.0, 4 / 3)):
        D = dual_basis(hadamard2_basis(p))
        np.testing.assert_allclose(D.rows, hadamard2_basis(q).rows, atol=1e-15)
        assert D.p.value == pytest.approx(q)


def test_dual_rows_of_jp_are_supporting_functionals():
    J = jp_basis(3)
    D = dual_basis(J).rows
    np.testing.assert_allclose(D, [p_map(row, 3) for row in J.rows], atol=1e-13)


def test_dual_basis_rejects_singular():
    with pytest.raises(RankError):
        dual_basis(BasisMatrix([[1, 0], [1, 0]], 3))


def test_is_auerbach_examples():
    for n in (1, 2, 5):
        for p in (1, 1.5, 3, "inf"):
            assert is_auerbach(identity_basis(n, p))
    assert is_auerbach(jinf_basis(0.3))
    rep = is_auerbach(np.array([[1.0, 0.0], [1.0, 0.0]]), 3)
    assert not rep and rep.singular and rep.reason == "singular"
    with pytest.raises(ShapeError):
        is_auerbach(np.ones((2, 3)), 3)


def test_is_auerbach_rejects_non_unit_and_non_orthogonal(rng):
    assert not is_auerbach(2 * np.eye(3), 3)
    X = unit_rows(rng.standard_normal((3, 3)), 3)
    rep = is_auerbach(X, 3)
    assert not rep and rep.row_residual < 1e-12


@pytest.mark.parametrize("p", [1.5, 3.0, 4.0, "inf", "1"])
def test_dual_of_auerbach_basis_is_auerbach(p):
    for name, B in verified_bases(p if p != "1" else "inf").items():
        B = B if p != "1" else dual_basis(B).as_basis()
        assert is_auerbach(B), name
        D = dual_basis(B).as_basis()
        assert is_auerbach(D), name
        np.testing.assert_allclose(dual_basis(D).as_basis().rows, B.rows, atol=1e-12)


# -- criticality -----------------------------------------------------------------------

def test_criticality_examples(rng):
    assert criticality_residual(identity_basis(3, 3)) == 0.0
    assert criticality_residual(jp_basis(3)) < 1e-10
    X = unit_rows(rng.standard_normal((3, 3)), 3)
    assert not is_auerbach(X, 3)
    assert criticality_residual(X, 3) > 1e-2


def test_criticality_preconditions():
    with pytest.raises(DomainError):
        criticality_residual(2 * np.eye(2), 3)
    with pytest.raises(RankError):
        criticality_residual(np.array([[1.0, 0.0], [1.0, 0.0]]), 3)
    with pytest.raises(DomainError):
        criticality_residual(identity_basis(2, INFINITY))
