import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symspace.errors import DegeneracyError, DimensionMismatchError, InvalidDimensionError
from symspace.lie import LieAlgebra, build_so, build_sp, build_su, direct_sum, killing_from_structure, orthonormalize

ALGEBRAS = [("so", n) for n in range(3, 9)] + [("su", n) for n in range(2, 5)] + [("sp", n) for n in (1, 2)]
BUILD = {"so": build_so, "su": build_su, "sp": build_sp}
# trace-form multiple c with B(X, Y) = c tr(XY) in the defining representation
TRACE_FACTOR = {"so": lambda n: n - 2, "su": lambda n: 2 * n, "sp": lambda n: 2 * (n + 1)}


@pytest.fixture(scope="module", params=ALGEBRAS, ids=lambda a: f"{a[0]}{a[1]}")
def algebra(request):
    family, n = request.param
    return family, n, BUILD[family](n)


def test_dimensions(algebra):
    family, n, alg = algebra
    expected = {"so": n * (n - 1) // 2, "su": n * n - 1, "sp": n * (2 * n + 1)}[family]
    assert alg.dim == expected


def test_jacobi_and_antisymmetry(algebra):
    _, _, alg = algebra
    assert alg.jacobi_residual() <= 1e-10
    assert alg.antisymmetry_residual() == 0.0


def test_compact(algebra):
    _, _, alg = algebra
    assert alg.is_compact


def test_killing_matches_trace_of_ad(algebra):
    # brute force: B_ij = tr(ad b_i ad b_j) using explicit matrices
    _, _, alg = algebra
    ads = [alg.ad(alg.basis_vector(i)) for i in range(alg.dim)]
    brute = np.array([[np.trace(a @ b) for b in ads] for a in ads])
    assert np.allclose(brute, alg.killing, atol=1e-12)


def test_killing_matches_trace_form(algebra):
    family, n, alg = algebra
    mats = alg.matrices
    c = TRACE_FACTOR[family](n)
    tr = np.real(np.einsum("iab,jba->ij", mats, mats))
    assert np.allclose(alg.killing, c * tr, atol=1e-10)


def test_bracket_matches_commutator(algebra):
    _, _, alg = algebra
    rng = np.random.default_rng(3)
    for _ in range(5):
        x, y = rng.standard_normal((2, alg.dim))
        X, Y = alg.to_matrix(x), alg.to_matrix(y)
        assert np.allclose(alg.to_matrix(alg.bracket(x, y)), X @ Y - Y @ X, atol=1e-12)
        assert np.allclose(alg.from_matrix(X), x, atol=1e-12)


def test_so3_killing_value():
    alg = build_so(3)
    assert np.allclose(np.linalg.eigvalsh(alg.killing), -2.0)


def test_so4_killing_value():
    assert np.allclose(np.linalg.eigvalsh(build_so(4).killing), -4.0)


def test_su2_killing_value():
    # B(X, X) = 4 tr(X^2) and tr((i sigma)^2) = -2
    alg = build_su(2)
    assert np.allclose(np.diag(alg.killing), -8.0)


def test_so3_bracket_sign():
    alg = build_so(3)
    x, y, z = (alg.basis_vector(alg.index(s)) for s in ("L1,2", "L1,3", "L2,3"))
    assert np.allclose(alg.bracket(x, y), -z)


def test_invalid_structure_shape():
    with pytest.raises(InvalidDimensionError):
        LieAlgebra(np.zeros((2, 3, 3)))


def test_dimension_mismatch():
    alg = build_so(3)
    with pytest.raises(DimensionMismatchError):
        alg.bracket(np.zeros(3), np.zeros(4))


def test_builders_reject_small_n():
    with pytest.raises(InvalidDimensionError):
        build_so(1)
    with pytest.raises(InvalidDimensionError):
        build_su(1)
    with pytest.raises(InvalidDimensionError):
        build_sp(0)


def test_json_round_trip_is_exact():
    alg = build_su(3)
    back = LieAlgebra.from_json(alg.to_json())
    assert np.array_equal(back.structure, alg.structure)
    assert back.basis_labels == alg.basis_labels
    assert json.loads(alg.to_json())["name"] == alg.name


def test_direct_sum_blocks():
    a, b = build_so(3), build_su(2)
    s = direct_sum(a, b)
    assert s.dim == 6
    x = s.basis_vector(0)
    y = s.basis_vector(4)
    assert np.all(s.bracket(x, y) == 0)
    assert np.allclose(s.killing[:3, :3], a.killing)


def test_orthonormalize_rejects_dependent():
    alg = build_so(4)
    v = alg.basis_vector(0)
    with pytest.raises(DegeneracyError):
        orthonormalize(alg, [v, 2 * v])


def test_killing_from_structure_symmetric():
    c = build_sp(2).structure
    k = killing_from_structure(c)
    assert np.array_equal(k, k.T)


vec = st.lists(st.floats(-3, 3, allow_nan=False), min_size=10, max_size=10)


@settings(max_examples=60, deadline=None)
@given(vec, vec, vec)
def test_ad_invariance_property(x, y, z):
    alg = build_so(5)
    x, y, z = map(np.array, (x, y, z))
    lhs = alg.killing_form(alg.bracket(x, y), z) + alg.killing_form(y, alg.bracket(x, z))
    assert abs(lhs) <= 1e-9 * max(1.0, np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z))


@settings(max_examples=60, deadline=None)
@given(vec, vec, st.floats(-5, 5, allow_nan=False))
def test_bracket_bilinear_antisymmetric(x, y, a):
    alg = build_so(5)
    x, y = np.array(x), np.array(y)
    assert np.allclose(alg.bracket(x, y), -alg.bracket(y, x), atol=1e-12)
    assert np.allclose(alg.bracket(a * x, y), a * alg.bracket(x, y), atol=1e-9)


def test_so_sign_convention():
    alg = build_so(5)
    for a, b, c in [(1, 2, 3), (1, 3, 5), (2, 4, 5)]:
        x = alg.basis_vector(alg.index(f"L{a},{b}"))
        y = alg.basis_vector(alg.index(f"L{b},{c}"))
        assert np.array_equal(alg.bracket(x, y), alg.basis_vector(alg.index(f"L{a},{c}")))


def test_so3_metric_values():
    alg = build_so(3)
    l12, l13 = alg.basis_vector(alg.index("L1,2")), alg.basis_vector(alg.index("L1,3"))
    assert alg.killing_form(l12, l13) == 0.0
    assert alg.metric(l12, l12) == pytest.approx(2.0)
    assert alg.metric(np.zeros(3), l13) == 0.0


def test_orthonormalize():
    alg = build_so(4)
    rng = np.random.default_rng(4)
    out = np.array(orthonormalize(alg, rng.standard_normal((5, 6))))
    assert np.allclose(out @ alg.metric_matrix @ out.T, np.eye(5), atol=1e-10)
    e = np.eye(6) / np.sqrt(4.0)
    assert np.allclose(orthonormalize(alg, e[:3]), e[:3], atol=1e-12)
