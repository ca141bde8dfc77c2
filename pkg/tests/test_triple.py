import numpy as np
import pytest

from symspace.errors import DomainError
from symspace.triple import (
    CandidateSubspace,
    classify,
    enveloping_algebra,
    pi1_injectivity_check,
    triple_residual,
)


def random_subspace(space, dim, rng):
    n = space.pair.dm if hasattr(space, "pair") else space.dm
    return CandidateSubspace.spanned_by(space, rng.standard_normal((dim, n)))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_great_sphere(s4, k):
    sub = CandidateSubspace(s4, np.eye(4)[:k])
    assert triple_residual(sub) <= 1e-10
    env = enveloping_algebra(sub)
    assert env.dim == k * (k + 1) // 2
    assert env.killing_definite
    assert env.closure_residual <= 1e-10


def test_sphere_subspaces_are_always_triple(s4):
    # constant curvature: [[x, y], z] = kappa(<y,z>x - <x,z>y) stays in t
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert triple_residual(random_subspace(s4, 3, rng)) <= 1e-12


def test_random_subspaces_in_product_are_not_triple(s3s3):
    rng = np.random.default_rng(1)
    res = [triple_residual(random_subspace(s3s3, 3, rng)) for _ in range(50)]
    assert min(res) > 1e-3


def test_random_cp2_planes_not_triple(cp2):
    # 3-planes in CP^2 never carry a triple system
    rng = np.random.default_rng(2)
    assert min(triple_residual(random_subspace(cp2, 3, rng)) for _ in range(30)) > 1e-3


@pytest.mark.parametrize("fixture", ["s2s2", "s3s3"])
def test_diagonal(fixture, request):
    space = request.getfixturevalue(fixture)
    p = space.p
    diag = np.hstack([np.eye(p), np.eye(p)]) / np.sqrt(2)
    sub = CandidateSubspace(space, diag)
    assert triple_residual(sub) <= 1e-10
    env = enveloping_algebra(sub)
    assert env.dim == p * (p + 1) // 2
    inj = pi1_injectivity_check(sub)
    assert inj.applicable and inj
    assert inj.sigma_min == pytest.approx(1 / np.sqrt(2))
    assert inj.pi2_operator == pytest.approx(1 / np.sqrt(2))


def test_factor2_subspace_not_applicable(s3s3):
    sub = CandidateSubspace(s3s3, np.eye(6)[3:5])
    inj = pi1_injectivity_check(sub)
    assert not inj.applicable
    assert "pi_2" in inj.reason


def test_non_rank_one_first_factor(s2s2, s3):
    from symspace.product import build_product

    space = build_product(s2s2.pair, s3, samples=256)
    sub = CandidateSubspace(space, np.eye(space.N)[:2])
    inj = pi1_injectivity_check(sub)
    assert not inj.applicable
    assert "rank one" in inj.reason


def test_envelope_rejects_non_triple(s3s3):
    sub = random_subspace(s3s3, 3, np.random.default_rng(5))
    with pytest.raises(DomainError):
        enveloping_algebra(sub)


def test_single_factor_injectivity(s4):
    inj = pi1_injectivity_check(CandidateSubspace(s4, np.eye(4)[:2]))
    assert inj.injective and inj.sigma_min == 1.0


def test_basis_validation(s4):
    with pytest.raises(DomainError):
        CandidateSubspace(s4, np.ones((2, 4)))
    with pytest.raises(DomainError):
        CandidateSubspace(s4, np.eye(3))


def test_from_algebra_vectors(s4):
    sub = CandidateSubspace.from_algebra_vectors(s4, s4.m_basis[:2])
    assert np.allclose(sub.basis, np.eye(4)[:2])


def test_classify():
    assert classify(0.0) == "triple"
    assert classify(1e-5) == "borderline"
    assert classify(0.1) == "not-triple"
