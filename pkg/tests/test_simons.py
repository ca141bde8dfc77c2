import numpy as np
import pytest

from symspace.errors import DomainError
from symspace.product import build_product
from symspace.simons import (
    Lemma,
    SubmanifoldGerm,
    ambient_sectional_sum,
    gauss_a_norm,
    graph_frames,
    intrinsic_scalar,
    lemma_rhs,
    main_bound,
    random_germ,
    route_disagreement,
    run_campaign,
    simons_term,
    simons_term_direct,
    simons_total,
    verify_lemma,
)


def reference_terms(germ):
    """Six terms of <R(A), A> by explicit loops over algebra vectors."""
    pair = germ.space.pair
    alg = pair.algebra
    br = alg.bracket

    def R(x, y, z):
        return -br(br(x, y), z)

    e = pair.from_m(germ.tangent)
    eta = pair.from_m(germ.normal)
    B = pair.from_m(germ.b_vectors())
    A = pair.from_m(germ.shape_vectors())
    p, q = len(e), len(eta)
    out = np.zeros(6)
    for j in range(q):
        for k in range(p):
            for l in range(p):
                w = germ.sff[k, l, j]
                t = np.zeros(6)
                for i in range(p):
                    t[0] += 2 * alg.metric(R(e[i], e[l], B[k, i]), eta[j])
                    t[1] += 2 * alg.metric(R(e[i], e[k], B[l, i]), eta[j])
                    t[2] -= alg.metric(A[j, k], R(e[i], e[l], e[i]))
                    t[3] -= alg.metric(A[j, l], R(e[i], e[k], e[i]))
                    t[4] += alg.metric(R(e[i], B[k, l], e[i]), eta[j])
                    t[5] -= 2 * alg.metric(A[j, i], R(e[i], e[k], e[l]))
                out += w * t
    return out


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_direct_route_matches_loops(s3s3, seed):
    germ = random_germ(s3s3, 0.5, 1.0, seed)
    assert np.allclose(germ.terms.direct, reference_terms(germ), atol=1e-12)


def test_routes_agree(s4s3):
    for seed in range(20):
        germ = random_germ(s4s3, 0.3, 2.0, seed)
        assert route_disagreement(germ) <= 1e-12 * max(1.0, germ.a_norm_sq)


def test_term6_sphere_expansion(s4s3):
    germ = random_germ(s4s3, 0.2, 1.0, 11)
    t = germ.terms
    assert t.six_factor1_expansion == pytest.approx(t.six_factor1_bracket, abs=1e-13)


def test_symmetry_of_terms(s3s3):
    germ = random_germ(s3s3, 0.4, 1.0, 4)
    assert simons_term(germ, 2) == pytest.approx(simons_term(germ, 1), abs=1e-12)
    assert simons_term(germ, 4) == pytest.approx(simons_term(germ, 3), abs=1e-12)
    for idx in range(1, 7):
        assert simons_term(germ, idx) == pytest.approx(simons_term_direct(germ, idx), abs=1e-12)


def test_zero_lambda_is_equality(s3s3):
    # totally geodesic position: <R(A), A> = (2 rho + 1/(p-1)) ||A||^2
    germ = random_germ(s3s3, 0.0, 1.0, 9)
    b = simons_total(germ)
    assert b.lambda_used == 0.0
    assert abs(b.margin) <= 1e-12


def test_zero_germ(s3s3):
    b = simons_total(random_germ(s3s3, 0.0, 0.0, 7))
    assert b.total == 0.0 and b.margin == 0.0


def test_random_germ_respects_lambda(s4s3):
    for seed in range(20):
        germ = random_germ(s4s3, 0.1, 1.0, seed)
        assert germ.lambda_frobenius <= 0.1 + 1e-12
        assert germ.lambda_operator <= germ.lambda_frobenius + 1e-12
        assert germ.a_norm == pytest.approx(1.0)


def test_germ_rejects_non_minimal(s3s3):
    tangent, normal = graph_frames(s3s3, np.zeros((3, 3)))
    sff = np.zeros((3, 3, 3))
    sff[0, 0, 0] = 1.0
    with pytest.raises(DomainError, match="minimal"):
        SubmanifoldGerm(s3s3, tangent, normal, sff)


def test_germ_rejects_bad_frames(s3s3):
    tangent, normal = graph_frames(s3s3, np.zeros((3, 3)))
    with pytest.raises(DomainError):
        SubmanifoldGerm(s3s3, 2 * tangent, normal, np.zeros((3, 3, 3)))


def test_germ_is_read_only(s3s3):
    germ = random_germ(s3s3, 0.1, 1.0, 0)
    with pytest.raises(ValueError):
        germ.sff[0, 0, 0] = 5.0


def test_frame_rotation_invariance(s4s3):
    germ = random_germ(s4s3, 0.3, 1.0, 5)
    o = np.linalg.qr(np.random.default_rng(2).standard_normal((4, 4)))[0]
    assert simons_total(germ.rotated(o)).total == pytest.approx(simons_total(germ).total, abs=1e-12)


def test_quadratic_scaling(s3s3):
    germ = random_germ(s3s3, 0.3, 1.0, 6)
    assert simons_total(germ.scaled(3.0)).total == pytest.approx(9 * simons_total(germ).total, rel=1e-12)


def test_lemmas_hold(s3s3):
    lam = s3s3.constants.lambda_tg
    for seed in range(30):
        germ = random_germ(s3s3, lam, 1.0, seed)
        for lemma in (Lemma.L1, Lemma.L3, Lemma.L6):
            assert verify_lemma(germ, lemma) >= -1e-9


def test_lemma_rhs_at_zero_lambda(s3s3):
    germ = random_germ(s3s3, 0.0, 1.0, 3)
    assert lemma_rhs(germ, "L1") == 0.0
    assert lemma_rhs(germ, Lemma.L3) == pytest.approx(0.5)
    assert lemma_rhs(germ, Lemma.L6) == pytest.approx(0.5)


def test_main_bound_formula(s3s3):
    assert main_bound(s3s3, 0.0, 2.0) == pytest.approx(2 * (1.0 + 0.5))
    lam = s3s3.constants.lambda_tg
    # at lambda_tg the bound drops to rho ||A||^2
    assert main_bound(s3s3, lam, 1.0) == pytest.approx(s3s3.rho)


def test_needs_sphere_factor(cp2, s2):
    space = build_product(cp2, s2, samples=256)
    germ = random_germ(space, 0.1, 1.0, 0)
    with pytest.raises(DomainError, match="sphere"):
        simons_total(germ)


def test_gauss_round_trip(s4s3):
    germ = random_germ(s4s3, 0.4, 1.3, 8)
    k = intrinsic_scalar(germ)
    assert gauss_a_norm(germ, k) == pytest.approx(germ.a_norm_sq, abs=1e-12)
    assert ambient_sectional_sum(germ) > 0


def test_totally_geodesic_sphere_scalar(s4s3):
    germ = random_germ(s4s3, 0.0, 0.0, 1)
    assert intrinsic_scalar(germ) == pytest.approx(4 * 3 / (2 * 3))


def test_campaign_prefix_property(s3s3):
    a = run_campaign(s3s3, 0.05, 10, seed=100)
    b = run_campaign(s3s3, 0.05, 4, seed=100)
    assert np.array_equal(a.main[:4], b.main)
    assert a.worst(a.main)[1] in a.seeds
