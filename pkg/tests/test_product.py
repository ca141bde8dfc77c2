import math

import numpy as np
import pytest

from symspace.errors import DomainError, InvalidDimensionError
from symspace.product import (
    build_product,
    codim_constant,
    constant_C,
    isolation_constant,
    killing_sphere_volume,
    lambda_K,
    lambda_K_from,
    lambda_tg,
    lambda_tg_from,
    projection_norms,
    projection_norms_m,
    sphere_volume,
    tg_volume_bound,
)
from symspace.symmetric import build_sphere_pair, rho_min


def test_codim_constant():
    assert codim_constant(3) == pytest.approx(5 / 3)
    assert codim_constant(1) == 1.0


def test_isolation_constant_zero_brackets():
    assert isolation_constant(2, 3, 0.0, 0.0) == 6.0


def test_isolation_constant_requires_p2():
    with pytest.raises(InvalidDimensionError):
        isolation_constant(1, 3, 0.5, 0.5)


def test_s3s3_constants(s3s3):
    c = s3s3.constants
    assert (c.p, c.N) == (3, 6)
    assert c.k1 == pytest.approx(0.5, abs=1e-12)
    assert c.C == pytest.approx(113.5, abs=1e-9)
    assert c.lambda_tg == pytest.approx(math.sqrt(1.0 / 113.5), abs=1e-10)
    assert c.lambda_K == pytest.approx(math.sqrt(1.0 / 115.0), abs=1e-10)


def test_s2s2_constant(s2s2):
    assert constant_C(s2s2) == pytest.approx(70.0, abs=1e-9)
    assert lambda_tg(s2s2) == pytest.approx(math.sqrt(1.5 / 70), abs=1e-10)


def test_q_for_s4s3(s4s3):
    assert s4s3.q == pytest.approx(5 / 3)


def test_lambda_k_below_lambda_tg(s3s3, s4s3, s2s2):
    for sp in (s3s3, s4s3, s2s2):
        assert lambda_K(sp) <= lambda_tg(sp)


def test_doubling_k2_decreases_lambdas():
    c1 = isolation_constant(3, 6, 0.5, 0.5)
    c2 = isolation_constant(3, 6, 0.5, math.sqrt(2) * 0.5)
    assert lambda_tg_from(0.5, 3, c2) < lambda_tg_from(0.5, 3, c1)
    assert lambda_K_from(0.5, 3, c2, math.sqrt(2) * 0.5) < lambda_K_from(0.5, 3, c1, 0.5)


def test_rho_is_min_of_factors(s4s3, s4, s3):
    assert s4s3.rho == pytest.approx(min(rho_min(s4), rho_min(s3)), abs=1e-10)


def test_block_structure(s4s3):
    on = s4s3.pair.on_structure
    m = s4s3.pair.m_slice
    block = on[m, m, :][: s4s3.p, s4s3.p :]
    assert np.all(block == 0.0)


def test_rebased_constants_stable(s3):
    rng = np.random.default_rng(1)
    q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    a = build_product(s3, s3).constants
    b = build_product(s3.rebased(q), s3).constants
    assert abs(a.lambda_tg - b.lambda_tg) <= 1e-8
    assert abs(a.lambda_K - b.lambda_K) <= 1e-8


def test_projection_norms(s3s3):
    # plane tilted by angle t from m1 towards m2
    t = 0.3
    v = np.zeros((1, 6))
    v[0, 0], v[0, 3] = math.cos(t), math.sin(t)
    n = projection_norms_m(s3s3, v)
    assert n.frobenius == pytest.approx(math.sin(t))
    assert n.operator == pytest.approx(math.sin(t))
    assert projection_norms(s3s3, s3s3.pair.from_m(v)).frobenius == pytest.approx(math.sin(t))


def test_projection_norms_rejects_non_orthonormal(s3s3):
    with pytest.raises(DomainError):
        projection_norms_m(s3s3, np.ones((2, 6)))


def test_tg_volume_bound():
    assert tg_volume_bound(3, 0.0) == 0.0
    assert tg_volume_bound(2, 1 / math.sqrt(2)) == pytest.approx(killing_sphere_volume(2))
    vals = [tg_volume_bound(4, x) for x in np.linspace(0, 0.9, 10)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        tg_volume_bound(2, 1.0)


def test_killing_sphere_volume():
    # S^2 of curvature 1/2 has radius sqrt 2 and area 8 pi
    assert killing_sphere_volume(2) == pytest.approx(8 * math.pi)
    assert sphere_volume(3) == pytest.approx(2 * math.pi**2)


def test_constants_dict_has_seeds(s3s3):
    d = s3s3.constants.to_dict()
    assert set(d) == {"p", "N", "q", "rho", "k1", "k2", "C", "lambda_tg", "lambda_K", "seeds"}
