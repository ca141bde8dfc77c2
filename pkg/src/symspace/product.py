"""Products X1 x X2 of symmetric spaces and the isolation constants.

The product pair orders its m basis as m1 first, then m2, so in
m-coordinates ``pi_1`` keeps the first ``p`` entries and ``pi_2`` the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .errors import DomainError, InvalidDimensionError
from .lie import direct_sum
from .symmetric import SymmetricPair, bracket_norm_max, rho_min


@dataclass(frozen=True)
class ProductConstants:
    p: int
    N: int
    q: float
    rho: float
    k1: float
    k2: float
    C: float
    lambda_tg: float
    lambda_K: float
    samples: int
    refine_steps: int
    seed: int

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("p", "N", "q", "rho", "k1", "k2", "C", "lambda_tg", "lambda_K")}
        d["seeds"] = {"k1": self.seed, "k2": self.seed, "samples": self.samples, "refine_steps": self.refine_steps}
        return d


@dataclass(frozen=True)
class LinearMapNorm:
    frobenius: float
    operator: float
    singular_values: tuple


def codim_constant(codim: int) -> float:
    """Simons' constant ``q = 2 - 1/codim``."""
    if codim < 1:
        raise InvalidDimensionError("codimension must be positive")
    return 2.0 - 1.0 / codim


def isolation_constant(p: int, N: int, k1: float, k2: float) -> float:
    """Constant collecting the four lemma estimates; k1, k2 enter squared."""
    if p < 2:
        raise InvalidDimensionError("the isolation constant needs p >= 2")
    k = k1 * k1 + k2 * k2
    c = N - p
    return (4 * p * p * c + 2 * p * c * c + p**3) * k + ((p * p + 2) / (p - 1) + 2 * p * p * c * k2 * k2)


def lambda_tg_from(rho: float, p: int, C: float) -> float:
    assert C > 0, "isolation constant must be positive"
    return math.sqrt((rho + 1.0 / (p - 1)) / C)


def lambda_K_from(rho: float, p: int, C: float, k2: float) -> float:
    denom = C + p * (p - 1) * k2 * k2
    assert denom > 0
    return math.sqrt((rho + 1.0 / (p - 1)) / denom)


class ProductSpace:
    def __init__(self, factor1: SymmetricPair, factor2: SymmetricPair, *, samples: int = 4096, refine_steps: int = 200, seed: int = 0):
        for f in (factor1, factor2):
            if not f.algebra.is_compact:
                raise DomainError(f"factor {f.name} is not of compact type")
        self.factor1, self.factor2 = factor1, factor2
        self.p = factor1.dm
        self.N = factor1.dm + factor2.dm
        if not self.N > self.p >= 2:
            raise InvalidDimensionError(f"need N > p >= 2, got p={self.p}, N={self.N}")
        alg = direct_sum(factor1.algebra, factor2.algebra)
        d1, d2 = factor1.algebra.dim, factor2.algebra.dim

        def lift(vs, offset):
            out = np.zeros((len(vs), d1 + d2))
            out[:, offset : offset + vs.shape[1]] = vs
            return out

        h = np.vstack([lift(factor1.h_basis, 0), lift(factor2.h_basis, d1)])
        m = np.vstack([lift(factor1.m_basis, 0), lift(factor2.m_basis, d1)])
        self.pair = SymmetricPair(alg, h, m, f"{factor1.name}x{factor2.name}", kind="product")
        self.name = self.pair.name
        self.constants = self._constants(samples, refine_steps, seed)

    def _constants(self, samples, refine_steps, seed) -> ProductConstants:
        p, N = self.p, self.N
        rho = rho_min(self.pair)
        k1 = bracket_norm_max(self.factor1, samples, refine_steps, seed)
        k2 = bracket_norm_max(self.factor2, samples, refine_steps, seed)
        C = isolation_constant(p, N, k1, k2)
        return ProductConstants(
            p=p,
            N=N,
            q=codim_constant(N - p),
            rho=rho,
            k1=k1,
            k2=k2,
            C=C,
            lambda_tg=lambda_tg_from(rho, p, C),
            lambda_K=lambda_K_from(rho, p, C, k2),
            samples=samples,
            refine_steps=refine_steps,
            seed=seed,
        )

    @property
    def q(self) -> float:
        return self.constants.q

    @property
    def rho(self) -> float:
        return self.constants.rho

    def pi1(self, coords) -> np.ndarray:
        """Project m-coordinates onto m1 (still as N-vectors)."""
        out = np.array(coords, dtype=float)
        out[..., self.p :] = 0.0
        return out

    def pi2(self, coords) -> np.ndarray:
        out = np.array(coords, dtype=float)
        out[..., : self.p] = 0.0
        return out

    def __repr__(self):
        return f"ProductSpace({self.name}, p={self.p}, N={self.N})"


def build_product(f1: SymmetricPair, f2: SymmetricPair, **kwargs) -> ProductSpace:
    return ProductSpace(f1, f2, **kwargs)


def projection_norms_m(space: ProductSpace, basis_m) -> LinearMapNorm:
    """Norms of ``pi_2`` restricted to the span of orthonormal m-coordinate rows."""
    s = np.atleast_2d(np.asarray(basis_m, dtype=float))
    err = np.abs(s @ s.T - np.eye(s.shape[0])).max()
    if err > tolerances.ACCUMULATED:
        raise DomainError(f"subspace basis is not orthonormal (error {err:.3g})")
    sv = np.linalg.svd(s[:, space.p :], compute_uv=False) if space.N > space.p else np.zeros(1)
    return LinearMapNorm(float(np.sqrt(np.sum(sv**2))), float(sv.max(initial=0.0)), tuple(float(x) for x in sv))


def projection_norms(space: ProductSpace, subspace_basis) -> LinearMapNorm:
    """Frobenius and operator norm of ``pi_2`` on a subspace of m1 + m2.

    ``subspace_basis`` holds algebra vectors of the product algebra.
    """
    return projection_norms_m(space, space.pair.to_m(np.atleast_2d(subspace_basis)))


def constant_C(space: ProductSpace) -> float:
    c = space.constants
    return isolation_constant(c.p, c.N, c.k1, c.k2)


def lambda_tg(space: ProductSpace) -> float:
    c = space.constants
    return lambda_tg_from(c.rho, c.p, constant_C(space))


def lambda_K(space: ProductSpace) -> float:
    c = space.constants
    return lambda_K_from(c.rho, c.p, constant_C(space), c.k2)


def sphere_volume(p: int, radius: float = 1.0) -> float:
    return 2.0 * math.pi ** ((p + 1) / 2) / math.gamma((p + 1) / 2) * radius**p


def killing_sphere_volume(p: int) -> float:
    """Volume of S^p = SO(p+1)/SO(p) under the metric ``-B``.

    Sectional curvature there is 1/(2(p-1)), i.e. radius sqrt(2(p-1)).
    """
    if p < 2:
        raise InvalidDimensionError("need p >= 2")
    return sphere_volume(p, math.sqrt(2.0 * (p - 1)))


def tg_volume_bound(p: int, lam: float) -> float:
    """Upper bound on vol(pi_2(T)) for a totally geodesic p-dimensional T."""
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda must lie in [0, 1), got {lam}")
    return (lam * lam / (1.0 - lam * lam)) ** (p / 2) * killing_sphere_volume(p)
