"""Lie triple systems in m and the injectivity of pi_1 on t + [t, t]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .errors import DomainError
from .lie import killing_from_structure
from .product import ProductSpace, projection_norms_m
from .symmetric import RANK_ONE_KINDS, SymmetricPair, is_rank_one

TRIPLE_TOL = 1e-8
BORDERLINE_TOL = 1e-3
INJECTIVE_TOL = 1e-8


def classify(residual: float) -> str:
    if residual <= TRIPLE_TOL:
        return "triple"
    if residual <= BORDERLINE_TOL:
        return "borderline"
    return "not-triple"


class CandidateSubspace:
    """Orthonormal subspace ``t`` of m, stored in m-coordinates of the pair.

    ``space`` may be a bare SymmetricPair or a ProductSpace; in the latter
    case the projections onto the factors are available.
    """

    def __init__(self, space, basis_m):
        self.space = space
        self.pair: SymmetricPair = space.pair if isinstance(space, ProductSpace) else space
        b = np.atleast_2d(np.asarray(basis_m, dtype=float))
        if b.shape[1] != self.pair.dm:
            raise DomainError(f"basis rows must have length dim m = {self.pair.dm}")
        err = np.abs(b @ b.T - np.eye(b.shape[0])).max()
        if err > tolerances.EXACT:
            raise DomainError(f"subspace basis is not orthonormal (error {err:.3g})")
        b.flags.writeable = False
        self.basis = b

    @classmethod
    def from_algebra_vectors(cls, space, vectors):
        pair = space.pair if isinstance(space, ProductSpace) else space
        return cls(space, pair.to_m(np.atleast_2d(vectors), tol=tolerances.EXACT))

    @classmethod
    def spanned_by(cls, space, vectors_m):
        """Orthonormalize arbitrary spanning m-coordinate vectors first."""
        q, r = np.linalg.qr(np.atleast_2d(np.asarray(vectors_m, dtype=float)).T)
        return cls(space, (q * np.sign(np.diag(r))).T)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def algebra_vectors(self) -> np.ndarray:
        return self.pair.from_m(self.basis)


def _full(pair: SymmetricPair, basis_m):
    return pair.embed_m(basis_m)


def triple_residual(sub: CandidateSubspace) -> float:
    """Largest component of ``[[x, y], z]`` orthogonal to t over basis triples."""
    pair = sub.pair
    on = pair.on_structure
    t = _full(pair, sub.basis)
    xy = np.einsum("ia,jb,abc->ijc", t, t, on)
    xyz = np.einsum("ijc,kd,cde->ijke", xy, t, on)
    proj = np.einsum("ijke,le,lf->ijkf", xyz, t, t)
    # whatever leaks into h also counts as leaving t
    return float(np.linalg.norm(xyz - proj, axis=-1).max(initial=0.0))


@dataclass
class Envelope:
    basis: np.ndarray  # orthonormal, full orthonormal-frame coordinates of the pair
    dim: int
    closure_residual: float
    killing_definite: bool

    def algebra_vectors(self, pair: SymmetricPair) -> np.ndarray:
        return self.basis @ pair.frame


def _orthonormal_span(vectors: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    u, s, _ = np.linalg.svd(vectors.T, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s.max(initial=0.0))))
    return u[:, :rank].T


def enveloping_algebra(sub: CandidateSubspace) -> Envelope:
    """Orthonormal basis of the subalgebra ``t + [t, t]`` with a closure check."""
    res = triple_residual(sub)
    if res > TRIPLE_TOL:
        raise DomainError(f"not a Lie triple system (residual {res:.3g})")
    pair = sub.pair
    on = pair.on_structure
    t = _full(pair, sub.basis)
    tt = np.einsum("ia,jb,abc->ijc", t, t, on).reshape(-1, on.shape[0])
    k = _orthonormal_span(np.vstack([t, tt]))
    kk = np.einsum("ia,jb,abc->ijc", k, k, on)
    closure = float(np.linalg.norm(kk - np.einsum("ijc,lc,ld->ijd", kk, k, k), axis=-1).max(initial=0.0))
    # intrinsic Killing form of the subalgebra in the basis k
    sc = np.einsum("ijc,lc->ijl", kk, k)
    definite = bool(np.linalg.eigvalsh(killing_from_structure(sc)).max(initial=-1.0) < 0)
    return Envelope(k, k.shape[0], closure, definite)


@dataclass
class InjectivityResult:
    applicable: bool
    injective: bool
    sigma_min: float
    pi2_operator: float
    reason: str = ""

    def __bool__(self):
        return self.injective


def _factor1_rank_one(space: ProductSpace) -> bool:
    if space.factor1.kind in RANK_ONE_KINDS:
        return True
    return bool(is_rank_one(space.factor1, samples=512))


def pi1_injectivity_check(sub: CandidateSubspace) -> InjectivityResult:
    """Smallest singular value of ``pi_1`` on the envelope ``t + [t, t]``.

    Not applicable when ``||pi_2||_op >= 1`` on t or the first factor is not
    rank one.
    """
    space = sub.space
    if not isinstance(space, ProductSpace):
        # a single factor: pi_1 is the identity
        enveloping_algebra(sub)  # raises unless t is a triple system
        return InjectivityResult(True, True, 1.0, 0.0)
    op = projection_norms_m(space, sub.basis).operator
    if op >= 1.0 - 1e-12:
        return InjectivityResult(False, False, float("nan"), op, "||pi_2||_op >= 1 on t")
    if not _factor1_rank_one(space):
        return InjectivityResult(False, False, float("nan"), op, "first factor is not rank one")
    env = enveloping_algebra(sub)
    d1 = space.factor1.algebra.dim
    # g1 = h1 + m1 in the product frame: h1 rows first, m1 first p entries of m
    pair = space.pair
    g1_idx = list(range(space.factor1.dh)) + list(range(pair.dh, pair.dh + space.p))
    assert len(g1_idx) == d1
    proj = env.basis[:, g1_idx]
    if env.dim > d1:
        smin = 0.0
    else:
        smin = float(np.linalg.svd(proj, compute_uv=False).min())
    return InjectivityResult(True, smin > INJECTIVE_TOL, smin, op)
