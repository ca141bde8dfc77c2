"""Symmetric pairs g = h + m and their curvature.

Tangent vectors of the symmetric space are elements of ``m``. Internally
every pair keeps an orthonormal frame (h basis first, then m basis) of the
whole algebra with respect to ``-B``; "m-coordinates" are coordinates in the
orthonormal m basis, where the metric is the identity.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import tolerances
from .errors import DegeneracyError, DomainError, InvalidDimensionError
from .lie import LieAlgebra, build_so, build_sp, build_su, orthonormalize

RANK_ONE_KINDS = ("sphere", "cpn", "hpn")


class SymmetricPair:
    """Algebraic model of a compact symmetric space.

    ``h_basis`` and ``m_basis`` are algebra vectors that together form a
    ``-B``-orthonormal basis of the algebra. The involution is implicit:
    +1 on h, -1 on m.
    """

    def __init__(self, algebra: LieAlgebra, h_basis, m_basis, name: str = "", *, kind: str = "", n: int | None = None):
        dim = algebra.dim
        h = np.array(h_basis, dtype=float).reshape(-1, dim)
        m = np.array(m_basis, dtype=float).reshape(-1, dim)
        frame = np.vstack([h, m])
        if frame.shape[0] != dim:
            raise DomainError(f"h and m bases span {frame.shape[0]} directions, algebra has {dim}")
        gram = frame @ algebra.metric_matrix @ frame.T
        err = np.abs(gram - np.eye(dim)).max()
        if err > tolerances.EXACT:
            raise DomainError(f"h + m basis is not metric-orthonormal (error {err:.3g})")
        self.algebra = algebra
        self.name = name
        self.kind = kind
        self.n = n
        self.dh, self.dm = h.shape[0], m.shape[0]
        frame.flags.writeable = False
        self.frame = frame
        self._frame_inv = np.linalg.inv(frame)
        on = np.einsum("ai,bj,ijk,kc->abc", frame, frame, algebra.structure, self._frame_inv, optimize=True)
        on.flags.writeable = False
        self.on_structure = on
        res = self.closure_residuals()
        worst = max(res.values())
        if worst > tolerances.ACCUMULATED:
            raise DomainError(f"not a symmetric pair: closure residuals {res}")

    @property
    def h_basis(self) -> np.ndarray:
        return self.frame[: self.dh]

    @property
    def m_basis(self) -> np.ndarray:
        return self.frame[self.dh :]

    @property
    def m_slice(self) -> slice:
        return slice(self.dh, self.dh + self.dm)

    @property
    def mm_h(self) -> np.ndarray:
        """Bracket m x m -> h in orthonormal coordinates, shape (dm, dm, dh)."""
        return self.on_structure[self.dh :, self.dh :, : self.dh]

    def closure_residuals(self) -> dict:
        on, dh = self.on_structure, self.dh
        h, m = slice(0, dh), slice(dh, None)
        return {
            "hh_in_h": float(np.abs(on[h, h, m]).max(initial=0.0)),
            "hm_in_m": float(np.abs(on[h, m, h]).max(initial=0.0)),
            "mm_in_h": float(np.abs(on[m, m, m]).max(initial=0.0)),
        }

    def to_frame(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float) @ self._frame_inv

    def to_m(self, v, tol: float | None = None) -> np.ndarray:
        """m-coordinates of an algebra vector; DomainError if it leaves m."""
        tol = tolerances.ACCUMULATED if tol is None else tol
        c = self.to_frame(v)
        leak = np.abs(c[..., : self.dh]).max(initial=0.0)
        if leak > tol * max(1.0, float(np.abs(c).max(initial=0.0))):
            raise DomainError(f"vector has an h-component of size {leak:.3g}")
        return c[..., self.dh :]

    def from_m(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=float) @ self.m_basis

    def embed_m(self, coords) -> np.ndarray:
        """Orthonormal full-frame coordinates of an m-coordinate vector."""
        coords = np.asarray(coords, dtype=float)
        out = np.zeros(coords.shape[:-1] + (self.dh + self.dm,))
        out[..., self.dh :] = coords
        return out

    def rebased(self, m_rotation) -> "SymmetricPair":
        """Same pair with its m basis rotated by an orthogonal matrix."""
        r = np.asarray(m_rotation, dtype=float)
        return SymmetricPair(self.algebra, self.h_basis, r @ self.m_basis, self.name, kind=self.kind, n=self.n)

    def __repr__(self):
        return f"SymmetricPair({self.name}, dim h={self.dh}, dim m={self.dm})"


def _pair_from_labels(alg: LieAlgebra, m_labels, name, kind, n) -> SymmetricPair:
    m_idx = [alg.index(s) for s in m_labels]
    h_idx = [i for i in range(alg.dim) if i not in m_idx]
    h = orthonormalize(alg, [alg.basis_vector(i) for i in h_idx])
    m = orthonormalize(alg, [alg.basis_vector(i) for i in m_idx])
    return SymmetricPair(alg, h, m, name, kind=kind, n=n)


def build_sphere_pair(n: int) -> SymmetricPair:
    """S^n = SO(n+1)/SO(n); m is spanned by the ``L_{a,n+1}``."""
    if n < 2:
        raise InvalidDimensionError(f"sphere pair needs n >= 2, got {n}")
    alg = build_so(n + 1)
    return _pair_from_labels(alg, [f"L{a},{n + 1}" for a in range(1, n + 1)], f"S^{n}", "sphere", n)


def build_cpn_pair(n: int) -> SymmetricPair:
    """CP^n = SU(n+1)/S(U(n) x U(1))."""
    if n < 1:
        raise InvalidDimensionError(f"CP^n pair needs n >= 1, got {n}")
    alg = build_su(n + 1)
    labels = [f"{t}{a},{n + 1}" for a in range(1, n + 1) for t in "XY"]
    return _pair_from_labels(alg, labels, f"CP^{n}", "cpn", n)


def build_hpn_pair(n: int) -> SymmetricPair:
    """HP^n = Sp(n+1)/(Sp(n) x Sp(1))."""
    if n < 1:
        raise InvalidDimensionError(f"HP^n pair needs n >= 1, got {n}")
    alg = build_sp(n + 1)
    labels = [f"{t}{a},{n + 1}" for a in range(1, n + 1) for t in ("AX", "AY", "BR", "BI")]
    return _pair_from_labels(alg, labels, f"HP^{n}", "hpn", n)


PAIR_BUILDERS = {"sphere": build_sphere_pair, "cpn": build_cpn_pair, "hpn": build_hpn_pair}


def curvature_op(pair: SymmetricPair, x, y, z) -> np.ndarray:
    """``R_{x,y} z = -[[x, y], z]`` for algebra vectors in m."""
    for v in (x, y, z):
        pair.to_m(v)
    alg = pair.algebra
    return -alg.bracket(alg.bracket(x, y), z)


def ricci(pair: SymmetricPair) -> np.ndarray:
    """Ricci form on m in m-coordinates: ``Ric(X, Y) = tr_m(Z -> -[X, [Y, Z]])``."""
    on, m = pair.on_structure, pair.m_slice
    # [e_b, e_c] = on[b, c, u] f_u ; [e_a, f_u] has e_c-component on[a, u, c]
    ric = -np.einsum("bcu,auc->ab", on[m, m, :], on[m, :, m])
    return 0.5 * (ric + ric.T)


def rho_min(pair: SymmetricPair) -> float:
    return float(np.linalg.eigvalsh(ricci(pair)).min())


def scalar_curvature(pair: SymmetricPair) -> float:
    return float(np.trace(ricci(pair)))


def sectional_curvature(pair: SymmetricPair, x, y) -> float:
    alg = pair.algebra
    num = alg.metric(curvature_op(pair, x, y, y), x)
    xx, yy, xy = alg.metric(x, x), alg.metric(y, y), alg.metric(x, y)
    den = xx * yy - xy * xy
    if den <= 1e-12 * xx * yy or xx == 0.0 or yy == 0.0:
        raise DegeneracyError("sectional curvature needs two independent vectors")
    return num / den


# --- extremal brackets over orthonormal 2-frames ------------------------------------------


@dataclass
class FrameSearch:
    values: np.ndarray  # per-sample refined ||[X, Y]||^2
    frames: np.ndarray  # (samples, dm, 2) refined orthonormal pairs, m-coordinates
    best: int


def _gram_schmidt2(q: np.ndarray) -> np.ndarray:
    x = q[..., 0]
    x = x / np.linalg.norm(x, axis=-1, keepdims=True)
    y = q[..., 1] - np.sum(x * q[..., 1], axis=-1, keepdims=True) * x
    y = y / np.linalg.norm(y, axis=-1, keepdims=True)
    return np.stack([x, y], axis=-1)


def _bracket_sq(t: np.ndarray, q: np.ndarray):
    v = np.einsum("sa,abh,sb->sh", q[..., 0], t, q[..., 1])
    return np.einsum("sh,sh->s", v, v), v


def two_frame_search(
    pair: SymmetricPair,
    samples: int = 4096,
    refine_steps: int = 200,
    seed: int = 0,
    maximize: bool = True,
    tol: float = 1e-10,
) -> FrameSearch:
    """Extremize ``||[X, Y]||^2`` over orthonormal pairs in m.

    Gaussian starting frames (sample ``i`` depends only on ``seed`` and
    ``i``), each refined by fixed-step projected gradient on the Stiefel
    manifold of 2-frames with a Gram-Schmidt retraction. A sample stops as
    soon as a step improves it by less than ``tol``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    dm = pair.dm
    if dm < 2:
        raise DegeneracyError("m must be at least 2-dimensional")
    t = np.ascontiguousarray(pair.mm_h)
    scale = float(np.einsum("abh,abh->a", t, t).max())
    step = 0.25 / scale if scale > 0 else 0.0
    sign = 1.0 if maximize else -1.0

    rng = np.random.default_rng(seed)
    q = _gram_schmidt2(rng.standard_normal((samples, dm, 2)))
    f, v = _bracket_sq(t, q)
    active = np.ones(samples, dtype=bool) if step > 0 else np.zeros(samples, dtype=bool)
    for _ in range(refine_steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        qa, va = q[idx], v[idx]
        gx = 2.0 * np.einsum("sh,abh,sb->sa", va, t, qa[..., 1])
        gy = 2.0 * np.einsum("sh,abh,sa->sb", va, t, qa[..., 0])
        g = np.stack([gx, gy], axis=-1)
        qtg = np.einsum("sai,saj->sij", qa, g)
        g = g - np.einsum("sai,sij->saj", qa, 0.5 * (qtg + qtg.transpose(0, 2, 1)))
        qn = _gram_schmidt2(qa + sign * step * g)
        fn, vn = _bracket_sq(t, qn)
        gain = sign * (fn - f[idx])
        take = gain > 0
        q[idx[take]], f[idx[take]], v[idx[take]] = qn[take], fn[take], vn[take]
        active[idx[gain < tol]] = False
    best = int(np.argmax(f) if maximize else np.argmin(f))
    return FrameSearch(values=f, frames=q, best=best)


def bracket_norm_max(pair: SymmetricPair, samples: int = 4096, refine_steps: int = 200, seed: int = 0) -> float:
    """Largest ``||[X, Y]||`` over unit X, Y in m (0 when dim m = 1)."""
    if pair.dm == 0:
        raise DegeneracyError("m is empty")
    if pair.dm == 1:
        return 0.0
    res = two_frame_search(pair, samples, refine_steps, seed, maximize=True)
    return float(np.sqrt(res.values[res.best]))


def sec_extrema(pair: SymmetricPair, samples: int = 4096, refine_steps: int = 200, seed: int = 0):
    """(max, min) sectional curvature; for orthonormal pairs sec = ||[X, Y]||^2."""
    hi = two_frame_search(pair, samples, refine_steps, seed, maximize=True)
    lo = two_frame_search(pair, samples, refine_steps, seed, maximize=False)
    return float(hi.values[hi.best]), float(lo.values[lo.best])


@dataclass
class RankOneResult:
    is_rank_one: bool
    certificate: float  # smallest ||[X, Y]||^2 found
    x: np.ndarray  # algebra vectors of the minimizing pair
    y: np.ndarray

    def __bool__(self):
        return self.is_rank_one


RANK_ONE_THRESHOLD = 1e-6


def is_rank_one(pair: SymmetricPair, samples: int = 4096, refine_steps: int = 200, seed: int = 0) -> RankOneResult:
    """Rank-one test: no orthonormal pair in m has a vanishing bracket.

    The minimizing pair is always returned so borderline cases can be
    inspected.
    """
    res = two_frame_search(pair, samples, refine_steps, seed, maximize=False)
    q = res.frames[res.best]
    cert = float(res.values[res.best])
    return RankOneResult(cert > RANK_ONE_THRESHOLD, cert, pair.from_m(q[:, 0]), pair.from_m(q[:, 1]))


@dataclass
class CurvatureSummary:
    rho: float
    k_bracket_max: float
    sec_max: float
    sec_min: float
    is_rank_one: bool
    scalar: float
    name: str = ""
    seed: int = 0
    samples: int = 0
    refine_steps: int = 0
    dim_h: int = 0
    dim_m: int = 0
    ricci_eigenvalues: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def curvature_summary(pair: SymmetricPair, samples: int = 4096, refine_steps: int = 200, seed: int = 0) -> CurvatureSummary:
    ric = ricci(pair)
    eig = np.linalg.eigvalsh(ric)
    if pair.dm >= 2:
        sec_max, sec_min = sec_extrema(pair, samples, refine_steps, seed)
    else:
        sec_max = sec_min = 0.0
    return CurvatureSummary(
        rho=float(eig.min()),
        k_bracket_max=float(np.sqrt(sec_max)),
        sec_max=sec_max,
        sec_min=sec_min,
        is_rank_one=bool(pair.dm >= 2 and sec_min > RANK_ONE_THRESHOLD),
        scalar=float(np.trace(ric)),
        name=pair.name,
        seed=seed,
        samples=samples,
        refine_steps=refine_steps,
        dim_h=pair.dh,
        dim_m=pair.dm,
        ricci_eigenvalues=[float(e) for e in eig],
    )
