"""Pointwise second fundamental form data and the Simons curvature term R(A).

A germ lives in the m-coordinates of a product space (orthonormal, metric =
identity). ``sff[i, k, j] = <B(e_i, e_k), eta_j>`` and the shape operator is
``A^{eta_j}(e_k) = sum_i sff[i, k, j] e_i``.

``<R(A), A>`` splits into six terms. Each is computed twice: directly from
``R_{X,Y}Z = -[[X, Y], Z]`` inserted into the defining sum, and through the
rewritten forms used in the lower bounds (bracket pairings, the Ricci
splitting, and the explicit constant-curvature expansion on the sphere
factor). The two routes must agree.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from . import tolerances
from .errors import DomainError, InternalConsistencyError
from .product import ProductSpace
from .symmetric import ricci

ROUTE_TOL = 1e-8


class Lemma(str, enum.Enum):
    L1 = "L1"
    L3 = "L3"
    L5 = "L5"
    L6 = "L6"


@dataclass(frozen=True, eq=False)
class SubmanifoldGerm:
    space: ProductSpace
    tangent: np.ndarray  # (p, N)
    normal: np.ndarray  # (N - p, N)
    sff: np.ndarray  # (p, p, N - p)
    seed: int | None = None

    def __post_init__(self):
        sp = self.space
        p, N = sp.p, sp.N
        for name, shape in (("tangent", (p, N)), ("normal", (N - p, N)), ("sff", (p, p, N - p))):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise DomainError(f"{name} has shape {arr.shape}, expected {shape}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        frame = np.vstack([self.tangent, self.normal])
        err = np.abs(frame @ frame.T - np.eye(N)).max()
        if err > tolerances.EXACT:
            raise DomainError(f"tangent and normal frames are not jointly orthonormal (error {err:.3g})")
        if np.abs(self.sff - self.sff.transpose(1, 0, 2)).max(initial=0.0) > 1e-12 * max(1.0, self.a_norm):
            raise DomainError("second fundamental form is not symmetric")
        trace = np.einsum("iij->j", self.sff)
        if np.abs(trace).max(initial=0.0) > 1e-12 * max(1.0, self.a_norm):
            raise DomainError(f"germ is not minimal: traces {trace}")

    @property
    def p(self) -> int:
        return self.space.p

    @property
    def a_norm_sq(self) -> float:
        return float(np.sum(self.sff**2))

    @property
    def a_norm(self) -> float:
        return float(np.sqrt(self.a_norm_sq))

    @cached_property
    def pi2_norms(self):
        sv = np.linalg.svd(self.tangent[:, self.space.p :], compute_uv=False)
        return float(np.sqrt(np.sum(sv**2))), float(sv.max(initial=0.0))

    @property
    def lambda_frobenius(self) -> float:
        return self.pi2_norms[0]

    @property
    def lambda_operator(self) -> float:
        return self.pi2_norms[1]

    def b_vectors(self) -> np.ndarray:
        """``B(e_i, e_k)`` in m-coordinates, shape (p, p, N)."""
        return np.einsum("ikj,jd->ikd", self.sff, self.normal)

    def shape_vectors(self) -> np.ndarray:
        """``A^{eta_j}(e_k)`` in m-coordinates, shape (N - p, p, N)."""
        return np.einsum("ikj,id->jkd", self.sff, self.tangent)

    def scaled(self, t: float) -> "SubmanifoldGerm":
        return SubmanifoldGerm(self.space, self.tangent, self.normal, t * self.sff, self.seed)

    def rotated(self, rotation) -> "SubmanifoldGerm":
        """Change of tangent frame ``e'_a = sum_i O[a, i] e_i``; B transforms as a 2-tensor."""
        o = np.asarray(rotation, dtype=float)
        sff = np.einsum("ai,bk,ikj->abj", o, o, self.sff)
        return SubmanifoldGerm(self.space, o @ self.tangent, self.normal, 0.5 * (sff + sff.transpose(1, 0, 2)), self.seed)

    @cached_property
    def terms(self) -> "TermTable":
        return _evaluate(self)


def _random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def graph_frames(space: ProductSpace, linear_map):
    """Orthonormal tangent/normal frames of the graph of ``L: m1 -> m2``.

    ``linear_map`` has shape (N - p, p).
    """
    p, N = space.p, space.N
    L = np.asarray(linear_map, dtype=float).reshape(N - p, p)
    graph = np.hstack([np.eye(p), L.T])
    normal = np.hstack([-L, np.eye(N - p)])
    tangent = np.linalg.qr(graph.T)[0].T
    normal = np.linalg.qr(normal.T)[0].T
    return tangent, normal


def random_germ(space: ProductSpace, lambda_max: float, magnitude: float = 1.0, seed: int = 0) -> SubmanifoldGerm:
    """Random minimal germ whose tangent plane has Frobenius ``||pi_2|| <= lambda_max``.

    The plane is the graph of a Gaussian map m1 -> m2 rescaled so that
    ``||pi_2||_F`` equals ``lambda_max`` times a uniform draw; the second
    fundamental form is Gaussian, symmetrized, made trace-free in every
    normal direction and scaled to ``||A|| = magnitude``.
    """
    if not 0.0 <= lambda_max < 1.0:
        raise ValueError(f"lambda_max must lie in [0, 1), got {lambda_max}")
    p, N = space.p, space.N
    rng = np.random.default_rng(seed)
    L = rng.standard_normal((N - p, p))
    target = lambda_max * rng.uniform()
    sigma = np.linalg.svd(L, compute_uv=False)

    def frob(s):
        x = (s * sigma) ** 2
        return np.sum(x / (1.0 + x)) - target**2

    if target > 0.0:
        hi = 1.0
        while frob(hi) < 0:
            hi *= 2.0
        L = L * brentq(frob, 0.0, hi, xtol=1e-15, rtol=1e-15)
    else:
        L = np.zeros_like(L)
    tangent, normal = graph_frames(space, L)
    tangent = _random_orthogonal(rng, p) @ tangent

    sff = rng.standard_normal((p, p, N - p))
    sff = 0.5 * (sff + sff.transpose(1, 0, 2))
    tr = np.einsum("iij->j", sff) / p
    sff = sff - np.eye(p)[:, :, None] * tr[None, None, :]
    norm = np.sqrt(np.sum(sff**2))
    sff = sff * (magnitude / norm) if norm > 0 else sff
    # exact symmetry survives the scaling; re-impose it after round-off anyway
    sff = 0.5 * (sff + sff.transpose(1, 0, 2))
    return SubmanifoldGerm(space, tangent, normal, sff, seed)


# --- term evaluation -----------------------------------------------------------------------


@dataclass
class TermTable:
    direct: np.ndarray  # (6,) <(n), A> from the defining sum
    lemma: np.ndarray  # (6,) rewritten forms; entries 2 and 4 repeat 1 and 3
    six_factor1_expansion: float
    six_factor1_bracket: float
    six_factor2: float
    extras: dict = field(default_factory=dict)


class _Brackets:
    """Bracket on full orthonormal coordinates of the product pair."""

    def __init__(self, space: ProductSpace):
        pair = space.pair
        self.pair = pair
        on = pair.on_structure
        self.D = on.shape[0]
        self.c2 = on.reshape(self.D, self.D * self.D)

    def ad(self, x):
        x = np.asarray(x)
        return (x @ self.c2).reshape(x.shape[:-1] + (self.D, self.D))

    def embed(self, coords):
        return self.pair.embed_m(coords)


def _brackets(space: ProductSpace) -> _Brackets:
    b = space.__dict__.get("_simons_brackets")
    if b is None:
        b = space.__dict__["_simons_brackets"] = _Brackets(space)
    return b


def _evaluate(germ: SubmanifoldGerm) -> TermTable:
    space = germ.space
    br = _brackets(space)
    p = space.p
    sff = germ.sff
    E = br.embed(germ.tangent)  # (p, D)
    H = br.embed(germ.normal)  # (q, D)
    Bv = br.embed(germ.b_vectors())  # (p, p, D)
    Aop = br.embed(germ.shape_vectors())  # (q, p, D)

    adE = br.ad(E)  # [e_i, v] = v @ adE[i]
    W = np.einsum("ibc,lb->ilc", adE, E)  # [e_i, e_l]
    adW = br.ad(W)

    def pair_with_a(ra):
        return float(np.einsum("jkl,klj->", ra, sff))

    # direct route, R_{x,y} z = -[[x, y], z]; indices (W=eta_j, X=e_k, Y=e_l)
    x1 = np.einsum("ilbc,kib->ilkc", adW, Bv)
    ra1 = -2.0 * np.einsum("ilkc,jc->jkl", x1, H)
    x2 = np.einsum("ikbc,lib->iklc", adW, Bv)
    ra2 = -2.0 * np.einsum("iklc,jc->jkl", x2, H)
    rv = -np.einsum("ilbc,ib->lc", adW, E)  # sum_i R_{e_i, e_l} e_i
    ra3 = -np.einsum("jkc,lc->jkl", Aop, rv)
    ra4 = -np.einsum("jlc,kc->jkl", Aop, rv)
    z = np.einsum("ibc,klb->iklc", adE, Bv)  # [e_i, B(e_k, e_l)]
    r5 = np.einsum("ibc,iklb->klc", adE, z)  # sum_i R_{e_i, B} e_i = sum_i [e_i, [e_i, B]]
    ra5 = np.einsum("klc,jc->jkl", r5, H)
    y6 = np.einsum("ikbc,lb->iklc", adW, E)  # [[e_i, e_k], e_l]
    ra6 = 2.0 * np.einsum("jic,iklc->jkl", Aop, y6)
    direct = np.array([pair_with_a(r) for r in (ra1, ra2, ra3, ra4, ra5, ra6)])

    # lemma route
    adA = br.ad(Aop)
    adB = br.ad(Bv)
    pa = np.einsum("jkbc,ib->jkic", adA, E)  # [A^j(e_k), e_i]
    pb = np.einsum("ikbc,jb->jkic", adB, H)  # [B(e_i, e_k), eta_j]
    l1 = 2.0 * float(np.sum(pa * pb))
    shape_m = germ.shape_vectors()
    ric = ricci(space.pair)
    ric_part = float(np.einsum("jkd,de,jke->", shape_m, ric, shape_m))
    an = np.einsum("jkbc,lb->jklc", adA, H)  # [A^j(e_k), eta_l]
    l3 = ric_part - float(np.sum(an * an))
    b5 = np.einsum("klbc,ib->klic", adB, E)  # [B(e_k, e_l), e_i]
    l5 = -float(np.sum(b5 * b5))

    # term 6, split along the factors
    kappa = 1.0 / (2.0 * (p - 1))
    e1 = germ.tangent[:, :p]
    u1 = shape_m[..., :p]
    g = np.einsum("jid,kd->jik", u1, e1)  # <pi_1 A^j(e_i), pi_1 e_k>
    six_1 = 2.0 * kappa * (float(np.einsum("jik,jki->", g, g)) - float(np.sum(np.einsum("jii->j", g) ** 2)))
    E1 = br.embed(space.pi1(germ.tangent))
    U1 = br.embed(space.pi1(shape_m))
    E2 = br.embed(space.pi2(germ.tangent))
    U2 = br.embed(space.pi2(shape_m))
    w1 = np.einsum("ibc,kb->ikc", br.ad(E1), E1)
    t1 = np.einsum("ikbc,jib->jikc", br.ad(w1), U1)  # [[pi1 e_i, pi1 e_k], pi1 A^j(e_i)]
    six_1_bracket = -2.0 * float(np.einsum("jikc,jkc->", t1, U1))
    w2 = np.einsum("ibc,kb->ikc", br.ad(E2), E2)
    u2 = np.einsum("jibc,jkb->jikc", br.ad(U2), U2)
    six_2 = -2.0 * float(np.einsum("ikc,jikc->", w2, u2))
    l6 = six_1 + six_2

    lemma = np.array([l1, l1, l3, l3, l5, l6])
    return TermTable(direct, lemma, six_1, six_1_bracket, six_2, {"ricci_part": ric_part})


def route_disagreement(germ: SubmanifoldGerm) -> float:
    t = germ.terms
    return float(
        max(
            np.abs(t.direct - t.lemma).max(),
            abs(t.six_factor1_expansion - t.six_factor1_bracket),
        )
    )


def simons_term(germ: SubmanifoldGerm, index: int) -> float:
    """``<(index), A>`` for index 1..6, evaluated through the rewritten form.

    Terms 2 and 4 have no separate rewrite; they are evaluated directly.
    """
    if index not in range(1, 7):
        raise IndexError(f"term index must be 1..6, got {index}")
    _require_sphere(germ.space)
    t = germ.terms
    return float(t.direct[index - 1] if index in (2, 4) else t.lemma[index - 1])


def simons_term_direct(germ: SubmanifoldGerm, index: int) -> float:
    if index not in range(1, 7):
        raise IndexError(f"term index must be 1..6, got {index}")
    return float(germ.terms.direct[index - 1])


def _require_sphere(space: ProductSpace):
    if space.factor1.kind != "sphere":
        raise DomainError(f"first factor must be a round sphere, got {space.factor1.name}")


@dataclass
class SimonsBreakdown:
    terms: tuple
    total: float
    a_norm_sq: float
    lambda_used: float
    lambda_operator: float
    bound: float
    margin: float
    lemma_terms: tuple = ()
    route_error: float = 0.0
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "terms": list(self.terms),
            "lemma_terms": list(self.lemma_terms),
            "total": self.total,
            "a_norm_sq": self.a_norm_sq,
            "lambda_used": self.lambda_used,
            "lambda_operator": self.lambda_operator,
            "bound": self.bound,
            "margin": self.margin,
            "route_error": self.route_error,
        }


def main_bound(space: ProductSpace, lam: float, a_norm_sq: float) -> float:
    """``(2 rho + 1/(p-1) - C lam^2) ||A||^2``."""
    c = space.constants
    return (2.0 * c.rho + 1.0 / (c.p - 1) - c.C * lam * lam) * a_norm_sq


def simons_total(germ: SubmanifoldGerm) -> SimonsBreakdown:
    _require_sphere(germ.space)
    t = germ.terms
    err = route_disagreement(germ)
    if err > ROUTE_TOL * max(1.0, germ.a_norm_sq):
        raise InternalConsistencyError(
            f"direct and rewritten evaluations of R(A) disagree by {err:.3g} (seed {germ.seed})"
        )
    total = float(np.sum(t.direct))
    lam = germ.lambda_frobenius
    bound = main_bound(germ.space, lam, germ.a_norm_sq)
    return SimonsBreakdown(
        terms=tuple(float(x) for x in t.direct),
        total=total,
        a_norm_sq=germ.a_norm_sq,
        lambda_used=lam,
        lambda_operator=germ.lambda_operator,
        bound=bound,
        margin=total - bound,
        lemma_terms=tuple(float(x) for x in t.lemma),
        route_error=err,
        seed=germ.seed,
    )


def lemma_rhs(germ: SubmanifoldGerm, lemma: Lemma | str) -> float:
    lemma = Lemma(lemma)
    c = germ.space.constants
    p, N = c.p, c.N
    k = c.k1**2 + c.k2**2
    lam2 = germ.lambda_frobenius**2
    a2 = germ.a_norm_sq
    if lemma is Lemma.L1:
        return -2.0 * p * p * (N - p) * k * lam2 * a2
    if lemma is Lemma.L3:
        return c.rho * a2 - p * (N - p) ** 2 * k * lam2 * a2
    if lemma is Lemma.L5:
        return -(p**3) * k * lam2 * a2
    return a2 / (p - 1) - ((p * p + 2) / (p - 1) + 2 * p * p * (N - p) * c.k2**2) * lam2 * a2


_LEMMA_TERM = {Lemma.L1: 1, Lemma.L3: 3, Lemma.L5: 5, Lemma.L6: 6}


def verify_lemma(germ: SubmanifoldGerm, lemma: Lemma | str) -> float:
    """Term value minus the lemma's lower bound (negative means violated)."""
    lemma = Lemma(lemma)
    return simons_term(germ, _LEMMA_TERM[lemma]) - lemma_rhs(germ, lemma)


# --- Gauss equation ------------------------------------------------------------------------


def ambient_sectional_sum(germ: SubmanifoldGerm) -> float:
    """``sum_{i != j} <R^X_{e_i, e_j} e_j, e_i>`` = sum of squared brackets."""
    br = _brackets(germ.space)
    E = br.embed(germ.tangent)
    w = np.einsum("ibc,jb->ijc", br.ad(E), E)
    return float(np.sum(w * w))


def intrinsic_scalar(germ: SubmanifoldGerm) -> float:
    """Scalar curvature of the germ from the Gauss equation, pair by pair."""
    br = _brackets(germ.space)
    E = br.embed(germ.tangent)
    w = np.einsum("ibc,jb->ijc", br.ad(E), E)
    amb = np.sum(w * w, axis=-1)
    b = germ.b_vectors()
    diag = np.einsum("iid->id", b)
    gauss = amb + diag @ diag.T - np.sum(b * b, axis=-1)
    np.fill_diagonal(gauss, 0.0)
    return float(gauss.sum())


def gauss_a_norm(germ: SubmanifoldGerm, scalar: float) -> float:
    """``||A||^2`` recovered from an intrinsic scalar curvature via Gauss."""
    return ambient_sectional_sum(germ) - scalar


# --- campaigns -----------------------------------------------------------------------------


@dataclass
class CampaignResult:
    """Per-germ margins of a seeded campaign; germ ``i`` uses seed ``seeds[i]``."""

    seeds: np.ndarray
    main: np.ndarray
    symmetry: np.ndarray  # max(|<(2),A> - <(1),A>|, |<(4),A> - <(3),A>|)
    lemmas: dict  # Lemma -> margins
    lambdas: np.ndarray
    breakdowns: list

    def worst(self, values) -> tuple[float, int]:
        i = int(np.argmin(values))
        return float(values[i]), int(self.seeds[i])


def run_campaign(
    space: ProductSpace,
    lambda_max: float,
    samples: int,
    magnitude: float = 1.0,
    seed: int = 0,
    keep_breakdowns: bool = False,
) -> CampaignResult:
    seeds = np.arange(samples, dtype=np.uint64) + np.uint64(seed)
    main = np.empty(samples)
    sym = np.empty(samples)
    lams = np.empty(samples)
    lemmas = {L: np.empty(samples) for L in Lemma}
    breakdowns = []
    for k in range(samples):
        germ = random_germ(space, lambda_max, magnitude, int(seeds[k]))
        b = simons_total(germ)
        main[k] = b.margin
        lams[k] = b.lambda_used
        t = [simons_term(germ, j) for j in range(1, 7)]
        sym[k] = max(abs(t[1] - t[0]), abs(t[3] - t[2]))
        for L in Lemma:
            lemmas[L][k] = verify_lemma(germ, L)
        if keep_breakdowns:
            breakdowns.append(b.to_dict())
    return CampaignResult(seeds, main, sym, lemmas, lams, breakdowns)
