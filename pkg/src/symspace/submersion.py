"""Hopf fibrations S^{2n+1} -> CP^n and S^{4n+3} -> HP^n.

All curvature is measured in the Killing metric of the total sphere, whose
sectional curvature is 1/(2(d-1)) for S^d. The O'Neill tensor is never built;
only the scalar relation K = K_bar + tau - r and its consequences are used.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import null_space

from . import tolerances
from .errors import InternalConsistencyError, InvalidDimensionError
from .product import ProductSpace, build_product
from .simons import SubmanifoldGerm, intrinsic_scalar, _brackets
from .symmetric import SymmetricPair, build_cpn_pair, build_hpn_pair, build_sphere_pair
from .triple import CandidateSubspace, triple_residual


def sphere_curvature(d: int) -> float:
    """Sectional curvature of S^d = SO(d+1)/SO(d) in the metric -B."""
    return 1.0 / (2.0 * (d - 1))


@dataclass
class FibrationModel:
    kind: str  # "cpn" or "hpn"
    n: int
    base: SymmetricPair
    total: SymmetricPair
    fibre_dim: int

    def __post_init__(self):
        if self.fibre_dim not in (1, 3):
            raise InvalidDimensionError("fibre dimension must be 1 or 3")
        if self.total.dm != self.base.dm + self.fibre_dim:
            raise InvalidDimensionError("dim m_total must equal dim m_base + fibre_dim")

    @property
    def total_dim(self) -> int:
        return self.total.dm

    @property
    def horizontal_dim(self) -> int:
        return self.base.dm

    @property
    def kappa(self) -> float:
        return sphere_curvature(self.total_dim)

    def vertical_m(self) -> np.ndarray:
        """Fibre directions at the base point ``e_{d+1}`` of S^d, in m-coordinates.

        The complex (quaternionic) structure acts on consecutive coordinate
        pairs (quadruples), so the fibre through ``e_{d+1}`` is spanned by
        the last one (three) tangent directions.
        """
        d = self.total_dim
        return np.eye(d)[d - self.fibre_dim :]

    def horizontal_m(self) -> np.ndarray:
        d = self.total_dim
        return np.eye(d)[: d - self.fibre_dim]


def build_fibration(kind: str, n: int) -> FibrationModel:
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    if kind == "cpn":
        return FibrationModel("cpn", n, build_cpn_pair(n), build_sphere_pair(2 * n + 1), 1)
    if kind == "hpn":
        return FibrationModel("hpn", n, build_hpn_pair(n), build_sphere_pair(4 * n + 3), 3)
    raise ValueError(f"unknown fibration {kind!r}; expected 'cpn' or 'hpn'")


def fibre_scalar(model: FibrationModel) -> float:
    """Scalar curvature r of a (totally geodesic, round) fibre."""
    f = model.fibre_dim
    return f * (f - 1) * model.kappa


def fibre_scalar_direct(model: FibrationModel) -> float:
    """r computed from brackets on the fibre's triple system.

    The fibre is totally geodesic, so its Ricci form is the trace over t of
    ``Z -> -[X, [Y, Z]]`` projected back onto t.
    """
    sub = CandidateSubspace(model.total, model.vertical_m())
    res = triple_residual(sub)
    if res > tolerances.EXACT:
        raise InternalConsistencyError(f"Hopf fibre is not a triple system (residual {res:.3g})")
    pair = model.total
    on = pair.on_structure
    t = pair.embed_m(sub.basis)
    yz = np.einsum("ia,jb,abc->ijc", t, t, on)  # [t_i, t_j]
    xyz = np.einsum("ka,ijc,ace->kije", t, yz, on)  # [t_k, [t_i, t_j]]
    # Ric_t(X_k, X_i) = sum_j <-[t_k, [t_i, t_j]], t_j>
    ric_t = -np.einsum("kije,je->ki", xyz, t)
    return float(np.trace(ric_t))


def total_scalar(model: FibrationModel) -> float:
    d = model.total_dim
    return d * (d - 1) * model.kappa


def tau_bound(model: FibrationModel, lam: float = 1.0) -> float:
    """Upper bound on the twisting curvature of a minimal germ.

    Every mixed plane (horizontal e, vertical nu) has curvature at most
    ``kappa |pi_1 e|^2 <= kappa``; the bound does not depend on lam.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return model.horizontal_dim * model.fibre_dim * model.kappa


def threshold_cpn(n: int) -> float:
    """Scalar-curvature threshold n + 1 lifted from the sphere value (2n+1)/2."""
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    d = 2 * n + 1
    kappa = sphere_curvature(d)
    value = d * (d - 1) * kappa + 2 * n * kappa  # r = 0 for circle fibres
    if abs(value - (n + 1)) > tolerances.ACCUMULATED:
        raise InternalConsistencyError(f"CP^{n} threshold {value} != {n + 1}")
    return value


def threshold_hpn(n: int) -> float:
    """Scalar-curvature threshold 4n(n+2)/(2n+1) lifted from (4n+3)/2."""
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    d = 4 * n + 3
    kappa = sphere_curvature(d)
    value = d * (d - 1) * kappa + 4 * n * 3 * kappa - 6 * kappa
    closed = 4.0 * n * (n + 2) / (2 * n + 1)
    if abs(value - closed) > tolerances.ACCUMULATED:
        raise InternalConsistencyError(f"HP^{n} threshold {value} != {closed}")
    return value


def rigidity_condition(threshold: float, k_prime: float, rho: float, q: float) -> bool:
    """``threshold - K' < rho / q``."""
    return threshold - k_prime < rho / q


@dataclass
class SubmersionSummary:
    kind: str
    n: int
    tau_bound: float
    r: float
    k_bar: float
    k_base_threshold: float

    def __post_init__(self):
        lhs = self.k_base_threshold
        rhs = self.k_bar + self.tau_bound - self.r
        if abs(lhs - rhs) > tolerances.ACCUMULATED:
            raise InternalConsistencyError("K = K_bar + tau - r violated")

    def to_dict(self) -> dict:
        return asdict(self)


def submersion_summary(model: FibrationModel) -> SubmersionSummary:
    tau = tau_bound(model)
    r = fibre_scalar(model)
    k_bar = total_scalar(model)
    thr = threshold_cpn(model.n) if model.kind == "cpn" else threshold_hpn(model.n)
    if abs((k_bar + tau - r) - thr) > tolerances.ACCUMULATED:
        raise InternalConsistencyError("threshold does not match K_bar + tau - r")
    return SubmersionSummary(model.kind, model.n, tau, r, k_bar, thr)


# --- sampled germs over S^d x X2 -----------------------------------------------------------


def fibred_germ(model: FibrationModel, space: ProductSpace, lambda_max: float, magnitude: float, seed: int) -> SubmanifoldGerm:
    """Minimal germ in S^d x X2 containing the vertical directions.

    Horizontal tangent vectors form the graph of a random map from the
    horizontal space into m2; the fibre stays in the sphere factor and
    ``B(nu, nu') = 0`` because fibres are totally geodesic in both spaces.
    """
    if not 0.0 <= lambda_max < 1.0:
        raise ValueError("lambda_max must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    p, N = space.p, space.N
    f = model.fibre_dim
    hdim = p - f
    vert = np.zeros((f, N))
    vert[:, :p] = model.vertical_m()
    horiz = np.zeros((hdim, N))
    horiz[:, :p] = model.horizontal_m()
    L = rng.standard_normal((N - p, hdim))
    target = lambda_max * rng.uniform()
    norm = np.linalg.norm(L)
    # small-angle scaling; the measured norm is what the checks use
    L = L * (target / norm) if norm > 0 else L
    graph = horiz.copy()
    graph[:, p:] = L.T
    horiz_frame = np.linalg.qr(graph.T)[0].T
    tangent = np.vstack([vert, horiz_frame])
    normal = null_space(tangent).T

    sff = rng.standard_normal((p, p, N - p))
    sff = 0.5 * (sff + sff.transpose(1, 0, 2))
    sff[:f, :f, :] = 0.0
    tr = np.einsum("iij->j", sff)
    idx = np.arange(f, p)
    sff[idx, idx, :] -= tr / hdim
    total = np.sqrt(np.sum(sff**2))
    if total > 0:
        sff *= magnitude / total
    return SubmanifoldGerm(space, tangent, normal, sff, seed)


@dataclass
class TauGermReport:
    gauss_gap_min: float  # min of S_X - S_M, must be >= 0
    gauss_identity_error: float  # max |S_X - S_M - ||B(e, nu)||^2|
    split_error: float  # max |S_X - (factor-1 part + factor-2 part)|
    pointwise_margin: float  # min of kappa |pi_1 e|^2 - S_M
    tau_margin: float  # min of tau_bound - tau_M
    lift_margin: float  # min of (threshold - K) - (sphere scalar - K_bar)
    fibre_scalar_error: float  # max |r_M - r|
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def tau_germ_campaign(
    model: FibrationModel,
    factor2: SymmetricPair | None = None,
    samples: int = 1000,
    lambda_max: float = 0.5,
    magnitude: float = 1.0,
    seed: int = 0,
) -> TauGermReport:
    factor2 = factor2 if factor2 is not None else build_sphere_pair(2)
    space = build_product(model.total, factor2, samples=256)
    br = _brackets(space)
    f, p = model.fibre_dim, space.p
    kappa = model.kappa
    thr = threshold_cpn(model.n) if model.kind == "cpn" else threshold_hpn(model.n)
    sphere_k = total_scalar(model)
    r_model = fibre_scalar(model)
    worst = dict(gap=np.inf, ident=0.0, split=0.0, point=np.inf, tau=np.inf, lift=np.inf, r=0.0)
    for s in range(samples):
        germ = fibred_germ(model, space, lambda_max, magnitude, seed + s)
        E = br.embed(germ.tangent)
        w = np.einsum("ibc,jb->ijc", br.ad(E), E)
        sec = np.sum(w * w, axis=-1)  # S_X for orthonormal pairs
        E1 = br.embed(space.pi1(germ.tangent))
        E2 = br.embed(space.pi2(germ.tangent))
        w1 = np.einsum("ibc,jb->ijc", br.ad(E1), E1)
        w2 = np.einsum("ibc,jb->ijc", br.ad(E2), E2)
        split = np.sum(w1 * w1, axis=-1) + np.sum(w2 * w2, axis=-1)
        b = germ.b_vectors()
        diag = np.einsum("iid->id", b)
        s_m = sec + diag @ diag.T - np.sum(b * b, axis=-1)
        mixed = (slice(f, p), slice(0, f))
        gap = sec[mixed] - s_m[mixed]
        bnorm = np.sum(b[mixed] ** 2, axis=-1)
        pi1_sq = np.sum(germ.tangent[f:, :p] ** 2, axis=-1)
        tau_m = float(s_m[mixed].sum())
        k_bar_m = intrinsic_scalar(germ)
        r_m = float(s_m[:f, :f].sum() - np.trace(s_m[:f, :f]))
        k_m = k_bar_m + tau_m - r_m
        worst["gap"] = min(worst["gap"], float(gap.min()))
        worst["ident"] = max(worst["ident"], float(np.abs(gap - bnorm).max()))
        worst["split"] = max(worst["split"], float(np.abs(sec - split).max()))
        worst["point"] = min(worst["point"], float((kappa * pi1_sq[:, None] - s_m[mixed]).min()))
        worst["tau"] = min(worst["tau"], tau_bound(model) - tau_m)
        worst["lift"] = min(worst["lift"], (thr - k_m) - (sphere_k - k_bar_m))
        worst["r"] = max(worst["r"], abs(r_m - r_model))
    return TauGermReport(
        gauss_gap_min=worst["gap"],
        gauss_identity_error=worst["ident"],
        split_error=worst["split"],
        pointwise_margin=worst["point"],
        tau_margin=worst["tau"],
        lift_margin=worst["lift"],
        fibre_scalar_error=worst["r"],
        samples=samples,
        seed=seed,
    )
