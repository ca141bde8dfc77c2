"""Finite-dimensional real Lie algebras given by structure constants.

An algebra element is a plain 1-d ``numpy`` array of coordinates in the
algebra basis. Structure constants follow ``[b_i, b_j] = sum_k c[i, j, k] b_k``
and the Killing form is always ``tr(ad b_i o ad b_j)`` recomputed from them.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from . import tolerances
from .errors import DegeneracyError, DimensionMismatchError, InvalidDimensionError

AlgebraVector = np.ndarray

# Commutator coefficients of the matrix bases used below are small rationals;
# snapping them onto this grid removes least-squares round-off.
_SNAP_DENOMINATOR = 24


def killing_from_structure(structure: np.ndarray) -> np.ndarray:
    # ad(b_i)[k, j] = c[i, j, k]
    b = np.einsum("ilk,jkl->ij", structure, structure)
    return 0.5 * (b + b.T)


class LieAlgebra:
    """Immutable Lie algebra with cached Killing form.

    ``matrices`` optionally holds a defining representation, one matrix per
    basis element, used for coordinate round trips.
    """

    def __init__(
        self,
        structure,
        basis_labels: Sequence[str] | None = None,
        *,
        name: str = "",
        matrices=None,
    ):
        c = np.array(structure, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] < 1:
            raise InvalidDimensionError(f"structure must be a dim x dim x dim array, got {c.shape}")
        dim = c.shape[0]
        if basis_labels is None:
            basis_labels = [f"b{i}" for i in range(dim)]
        if len(basis_labels) != dim:
            raise DimensionMismatchError("one basis label per basis element required")
        c.flags.writeable = False
        self._structure = c
        self._labels = tuple(str(s) for s in basis_labels)
        self.name = name
        killing = killing_from_structure(c)
        killing.flags.writeable = False
        self._killing = killing
        self._metric = -killing
        self._metric.flags.writeable = False
        self._matrices = None
        self._coord_solver = None
        if matrices is not None:
            mats = np.array(matrices)
            mats.flags.writeable = False
            self._matrices = mats
            self._coord_solver = np.linalg.pinv(_realify(mats.reshape(dim, -1)).T)

    @classmethod
    def from_matrices(cls, matrices, basis_labels=None, *, name=""):
        """Structure constants from commutators of a matrix basis."""
        mats = np.asarray(matrices)
        dim = mats.shape[0]
        flat = _realify(mats.reshape(dim, -1))
        if np.linalg.matrix_rank(flat) < dim:
            raise DegeneracyError("matrix basis is linearly dependent")
        solver = np.linalg.pinv(flat.T)
        comm = np.einsum("iab,jbc->ijac", mats, mats)
        comm = comm - comm.transpose(1, 0, 2, 3)
        target = _realify(comm.reshape(dim, dim, -1))
        c = target @ solver.T
        resid = np.abs(c @ flat - target).max()
        if resid > 1e-10:
            raise DegeneracyError(f"matrix span is not closed under commutator (residual {resid:.3g})")
        snapped = np.round(c * _SNAP_DENOMINATOR) / _SNAP_DENOMINATOR
        c = np.where(np.abs(c - snapped) < 1e-12, snapped, c)
        return cls(c, basis_labels, name=name, matrices=mats)

    @property
    def dim(self) -> int:
        return self._structure.shape[0]

    @property
    def structure(self) -> np.ndarray:
        return self._structure

    @property
    def killing(self) -> np.ndarray:
        return self._killing

    @property
    def metric_matrix(self) -> np.ndarray:
        """Gram matrix of ``-B`` in the algebra basis."""
        return self._metric

    @property
    def basis_labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def matrices(self):
        return self._matrices

    @property
    def is_compact(self) -> bool:
        return bool(np.linalg.eigvalsh(self._killing).max() < 0)

    def basis_vector(self, i: int) -> AlgebraVector:
        v = np.zeros(self.dim)
        v[i] = 1.0
        return v

    def index(self, label: str) -> int:
        return self._labels.index(label)

    def _check(self, *vectors):
        for v in vectors:
            if np.shape(v)[-1:] != (self.dim,):
                raise DimensionMismatchError(
                    f"vector of shape {np.shape(v)} does not belong to a {self.dim}-dimensional algebra"
                )

    def ad(self, x) -> np.ndarray:
        """Matrix of ``ad x`` acting on coordinate column vectors."""
        self._check(x)
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=float), self._structure)

    def bracket(self, x, y) -> AlgebraVector:
        self._check(x, y)
        return np.einsum("...i,...j,ijk->...k", x, y, self._structure)

    def killing_form(self, x, y) -> float:
        self._check(x, y)
        return float(np.asarray(x) @ self._killing @ np.asarray(y))

    def metric(self, x, y) -> float:
        self._check(x, y)
        return float(np.asarray(x) @ self._metric @ np.asarray(y))

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.metric(x, x), 0.0)))

    def antisymmetry_residual(self) -> float:
        c = self._structure
        return float(np.abs(c + c.transpose(1, 0, 2)).max())

    def jacobi_residual(self) -> float:
        c = self._structure
        # [[b_i, b_j], b_l] summed cyclically over (i, j, l)
        t = np.einsum("ijk,klm->ijlm", c, c)
        cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.abs(cyc).max())

    def to_matrix(self, x) -> np.ndarray:
        if self._matrices is None:
            raise ValueError(f"{self.name or 'algebra'} carries no defining representation")
        self._check(x)
        return np.tensordot(x, self._matrices, axes=(-1, 0))

    def from_matrix(self, m) -> AlgebraVector:
        if self._coord_solver is None:
            raise ValueError(f"{self.name or 'algebra'} carries no defining representation")
        m = np.asarray(m)
        return _realify(m.reshape(-1)) @ self._coord_solver.T

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "basis_labels": list(self._labels),
            "structure": self._structure.tolist(),
            "killing": self._killing.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LieAlgebra":
        alg = cls(data["structure"], data["basis_labels"], name=data.get("name", ""))
        if alg.dim != data["dim"]:
            raise DimensionMismatchError("dim field disagrees with structure constants")
        stored = np.array(data["killing"], dtype=float)
        if stored.shape != alg.killing.shape or np.abs(stored - alg.killing).max() > tolerances.EXACT:
            raise ValueError("stored Killing form disagrees with the structure constants")
        stored.flags.writeable = False
        alg._killing = stored
        alg._metric = -stored
        return alg

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LieAlgebra":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"LieAlgebra({self.name or '?'}, dim={self.dim})"


def _realify(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.concatenate([z.real, z.imag], axis=-1)
    return z.astype(float)


def _unit(n: int, a: int, b: int) -> np.ndarray:
    e = np.zeros((n, n))
    e[a, b] = 1.0
    return e


def build_so(n: int) -> LieAlgebra:
    """so(n) on the basis ``L_ab = E_ab - E_ba`` for ``a < b`` (1-based labels).

    With this basis ``[L_ab, L_bc] = L_ac`` for ``a < b < c``.
    """
    if n < 3:
        raise InvalidDimensionError(f"so(n) needs n >= 3, got {n}")
    mats, labels = [], []
    for a in range(n):
        for b in range(a + 1, n):
            mats.append(_unit(n, a, b) - _unit(n, b, a))
            labels.append(f"L{a + 1},{b + 1}")
    return LieAlgebra.from_matrices(np.array(mats), labels, name=f"so({n})")


def _u_offdiag(n: int):
    """Off-diagonal anti-Hermitian generators of u(n)."""
    for a in range(n):
        for b in range(a + 1, n):
            yield f"X{a + 1},{b + 1}", (_unit(n, a, b) - _unit(n, b, a)).astype(complex), (a, b)
            yield f"Y{a + 1},{b + 1}", 1j * (_unit(n, a, b) + _unit(n, b, a)), (a, b)


def build_su(n: int) -> LieAlgebra:
    """su(n) as a real algebra of traceless anti-Hermitian matrices.

    Basis: ``X_ab = E_ab - E_ba``, ``Y_ab = i(E_ab + E_ba)`` for ``a < b`` and
    ``H_a = i(E_aa - E_{a+1,a+1})``. For n = 2 these are ``i sigma_y``,
    ``i sigma_x`` and ``i sigma_z``.
    """
    if n < 2:
        raise InvalidDimensionError(f"su(n) needs n >= 2, got {n}")
    mats, labels = [], []
    for label, m, _ in _u_offdiag(n):
        mats.append(m)
        labels.append(label)
    for a in range(n - 1):
        mats.append(1j * (_unit(n, a, a) - _unit(n, a + 1, a + 1)))
        labels.append(f"H{a + 1}")
    return LieAlgebra.from_matrices(np.array(mats), labels, name=f"su({n})")


def _sp_embed(a_part: np.ndarray, b_part: np.ndarray) -> np.ndarray:
    # quaternionic A + B j  ->  [[A, -conj(B)], [B, conj(A)]]
    return np.block([[a_part, -b_part.conj()], [b_part, a_part.conj()]])


def build_sp(n: int) -> LieAlgebra:
    """sp(n), quaternionic anti-Hermitian n x n matrices, in its 2n x 2n complex form.

    Labels ``A*`` are generators of the u(n) block, ``B*`` of the complex
    symmetric block; dimension n(2n+1).
    """
    if n < 1:
        raise InvalidDimensionError(f"sp(n) needs n >= 1, got {n}")
    zero = np.zeros((n, n), dtype=complex)
    mats, labels = [], []
    for label, m, _ in _u_offdiag(n):
        mats.append(_sp_embed(m, zero))
        labels.append("A" + label)
    for a in range(n):
        mats.append(_sp_embed(1j * _unit(n, a, a), zero))
        labels.append(f"AD{a + 1}")
    for a in range(n):
        for b in range(a, n):
            sym = _unit(n, a, b) + _unit(n, b, a) if a != b else _unit(n, a, a)
            mats.append(_sp_embed(zero, sym.astype(complex)))
            labels.append(f"BR{a + 1},{b + 1}")
            mats.append(_sp_embed(zero, 1j * sym))
            labels.append(f"BI{a + 1},{b + 1}")
    return LieAlgebra.from_matrices(np.array(mats), labels, name=f"sp({n})")


def direct_sum(first: LieAlgebra, second: LieAlgebra, prefixes=("1:", "2:")) -> LieAlgebra:
    d1, d2 = first.dim, second.dim
    c = np.zeros((d1 + d2,) * 3)
    c[:d1, :d1, :d1] = first.structure
    c[d1:, d1:, d1:] = second.structure
    labels = [prefixes[0] + s for s in first.basis_labels] + [prefixes[1] + s for s in second.basis_labels]
    return LieAlgebra(c, labels, name=f"{first.name}+{second.name}")


def bracket(alg: LieAlgebra, x, y) -> AlgebraVector:
    return alg.bracket(x, y)


def killing_form(alg: LieAlgebra, x, y) -> float:
    return alg.killing_form(x, y)


def metric(alg: LieAlgebra, x, y) -> float:
    return alg.metric(x, y)


def orthonormalize(alg: LieAlgebra, vectors: Iterable) -> list[AlgebraVector]:
    """Gram-Schmidt with respect to ``-B``, keeping the span.

    Raises DegeneracyError when the Gram matrix is numerically singular.
    """
    vs = np.array([np.asarray(v, dtype=float) for v in vectors])
    if vs.size == 0:
        return []
    alg._check(vs)
    g = alg.metric_matrix
    gram = vs @ g @ vs.T
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv.min() < 1e-8:
        raise DegeneracyError(f"input vectors are (numerically) dependent, smallest Gram singular value {sv.min():.3g}")
    out = []
    for v in vs:
        w = v.copy()
        # two passes keep orthogonality at round-off level
        for _ in range(2):
            for u in out:
                w = w - (u @ g @ w) * u
        w = w / np.sqrt(w @ g @ w)
        out.append(w)
    return out
