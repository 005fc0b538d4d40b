"""Dense complex linear algebra over explicit tensor-product spaces.

Everything here is deliberately simple dense numpy: this module is the
ground-truth oracle that the faster, structure-exploiting code paths are
differential-tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import CapacityError

# Entry budget for any single dense object (matrix entries, not bytes).
_ENTRY_CAPACITY = 2**26

RNG_NAME = "pcg64"  # np.random.default_rng bit generator, recorded in outputs


def set_entry_capacity(n: int) -> int:
    """Set the global dense-entry cap; returns the previous value."""
    global _ENTRY_CAPACITY
    if n < 1:
        raise ValueError("capacity must be positive")
    old = _ENTRY_CAPACITY
    _ENTRY_CAPACITY = n
    return old


def entry_capacity() -> int:
    return _ENTRY_CAPACITY


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DenseOperator:
    """Square complex matrix on an ordered tensor product of local factors.

    Row-major computational basis, leftmost factor most significant.
    """

    mat: np.ndarray
    local_dims: tuple[int, ...]

    def __post_init__(self):
        mat = _frozen(self.mat)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "local_dims", tuple(int(d) for d in self.local_dims))
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got shape {mat.shape}")
        if math.prod(self.local_dims) != mat.shape[0]:
            raise ValueError(
                f"local_dims {self.local_dims} do not multiply to dim {mat.shape[0]}"
            )
        if mat.size > _ENTRY_CAPACITY:
            raise CapacityError(
                f"{mat.size} entries exceed the configured cap {_ENTRY_CAPACITY}"
            )

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class StateVector:
    """Unit vector on an ordered tensor product of local factors."""

    vec: np.ndarray
    local_dims: tuple[int, ...]

    def __post_init__(self):
        vec = _frozen(self.vec)
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "local_dims", tuple(int(d) for d in self.local_dims))
        if vec.ndim != 1:
            raise ValueError("state must be a vector")
        if math.prod(self.local_dims) != vec.shape[0]:
            raise ValueError(
                f"local_dims {self.local_dims} do not multiply to dim {vec.shape[0]}"
            )
        if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
            raise ValueError("state vector is not normalized")

    @classmethod
    def normalized(cls, vec, local_dims) -> "StateVector":
        vec = np.asarray(vec, dtype=complex)
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / nrm, tuple(local_dims))

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    def projector(self) -> DenseOperator:
        return DenseOperator(np.outer(self.vec, self.vec.conj()), self.local_dims)


# Single-qubit constants.
I2 = _frozen(np.eye(2))
X = _frozen([[0, 1], [1, 0]])
Y = _frozen([[0, -1j], [1j, 0]])
Z = _frozen([[1, 0], [0, -1]])
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def identity(local_dims: Iterable[int]) -> DenseOperator:
    dims = tuple(local_dims)
    return DenseOperator(np.eye(math.prod(dims)), dims)


def kron(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    """Kronecker product; local factors of `b` are appended after those of `a`."""
    dim = a.dim * b.dim
    if dim * dim > _ENTRY_CAPACITY:
        raise CapacityError(
            f"kron result would hold {dim * dim} entries, cap is {_ENTRY_CAPACITY}"
        )
    return DenseOperator(np.kron(a.mat, b.mat), a.local_dims + b.local_dims)


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    """Plain ndarray Kronecker chain (internal helper, no bookkeeping)."""
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def tensor_embed(local_dims: Iterable[int], placed: dict[int, np.ndarray]) -> np.ndarray:
    """Tensor product with `placed[i]` on factor i and identity elsewhere."""
    dims = tuple(local_dims)
    mats = []
    for i, d in enumerate(dims):
        m = placed.get(i)
        if m is None:
            m = np.eye(d, dtype=complex)
        else:
            m = np.asarray(m, dtype=complex)
            if m.shape != (d, d):
                raise ValueError(f"factor {i}: expected shape {(d, d)}, got {m.shape}")
        mats.append(m)
    return kron_all(mats)


def partial_trace(rho: DenseOperator, keep: Iterable[int]) -> DenseOperator:
    """Trace out every factor not listed in `keep` (kept in original order)."""
    dims = rho.local_dims
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < len(dims):
            raise ValueError(f"factor index {k} out of range for {len(dims)} factors")
    t = rho.mat.reshape(dims + dims)
    nfac = len(dims)
    # Contract the dropped row/column index pairs one at a time.
    dropped = [i for i in range(nfac) if i not in keep]
    for count, i in enumerate(dropped):
        # After `count` contractions the tensor has (nfac - count) index pairs;
        # the original factor i now sits at position i - (#dropped before i).
        pos = i - count
        half = nfac - count
        t = np.trace(t, axis1=pos, axis2=pos + half)
    kept_dims = tuple(dims[i] for i in keep)
    d = math.prod(kept_dims) if kept_dims else 1
    return DenseOperator(t.reshape(d, d), kept_dims if kept_dims else (1,))


class Norms(NamedTuple):
    trace_norm: float
    operator_norm: float
    frobenius_norm: float


def norms(m: DenseOperator) -> Norms:
    """Trace, operator and Frobenius norms via eigenvalues of M^dag M."""
    gram = m.mat.conj().T @ m.mat
    ev = np.linalg.eigvalsh(gram)
    sv = np.sqrt(np.clip(ev, 0.0, None))
    return Norms(float(np.sum(sv)), float(np.max(sv, initial=0.0)), float(np.linalg.norm(m.mat)))


class Checks(NamedTuple):
    is_hermitian: bool
    is_unitary: bool
    is_entrywise_real: bool
    is_pm1_observable: bool


def checks(m: DenseOperator, tol: float = 1e-10) -> Checks:
    a = m.mat
    eye = np.eye(a.shape[0])
    herm = bool(np.max(np.abs(a - a.conj().T)) <= tol)
    unit = bool(np.max(np.abs(a.conj().T @ a - eye)) <= tol)
    real = bool(np.max(np.abs(a.imag)) <= tol)
    pm1 = herm and bool(np.max(np.abs(a @ a - eye)) <= tol)
    return Checks(herm, unit, real, pm1)


def conjugate_in_basis(m: DenseOperator) -> DenseOperator:
    """Entrywise complex conjugate in the computational basis."""
    return DenseOperator(m.mat.conj(), m.local_dims)


def _haar_unitary(dim: int, rng: np.random.Generator, real: bool) -> np.ndarray:
    g = rng.normal(size=(dim, dim))
    if not real:
        g = g + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    # Fix the phase/sign gauge so the distribution is Haar.
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q


def _random_observable(dim: int, seed: int, real: bool) -> DenseOperator:
    if dim < 1:
        raise ValueError("dim must be at least 1")
    rng = np.random.default_rng(seed)
    q = _haar_unitary(dim, rng, real)
    signs = np.array([1.0] * (dim // 2) + [-1.0] * (dim - dim // 2))
    mat = (q * signs) @ q.conj().T
    if real:
        mat = mat.real
    return DenseOperator(mat, (dim,))


def random_pm1_observable(dim: int, seed: int) -> DenseOperator:
    """Seeded Hermitian unitary with (near-)balanced +/-1 spectrum."""
    return _random_observable(dim, seed, real=False)


def random_real_pm1_observable(dim: int, seed: int) -> DenseOperator:
    """Entrywise-real variant of random_pm1_observable."""
    return _random_observable(dim, seed, real=True)


def fidelity_with_pure(rho: DenseOperator, psi) -> float:
    if isinstance(psi, StateVector):
        psi = psi.vec
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ rho.mat @ psi))


# --- JSON interchange -----------------------------------------------------
#
# {"dim": n, "local_dims": [...], "re": [row-major], "im": [row-major]}
# Round-trips bit-exactly at double precision (Python floats serialize via
# repr, which is faithful).


def operator_to_json(m: DenseOperator) -> dict:
    return {
        "dim": m.dim,
        "local_dims": list(m.local_dims),
        "re": [float(v) for v in m.mat.real.ravel()],
        "im": [float(v) for v in m.mat.imag.ravel()],
    }


def operator_from_json(d: dict) -> DenseOperator:
    dim = int(d["dim"])
    re = np.array(d["re"], dtype=float).reshape(dim, dim)
    im = np.array(d["im"], dtype=float).reshape(dim, dim)
    return DenseOperator(re + 1j * im, tuple(d["local_dims"]))
