"""Dense complex linear algebra shared by every engine.

Composite Hilbert spaces are always ordered clock (x) system (x) ancilla_1
(x) ancilla_2 (x) ..., with row-major (numpy) indexing, so ``kron(a, b)``
puts ``a`` on the slower-varying left factor.  Everything is stored as
dense ``complex128``; problem sizes stay in the low thousands, so clarity
and testability win over sparse machinery.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "MAX_DENSE_DIM",
    "DimensionError",
    "as_state",
    "as_operator",
    "basis_state",
    "identity",
    "kron",
    "kron_all",
    "dagger",
    "hermiticity_defect",
    "require_hermitian",
    "unitarity_defect",
    "expm_hermitian_generator",
    "lift",
    "max_abs",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
]

#: Largest composite dimension the dense backend will build.
MAX_DENSE_DIM = 4096

_HERMITIAN_TOL = 1e-10


class DimensionError(ValueError):
    """Composite dimension exceeds the dense-storage budget."""


def as_state(vec) -> np.ndarray:
    """Coerce to a finite complex 1-d state vector."""
    v = np.asarray(vec, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"state vector must be 1-d and non-empty, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("state vector has non-finite entries")
    return v


def as_operator(mat) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"operator must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator has non-finite entries")
    return m


def basis_state(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def _check_budget(dim: int) -> None:
    if dim > MAX_DENSE_DIM:
        raise DimensionError(
            f"composite dimension {dim} exceeds the dense budget {MAX_DENSE_DIM}"
        )


def kron(a, b) -> np.ndarray:
    """Tensor product with ``a`` on the left (slow) factor."""
    a = as_operator(a)
    b = as_operator(b)
    _check_budget(a.shape[0] * b.shape[0])
    return np.kron(a, b)


def kron_all(*ops) -> np.ndarray:
    if not ops:
        raise ValueError("kron_all needs at least one factor")
    out = as_operator(ops[0])
    for op in ops[1:]:
        out = kron(out, op)
    return out


def dagger(a) -> np.ndarray:
    return np.asarray(a, dtype=complex).conj().T


def hermiticity_defect(h) -> float:
    h = as_operator(h)
    return float(np.max(np.abs(h - h.conj().T)))


def require_hermitian(h, tol: float = _HERMITIAN_TOL, name: str = "operator") -> np.ndarray:
    """Return ``h`` unchanged, or raise naming the worst offending entry."""
    h = as_operator(h)
    defect = np.abs(h - h.conj().T)
    worst = float(defect.max())
    if worst > tol:
        i, j = np.unravel_index(int(defect.argmax()), defect.shape)
        raise ValueError(
            f"{name} is not Hermitian: |h[{i},{j}] - conj(h[{j},{i}])| = {worst:.3e} "
            f"exceeds {tol:.1e}"
        )
    return h


def unitarity_defect(u) -> float:
    u = as_operator(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def expm_hermitian_generator(h, t: float) -> np.ndarray:
    """exp(-i t h) for Hermitian h, via eigendecomposition.

    The input is validated against a 1e-10 hermiticity tolerance; the result
    is unitary to the same level because the eigenbasis is orthonormal.
    """
    h = require_hermitian(h, name="generator")
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * t * w)
    return (v * phases) @ v.conj().T


def lift(op, dims, slot: int) -> np.ndarray:
    """Embed ``op`` acting on factor ``slot`` of a composite space.

    ``dims`` lists the factor dimensions in composite order; ``op`` must be
    square with dimension ``dims[slot]``.
    """
    op = as_operator(op)
    dims = tuple(int(d) for d in dims)
    if not 0 <= slot < len(dims):
        raise ValueError(f"slot {slot} out of range for {len(dims)} factors")
    if op.shape[0] != dims[slot]:
        raise ValueError(f"operator dim {op.shape[0]} != factor dim {dims[slot]}")
    left = int(np.prod(dims[:slot], dtype=np.int64)) if slot > 0 else 1
    right = int(np.prod(dims[slot + 1:], dtype=np.int64)) if slot + 1 < len(dims) else 1
    _check_budget(left * op.shape[0] * right)
    out = np.kron(np.eye(left, dtype=complex), np.kron(op, np.eye(right, dtype=complex)))
    return out


def max_abs(a) -> float:
    return float(np.max(np.abs(np.asarray(a))))


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
