"""Dense complex linear algebra for 3x3 operators and 9x9 superoperators.

Vectorization convention, used everywhere in this package: column stacking.
vec(rho) flattens rho in Fortran order, so the superoperator of the map
rho -> A rho B is kron(B.T, A).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


def ketbra(i: int, j: int, dim: int = 3) -> np.ndarray:
    """Matrix unit |i><j| as a dense complex array."""
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def hermitize(a: np.ndarray) -> np.ndarray:
    """Symmetrize away accumulated floating-point non-Hermiticity."""
    a = np.asarray(a, dtype=complex)
    return 0.5 * (a + a.conj().T)


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int = 3) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(v, dtype=complex).reshape((dim, dim), order="F")


def sandwich_super(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> a rho b in the column-stacking convention."""
    return np.kron(np.asarray(b, dtype=complex).T, np.asarray(a, dtype=complex))


def _require_finite(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def mat_exp(m: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(m*t) via scaling-and-squaring with Pade approximation.

    Backed by scipy.linalg.expm; accurate to ~1e-10 relative in Frobenius
    norm for ||m*t|| up to ~50, which covers every generator built here.
    """
    m = _require_finite(m)
    if not np.isfinite(t) or t < 0:
        raise ValueError(f"time must be finite and non-negative, got {t}")
    return scipy.linalg.expm(m * t)


def null_space(m: np.ndarray, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal basis of the right null space of m.

    Singular values below tol * sigma_max count as zero.  Returns an empty
    list when the matrix has full rank.
    """
    m = _require_finite(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    return [vh[k].conj() for k in range(len(s)) if s[k] <= tol * smax]


def eig_herm(m: np.ndarray, herm_tol: float = 1e-10):
    """Eigen-decomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector matrix V) with m V = V diag.
    Raises ValueError if m deviates from Hermiticity by more than herm_tol
    relative to its norm.
    """
    m = _require_finite(m)
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.linalg.norm(m - m.conj().T) > herm_tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(m)
    return w, v


def frob_dist(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius-norm distance between two equal-shaped matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def check_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-12,
    trace_tol: float = 1e-9,
    eig_floor: float = -1e-9,
) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a density matrix."""
    rho = _require_finite(rho, "density matrix")
    scale = max(1.0, float(np.linalg.norm(rho)))
    if np.linalg.norm(rho - rho.conj().T) > herm_tol * scale:
        raise ValueError("density matrix is not Hermitian within tolerance")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} deviates from 1")
    wmin = float(np.linalg.eigvalsh(hermitize(rho)).min())
    if wmin < eig_floor:
        raise ValueError(f"density matrix has negative eigenvalue {wmin}")
    return rho


def level_projector(level: int, dim: int = 3) -> np.ndarray:
    """Pure-state density matrix |level><level|."""
    return ketbra(level, level, dim)
