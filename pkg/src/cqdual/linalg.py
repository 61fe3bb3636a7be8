"""Complex dense linear algebra kernels for density operators and pure states.

All operators are numpy complex arrays. Density operators are Hermitian PSD
with unit trace; pure states are unit vectors with declared subsystem
dimensions. Everything here is a pure function on immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL

__all__ = [
    "PureState",
    "hermitian_part",
    "assert_hermitian",
    "assert_density",
    "hermitian_eig",
    "spectral_fn",
    "matrix_power_psd",
    "psd_sqrt",
    "fidelity",
    "trace_distance",
    "trace_norm",
    "tensor",
    "partial_trace",
    "purify",
    "gram_embed",
    "von_neumann_entropy",
    "projector_onto_support",
]


@dataclass(frozen=True)
class PureState:
    """Unit vector together with the dimensions of its tensor factors."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex)
        if v.size != int(np.prod(self.dims)):
            raise ValueError(f"amplitude length {v.size} != prod{self.dims}")
        n = np.linalg.norm(v)
        if abs(n - 1.0) > TOL.unit_norm:
            raise ValueError(f"state norm {n} not 1 within {TOL.unit_norm}")
        object.__setattr__(self, "amplitudes", v)

    def density(self) -> np.ndarray:
        v = self.amplitudes
        return np.outer(v, v.conj())

    def reduced(self, keep) -> np.ndarray:
        return partial_trace(self.density(), self.dims, keep)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A†)/2."""
    return (a + a.conj().T) / 2


def assert_hermitian(a: np.ndarray, tol: float = TOL.hermiticity) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    gap = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if gap > tol:
        raise ValueError(f"matrix not Hermitian: max |A - A†| = {gap:.3e}")
    return hermitian_part(a)


def assert_density(rho: np.ndarray) -> np.ndarray:
    """Validate Hermiticity, positivity and unit trace; return the Hermitian part."""
    rho = assert_hermitian(rho)
    w = np.linalg.eigvalsh(rho)
    if w.min() < TOL.density_eigenvalue_floor:
        raise ValueError(f"negative eigenvalue {w.min():.3e} below floor")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TOL.trace_one:
        raise ValueError(f"trace {tr} not 1 within {TOL.trace_one}")
    return rho


def hermitian_eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and orthonormal eigenvectors as
    columns, so that A = V diag(w) V†.
    """
    a = assert_hermitian(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise np.linalg.LinAlgError(
            f"eigensolver did not converge on {a.shape[0]}x{a.shape[1]} input: {exc}"
        ) from exc
    return w, v


def spectral_fn(a: np.ndarray, fn, cut: float = 0.0) -> np.ndarray:
    """Apply fn to eigenvalues above cut; eigenvalues <= cut map to 0."""
    w, v = hermitian_eig(a)
    fw = np.where(w > cut, fn(np.maximum(w, cut if cut > 0 else 1e-300)), 0.0)
    return (v * fw) @ v.conj().T


def matrix_power_psd(a: np.ndarray, p: float, cut: float = TOL.rank_cut) -> np.ndarray:
    """PSD matrix power with the support convention 0**p := 0 (also for p < 0)."""
    return spectral_fn(a, lambda w: w**p, cut=cut)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Square root of a PSD Hermitian matrix; eigenvalues in [-1e-6, 0) are clamped."""
    w, v = hermitian_eig(a)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    if w.min() < -1e-6 * scale:
        raise ValueError(f"matrix not PSD: eigenvalue {w.min():.3e}")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1, in [0, 1] for density operators.

    Evaluated on the support factor of rho: with rho = Y Y†, the nonzero
    spectrum of sqrt(rho) sigma sqrt(rho) equals that of Y† sigma Y, which
    avoids square-rooting null-space noise (and is exact for pure states).
    """
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    w, v = hermitian_eig(rho)
    scale = max(1.0, float(w.max())) if w.size else 1.0
    keep = w > 1e-15 * scale  # numeric noise floor, not the rank decision
    y = v[:, keep] * np.sqrt(w[keep])
    m = hermitian_part(y.conj().T @ sigma @ y)
    ev = np.linalg.eigvalsh(m) if m.size else np.zeros(0)
    return float(np.sum(np.sqrt(np.clip(ev, 0.0, None))))


def trace_norm(a: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix: sum of absolute eigenvalues."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(assert_hermitian(a)))))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """delta(rho, sigma) = ||rho - sigma||_1 / 2."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    return 0.5 * trace_norm(rho - sigma)


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors)."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def partial_trace(state: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in keep.

    state may be a density matrix of shape (prod(dims), prod(dims)) or a pure
    state vector of length prod(dims). keep is an int or iterable of subsystem
    indices; their relative order is preserved in the output.
    """
    dims = tuple(int(d) for d in dims)
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(int(k) for k in keep)
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")
    total = int(np.prod(dims))
    state = np.asarray(state, dtype=complex)
    dkeep = int(np.prod([dims[k] for k in keep])) if keep else 1
    traced = [i for i in range(n) if i not in keep]
    if state.ndim == 1:
        psi = state.reshape(dims)
        perm = list(keep) + traced
        psi = np.transpose(psi, perm).reshape(dkeep, total // dkeep)
        return psi @ psi.conj().T
    rho = state.reshape(dims + dims)
    perm = list(keep) + traced
    rho = np.transpose(rho, perm + [n + p for p in perm])
    rho = rho.reshape(dkeep, total // dkeep, dkeep, total // dkeep)
    return np.einsum("ajbj->ab", rho)


def purify(rho: np.ndarray, cut: float = TOL.rank_cut) -> PureState:
    """Purification of rho on B (x) D with |D| equal to the numerical rank.

    The returned state satisfies Tr_D |phi><phi| = rho and has subsystem
    dims (dim(rho), rank).
    """
    rho = assert_density(rho)
    w, v = hermitian_eig(rho)
    keep = np.where(w > cut)[0][::-1]  # descending weight
    r = max(1, len(keep))
    dim = rho.shape[0]
    vec = np.zeros((dim, r), dtype=complex)
    for j, i in enumerate(keep):
        vec[:, j] = np.sqrt(w[i]) * v[:, i]
    flat = vec.reshape(-1)
    flat = flat / np.linalg.norm(flat)
    return PureState(flat, (dim, r))


def gram_embed(gram: np.ndarray, cut: float = TOL.rank_cut) -> np.ndarray:
    """Coordinate vectors reproducing a PSD Gram matrix.

    Returns an (m, r) array with r = rank(gram) such that
    vdot(vecs[i], vecs[j]) == gram[i, j] within 1e-8. Uses the
    eigendecomposition of the Gram matrix, which stays robust on
    rank-deficient inputs.
    """
    gram = assert_hermitian(gram, tol=TOL.gram_psd)
    w, v = np.linalg.eigh(gram)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    if w.min() < -TOL.gram_psd * scale:
        raise ValueError(f"Gram matrix indefinite: eigenvalue {w.min():.3e}")
    keep = np.where(w > cut * scale)[0]
    # columns of X are the embedded vectors: X†X = gram
    x = (np.sqrt(w[keep])[:, None]) * v[:, keep].conj().T
    return np.ascontiguousarray(x.T)


def von_neumann_entropy(rho: np.ndarray, cut: float = TOL.rank_cut) -> float:
    """S(rho) in bits."""
    w = np.linalg.eigvalsh(assert_hermitian(rho))
    w = w[w > cut]
    return float(-(w * np.log2(w)).sum()) if w.size else 0.0


def projector_onto_support(a: np.ndarray, cut: float = TOL.rank_cut) -> np.ndarray:
    """Isometry (dim x rank) whose columns span the support of a PSD matrix."""
    w, v = hermitian_eig(a)
    keep = np.where(w > cut)[0]
    if len(keep) == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    return np.ascontiguousarray(v[:, keep])
