"""Qubit Pauli channels, their Choi states and two-way capacity verdicts.

A Pauli channel applies I, X, Y or Z with probabilities (p0, p1, p2, p3).
Its two-way assisted secret-key capacity is zero exactly when the largest
probability is at most 1/2, which is also when the Choi state stays PPT.
When the largest probability exceeds 1/2, 1 - H2(p_max) upper-bounds the
capacity. All functions here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ValidationError

SIMPLEX_TOL = 1e-12
NPT_TOL = 1e-12
ROUTE_AGREEMENT_TOL = 1e-10

PAULI_MATRICES = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class PauliDistribution:
    """Probability 4-vector over the Pauli operators (I, X, Y, Z).

    Entries must lie in [0, 1] and sum to 1 within 1e-12; inputs inside
    the tolerance are renormalized, anything else is rejected.
    """

    p: tuple[float, float, float, float]

    def __init__(self, p) -> None:
        vals = [float(x) for x in p]
        if len(vals) != 4:
            raise ValidationError(f"need 4 Pauli probabilities, got {len(vals)}")
        for x in vals:
            if not math.isfinite(x) or x < -SIMPLEX_TOL or x > 1.0 + SIMPLEX_TOL:
                raise ValidationError(f"probability {x!r} outside [0, 1]")
        # fsum: exactly-rounded total, so (0.5, 1/6, 1/6, 1/6) stays on
        # the p_max = 1/2 boundary instead of drifting one ulp past it.
        total = math.fsum(vals)
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        vals = [min(max(x, 0.0), 1.0) / total for x in vals]
        object.__setattr__(self, "p", tuple(vals))

    @property
    def p_max(self) -> float:
        return max(self.p)

    def as_array(self) -> np.ndarray:
        return np.array(self.p)


class QubitState:
    """Single-qubit density matrix (2x2 complex, Hermitian, unit trace)."""

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            raise ValidationError("density matrix is not Hermitian")
        if abs(m.trace().real - 1.0) > 1e-12 or abs(m.trace().imag) > 1e-12:
            raise ValidationError(f"density matrix trace is {m.trace()}, not 1")
        if np.linalg.eigvalsh(m).min() < -1e-12:
            raise ValidationError("density matrix has a negative eigenvalue")
        m = m.copy()
        m.flags.writeable = False
        self.matrix = m

    @classmethod
    def from_ket(cls, amplitudes) -> "QubitState":
        v = np.asarray(amplitudes, dtype=complex).reshape(2)
        norm = np.vdot(v, v).real
        if norm <= 0:
            raise ValidationError("ket amplitudes are all zero")
        return cls(np.outer(v, v.conj()) / norm)


def apply_channel(p: PauliDistribution, rho: QubitState) -> QubitState:
    """Apply the Pauli channel: sum_k p_k P_k rho P_k."""
    out = np.zeros((2, 2), dtype=complex)
    for prob, sigma in zip(p.p, PAULI_MATRICES):
        out += prob * (sigma @ rho.matrix @ sigma.conj().T)
    return QubitState(out)


def depolarizing(strength: float) -> PauliDistribution:
    """Pauli distribution (1 - 3p/4, p/4, p/4, p/4) of the depolarizing channel.

    The channel maps rho to (1 - p) rho + p I/2; p may run up to 4/3,
    past which the distribution leaves the simplex.
    """
    s = float(strength)
    if not 0.0 <= s <= 4.0 / 3.0:
        raise ValidationError(f"depolarizing strength {s!r} outside [0, 4/3]")
    return PauliDistribution((1.0 - 0.75 * s, s / 4.0, s / 4.0, s / 4.0))


def _bell_projectors() -> tuple[np.ndarray, ...]:
    # (I tensor P_k) |phi+> for k = 0..3, projectors are all real.
    phi = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)
    projs = []
    for sigma in PAULI_MATRICES:
        v = np.kron(np.eye(2), sigma) @ phi
        projs.append(np.real(np.outer(v, v.conj())) / 2.0)
    return tuple(projs)


BELL_PROJECTORS = _bell_projectors()


class ChoiState:
    """Choi state of a Pauli channel: Bell-diagonal, real symmetric 4x4."""

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValidationError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.allclose(m, m.T, atol=1e-12, rtol=0):
            raise ValidationError("Choi matrix is not symmetric")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise ValidationError(f"Choi matrix trace is {np.trace(m)!r}, not 1")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValidationError("Choi matrix is not positive semidefinite")
        m = m.copy()
        m.flags.writeable = False
        self.matrix = m


def choi_state(p: PauliDistribution) -> ChoiState:
    """Choi state sum_k p_k |bell_k><bell_k| of the channel."""
    m = np.zeros((4, 4))
    for prob, proj in zip(p.p, BELL_PROJECTORS):
        m += prob * proj
    return ChoiState(m)


def partial_transpose(c: ChoiState) -> np.ndarray:
    """Partial transpose over the output (second) qubit.

    The result is again real symmetric but may have a negative
    eigenvalue; for a Bell-diagonal input the spectrum is {1/2 - p_k}.
    """
    m = c.matrix.reshape(2, 2, 2, 2)
    return m.transpose(0, 3, 2, 1).reshape(4, 4).copy()


def symmetric_eigenvalues(matrix, with_vectors: bool = False):
    """Eigenvalues of a real symmetric matrix, ascending.

    Thin wrapper over LAPACK's symmetric solver. With ``with_vectors``
    the orthonormal eigenvector matrix is returned as well and the
    reconstruction residual is checked to 1e-10.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.T, atol=1e-10, rtol=0):
        raise ValidationError("matrix is not symmetric within 1e-10")
    try:
        if with_vectors:
            w, v = np.linalg.eigh(m)
        else:
            w = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed to converge: {exc}") from exc
    if with_vectors:
        residual = np.abs(v @ np.diag(w) @ v.T - m).max()
        if residual > 1e-10:
            raise NumericError(f"eigendecomposition residual {residual:.3e} > 1e-10")
        return w, v
    return w


def binary_entropy(x: float) -> float:
    """Binary entropy H2(x) in bits, with H2(0) = H2(1) = 0."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"binary entropy argument {x!r} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class CapacityVerdict:
    """Zero-capacity decision for a Pauli channel.

    ``zero_capacity`` comes from the analytic criterion p_max <= 1/2,
    ``npt`` from the numeric partial-transpose spectrum (strictly below
    -1e-12 to absorb float noise), and ``phi_upper_bound`` is the
    1 - H2(p_max) capacity bound (zero at and below the boundary).
    """

    zero_capacity: bool
    p_max: float
    phi_upper_bound: float
    npt: bool
    min_pt_eigenvalue: float


def capacity_verdict(p: PauliDistribution) -> CapacityVerdict:
    """Decide zero two-way capacity by both the analytic and numeric routes.

    The analytic route reads p_max off the distribution; the numeric
    route diagonalizes the partially transposed Choi state. The two must
    agree to 1e-10 (min eigenvalue = 1/2 - p_max) or a NumericError is
    raised.
    """
    p_max = p.p_max
    eigs = symmetric_eigenvalues(partial_transpose(choi_state(p)))
    min_eig = float(eigs[0])
    if abs(min_eig - (0.5 - p_max)) > ROUTE_AGREEMENT_TOL:
        raise NumericError(
            f"PT spectrum route gives {min_eig!r}, analytic route {0.5 - p_max!r}"
        )
    zero = p_max <= 0.5
    phi = 0.0 if zero else 1.0 - binary_entropy(p_max)
    return CapacityVerdict(
        zero_capacity=zero,
        p_max=p_max,
        phi_upper_bound=phi,
        npt=min_eig < -NPT_TOL,
        min_pt_eigenvalue=min_eig,
    )
