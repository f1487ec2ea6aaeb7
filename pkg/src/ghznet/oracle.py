"""Exact density-operator check of the memory-network error-rate chain.

Small-N verification path, not a performance path: it simulates the hub's
GHZ production, the noisy resource pairs and the entanglement swapping
with dense matrices and reads the error rates off the final state, so the
closed-form chain in :mod:`ghznet.noise` can be checked to near machine
precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .noise import (
    PairCoefficients,
    QberPair,
    alpha_beta_closed_form,
    ghz_prefactors,
    memory_qbers,
    pair_coefficients,
)

MAX_ORACLE_PARTIES = 4


def alpha_beta_subset_sum(pairs: Sequence[PairCoefficients]) -> tuple[float, float]:
    """Even/odd parity sums by explicit enumeration of all flip subsets.

    Exponential reference used only to validate the closed form; the
    production path is :func:`ghznet.noise.alpha_beta_closed_form`.
    """
    if not pairs:
        raise ValueError("need at least one resource pair")
    even = 0.0
    odd = 0.0
    for mask in range(2 ** len(pairs)):
        term = 1.0
        for index, pair in enumerate(pairs):
            term *= pair.w_flip if (mask >> index) & 1 else pair.w_keep
        if mask.bit_count() % 2 == 0:
            even += term
        else:
            odd += term
    return even, odd

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def _num_qubits(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    n = int(round(np.log2(dim)))
    if rho.shape != (dim, dim) or 2**n != dim:
        raise ValueError(f"not a qubit density matrix, shape {rho.shape}")
    return n


def embed_one(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {n_qubits} qubits")
    return kron_all([op if i == qubit else I2 for i in range(n_qubits)])


def validate_density(rho: np.ndarray, tol: float = 1e-12) -> None:
    """Hermiticity, unit trace and positivity up to numerical slack."""
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError("density matrix trace differs from 1")
    eigenvalues = np.linalg.eigvalsh(rho)
    if eigenvalues.min() < -1e-10:
        raise ValueError(f"density matrix has negative eigenvalue {eigenvalues.min()}")


def apply_depolarizing(rho: np.ndarray, qubit: int, f_depol: float) -> np.ndarray:
    """Single-qubit depolarizing channel with Pauli weight f_depol/4 each."""
    n = _num_qubits(rho)
    out = (1.0 - 0.75 * f_depol) * rho
    for pauli in (PAULI_X, PAULI_Y, PAULI_Z):
        op = embed_one(pauli, qubit, n)
        out = out + 0.25 * f_depol * (op @ rho @ op.conj().T)
    return out


def apply_dephasing(rho: np.ndarray, qubit: int, lam: float) -> np.ndarray:
    """Single-qubit phase-flip channel; lam in [0, 1/2]."""
    if not 0.0 <= lam <= 0.5:
        raise ValueError(f"dephasing weight must lie in [0, 1/2], got {lam!r}")
    n = _num_qubits(rho)
    op = embed_one(PAULI_Z, qubit, n)
    return (1.0 - lam) * rho + lam * (op @ rho @ op.conj().T)


def controlled_flip_gate(control: int, target: int, n_qubits: int) -> np.ndarray:
    """|+><+| (x) 1 + |-><-| (x) X on (control, target)."""
    proj_plus = np.outer(_PLUS, _PLUS.conj())
    proj_minus = np.outer(_MINUS, _MINUS.conj())
    ops_plus = [I2] * n_qubits
    ops_plus[control] = proj_plus
    ops_minus = [I2] * n_qubits
    ops_minus[control] = proj_minus
    ops_minus[target] = PAULI_X
    return kron_all(ops_plus) + kron_all(ops_minus)


def permute_qubits(rho: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Reorder qubits so new position i holds old qubit perm[i]."""
    n = len(perm)
    tensor = rho.reshape((2,) * (2 * n))
    axes = list(perm) + [n + p for p in perm]
    return np.ascontiguousarray(tensor.transpose(axes).reshape(2**n, 2**n))


def build_hub_state(n_parties: int, f_depol: float) -> np.ndarray:
    """State of (Alice, router qubits 1..N-1) after GHZ production at the hub.

    Alice entangles a carrier qubit with her own, sends the carrier through
    the depolarizing long link, the hub fans it out onto N-1 fresh qubits
    with controlled flips, measures the carrier in Z and applies the
    outcome-conditioned Z correction on the first fan-out qubit.  Both
    outcome branches are summed with their probabilities.
    """
    if not 2 <= n_parties <= MAX_ORACLE_PARTIES:
        raise ValueError(f"hub-state oracle supports 2 <= N <= {MAX_ORACLE_PARTIES}")
    # qubit order while building: [carrier, alice, fanout_1..fanout_{N-1}]
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0
    psi = controlled_flip_gate(0, 1, 2) @ psi
    rho = np.outer(psi, psi.conj())
    rho = apply_depolarizing(rho, 0, f_depol)
    n_qubits = 2
    for _ in range(n_parties - 1):
        rho = np.kron(rho, np.diag([1.0, 0.0]).astype(complex))
        n_qubits += 1
        gate = controlled_flip_gate(0, n_qubits - 1, n_qubits)
        rho = gate @ rho @ gate.conj().T
    # Z-measure the carrier: the two diagonal blocks are the outcome branches.
    half = 2 ** (n_qubits - 1)
    blocks = rho.reshape(2, half, 2, half)
    branch0 = blocks[0, :, 0, :]
    branch1 = blocks[1, :, 1, :]
    correction = embed_one(PAULI_Z, 1, n_qubits - 1)  # first fan-out qubit
    return branch0 + correction @ branch1 @ correction.conj().T


def noisy_pair_state(exp_b: float, exp_c: float, f_depol: float) -> np.ndarray:
    """Resource Bell pair on (hub half, Bob half) after dephasing of both
    halves and depolarization of the travelling half only."""
    rho = np.outer(_PHI_PLUS, _PHI_PLUS.conj())
    rho = apply_dephasing(rho, 0, 0.5 * (1.0 - exp_c))
    rho = apply_dephasing(rho, 1, 0.5 * (1.0 - exp_b))
    return apply_depolarizing(rho, 1, f_depol)


def swap_pairs(hub_state: np.ndarray, pair_states: Sequence[np.ndarray]) -> np.ndarray:
    """Project every (fan-out, hub-half) pair onto phi+ and renormalize,
    leaving the (Alice, Bob_1..Bob_{N-1}) state."""
    n_parties = _num_qubits(hub_state)
    if len(pair_states) != n_parties - 1:
        raise ValueError("need one resource pair per Bob")
    rho = hub_state
    for pair in pair_states:
        if pair.shape != (4, 4):
            raise ValueError("resource pairs must be two-qubit states")
        rho = np.kron(rho, pair)
    # order: [alice, fanout_1..fanout_{n-1}, hub_1, bob_1, ..., hub_{n-1}, bob_{n-1}]
    keep = [0] + [n_parties + 2 * i + 1 for i in range(n_parties - 1)]
    project = []
    for i in range(n_parties - 1):
        project += [1 + i, n_parties + 2 * i]
    rho = permute_qubits(rho, keep + project)
    bra = _PHI_PLUS.conj().reshape(1, 4)
    projector = np.kron(np.eye(2**n_parties, dtype=complex), kron_all([bra] * (n_parties - 1)))
    projected = projector @ rho @ projector.conj().T
    norm = float(np.real(np.trace(projected)))
    if norm < 1e-15:
        raise ValueError("entanglement swapping projection has zero norm")
    return projected / norm


@dataclass(frozen=True)
class GhzDecomposition:
    """Weights over the 2^N GHZ-basis projectors of an N-party state."""

    n_parties: int
    weights_plus: np.ndarray
    weights_minus: np.ndarray
    residual: float

    @property
    def a(self) -> float:
        return float(self.weights_plus[0])

    @property
    def b(self) -> float:
        return float(self.weights_minus[0])


def ghz_basis_vector(bits: int, sign: int, n_parties: int) -> np.ndarray:
    """(|0>|bits> + sign |1>|~bits>)/sqrt(2) with Alice as the leading qubit."""
    n_bobs = n_parties - 1
    negated = (2**n_bobs - 1) ^ bits
    vec = np.zeros(2**n_parties, dtype=complex)
    vec[bits] = 1.0 / np.sqrt(2.0)
    vec[2**n_bobs + negated] += sign / np.sqrt(2.0)
    return vec


def decompose_ghz(rho: np.ndarray, n_parties: int) -> GhzDecomposition:
    n_bobs = n_parties - 1
    weights_plus = np.zeros(2**n_bobs)
    weights_minus = np.zeros(2**n_bobs)
    reconstructed = np.zeros_like(rho)
    for bits in range(2**n_bobs):
        for sign, target in ((+1, weights_plus), (-1, weights_minus)):
            vec = ghz_basis_vector(bits, sign, n_parties)
            weight = float(np.real(vec.conj() @ rho @ vec))
            target[bits] = weight
            reconstructed = reconstructed + weight * np.outer(vec, vec.conj())
    residual = float(np.linalg.norm(rho - reconstructed))
    return GhzDecomposition(n_parties, weights_plus, weights_minus, residual)


def swap_and_decompose(
    hub_state: np.ndarray, pair_states: Sequence[np.ndarray]
) -> GhzDecomposition:
    """Entanglement swapping followed by GHZ-basis decomposition."""
    n_parties = _num_qubits(hub_state)
    return decompose_ghz(swap_pairs(hub_state, pair_states), n_parties)


def extract_qbers(dec: GhzDecomposition) -> QberPair:
    """Error rates from the GHZ weights: odd collective X parity, and at
    least one Bob discordant with Alice in Z."""
    q_x = float(dec.weights_minus.sum())
    q_z = float(1.0 - dec.weights_plus[0] - dec.weights_minus[0])
    return QberPair(min(max(q_x, 0.0), 1.0), min(max(q_z, 0.0), 1.0))


def direct_qbers(rho: np.ndarray, n_parties: int) -> QberPair:
    """Error rates measured directly on the state, bypassing the decomposition.

    q_x: all parties measure X, an error is an odd product of outcomes.
    q_z: all parties measure Z, an error is any Bob differing from Alice.
    """
    x_all = kron_all([PAULI_X] * n_parties)
    q_x = float(np.real(np.trace(rho @ (np.eye(2**n_parties) - x_all))) / 2.0)
    diag = np.real(np.diag(rho))
    q_z = float(1.0 - diag[0] - diag[-1])
    return QberPair(min(max(q_x, 0.0), 1.0), min(max(q_z, 0.0), 1.0))


@dataclass(frozen=True)
class OracleCheckRow:
    n_parties: int
    f_depol: float
    exponents: tuple[tuple[float, float], ...]
    max_abs_error: float
    ghz_residual: float
    passed: bool


DEFAULT_F_GRID = (0.0, 0.01, 0.05, 0.2)
DEFAULT_EXPONENTS = (1.0, 0.9, 0.5)


def oracle_grid(
    max_n: int = 3,
    f_grid: Sequence[float] = DEFAULT_F_GRID,
    exponent_values: Sequence[float] = DEFAULT_EXPONENTS,
    tol: float = 1e-10,
    prefactor_fn: Callable = ghz_prefactors,
) -> list[OracleCheckRow]:
    """Compare oracle error rates against the analytic chain on a grid.

    Per (N, f) the grid spans all per-pair exponent assignments from
    `exponent_values` plus one asymmetric spot check.  `prefactor_fn` is
    injectable so tests can prove a perturbed formula is caught.
    """
    if not 2 <= max_n <= MAX_ORACLE_PARTIES:
        raise ValueError(f"oracle supports N <= {MAX_ORACLE_PARTIES}")
    rows: list[OracleCheckRow] = []
    for n in range(2, max_n + 1):
        exponent_sets = [
            tuple((e, e) for e in combo)
            for combo in product(exponent_values, repeat=n - 1)
        ]
        exponent_sets.append(tuple((0.9, 0.8) for _ in range(n - 1)))
        for f in f_grid:
            hub = build_hub_state(n, f)
            for exps in exponent_sets:
                pairs = [noisy_pair_state(eb, ec, f) for eb, ec in exps]
                swapped = swap_pairs(hub, pairs)
                dec = decompose_ghz(swapped, n)
                oracle_q = extract_qbers(dec)
                direct_q = direct_qbers(swapped, n)
                coeffs = [pair_coefficients(eb, ec, f) for eb, ec in exps]
                alpha, beta = alpha_beta_closed_form(coeffs)
                analytic_q = memory_qbers(prefactor_fn(alpha, beta, f, n))
                err = max(
                    abs(oracle_q.q_x - analytic_q.q_x),
                    abs(oracle_q.q_z - analytic_q.q_z),
                    abs(direct_q.q_x - analytic_q.q_x),
                    abs(direct_q.q_z - analytic_q.q_z),
                )
                rows.append(
                    OracleCheckRow(
                        n, f, exps, err, dec.residual, err <= tol and dec.residual <= tol
                    )
                )
    return rows
