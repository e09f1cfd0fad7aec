"""Exact dense backend: mixed-state symmetry-breaking diagnostics.

Everything here works on explicit density matrices up to 12 qubits and
serves as the ground truth the other backends are validated against.
The five correlators compare a state rho with its charge-inserted
partner O_x O_y^dag rho O_y O_x^dag:

  renyi1              tr[O sqrt(rho) O^dag sqrt(rho)]
  renyi2              tr[O rho O^dag rho] / tr[rho^2]
  fidelity_corr       tr sqrt( sqrt(rho) O rho O^dag sqrt(rho) )
  trace_distance_corr (1/2) || rho - O rho O^dag ||_1
  relative_entropy_corr  tr{ rho [log rho - log O rho O^dag] }
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import EIG_CLIP_FACTOR, hermitian_eig, psd_sqrt, row_sum_norm
from .pauli import PauliChannel, PauliString

MAX_DENSE_QUBITS = 12
MAX_CP_QUBITS = 6


class DensityMatrix:
    """Validated positive-semidefinite unit-trace operator on n qubits."""

    def __init__(self, matrix, validate: bool = True):
        m = np.asarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        n = int(m.shape[0]).bit_length() - 1
        if 1 << n != m.shape[0]:
            raise ValueError(f"dimension {m.shape[0]} is not a power of two")
        if n > MAX_DENSE_QUBITS:
            raise ValueError(
                f"{n} qubits exceeds the dense backend cap of {MAX_DENSE_QUBITS}"
            )
        if validate:
            norm = max(row_sum_norm(m), 1.0)
            if row_sum_norm(m - m.conj().T) > 1e-10 * norm:
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(m) - 1.0) > 1e-10:
                raise ValueError(f"trace is {np.trace(m)}, expected 1")
            w = np.linalg.eigvalsh(m)
            if w[0] < -EIG_CLIP_FACTOR * m.shape[0] * norm:
                raise ValueError(f"negative eigenvalue {w[0]:.3e}")
        m = m.copy()
        m.flags.writeable = False
        self.matrix = m
        self.n_qubits = n
        self._sqrt = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def sqrt(self) -> np.ndarray:
        """PSD square root, cached; safe because the matrix is frozen."""
        if self._sqrt is None:
            s = psd_sqrt(self.matrix)
            s.flags.writeable = False
            self._sqrt = s
        return self._sqrt

    def expectation(self, op: PauliString) -> complex:
        return complex(np.trace(op.to_matrix() @ self.matrix))


@dataclass(frozen=True)
class PurifiedVector:
    """Pure state on a doubled system, amplitudes indexed (left, right)."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (4 ** self.n_qubits,):
            raise ValueError("amplitude count must be 4^n")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
            raise ValueError("purified vector is not normalized")
        object.__setattr__(self, "amplitudes", amps)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped so [i, j] is the (left=i, right=j) entry."""
        d = 1 << self.n_qubits
        return self.amplitudes.reshape(d, d)

    def reduced_left(self) -> np.ndarray:
        psi = self.as_matrix()
        return psi @ psi.conj().T

    def two_sided_expectation(self, op_left: np.ndarray, op_right_bar: np.ndarray) -> complex:
        """<O1^L O2bar^R> where op_right_bar acts as its complex conjugate."""
        psi = self.as_matrix()
        return complex(np.vdot(psi, op_left @ psi @ op_right_bar.conj().T))


def canonical_purification(rho: DensityMatrix) -> PurifiedVector:
    """Purify rho by applying sqrt(rho) to a maximally entangled pair.

    The copy basis is the computational (Pauli-Z) basis; amplitudes of
    |i>^L |j>^R are simply sqrt(rho)[i, j].
    """
    if rho.n_qubits > MAX_CP_QUBITS:
        raise ValueError(
            f"purified vectors are capped at {MAX_CP_QUBITS} qubits per side; "
            "use the trace-form diagnostics instead"
        )
    return PurifiedVector(rho.n_qubits, rho.sqrt().flatten())


def _charge_op(rho: DensityMatrix, o_x: PauliString, o_y: PauliString) -> np.ndarray:
    for o in (o_x, o_y):
        if o.n_qubits != rho.n_qubits:
            raise ValueError("operator qubit count mismatch")
    return (o_x * o_y.dagger()).to_matrix()


def renyi1(rho: DensityMatrix, o_x: PauliString, o_y: PauliString) -> float:
    o = _charge_op(rho, o_x, o_y)
    s = rho.sqrt()
    val = np.trace(o @ s @ o.conj().T @ s)
    return float(val.real)


def renyi2(rho: DensityMatrix, o_x: PauliString, o_y: PauliString) -> float:
    o = _charge_op(rho, o_x, o_y)
    m = rho.matrix
    num = np.trace(o @ m @ o.conj().T @ m).real
    den = np.trace(m @ m).real
    return float(num / den)


def fidelity_corr(rho: DensityMatrix, o_x: PauliString, o_y: PauliString) -> float:
    o = _charge_op(rho, o_x, o_y)
    s = rho.sqrt()
    inner = s @ o @ rho.matrix @ o.conj().T @ s
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def trace_distance_corr(rho: DensityMatrix, o_x: PauliString, o_y: PauliString) -> float:
    o = _charge_op(rho, o_x, o_y)
    diff = rho.matrix - o @ rho.matrix @ o.conj().T
    w = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(0.5 * np.sum(np.abs(w)))


def relative_entropy_corr(rho: DensityMatrix, o_x: PauliString, o_y: PauliString) -> float:
    """tr{rho [log rho - log sigma]} with sigma the charge-inserted state.

    Returns math.inf when the support of rho is not contained in the
    support of sigma; zero-weight eigenvector contributions are dropped.
    """
    o = _charge_op(rho, o_x, o_y)
    sigma = o @ rho.matrix @ o.conj().T
    w_r, v_r = hermitian_eig(rho.matrix)
    w_s, v_s = hermitian_eig((sigma + sigma.conj().T) / 2)
    cut = EIG_CLIP_FACTOR * rho.dim * max(row_sum_norm(rho.matrix), 1.0)
    w_r = np.where(w_r > cut, w_r, 0.0)
    w_s = np.where(w_s > cut, w_s, 0.0)

    overlap = np.abs(v_r.conj().T @ v_s) ** 2  # overlap[i, j] = |<u_i|v_j>|^2
    support = w_r > 0
    # support condition: rho must put no weight on the kernel of sigma
    leak = float(w_r[support] @ overlap[np.ix_(support, w_s == 0)].sum(axis=1))
    if leak > 1e-12:
        return math.inf

    ent = float(np.sum(w_r[support] * np.log(w_r[support])))
    log_s = np.log(np.where(w_s > 0, w_s, 1.0))
    cross = float(w_r[support] @ overlap[np.ix_(support, w_s > 0)] @ log_s[w_s > 0])
    return ent - cross


def apply_channel(rho: DensityMatrix, channel: PauliChannel) -> DensityMatrix:
    if channel.n_qubits != rho.n_qubits:
        raise ValueError("channel qubit count mismatch")
    out = np.zeros_like(rho.matrix)
    for p, e in channel.terms:
        if p == 0.0:
            continue
        m = e.to_matrix()
        out += p * (m @ rho.matrix @ m.conj().T)
    return DensityMatrix(out)


class SymmetryCheck(NamedTuple):
    is_strong: bool
    is_weak: bool
    phase: complex


def check_strong_symmetry(rho: DensityMatrix, unitary, tol: float = 1e-9) -> SymmetryCheck:
    """Classify a symmetry as strong (U rho = e^{i phi} rho) or weak."""
    u = unitary.to_matrix() if isinstance(unitary, PauliString) else np.asarray(unitary)
    if row_sum_norm(u @ u.conj().T - np.eye(u.shape[0])) > 1e-10 * max(row_sum_norm(u), 1.0):
        raise ValueError("symmetry operator is not unitary")
    m = rho.matrix
    overlap = complex(np.trace(u @ m))
    phase = overlap / abs(overlap) if abs(overlap) > tol else complex(1.0)
    is_strong = row_sum_norm(u @ m - phase * m) < tol
    is_weak = row_sum_norm(u @ m @ u.conj().T - m) < tol
    return SymmetryCheck(is_strong, is_weak, phase)


# ---------------------------------------------------------------------------
# reference states

def parity_operator(n: int) -> PauliString:
    return PauliString.from_label("X" * n)


def plus_product_state(n: int) -> DensityMatrix:
    """|+><+| on every site."""
    v = np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)
    return DensityMatrix(np.outer(v, v.conj()))


def _tfim_hamiltonian(n: int, j: float, g: float) -> np.ndarray:
    """Periodic ring H = -J sum_j (Z_j Z_{j+1} + g X_j) as a dense matrix."""
    dim = 1 << n
    h = np.zeros((dim, dim))
    basis = np.arange(dim)
    zz = np.zeros(dim)
    for site in range(n):
        nxt = (site + 1) % n
        bits = ((basis >> site) ^ (basis >> nxt)) & 1
        zz += np.where(bits == 0, 1.0, -1.0)
    h[basis, basis] = -j * zz
    for site in range(n):
        h[basis ^ (1 << site), basis] += -j * g
    return h


def _parity_even_projector(n: int) -> np.ndarray:
    return (np.eye(1 << n) + parity_operator(n).to_matrix().real) / 2


def tfim_even_ground_state(n: int, g: float, j: float = 1.0) -> np.ndarray:
    """Parity-even ground state of the ring, nonnegative in the X basis.

    Diagonalizing inside the even sector keeps the g -> 0 limit
    well-defined (the even combination of the two ordered states).
    """
    h = _tfim_hamiltonian(n, j, g)
    p = _parity_even_projector(n)
    # orthonormal basis of the even sector from the projector's range
    w, v = np.linalg.eigh(p)
    basis = v[:, w > 0.5]
    h_even = basis.conj().T @ h @ basis
    _, vecs = np.linalg.eigh((h_even + h_even.conj().T) / 2)
    psi = basis @ vecs[:, 0]
    psi = psi.real
    # fix the global sign so X-basis coefficients are nonnegative
    had = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    hn = had
    for _ in range(n - 1):
        hn = np.kron(hn, had)
    coeffs = hn @ psi
    if coeffs.sum() < 0:
        psi = -psi
        coeffs = -coeffs
    return psi / np.linalg.norm(psi)


def build_reference_state(kind: str, **params) -> DensityMatrix:
    """Construct one of the benchmark mixed states.

    kind = "rho_pi":   (1 + parity)/2^n, params n.
    kind = "rho_plus": the pure all-|+> product, params n.
    kind = "rho_p":    all-|+> product decohered by ZZ dephasing of
                       strength p on every link of a periodic lattice,
                       params d, length, p.
    kind = "rho_beta": parity-even thermal state of the 1D ring,
                       params n, beta, g, optional j.
    kind = "rho_g":    X-basis-diagonal mixture built from the
                       parity-even ring ground state, params n, g,
                       optional j.
    """
    if kind == "rho_pi":
        n = params["n"]
        m = (np.eye(1 << n) + parity_operator(n).to_matrix()) / (1 << n)
        return DensityMatrix(m)
    if kind == "rho_plus":
        return plus_product_state(params["n"])
    if kind == "rho_p":
        from .ising import LatticeSpec  # local import to avoid a cycle

        lat = LatticeSpec(params["d"], params["length"])
        p = params["p"]
        rho = plus_product_state(lat.n_sites)
        for i, j2 in lat.links():
            rho = apply_channel(rho, PauliChannel.dephasing(lat.n_sites, (i, j2), p))
        return rho
    if kind == "rho_beta":
        n, beta, g = params["n"], params["beta"], params["g"]
        j = params.get("j", 1.0)
        h = _tfim_hamiltonian(n, j, g)
        w, v = np.linalg.eigh(h)
        p_even = _parity_even_projector(n)
        weights = np.exp(-beta * (w - w[0]))
        gibbs = (v * weights) @ v.conj().T
        m = p_even @ gibbs @ p_even
        return DensityMatrix(m / np.trace(m))
    if kind == "rho_g":
        n, g = params["n"], params["g"]
        j = params.get("j", 1.0)
        psi = tfim_even_ground_state(n, g, j)
        had = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
        hn = had
        for _ in range(n - 1):
            hn = np.kron(hn, had)
        coeffs = hn @ psi  # X-basis amplitudes, nonnegative
        diag_x = np.diag(coeffs.astype(np.complex128) ** 2)
        m = hn @ diag_x @ hn  # back to the computational basis
        return DensityMatrix(m / np.trace(m))
    raise ValueError(f"unknown reference state kind {kind!r}")


def sign_free_cp_checks(g: float, n: int, x: int = 0, y: int | None = None):
    """Correlator identities of the doubled state built from a sign-free
    ground state: left-only ZZ vanishes while the two-sided ZZ equals
    the ground-state correlator.

    Returns (left_corr, two_sided, gs_corr) for sites x and y.
    """
    if y is None:
        y = n // 2
    if not 0 <= x < y < n:
        raise ValueError("need 0 <= x < y < n")
    psi = tfim_even_ground_state(n, g)
    had = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    hn = had
    for _ in range(n - 1):
        hn = np.kron(hn, had)
    coeffs = hn @ psi  # amplitudes over X-basis labels

    # Z_x Z_y in the X product basis: a 0/1 bit-flip permutation matrix
    zz = PauliString.single(n, x, "Z").to_matrix().real
    zz = zz @ PauliString.single(n, y, "Z").to_matrix().real
    zz_x = hn @ zz @ hn

    # doubled state sum_m c_m |m>^L |m>^R, correlators contract both sides
    left = float((coeffs ** 2) @ np.diag(zz_x))
    two_sided = float(coeffs @ (zz_x ** 2) @ coeffs)
    gs = float(coeffs @ zz_x @ coeffs)
    return left, two_sided, gs


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Hilbert-Schmidt-uniform random state from a Gaussian G G^dag."""
    dim = 1 << n
    r = rank or dim
    g = rng.normal(size=(dim, r)) + 1j * rng.normal(size=(dim, r))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m))


def random_pauli_string(n: int, rng: np.random.Generator) -> PauliString:
    letters = "".join(rng.choice(list("IXYZ")) for _ in range(n))
    return PauliString.from_label(letters)
