"""Pauli strings with phase tracking, and Pauli mixture channels.

A string is stored in binary symplectic form: bitmasks x, z over the
qubits plus a power of i, with site letter Y = i X Z. Qubit j acts on
bit j of the computational-basis index (qubit 0 is the least
significant bit); letters render left to right as sites 0..n-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PHASES = (1, 1j, -1, -1j)
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


@dataclass(frozen=True)
class PauliString:
    """phase * prod_j X_j^{x_j} Z_j^{z_j}, phase = i^phase_exp."""

    n_qubits: int
    x: int
    z: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        mask = (1 << self.n_qubits) - 1
        object.__setattr__(self, "x", self.x & mask)
        object.__setattr__(self, "z", self.z & mask)
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_label(cls, label: str, phase=1) -> "PauliString":
        """Build from a letter string like "XIZY" (site 0 first)."""
        if not label or any(c not in _LETTER_BITS for c in label):
            raise ValueError(f"bad Pauli label {label!r}")
        x = z = 0
        ys = 0
        for j, c in enumerate(label):
            xb, zb = _LETTER_BITS[c]
            x |= xb << j
            z |= zb << j
            ys += xb & zb
        k = _PHASES.index(phase)
        return cls(len(label), x, z, (k + ys) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, site: int, letter: str) -> "PauliString":
        """Single-site Pauli embedded in n qubits."""
        label = ["I"] * n
        label[site] = letter
        return cls.from_label("".join(label))

    @property
    def letters(self) -> str:
        out = []
        for j in range(self.n_qubits):
            out.append(_BITS_LETTER[((self.x >> j) & 1, (self.z >> j) & 1)])
        return "".join(out)

    @property
    def phase(self) -> complex:
        """Scalar prefactor relative to the letter string."""
        ys = int(self.x & self.z).bit_count()
        return _PHASES[(self.phase_exp - ys) % 4]

    def __str__(self):
        p = self.phase
        tag = {1: "+", -1: "-", 1j: "+i", -1j: "-i"}[p]
        return tag + self.letters

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        # Z^z X^x = (-1)^{z.x} X^x Z^z when commuting the inner factors
        flips = int(self.z & other.x).bit_count()
        return PauliString(
            self.n_qubits,
            self.x ^ other.x,
            self.z ^ other.z,
            (self.phase_exp + other.phase_exp + 2 * flips) % 4,
        )

    def dagger(self) -> "PauliString":
        flips = int(self.x & self.z).bit_count()
        return PauliString(self.n_qubits, self.x, self.z, (-self.phase_exp + 2 * flips) % 4)

    def conjugate(self) -> "PauliString":
        """Entrywise complex conjugate in the computational basis."""
        return PauliString(self.n_qubits, self.x, self.z, (-self.phase_exp) % 4)

    def commutes_with(self, other: "PauliString") -> bool:
        s = int(self.x & other.z).bit_count() + int(self.z & other.x).bit_count()
        return s % 2 == 0

    def is_hermitian(self) -> bool:
        return (self.phase_exp - int(self.x & self.z).bit_count()) % 2 == 0

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for a Hermitian string."""
        p = self.phase
        if p not in (1, -1):
            raise ValueError(f"{self} has non-real phase")
        return int(p.real)

    def embed(self, n: int, offset: int) -> "PauliString":
        """Place this string on qubits [offset, offset + n_qubits) of n."""
        if offset < 0 or offset + self.n_qubits > n:
            raise ValueError("embedding out of range")
        return PauliString(n, self.x << offset, self.z << offset, self.phase_exp)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; X^x Z^z |b> = (-1)^{z.b} |b ^ x>."""
        dim = 1 << self.n_qubits
        basis = np.arange(dim)
        zbits = np.bitwise_count(np.bitwise_and(basis, self.z))
        signs = np.where(zbits % 2 == 0, 1.0, -1.0).astype(np.complex128)
        m = np.zeros((dim, dim), dtype=np.complex128)
        m[basis ^ self.x, basis] = _PHASES[self.phase_exp] * signs
        return m


def conjugate_by_hadamard(p: PauliString, q: int) -> PauliString:
    """H_q P H_q: swaps X and Z on qubit q, Y picks up a sign."""
    xb = (p.x >> q) & 1
    zb = (p.z >> q) & 1
    x = p.x ^ ((xb ^ zb) << q)
    z = p.z ^ ((xb ^ zb) << q)
    phase = p.phase_exp + (2 if xb and zb else 0)
    return PauliString(p.n_qubits, x, z, phase % 4)


def conjugate_by_phase_gate(p: PauliString, q: int) -> PauliString:
    """S_q P S_q^dag: X -> Y, Y -> -X on qubit q.

    In canonical form: X -> iXZ and XZ -> iX, so an X bit toggles the
    Z bit and always costs one power of i.
    """
    if not (p.x >> q) & 1:
        return p
    return PauliString(p.n_qubits, p.x, p.z ^ (1 << q), (p.phase_exp + 1) % 4)


def conjugate_by_cx(p: PauliString, control: int, target: int) -> PauliString:
    """CX P CX with given control/target qubits.

    X_c -> X_c X_t, Z_t -> Z_c Z_t, X_t and Z_c unchanged; in the
    canonical X^x Z^z form no phase correction arises.
    """
    if control == target:
        raise ValueError("control equals target")
    xc = (p.x >> control) & 1
    zt = (p.z >> target) & 1
    x = p.x ^ (xc << target)
    z = p.z ^ (zt << control)
    return PauliString(p.n_qubits, x, z, p.phase_exp)


class PauliChannel:
    """Finite mixture of Pauli unitaries applied with given probabilities."""

    def __init__(self, terms):
        terms = [(float(p), e) for p, e in terms]
        if not terms:
            raise ValueError("channel needs at least one term")
        n = terms[0][1].n_qubits
        for p, e in terms:
            if p < 0:
                raise ValueError(f"negative probability {p}")
            if e.n_qubits != n:
                raise ValueError("qubit count mismatch in channel terms")
        total = sum(p for p, _ in terms)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"channel probabilities sum to {total}, not 1")
        self.terms = terms
        self.n_qubits = n

    @classmethod
    def identity(cls, n: int) -> "PauliChannel":
        return cls([(1.0, PauliString.identity(n))])

    @classmethod
    def dephasing(cls, n: int, sites, p: float) -> "PauliChannel":
        """(1-p) rho + p Z_S rho Z_S for the given set of sites."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        label = ["I"] * n
        for s in sites:
            label[s] = "Z"
        return cls([(1.0 - p, PauliString.identity(n)),
                    (p, PauliString.from_label("".join(label)))])
