"""Pauli-string sums, Jordan-Wigner encoding, and coupler Pauli decompositions.

Qubit ``p`` carries spin-orbital ``p`` and sits at the p-th least significant
bit of the computational index, so the full-space matrix of an encoded
operator matches :func:`fermicool.lattice.fock_matrix` entry for entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import FockSum

PRUNE_TOL = 1e-14

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliSum:
    """Canonical map from Pauli letter strings (e.g. "IXZY") to coefficients."""

    strings: dict[str, complex]
    n_qubits: int

    def __post_init__(self):
        for s in self.strings:
            if len(s) != self.n_qubits or any(c not in "IXYZ" for c in s):
                raise ValueError(f"bad Pauli string {s!r}")

    @staticmethod
    def from_terms(pairs, n_qubits: int) -> "PauliSum":
        """Merge (letters, coefficient) pairs and prune below PRUNE_TOL."""
        acc: dict[str, complex] = {}
        for letters, c in pairs:
            acc[letters] = acc.get(letters, 0.0) + c
        acc = {s: c for s, c in acc.items() if abs(c) > PRUNE_TOL}
        return PauliSum(acc, n_qubits)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit counts differ")
        return PauliSum.from_terms(
            list(self.strings.items()) + list(other.strings.items()), self.n_qubits
        )

    def scaled(self, c: complex) -> "PauliSum":
        return PauliSum.from_terms(
            [(s, c * v) for s, v in self.strings.items()], self.n_qubits
        )

    def coefficient_norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.strings.values())))


def _single_string_product(a: str, ca: complex, b: str, cb: complex):
    """Product of two Pauli strings: (letters, coefficient)."""
    # XY = iZ and cyclic; same letters square to I.
    table = {
        ("X", "Y"): ("Z", 1j),
        ("Y", "Z"): ("X", 1j),
        ("Z", "X"): ("Y", 1j),
        ("Y", "X"): ("Z", -1j),
        ("Z", "Y"): ("X", -1j),
        ("X", "Z"): ("Y", -1j),
    }
    out = []
    phase = ca * cb
    for la, lb in zip(a, b):
        if la == "I":
            out.append(lb)
        elif lb == "I":
            out.append(la)
        elif la == lb:
            out.append("I")
        else:
            letter, ph = table[(la, lb)]
            out.append(letter)
            phase *= ph
    return "".join(out), phase


def pauli_product(a: PauliSum, b: PauliSum) -> PauliSum:
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit counts differ")
    pairs = [
        _single_string_product(sa, ca, sb, cb)
        for sa, ca in a.strings.items()
        for sb, cb in b.strings.items()
    ]
    return PauliSum.from_terms(pairs, a.n_qubits)


def _jw_ladder(mode: int, dagger: bool, n_qubits: int) -> PauliSum:
    """Jordan-Wigner image of a single ladder operator.

    a_p -> (X_p + iY_p)/2 * Z_0 ... Z_{p-1}; the dagger flips the sign of the
    Y component.
    """
    prefix = "Z" * mode
    suffix = "I" * (n_qubits - mode - 1)
    y_coeff = -0.5j if dagger else 0.5j
    return PauliSum.from_terms(
        [(prefix + "X" + suffix, 0.5), (prefix + "Y" + suffix, y_coeff)], n_qubits
    )


def jordan_wigner(op: FockSum) -> PauliSum:
    """Encode a FockSum as a PauliSum, linearly term by term."""
    n = op.n_modes
    identity = PauliSum({"I" * n: 1.0}, n)
    total = PauliSum({}, n)
    for term in op.terms:
        acc = identity.scaled(term.coefficient)
        for mode, dagger in term.factors:
            acc = pauli_product(acc, _jw_ladder(mode, dagger, n))
        total = total + acc
    return total


def pauli_to_matrix(ps: PauliSum, max_qubits: int = 14) -> np.ndarray:
    """Dense Kronecker realization; qubit 0 is the least significant bit."""
    if ps.n_qubits > max_qubits:
        raise ValueError(f"{ps.n_qubits} qubits exceeds dense budget {max_qubits}")
    dim = 1 << ps.n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for letters, c in ps.strings.items():
        acc = np.array([[1.0]], dtype=complex)
        for letter in letters:  # qubit 0 first => innermost kron factor
            acc = np.kron(_PAULI[letter], acc)
        mat += c * acc
    return mat


def matrix_to_pauli(mat: np.ndarray, prune: float = PRUNE_TOL) -> PauliSum:
    """Expand a 2**n x 2**n matrix in the Pauli basis.

    Contracts one qubit's (row, col) axis pair at a time into a length-4
    letter axis, so the cost is O(n 4**n) rather than the naive O(16**n)
    of per-string traces.
    """
    dim = mat.shape[0]
    n = int(round(np.log2(dim)))
    if mat.shape != (dim, dim) or 1 << n != dim:
        raise ValueError("matrix must be square with power-of-two size")
    # axes: (r_{n-1},...,r_0, c_{n-1},...,c_0); qubit p is bit p of the index
    tensor = mat.reshape((2,) * (2 * n)).astype(complex)
    for q in range(n):
        # layout here: (letter_0..letter_{q-1}, r_{n-1}..r_q, c_{n-1}..c_q)
        row_ax = n - 1
        col_ax = 2 * n - q - 1
        t = np.moveaxis(tensor, (row_ax, col_ax), (0, 1))
        stacked = np.stack(
            [
                0.5 * (t[0, 0] + t[1, 1]),
                0.5 * (t[0, 1] + t[1, 0]),
                0.5 * (1j * t[0, 1] - 1j * t[1, 0]),
                0.5 * (t[0, 0] - t[1, 1]),
            ]
        )
        tensor = np.moveaxis(stacked, 0, q)
    letters = "IXYZ"
    pairs = []
    for idx in np.argwhere(np.abs(tensor) > prune):
        s = "".join(letters[i] for i in idx)  # axis k is qubit k's letter
        pairs.append((s, complex(tensor[tuple(idx)])))
    return PauliSum.from_terms(pairs, n)


def decompose_coupler(
    system_part: FockSum | np.ndarray, *, prune: float = PRUNE_TOL
) -> list[tuple[str, float]]:
    """Sorted Pauli weights of a coupler's system part under the encoding.

    The operator is normalized so its Pauli coefficient vector has unit
    2-norm; entries come back as (letters, abs coefficient) sorted by
    descending magnitude, with the string as a deterministic tie-break.
    """
    from .lattice import fock_matrix

    if isinstance(system_part, FockSum):
        mat = fock_matrix(system_part)
    else:
        mat = np.asarray(system_part, dtype=complex)
    ps = matrix_to_pauli(mat, prune=prune)
    norm = ps.coefficient_norm()
    if norm == 0.0:
        raise ValueError("zero operator has no decomposition")
    entries = [(s, abs(c) / norm) for s, c in ps.strings.items()]
    entries.sort(key=lambda e: (-e[1], e[0]))
    return entries


def format_pauli_string(letters: str) -> str:
    """Compact display form, e.g. "IXIZ" -> "X1 Z3"; identity -> "I"."""
    parts = [f"{c}{q}" for q, c in enumerate(letters) if c != "I"]
    return " ".join(parts) if parts else "I"
