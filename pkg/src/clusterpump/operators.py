"""Pauli strings and dense operator algebra on an N-qubit register.

Conventions used throughout the package:

* site 0 is the leftmost Kronecker factor, so a computational basis index
  ``x`` reads as the bitstring ``x_0 x_1 ... x_{N-1}`` with ``x_0`` the most
  significant bit;
* all operators are dense ``numpy`` arrays with ``complex128`` entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

# Aliases for readability of signatures; the data is a plain ndarray.
DenseOperator = np.ndarray
StateVector = np.ndarray

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_LETTERS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


@dataclass(frozen=True)
class PauliString:
    """A unit-phase scalar times a product of single-site Pauli letters.

    ``letters`` maps site index to one of ``"X"``, ``"Y"``, ``"Z"``; sites not
    present act as the identity.
    """

    n_qubits: int
    letters: Mapping[int, str]
    phase: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        letters = dict(self.letters)
        for site, letter in letters.items():
            if not 0 <= site < self.n_qubits:
                raise ValueError(
                    f"site index {site} out of range for {self.n_qubits} qubits"
                )
            if letter not in _LETTERS:
                raise ValueError(f"unknown Pauli letter {letter!r} at site {site}")
        if abs(abs(complex(self.phase)) - 1.0) > 1e-12:
            raise ValueError(f"phase must have unit modulus, got {self.phase!r}")
        object.__setattr__(self, "letters", letters)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def pauli_to_dense(p: PauliString) -> DenseOperator:
    """Dense matrix of a Pauli string: ``phase * (sigma_0 x ... x sigma_{N-1})``."""
    op = np.array([[complex(p.phase)]])
    for site in range(p.n_qubits):
        op = np.kron(op, _LETTERS.get(p.letters.get(site), PAULI_I))
    return op


def kron(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    """Kronecker product with ``a`` as the leftmost (most significant) factor."""
    return np.kron(a, b)


def dagger(a: DenseOperator) -> DenseOperator:
    """Conjugate transpose."""
    return a.conj().T
