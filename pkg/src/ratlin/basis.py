"""Polynomial bases given by finite recurrences, and their single-shift pencils.

Two kinds of bases are supported.  A :class:`ThreeTermBasis` collects the
coefficients ``alpha_j, beta_j, gamma_j`` of

    alpha_j * phi_{j+1}(x) = (x - beta_j) * phi_j(x) - gamma_j * phi_{j-1}(x)

with ``phi_{-1} = 0`` and ``phi_0 = 1`` (monomials, Chebyshev, ...).  A
:class:`DegreeGradedBasis` follows the more general monic recurrence

    psi_j(x) = (x - alpha_j) * psi_{j-1}(x) + sum_{i<=j-2} beta_j^i * psi_i(x).

Both satisfy a linear relation ``M(x) @ Phi_k(x) = 0`` where ``Phi_k`` stacks
the first k basis polynomials in descending degree order and ``M`` is a
(k-1) x k pencil; those pencils are what the linearization constructors build
on top of.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConversionConditionWarning

__all__ = [
    "ThreeTermBasis",
    "DegreeGradedBasis",
    "standard_basis",
    "eval_phi",
    "rev_phi_at_zero",
    "m_phi_pencil",
    "degree_graded_pencil",
    "monomial_change_matrix",
    "to_monomial",
    "basis_values",
]

STANDARD_KINDS = ("monomial", "chebyshev1", "chebyshev2")


def _as_locked_array(x):
    arr = np.array(x)
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ThreeTermBasis:
    """Recurrence coefficients ``alpha_0..alpha_{K-1}`` etc. of a three-term basis.

    ``gamma[0]`` multiplies ``phi_{-1} = 0`` and is therefore never used; a
    placeholder value is stored so all three sequences have equal length.
    """

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_locked_array(self.alpha))
        object.__setattr__(self, "beta", _as_locked_array(self.beta))
        object.__setattr__(self, "gamma", _as_locked_array(self.gamma))
        if not (self.alpha.shape == self.beta.shape == self.gamma.shape) or self.alpha.ndim != 1:
            raise ValueError("alpha, beta, gamma must be 1-d sequences of equal length")
        if np.any(self.alpha == 0):
            raise ValueError("all alpha coefficients must be nonzero")

    @property
    def size(self) -> int:
        return self.alpha.shape[0]

    @property
    def is_real(self) -> bool:
        return not (
            np.iscomplexobj(self.alpha) and np.any(self.alpha.imag != 0)
            or np.iscomplexobj(self.beta) and np.any(self.beta.imag != 0)
            or np.iscomplexobj(self.gamma) and np.any(self.gamma.imag != 0)
        )


@dataclass(frozen=True)
class DegreeGradedBasis:
    """Monic degree-graded basis: ``alpha[j-1]`` is alpha_j, ``beta_table[j-2]``
    holds ``beta_j^0 .. beta_j^{j-2}`` (ascending in i)."""

    alpha: np.ndarray
    beta_table: tuple = ()
    name: str = "degree_graded"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_locked_array(self.alpha))
        rows = tuple(_as_locked_array(r) for r in self.beta_table)
        object.__setattr__(self, "beta_table", rows)
        if self.alpha.ndim != 1:
            raise ValueError("alpha must be a 1-d sequence")
        for idx, row in enumerate(rows):
            if row.shape != (idx + 1,):
                raise ValueError(f"beta_table row {idx} must have length {idx + 1}")
        if len(rows) > max(self.alpha.shape[0] - 1, 0):
            raise ValueError("beta_table longer than alpha allows")

    @property
    def size(self) -> int:
        """Largest polynomial index covered by the stored coefficients."""
        return self.alpha.shape[0]

    def beta(self, j: int, i: int):
        """beta_j^i with zero default outside the stored triangle."""
        if j < 2 or i < 0 or i > j - 2:
            return 0.0
        if j - 2 >= len(self.beta_table):
            return 0.0
        return self.beta_table[j - 2][i]

    @property
    def is_real(self) -> bool:
        if np.iscomplexobj(self.alpha) and np.any(self.alpha.imag != 0):
            return False
        return all(
            not (np.iscomplexobj(r) and np.any(r.imag != 0)) for r in self.beta_table
        )


def standard_basis(kind: str, k: int) -> ThreeTermBasis:
    """Coefficient sequences of length k for a named three-term basis.

    ``monomial`` has alpha_j = 1 and beta_j = gamma_j = 0; the Chebyshev bases
    of the first/second kind have alpha_j = gamma_j = 1/2 apart from alpha_0,
    which is 1 for the first kind.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if kind == "monomial":
        return ThreeTermBasis(np.ones(k), np.zeros(k), np.zeros(k), name="monomial")
    if kind == "chebyshev1":
        alpha = np.full(k, 0.5)
        alpha[0] = 1.0
        gamma = np.full(k, 0.5)
        gamma[0] = 0.0
        return ThreeTermBasis(alpha, np.zeros(k), gamma, name="chebyshev1")
    if kind == "chebyshev2":
        return ThreeTermBasis(np.full(k, 0.5), np.zeros(k), np.full(k, 0.5), name="chebyshev2")
    raise ValueError(f"unknown basis kind {kind!r}")


def eval_phi(basis: ThreeTermBasis, k: int, lam) -> np.ndarray:
    """Evaluate [phi_{k-1}, ..., phi_1, phi_0] at a scalar, descending degree."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if basis.size < k - 1:
        raise ValueError(f"basis stores {basis.size} coefficients, need {k - 1}")
    dtype = np.result_type(basis.alpha.dtype, np.asarray(lam).dtype, float)
    out = np.empty(k, dtype=dtype)
    prev, cur = 0.0, 1.0
    out[k - 1] = cur
    for j in range(k - 1):
        prev, cur = cur, ((lam - basis.beta[j]) * cur - basis.gamma[j] * prev) / basis.alpha[j]
        out[k - 2 - j] = cur
    return out


def eval_psi(basis: DegreeGradedBasis, k: int, lam) -> np.ndarray:
    """Evaluate [psi_{k-1}, ..., psi_0] of a degree-graded basis, descending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if basis.size < k - 1:
        raise ValueError(f"basis stores {basis.size} coefficients, need {k - 1}")
    dtype = np.result_type(basis.alpha.dtype, np.asarray(lam).dtype, float)
    vals = np.empty(k, dtype=dtype)
    vals[0] = 1.0
    for j in range(1, k):
        acc = (lam - basis.alpha[j - 1]) * vals[j - 1]
        for i in range(j - 1):
            acc = acc + basis.beta(j, i) * vals[i]
        vals[j] = acc
    return vals[::-1].copy()


def basis_values(basis, k: int, lam) -> np.ndarray:
    """Descending-order basis values for either supported basis kind."""
    if isinstance(basis, DegreeGradedBasis):
        return eval_psi(basis, k, lam)
    return eval_phi(basis, k, lam)


def rev_phi_at_zero(basis: ThreeTermBasis, k: int) -> np.ndarray:
    """Limit of t^{k-1} * Phi_k(1/t) as t -> 0: the leading coefficient of
    phi_{k-1} times the first canonical vector."""
    if k < 2:
        raise ValueError("k must be >= 2")
    out = np.zeros(k, dtype=np.result_type(basis.alpha.dtype, float))
    out[0] = 1.0 / np.prod(basis.alpha[: k - 1])
    return out


def m_phi_pencil(basis: ThreeTermBasis, k: int):
    """The (k-1) x k pencil (X, Y) with (lam*X + Y) @ Phi_k(lam) = 0.

    Row r encodes the recurrence for index i = k-2-r: entries
    (-alpha_i, lam - beta_i, -gamma_i) in columns r, r+1, r+2.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if basis.size < k - 1:
        raise ValueError(f"basis stores {basis.size} coefficients, need {k - 1}")
    dtype = np.result_type(basis.alpha.dtype, float)
    X = np.zeros((k - 1, k), dtype=dtype)
    Y = np.zeros((k - 1, k), dtype=dtype)
    for r in range(k - 1):
        i = k - 2 - r
        X[r, r + 1] = 1.0
        Y[r, r] = -basis.alpha[i]
        Y[r, r + 1] = -basis.beta[i]
        if r + 2 < k:
            Y[r, r + 2] = -basis.gamma[i]
    return X, Y


def degree_graded_pencil(basis: DegreeGradedBasis, k: int):
    """The (k-1) x k pencil (X, Y) with (lam*X + Y) @ Psi_k(lam) = 0."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if basis.size < k - 1:
        raise ValueError(f"basis stores {basis.size} coefficients, need {k - 1}")
    dtype = np.result_type(basis.alpha.dtype, float)
    X = np.zeros((k - 1, k), dtype=dtype)
    Y = np.zeros((k - 1, k), dtype=dtype)
    for r in range(k - 1):
        j = k - 1 - r  # the recurrence defining psi_j sits in row r
        X[r, r + 1] = 1.0
        Y[r, r] = -1.0
        Y[r, r + 1] = -basis.alpha[j - 1]
        for c in range(r + 2, k):
            Y[r, c] = basis.beta(j, k - 1 - c)
    return X, Y


def monomial_change_matrix(basis, k: int) -> np.ndarray:
    """(k+1) x (k+1) lower-triangular T with basis_j(x) = sum_i T[j, i] x^i."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > 25:
        warnings.warn(
            f"monomial conversion at degree {k} may be badly conditioned",
            ConversionConditionWarning,
            stacklevel=2,
        )
    dtype = np.result_type(basis.alpha.dtype, float)
    T = np.zeros((k + 1, k + 1), dtype=dtype)
    T[0, 0] = 1.0
    if isinstance(basis, DegreeGradedBasis):
        if basis.size < k:
            raise ValueError(f"basis stores {basis.size} coefficients, need {k}")
        for j in range(1, k + 1):
            row = np.zeros(k + 1, dtype=dtype)
            row[1 : j + 1] = T[j - 1, :j]
            row -= basis.alpha[j - 1] * T[j - 1]
            for i in range(j - 1):
                row += basis.beta(j, i) * T[i]
            T[j] = row
        return T
    if basis.size < k:
        raise ValueError(f"basis stores {basis.size} coefficients, need {k}")
    for j in range(k):
        row = np.zeros(k + 1, dtype=dtype)
        row[1 : j + 2] = T[j, : j + 1]
        row -= basis.beta[j] * T[j]
        if j > 0:
            row -= basis.gamma[j] * T[j - 1]
        T[j + 1] = row / basis.alpha[j]
    return T


def to_monomial(basis, coeffs) -> np.ndarray:
    """Re-express matrix coefficients D_0..D_k of the given basis in monomials.

    Returns an array of the same shape whose entry i is the coefficient of
    lam**i; evaluation of the polynomial is unchanged.
    """
    arr = np.asarray(coeffs)
    if arr.ndim == 1:  # scalar polynomial given as a flat coefficient list
        arr = arr[:, None, None]
        squeeze = True
    else:
        squeeze = False
    k = arr.shape[0] - 1
    T = monomial_change_matrix(basis, k)
    out = np.einsum("ji,jab->iab", T, arr)
    return out[:, 0, 0] if squeeze else out
