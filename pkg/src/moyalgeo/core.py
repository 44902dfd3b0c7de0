"""Truncated harmonic-oscillator operator algebra in the number basis.

Everything is a dense complex ``N x N`` matrix.  The ladder operator is
normalised so that ``[a, a^dag] = lambda_p**2`` (the deformation parameter
``theta``), hence lengths scale linearly and energies quadratically with
``lambda_p``.

Finite sections break the canonical commutation relations in the last
row/column; identities are only checked on the top-left block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation, InvalidTruncation, TruncationTooSmall

HERMITIAN_RTOL = 1e-12


def _is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = max(np.abs(m).max(initial=0.0), 1.0)
    return bool(np.abs(m - m.conj().T).max(initial=0.0) <= rtol * scale)


@dataclass(frozen=True)
class TruncatedOperator:
    """An operator on the first ``dim`` number states, tagged with lambda_p."""

    entries: np.ndarray
    lambda_p: float = 1.0
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if self.lambda_p < 0:
            raise ValueError("lambda_p must be nonnegative")
        if self.hermitian and not _is_hermitian(m):
            raise ContractViolation("operator tagged Hermitian is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def dag(self) -> "TruncatedOperator":
        return TruncatedOperator(self.entries.conj().T, self.lambda_p, self.hermitian)

    def is_hermitian(self) -> bool:
        return _is_hermitian(self.entries)

    def _wrap(self, m, hermitian=False):
        return TruncatedOperator(m, self.lambda_p, hermitian)

    def __matmul__(self, other):
        return self._wrap(self.entries @ _entries(other))

    def __add__(self, other):
        return self._wrap(self.entries + _entries(other), self.hermitian and _herm(other))

    def __sub__(self, other):
        return self._wrap(self.entries - _entries(other), self.hermitian and _herm(other))

    def __mul__(self, c):
        return self._wrap(self.entries * c, self.hermitian and np.isrealobj(c))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __neg__(self):
        return self * -1.0


def _entries(x) -> np.ndarray:
    return x.entries if isinstance(x, TruncatedOperator) else np.asarray(x)


def _herm(x) -> bool:
    return isinstance(x, TruncatedOperator) and x.hermitian


@dataclass(frozen=True)
class ModelParams:
    lambda_p: float = 1.0
    truncation: int = 32
    tol: float = 1e-8

    def __post_init__(self):
        if not self.lambda_p > 0:
            raise ValueError("lambda_p must be positive")
        if self.truncation < 4:
            raise InvalidTruncation("truncation must be at least 4")
        if not 0 < self.tol < 1:
            raise ValueError("tol must lie in (0, 1)")


def _check_n(n: int, minimum: int = 2) -> None:
    if int(n) != n or n < minimum:
        raise InvalidTruncation(f"truncation must be an integer >= {minimum}, got {n}")


def ladder(n: int, lambda_p: float = 1.0) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Annihilation and creation operators, ``a[m, m+1] = lambda_p*sqrt(m+1)``."""
    _check_n(n)
    a = np.diag(lambda_p * np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)
    op = TruncatedOperator(a, lambda_p)
    return op, op.dag


def position_ops(n: int, lambda_p: float = 1.0) -> tuple[TruncatedOperator, TruncatedOperator]:
    a, ad = ladder(n, lambda_p)
    q1 = (a.entries + ad.entries) / np.sqrt(2)
    q2 = (a.entries - ad.entries) / (1j * np.sqrt(2))
    return TruncatedOperator(q1, lambda_p, True), TruncatedOperator(q2, lambda_p, True)


def number_op(n: int, lambda_p: float = 1.0) -> TruncatedOperator:
    return TruncatedOperator(np.diag(np.arange(n, dtype=float)), lambda_p, True)


def hamiltonian(n: int, lambda_p: float = 1.0) -> TruncatedOperator:
    """``H = a^dag a + lambda_p**2/2``, diagonal with ``E_m = lambda_p**2 (m + 1/2)``."""
    _check_n(n)
    return TruncatedOperator(np.diag(energies(n, lambda_p)), lambda_p, True)


def energies(n: int, lambda_p: float = 1.0) -> np.ndarray:
    return lambda_p**2 * (np.arange(n, dtype=float) + 0.5)


def hermitian_function(a: TruncatedOperator | np.ndarray, f: Callable[[np.ndarray], np.ndarray],
                       lambda_p: float | None = None) -> TruncatedOperator:
    """Apply a real function to a Hermitian matrix through its eigendecomposition."""
    m = _entries(a)
    if not _is_hermitian(m):
        raise ContractViolation("hermitian_function requires a Hermitian operator")
    w, v = np.linalg.eigh(m)
    out = (v * np.asarray(f(w), dtype=float)) @ v.conj().T
    out = (out + out.conj().T) / 2
    if lambda_p is None:
        lambda_p = a.lambda_p if isinstance(a, TruncatedOperator) else 1.0
    return TruncatedOperator(out, lambda_p, True)


def operator_norm(a) -> float:
    """Largest singular value, from the top eigenvalue of ``A^dag A``."""
    m = _entries(a)
    if m.size == 0:
        return 0.0
    top = np.linalg.eigvalsh(m.conj().T @ m)[-1]
    return float(np.sqrt(max(top, 0.0)))


def displacement(kappa, n: int, lambda_p: float = 1.0, tol: float = 1e-6,
                 check: bool = True, block: int | None = None) -> TruncatedOperator:
    """Unitary translation by ``kappa = (k1, k2)`` in the plane.

    ``U = exp((k a^dag - conj(k) a)/lambda_p**2)`` with ``k = (k1 + i k2)/sqrt(2)``,
    so that ``U^dag q_mu U = q_mu + kappa_mu`` away from the truncation edge.
    The generator is anti-Hermitian; it is exponentiated through the eigensystem
    of ``i*G`` so the result is unitary to machine precision.  Truncation damage
    is measured instead as the translation-covariance defect on the top-left
    ``block`` (default: quarter) block and raises :class:`TruncationTooSmall`
    above ``tol``.
    """
    _check_n(n)
    k1, k2 = (float(x) for x in kappa)
    a, ad = ladder(n, lambda_p)
    kc = (k1 + 1j * k2) / np.sqrt(2)
    gen = (kc * ad.entries - np.conj(kc) * a.entries) / lambda_p**2
    w, v = np.linalg.eigh(1j * gen)
    u = (v * np.exp(-1j * w)) @ v.conj().T
    op = TruncatedOperator(u, lambda_p)
    if check and (k1 or k2):
        res = covariance_defect(op, (k1, k2), block)
        if res > tol:
            raise TruncationTooSmall(
                f"displacement by {kappa} at N={n}: covariance defect {res:.3g} > {tol:g}")
    return op


def covariance_defect(u: TruncatedOperator, kappa, block: int | None = None) -> float:
    """max_mu || U^dag q_mu U - q_mu - kappa_mu ||  on the top-left block (default N/4)."""
    n = u.dim
    b = max(n // 4, 1) if block is None else min(max(block, 1), n)
    q = position_ops(n, u.lambda_p)
    um = u.entries
    res = 0.0
    for qm, k in zip(q, kappa):
        d = um.conj().T @ qm.entries @ um - qm.entries - k * np.eye(n)
        res = max(res, operator_norm(d[:b, :b]))
    return res


def commutator(x, y) -> np.ndarray:
    x, y = _entries(x), _entries(y)
    return x @ y - y @ x


def deriv_z(a: TruncatedOperator) -> TruncatedOperator:
    """Holomorphic derivative, ``[A, a^dag] / lambda_p**2``."""
    _, ad = ladder(a.dim, a.lambda_p)
    return TruncatedOperator(commutator(a, ad) / a.lambda_p**2, a.lambda_p)


def deriv_zbar(a: TruncatedOperator) -> TruncatedOperator:
    """Antiholomorphic derivative, ``-[A, a] / lambda_p**2``.

    The sign makes ``deriv_zbar(A^dag) == deriv_z(A)^dag`` hold exactly.
    """
    lo, _ = ladder(a.dim, a.lambda_p)
    return TruncatedOperator(-commutator(a, lo) / a.lambda_p**2, a.lambda_p)


def identity(n: int, lambda_p: float = 1.0) -> TruncatedOperator:
    return TruncatedOperator(np.eye(n), lambda_p, True)
