"""Two-point space H (x) H: universal differentials and the length operator.

Basis ordering is ``|i, j> <-> i*N + j`` (numpy ``kron`` order).

The length operator commutes with the total number ``i + j``, so it is stored
block-diagonally by sector (:class:`SectorOperator`); this keeps N = 128
(N^2 = 16384) within a laptop's memory.  Sectors with ``i + j <= N - 2``
are reproduced exactly by the finite section, higher sectors are clipped by
the truncation and carry spurious eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .core import TruncatedOperator, _entries, hamiltonian, ladder, position_ops
from .errors import InvalidTruncation


@dataclass(frozen=True)
class TwoPointOperator:
    """Dense ``N^2 x N^2`` operator on the truncated two-point space."""

    entries: np.ndarray
    n: int
    lambda_p: float = 1.0

    def __post_init__(self):
        if self.entries.shape != (self.n**2, self.n**2):
            raise ValueError(f"expected shape {(self.n**2,) * 2}, got {self.entries.shape}")

    @property
    def dim(self) -> int:
        return self.n**2

    def expect(self, psi1, psi2) -> complex:
        v = np.kron(psi1, psi2)
        return complex(np.vdot(v, self.entries @ v))

    def __matmul__(self, other):
        return TwoPointOperator(self.entries @ other.entries, self.n, self.lambda_p)

    def __add__(self, other):
        return TwoPointOperator(self.entries + other.entries, self.n, self.lambda_p)

    def __sub__(self, other):
        return TwoPointOperator(self.entries - other.entries, self.n, self.lambda_p)

    @property
    def dag(self):
        return TwoPointOperator(self.entries.conj().T, self.n, self.lambda_p)


def sector_indices(n: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Pairs (i, j) with i + j = s inside the truncation, ordered by i."""
    i = np.arange(max(0, s - n + 1), min(s, n - 1) + 1)
    return i, s - i


def interior_sectors(n: int) -> range:
    return range(0, n - 1)


@dataclass
class SectorOperator:
    """Operator on H (x) H that conserves the total number ``i + j``."""

    n: int
    lambda_p: float
    blocks: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.n**2

    def expect(self, psi1, psi2) -> complex:
        c = np.outer(psi1, psi2)
        total = 0.0 + 0.0j
        for s, blk in self.blocks.items():
            i, j = sector_indices(self.n, s)
            v = c[i, j]
            if np.any(v):
                total += np.vdot(v, blk @ v)
        return complex(total)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        c = np.asarray(vec).reshape(self.n, self.n)
        out = np.zeros_like(c, dtype=complex)
        for s, blk in self.blocks.items():
            i, j = sector_indices(self.n, s)
            out[i, j] = blk @ c[i, j]
        return out.reshape(-1)

    def map_blocks(self, f: Callable[[np.ndarray], np.ndarray]) -> "SectorOperator":
        """Hermitian functional calculus, sector by sector."""
        out = {}
        for s, blk in self.blocks.items():
            w, v = np.linalg.eigh(blk)
            out[s] = (v * f(w)) @ v.conj().T
        return SectorOperator(self.n, self.lambda_p, out)

    def eigenvalues(self, sectors: Iterable[int] | None = None) -> dict[int, np.ndarray]:
        keys = self.blocks if sectors is None else sectors
        return {s: np.linalg.eigvalsh(self.blocks[s]) for s in keys}

    def to_dense(self) -> TwoPointOperator:
        m = np.zeros((self.n**2, self.n**2), dtype=complex)
        for s, blk in self.blocks.items():
            i, j = sector_indices(self.n, s)
            flat = i * self.n + j
            m[np.ix_(flat, flat)] = blk
        return TwoPointOperator(m, self.n, self.lambda_p)


def _kron_sector(x: np.ndarray, y: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Block of ``x (x) y`` between the basis pairs (i, j) of one sector."""
    return x[np.ix_(i, i)] * y[np.ix_(j, j)]


def _sector_op(n: int, lambda_p: float, terms) -> SectorOperator:
    """Assemble ``sum c * (x (x) y)`` restricted to every total-number sector."""
    blocks = {}
    for s in range(2 * n - 1):
        i, j = sector_indices(n, s)
        blk = sum(c * _kron_sector(x, y, i, j) for c, x, y in terms)
        blocks[s] = (blk + blk.conj().T) / 2
    return SectorOperator(n, lambda_p, blocks)


def universal_diff(a: TruncatedOperator) -> TwoPointOperator:
    """``dA = A (x) I - I (x) A``."""
    m = _entries(a)
    n = m.shape[0]
    eye = np.eye(n)
    lam = a.lambda_p if isinstance(a, TruncatedOperator) else 1.0
    return TwoPointOperator(np.kron(m, eye) - np.kron(eye, m), n, lam)


def length_sq(n: int, lambda_p: float = 1.0, form: str = "differentials") -> SectorOperator:
    """``L^2 = dq1^2 + dq2^2`` in sector-block form.

    ``form="differentials"`` expands the squares of the truncated universal
    differentials; ``form="ladder"`` uses ``2(H(x)I + I(x)H - a(x)a^dag - a^dag(x)a)``
    with the exact diagonal Hamiltonian.  They agree on sectors ``i + j <= N - 2``.
    """
    if n < 2:
        raise InvalidTruncation("truncation must be at least 2")
    eye = np.eye(n)
    if form == "differentials":
        q1, q2 = (q.entries for q in position_ops(n, lambda_p))
        sq = q1 @ q1 + q2 @ q2
        terms = [(1, sq, eye), (1, eye, sq), (-2, q1, q1), (-2, q2, q2)]
    elif form == "ladder":
        h = hamiltonian(n, lambda_p).entries
        a, ad = (x.entries for x in ladder(n, lambda_p))
        terms = [(2, h, eye), (2, eye, h), (-2, a, ad), (-2, ad, a)]
    else:
        raise ValueError(f"unknown form {form!r}")
    return _sector_op(n, lambda_p, terms)


def length(n: int, lambda_p: float = 1.0) -> SectorOperator:
    """``L = sqrt(L^2)``; negative roundoff eigenvalues are clipped to 0."""
    return length_sq(n, lambda_p).map_blocks(lambda w: np.sqrt(np.clip(w, 0.0, None)))


def length_sq_dense(n: int, lambda_p: float = 1.0) -> TwoPointOperator:
    """Brute-force ``dq1 @ dq1 + dq2 @ dq2`` (small N only)."""
    d1, d2 = (universal_diff(q) for q in position_ops(n, lambda_p))
    return d1 @ d1 + d2 @ d2


@dataclass(frozen=True)
class SpectrumLevel:
    level: int
    eigenvalue: float
    analytic: float
    multiplicity: int
    n: int

    @property
    def gap(self) -> float:
        return abs(self.eigenvalue - self.analytic)


@dataclass(frozen=True)
class Spectrum:
    levels: list[SpectrumLevel]
    unreliable: bool

    def as_rows(self) -> list[dict]:
        return [dict(level=l.level, eigenvalue=l.eigenvalue, analytic=l.analytic,
                     multiplicity=l.multiplicity, N=l.n, gap=l.gap) for l in self.levels]


def spectrum_L(n: int, lambda_p: float = 1.0, levels: int = 4, rtol: float = 1e-6) -> Spectrum:
    """Lowest distinct eigenvalues of L with their multiplicity in the faithful sectors.

    Only sectors ``i + j <= N - 2`` enter; clipped sectors near the truncation
    edge produce eigenvalues below the true minimum.  The infinite-N
    multiplicity of every level is infinite, the reported counts are finite-N.
    """
    if levels <= 0:
        return Spectrum([], False)
    l2 = length_sq(n, lambda_p)
    vals = np.sort(np.concatenate(list(l2.eigenvalues(interior_sectors(n)).values())))
    vals = np.sqrt(np.clip(vals, 0.0, None))
    clusters: list[list[float]] = []
    for v in vals:
        if clusters and abs(v - clusters[-1][0]) <= rtol * max(1.0, abs(v)):
            clusters[-1].append(v)
        else:
            clusters.append([v])
    out = []
    for m, c in enumerate(clusters[:levels]):
        out.append(SpectrumLevel(m, float(np.mean(c)), float(lambda_p * np.sqrt(4 * m + 2)), len(c), n))
    unreliable = levels > len(clusters) or levels > max(1, (n - 1) // 4)
    return Spectrum(out, unreliable)


@dataclass(frozen=True)
class GroundKernel:
    vectors: np.ndarray          # shape (k, N^2), orthonormal rows
    sectors: list[int]
    schmidt_ranks: list[int]
    residuals: list[float]       # ||da v|| per vector
    n: int


def ground_kernel(n: int, lambda_p: float = 1.0, max_total: int | None = None) -> GroundKernel:
    """Orthonormal basis of ker(da) built from the sector recursion.

    In the sector ``i + j = s`` the kernel condition
    ``c[i+1, j] sqrt(i+1) = c[i, j+1] sqrt(j+1)`` has the one-dimensional
    solution ``c_i ~ sqrt(binom(s, i))``.  Only sectors ``s <= N - 2`` are
    used, where da is represented without truncation damage.
    """
    if n < 3:
        raise InvalidTruncation("ground_kernel needs truncation >= 3")
    top = n - 2 if max_total is None else min(max_total, n - 2)
    a, _ = ladder(n, lambda_p)
    da = universal_diff(a).entries
    vecs, ranks, res = [], [], []
    for s in range(top + 1):
        c = np.empty(s + 1)
        c[0] = 1.0
        for i in range(s):
            c[i + 1] = c[i] * np.sqrt((s - i) / (i + 1))
        c /= np.linalg.norm(c)
        mat = np.zeros((n, n))
        i = np.arange(s + 1)
        mat[i, s - i] = c
        v = mat.reshape(-1)
        vecs.append(v)
        ranks.append(schmidt_rank(v, n))
        res.append(float(np.linalg.norm(da @ v)))
    return GroundKernel(np.array(vecs), list(range(top + 1)), ranks, res, n)


def schmidt_rank(v: np.ndarray, n: int, tol: float = 1e-10) -> int:
    sv = np.linalg.svd(np.asarray(v).reshape(n, n), compute_uv=False)
    return int(np.sum(sv > tol * max(sv[0], 1e-300)))


def kernel_dimension_numeric(n: int, lambda_p: float = 1.0, max_total: int = 10,
                             tol: float = 1e-10) -> int:
    """Null-space dimension of da on the span of sectors ``i + j <= max_total``."""
    if max_total > n - 2:
        raise InvalidTruncation("max_total must not exceed N - 2")
    a, _ = ladder(n, lambda_p)
    da = universal_diff(a).entries
    cols = [i * n + j for i in range(n) for j in range(n) if i + j <= max_total]
    sv = np.linalg.svd(da[:, cols], compute_uv=False)
    return int(np.sum(sv <= tol * max(sv[0], 1.0)) + max(0, len(cols) - len(sv)))


def uncertainty(state, a: TruncatedOperator, tol: float = 1e-6) -> float:
    """Standard deviation ``sqrt(phi(A^2) - phi(A)^2)`` of a Hermitian A."""
    from .states import realize

    psi = realize(state, a.dim, a.lambda_p, tol)
    apsi = a.entries @ psi
    mean = np.vdot(psi, apsi).real
    second = np.vdot(apsi, apsi).real
    return float(np.sqrt(max(second - mean**2, 0.0)))


def exchange(n: int) -> np.ndarray:
    """Permutation matrix of ``|i, j> -> |j, i>``."""
    p = np.zeros((n * n, n * n))
    i, j = np.divmod(np.arange(n * n), n)
    p[j * n + i, i * n + j] = 1.0
    return p
