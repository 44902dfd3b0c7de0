"""Closed-form spectral distances on the Moyal plane and the doubled triple.

Only results that are proved in closed form are returned as numbers.  For
translated pairs of distinct eigenstates the distance is only bracketed by
the triangle inequality, and the functions here return intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UndefinedLimit, UnsupportedPair
from .quantum_length import (coherent_params, modified_length_coherent, modified_length_eigen,
                             modified_length_sphere)
from .states import Sphere


def dist_eigenstates(m: int, n: int, lambda_p: float = 1.0) -> float:
    """``(lambda_p/sqrt 2) * sum_{k=m+1}^{n} 1/sqrt(k)``, symmetric in (m, n)."""
    if m < 0 or n < 0:
        raise DomainError("levels must be nonnegative")
    lo, hi = sorted((int(m), int(n)))
    if lo == hi:
        return 0.0
    k = np.arange(lo + 1, hi + 1, dtype=float)
    return float(lambda_p / math.sqrt(2) * np.sum(1.0 / np.sqrt(k)))


def dist_eigenstates_table(n_max: int, lambda_p: float = 1.0) -> np.ndarray:
    """``d(0, n)`` for n = 0..n_max as a cumulative sum."""
    k = np.arange(1, n_max + 1, dtype=float)
    return np.concatenate([[0.0], np.cumsum(lambda_p / np.sqrt(2 * k))])


def dist_translates(kappa, kappa_t) -> float:
    return float(math.hypot(kappa[0] - kappa_t[0], kappa[1] - kappa_t[1]))


@dataclass(frozen=True)
class DistBounds:
    lower: float          # triangle-inequality interval for the translated pair
    upper: float
    eig_lower: float      # integral bracket for the untranslated eigenstate distance
    eig_upper: float
    ordered: bool         # eig_lower <= eig_upper

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


def eigen_bracket(m: int, n: int, lambda_p: float = 1.0) -> tuple[float, float]:
    """Series/integral comparison bracket for ``d(omega_m, omega_n)``, m <= n."""
    lo = lambda_p * (math.sqrt(2 * (n + 1)) - math.sqrt(2 * (m + 1)))
    hi = lambda_p * (math.sqrt(2 * n) - (1 + 2 * m) / math.sqrt(2 * (m + 1)))
    return lo, hi


def dist_bounds(m: int, n: int, kappa=(0.0, 0.0), kappa_t=(0.0, 0.0),
                lambda_p: float = 1.0) -> DistBounds:
    """Interval containing ``d_D(alpha_kappa omega_m, alpha_kappa~ omega_n)``.

    ``|d_mn - k| <= d <= d_mn + k`` with ``k = |kappa - kappa~|``; the
    coordinate function along ``kappa - kappa~`` also gives ``d >= k``.
    """
    if m > n:
        raise DomainError("dist_bounds expects m <= n")
    d = dist_eigenstates(m, n, lambda_p)
    k = dist_translates(kappa, kappa_t)
    lo, hi = eigen_bracket(m, n, lambda_p)
    return DistBounds(max(abs(d - k), k), d + k, lo, hi, lo <= hi)


@dataclass(frozen=True)
class RatioPoint:
    n: int
    d_prime: float
    d_lower: float
    d_upper: float

    @property
    def ratio_lower(self) -> float:
        return (self.d_lower - self.d_prime) / self.d_prime

    @property
    def ratio_upper(self) -> float:
        return (self.d_upper - self.d_prime) / self.d_prime

    @property
    def ratio(self) -> float | None:
        """Point value when the distance is known exactly, otherwise None."""
        return self.ratio_lower if self.d_lower == self.d_upper else None

    @property
    def envelope(self) -> float:
        """Largest possible |relative gap| compatible with the bounds."""
        return max(abs(self.ratio_lower), abs(self.ratio_upper))


def ratio_convergence(m: int, n_max: int, kappa=(0.0, 0.0), kappa_t=(0.0, 0.0),
                      lambda_p: float = 1.0) -> list[RatioPoint]:
    """Relative gap ``(d_D - d'_L)/d'_L`` for n = m+1..n_max.

    Exact when ``kappa == kappa~``; otherwise each point is an interval.
    """
    if n_max <= m:
        raise DomainError("n_max must exceed m")
    table = dist_eigenstates_table(n_max, lambda_p)
    k = dist_translates(kappa, kappa_t)
    out = []
    for n in range(m + 1, n_max + 1):
        d = table[n] - table[m]
        dp = modified_length_coherent(m, n, kappa, kappa_t, lambda_p)
        if k == 0:
            out.append(RatioPoint(n, dp, d, d))
        else:
            out.append(RatioPoint(n, dp, max(abs(d - k), k), d + k))
    return out


def large_translation_ratio(m: int, n: int, separations, lambda_p: float = 1.0) -> list[RatioPoint]:
    """Same relative gap at fixed (m, n) as the translation grows."""
    d = dist_eigenstates(m, n, lambda_p)
    out = []
    for k in separations:
        dp = modified_length_coherent(m, n, (0.0, 0.0), (k, 0.0), lambda_p)
        out.append(RatioPoint(n, dp, max(abs(d - k), k), d + k))
    return out


def envelope_bounds(m: int, n: int, lambda_p: float = 1.0) -> tuple[float, float]:
    """Lower/upper envelopes of the untranslated relative gap from the integral bracket."""
    lo, hi = eigen_bracket(m, n, lambda_p)
    dp = modified_length_eigen(m, n, lambda_p)
    return (lo - dp) / dp, (hi - dp) / dp


def dist_sphere_pair(m: int, n: int, z: float, lambda_p: float = 1.0) -> float:
    """Distance between sphere points (x, y, z) and (x, y, -z): ``|z| d(m, n)``."""
    if not 0 <= abs(z) <= 1:
        raise DomainError("|z| must be at most 1")
    if n <= m:
        raise DomainError("sphere pairs need n > m")
    return abs(z) * dist_eigenstates(m, n, lambda_p)


def sphere_limit(z: float) -> float:
    """High-energy limit of d_D / d'_L on opposite-z sphere pairs."""
    if z == 0:
        raise UndefinedLimit("the modified length vanishes identically at z = 0")
    return math.sqrt(1 + math.sqrt(1 - z * z))


def sphere_limit_variant(z: float) -> float:
    """The variant sqrt(1 + sqrt(1 - z)); agrees with :func:`sphere_limit` only at z = 0 and z = 1."""
    return math.sqrt(1 + math.sqrt(1 - z))


def sphere_ratio_limit(m: int, z: float, n_max: int, lambda_p: float = 1.0,
                       n_values=None) -> tuple[list[tuple[int, float]], float]:
    """``(n, d_D/d'_L)`` for n = m+2..n_max (or ``n_values``) and the limit."""
    if z == 0:
        raise UndefinedLimit("the modified length vanishes identically at z = 0")
    if not 0 < abs(z) <= 1:
        raise DomainError("need 0 < |z| <= 1")
    ns = range(m + 2, n_max + 1) if n_values is None else n_values
    table = dist_eigenstates_table(max(ns), lambda_p)
    seq = []
    for n in ns:
        d = abs(z) * (table[n] - table[m])
        seq.append((int(n), d / modified_length_sphere(m, n, z, lambda_p)))
    return seq, sphere_limit(z)


# -- doubled triple ---------------------------------------------------------

@dataclass(frozen=True)
class DoubledTripleParams:
    """Internal two-point triple; ``1/lambda_cap`` is the distance between the sheets."""

    lambda_cap: float

    def __post_init__(self):
        if not self.lambda_cap > 0:
            raise ValueError("lambda_cap must be positive")

    @property
    def sheet_distance(self) -> float:
        return 1.0 / self.lambda_cap


def fix_lambda(m: int, lambda_p: float = 1.0) -> DoubledTripleParams:
    """Choose ``Lambda = 1/sqrt(d_L2(omega_m, omega_m)) = 1/(lambda_p sqrt(4m + 2))``."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    return DoubledTripleParams(1.0 / (lambda_p * math.sqrt(4 * m + 2)))


def spectral_distance_analytic(spec1, spec2, lambda_p: float = 1.0) -> float:
    """``d_D`` for the pairs where it is known in closed form."""
    c1, c2 = coherent_params(spec1), coherent_params(spec2)
    if c1 and c2:
        (m, k1), (n, k2) = c1, c2
        if m == n:
            return dist_translates(k1, k2)
        if k1 == k2:
            return dist_eigenstates(m, n, lambda_p)
        raise UnsupportedPair(
            f"d_D between {spec1.text()} and {spec2.text()} is only bracketed; see dist_bounds")
    if isinstance(spec1, Sphere) and isinstance(spec2, Sphere):
        same = (spec1.m, spec1.n, spec1.x, spec1.y) == (spec2.m, spec2.n, spec2.x, spec2.y)
        if same and spec1.z == -spec2.z:
            return dist_sphere_pair(spec1.m, spec1.n, spec1.z, lambda_p)
        if same and spec1.z == spec2.z:
            return 0.0
    raise UnsupportedPair(f"no closed form for d_D({spec1.text()}, {spec2.text()})")


def doubled_distance(spec1, spec2, params: DoubledTripleParams, sheet1: int = 1,
                     sheet2: int = 2, lambda_p: float = 1.0, d_D: float | None = None) -> float:
    """Distance in the doubled triple between ``spec1`` on ``sheet1`` and ``spec2`` on ``sheet2``.

    Same sheet: ``d_D``.  Opposite sheets: ``sqrt(d_D^2 + 1/Lambda^2)``.
    ``d_D`` may be supplied (e.g. a solver estimate) instead of the closed form.
    """
    if {sheet1, sheet2} - {1, 2}:
        raise DomainError("sheets are labelled 1 and 2")
    d = spectral_distance_analytic(spec1, spec2, lambda_p) if d_D is None else float(d_D)
    if sheet1 == sheet2:
        return d
    return math.sqrt(d * d + params.sheet_distance**2)


@dataclass(frozen=True)
class RiemannComparison:
    riemann_sum: float
    integral: float

    @property
    def ratio(self) -> float:
        return self.riemann_sum / self.integral


def riemann_comparison(m: int, n: int, lambda_p: float = 1.0) -> RiemannComparison:
    """Spectral distance as a midpoint sum of ``lambda_p/sqrt(2k)`` vs the integral."""
    if not m < n:
        raise DomainError("need m < n")
    return RiemannComparison(dist_eigenstates(m, n, lambda_p), modified_length_eigen(m, n, lambda_p))
