"""Quantum length, square-length and modified quantum length.

Each quantity is computed by evaluating the two-point operator on a product
state over a truncation schedule, and, where a closed form exists, also
analytically; :class:`~moyalgeo.reports.DistanceReport` carries both.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .errors import FormulaInapplicable
from .reports import DistanceReport
from .states import Coherent, Eigenstate, Sphere, StateSpec, evaluate_pair, required_dim
from .tensor import length, length_sq

MAX_TRUNCATION = 128


@lru_cache(maxsize=6)
def _length_sq(n: int, lambda_p: float):
    return length_sq(n, lambda_p)


@lru_cache(maxsize=6)
def _length(n: int, lambda_p: float):
    return length(n, lambda_p)


def energy(m: int, lambda_p: float = 1.0) -> float:
    return lambda_p**2 * (m + 0.5)


def coherent_params(spec: StateSpec):
    """``(m, kappa)`` if the state is a translated eigenstate, else None."""
    if isinstance(spec, Eigenstate):
        return spec.m, (0.0, 0.0)
    if isinstance(spec, Coherent):
        return spec.m, spec.kappa
    return None


def coherent_square_length(m, n, kappa, kappa_t, lambda_p=1.0) -> float:
    """``2E_m + 2E_n + |kappa - kappa_t|^2``."""
    dk2 = (kappa[0] - kappa_t[0]) ** 2 + (kappa[1] - kappa_t[1]) ** 2
    return 2 * energy(m, lambda_p) + 2 * energy(n, lambda_p) + dk2


def sphere_square_length(m, n, z1, z2, lambda_p=1.0) -> float:
    """Square length between two states of the same two-level sphere, n > m + 1."""
    if n <= m + 1:
        raise FormulaInapplicable(
            f"sphere closed form needs n > m + 1 (got m={m}, n={n}); use operator evaluation")
    em, en = energy(m, lambda_p), energy(n, lambda_p)
    return 2 * (em + en) + (z1 + z2) * (em - en)


def closed_form_square_length(spec1, spec2, lambda_p=1.0) -> float | None:
    c1, c2 = coherent_params(spec1), coherent_params(spec2)
    if c1 and c2:
        return coherent_square_length(c1[0], c2[0], c1[1], c2[1], lambda_p)
    if isinstance(spec1, Sphere) and isinstance(spec2, Sphere) and \
            (spec1.m, spec1.n) == (spec2.m, spec2.n):
        return sphere_square_length(spec1.m, spec1.n, spec1.z, spec2.z, lambda_p)
    return None


def default_schedule(specs, lambda_p=1.0, max_truncation=MAX_TRUNCATION) -> list[int]:
    n0 = max(max(required_dim(s, lambda_p) for s in specs), 16)
    sched = [n0]
    while sched[-1] * 2 <= max_truncation:
        sched.append(sched[-1] * 2)
    if len(sched) == 1 and n0 < max_truncation:
        sched.append(max_truncation)
    return sched[:3]


def _schedule(specs, lambda_p, truncation, schedule):
    if schedule is not None:
        return list(schedule)
    if truncation is not None:
        return [int(truncation)]
    return default_schedule(specs, lambda_p)


def _operator_route(op_factory, spec1, spec2, lambda_p, sched, tol):
    per, prev = [], None
    converged = len(sched) == 1
    residual = None
    for n in sched:
        val = evaluate_pair(spec1, spec2, op_factory(n, lambda_p)).real
        per.append((n, val))
        if prev is not None:
            residual = abs(val - prev)
            if residual < tol:
                converged = True
                break
        prev = val
    return per[-1][1], per[-1][0], per, converged, residual


def d_L2(spec1, spec2, lambda_p=1.0, truncation=None, schedule=None, tol=1e-8,
         closed_form=True) -> DistanceReport:
    """Quantum square-length ``(phi (x) phi~)(L^2)``."""
    sched = _schedule((spec1, spec2), lambda_p, truncation, schedule)
    op, n, per, conv, res = _operator_route(_length_sq, spec1, spec2, lambda_p, sched, tol)
    analytic = None
    extras = {}
    if closed_form:
        try:
            analytic = closed_form_square_length(spec1, spec2, lambda_p)
        except FormulaInapplicable as exc:
            extras["closed_form"] = str(exc)
    if analytic is not None:
        return DistanceReport("d_L2", analytic, "analytic", n, analytic, op,
                              abs(analytic - op), conv, per, extras)
    return DistanceReport("d_L2", op, "operator-evaluation", n, None, op, res, conv, per, extras)


def d_L(spec1, spec2, lambda_p=1.0, truncation=None, schedule=None, tol=1e-8) -> DistanceReport:
    """Quantum length ``(phi (x) phi~)(L)``; there is no closed form in general."""
    sched = _schedule((spec1, spec2), lambda_p, truncation, schedule)
    op, n, per, conv, res = _operator_route(_length, spec1, spec2, lambda_p, sched, tol)
    sq = d_L2(spec1, spec2, lambda_p, truncation=n)
    bound = math.sqrt(max(sq.value, 0.0))
    extras = {"sqrt_d_L2": bound, "bound_gap": bound - op}
    return DistanceReport("d_L", op, "operator-evaluation", n, None, op, res, conv, per, extras)


def lambda_inv2(spec1, spec2, lambda_p=1.0, **kw) -> float:
    """Geometric mean of the two self square-lengths."""
    a = d_L2(spec1, spec1, lambda_p, **kw).value
    b = d_L2(spec2, spec2, lambda_p, **kw).value
    return math.sqrt(a * b)


def modified_length_coherent(m, n, kappa, kappa_t, lambda_p=1.0) -> float:
    """``sqrt((sqrt(2E_m) - sqrt(2E_n))^2 + |kappa - kappa_t|^2)``."""
    e = math.sqrt(2 * energy(m, lambda_p)) - math.sqrt(2 * energy(n, lambda_p))
    dk2 = (kappa[0] - kappa_t[0]) ** 2 + (kappa[1] - kappa_t[1]) ** 2
    return math.sqrt(e * e + dk2)


def modified_length_eigen(m, n, lambda_p=1.0) -> float:
    """``lambda_p |sqrt(2n + 1) - sqrt(2m + 1)|``."""
    return lambda_p * abs(math.sqrt(2 * n + 1) - math.sqrt(2 * m + 1))


def modified_length_sphere(m, n, z, lambda_p=1.0) -> float:
    """Modified length between the sphere points (x, y, z) and (x, y, -z), n > m + 1."""
    em, en = energy(m, lambda_p), energy(n, lambda_p)
    s, d = em + en, em - en
    inner = math.sqrt(max(s * s - z * z * d * d, 0.0))
    return math.sqrt(max(2 * (s - inner), 0.0))


def _mod_from(d12, d11, d22):
    gap = d12 - math.sqrt(d11 * d22)
    return math.sqrt(abs(gap)), gap


def d_L_mod(spec1, spec2, lambda_p=1.0, truncation=None, schedule=None,
            tol=1e-8) -> DistanceReport:
    """Modified quantum length ``sqrt|d_L2 - Lambda^-2|``.

    ``extras["gap"]`` keeps the signed difference under the root.
    """
    kw = dict(truncation=truncation, schedule=schedule, tol=tol)
    r12 = d_L2(spec1, spec2, lambda_p, **kw)
    r11 = d_L2(spec1, spec1, lambda_p, **kw)
    r22 = d_L2(spec2, spec2, lambda_p, **kw)
    op, op_gap = _mod_from(r12.operator, r11.operator, r22.operator)
    n = r12.truncation
    conv = r12.converged and r11.converged and r22.converged
    if None not in (r12.analytic, r11.analytic, r22.analytic):
        an, gap = _mod_from(r12.analytic, r11.analytic, r22.analytic)
        return DistanceReport("d_L_mod", an, "analytic", n, an, op, abs(an - op), conv,
                              extras={"gap": gap, "operator_gap": op_gap})
    return DistanceReport("d_L_mod", op, "operator-evaluation", n, None, op, r12.residual, conv,
                          extras={"gap": op_gap})
