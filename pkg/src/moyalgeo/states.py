"""Pure states on the truncated number basis.

A :class:`StateSpec` is symbolic; ``realize`` turns it into a unit vector at a
given truncation.  Four families are supported: number eigenstates, their
translates (generalized coherent states), two-level "sphere" states and
arbitrary coefficient vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TruncatedOperator, displacement
from .errors import DomainError, InvalidTruncation

NORM_TOL = 1e-12


class StateSpec:
    """Base class; concrete variants below are frozen dataclasses."""

    def min_dim(self) -> int:
        raise NotImplementedError

    def text(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Eigenstate(StateSpec):
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise DomainError("level must be nonnegative")

    def min_dim(self) -> int:
        return self.m + 1

    def text(self) -> str:
        return f"eig:{self.m}"


@dataclass(frozen=True)
class Coherent(StateSpec):
    """Translate of the eigenstate ``m`` by ``kappa`` in the plane."""

    m: int
    kappa: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.m < 0:
            raise DomainError("level must be nonnegative")
        object.__setattr__(self, "kappa", tuple(float(k) for k in self.kappa))
        if len(self.kappa) != 2:
            raise DomainError("kappa must be a 2-vector")

    def min_dim(self) -> int:
        return self.m + 1

    def text(self) -> str:
        return f"coh:{self.m}:{_fmt(self.kappa[0])},{_fmt(self.kappa[1])}"


@dataclass(frozen=True)
class Sphere(StateSpec):
    """Superposition of levels ``m < n`` labelled by a point of the unit sphere."""

    m: int
    n: int
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.m < 0 or self.n <= self.m:
            raise DomainError("sphere states need 0 <= m < n")
        r2 = self.x**2 + self.y**2 + self.z**2
        if abs(r2 - 1.0) > NORM_TOL:
            raise DomainError(f"(x, y, z) must lie on the unit sphere, |r|^2 = {r2!r}")

    def min_dim(self) -> int:
        return self.n + 1

    def text(self) -> str:
        return f"sph:{self.m},{self.n}:{_fmt(self.x)},{_fmt(self.y)},{_fmt(self.z)}"


@dataclass(frozen=True)
class Vector(StateSpec):
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        c = tuple(complex(v) for v in self.coeffs)
        if not c:
            raise DomainError("empty coefficient vector")
        norm = math.sqrt(sum(abs(v) ** 2 for v in c))
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"coefficients must have unit norm, got {norm!r}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def normalized(cls, coeffs) -> "Vector":
        v = np.asarray(coeffs, dtype=complex)
        return cls(tuple(v / np.linalg.norm(v)))

    def min_dim(self) -> int:
        nz = np.flatnonzero(np.abs(self.coeffs) > 0)
        return int(nz[-1]) + 1 if nz.size else 1

    def text(self) -> str:
        return "vec:" + ",".join(_fmt_c(c) for c in self.coeffs)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _fmt_c(c: complex) -> str:
    if c.imag == 0:
        return _fmt(c.real)
    return f"{c.real:.12g}{c.imag:+.12g}j"


def parse_state(text: str) -> StateSpec:
    """Parse ``eig:m``, ``coh:m:k1,k2``, ``sph:m,n:x,y,z`` or ``vec:c0,c1,...``.

    ``vec`` coefficients accept Python complex literals (``0.6``, ``0.8j``,
    ``0.3+0.4j``) and are normalized.
    """
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "eig":
            return Eigenstate(int(rest))
        if kind == "coh":
            m, _, k = rest.partition(":")
            k1, k2 = (float(v) for v in k.split(",")) if k else (0.0, 0.0)
            return Coherent(int(m), (k1, k2))
        if kind == "sph":
            mn, _, xyz = rest.partition(":")
            m, n = (int(v) for v in mn.split(","))
            x, y, z = (float(v) for v in xyz.split(","))
            # tolerate rounding in hand-typed points
            r = math.sqrt(x * x + y * y + z * z)
            return Sphere(m, n, x / r, y / r, z / r)
        if kind == "vec":
            return Vector.normalized([complex(v.replace(" ", "")) for v in rest.split(",")])
    except (ValueError, TypeError) as exc:
        raise DomainError(f"cannot parse state {text!r}: {exc}") from exc
    raise DomainError(f"unknown state kind in {text!r}; expected eig, coh, sph or vec")


def realize(spec: StateSpec, n: int, lambda_p: float = 1.0, tol: float = 1e-6) -> np.ndarray:
    """Unit coefficient vector of ``spec`` in the first ``n`` number states."""
    if spec.min_dim() > n:
        raise InvalidTruncation(f"{spec.text()} needs truncation >= {spec.min_dim()}, got {n}")
    psi = np.zeros(n, dtype=complex)
    if isinstance(spec, Eigenstate):
        psi[spec.m] = 1.0
    elif isinstance(spec, Coherent):
        psi[spec.m] = 1.0
        if spec.kappa != (0.0, 0.0):
            psi = displacement(spec.kappa, n, lambda_p, tol=tol, block=spec.m + 1).entries @ psi
    elif isinstance(spec, Sphere):
        # x + iy = 2 conj(psi_m) psi_n; use it for the smaller amplitude to avoid
        # cancellation in 1 -/+ z near the poles
        w = complex(spec.x, spec.y)
        if spec.z >= 0:
            pm = math.sqrt((1 + spec.z) / 2)
            pn = w / (2 * pm)
        else:
            an = math.sqrt((1 - spec.z) / 2)
            pm = abs(w) / (2 * an)
            pn = an * (w / abs(w) if w else 1.0)
        psi[spec.m], psi[spec.n] = pm, pn
        psi /= np.linalg.norm(psi)
    elif isinstance(spec, Vector):
        c = np.asarray(spec.coeffs)
        psi[: min(len(c), n)] = c[:n]
    else:
        raise TypeError(f"not a state spec: {spec!r}")
    return psi


def evaluate(spec: StateSpec, a: TruncatedOperator, tol: float = 1e-6) -> complex:
    """``<psi, A psi>``."""
    psi = realize(spec, a.dim, a.lambda_p, tol)
    return complex(np.vdot(psi, a.entries @ psi))


def evaluate_pair(spec1: StateSpec, spec2: StateSpec, b, tol: float = 1e-6) -> complex:
    """Expectation of a two-point operator in the product state ``psi1 (x) psi2``."""
    psi1 = realize(spec1, b.n, b.lambda_p, tol)
    psi2 = realize(spec2, b.n, b.lambda_p, tol)
    return b.expect(psi1, psi2)


def sphere_coords(spec) -> tuple[float, float, float]:
    """Bloch coordinates of a vector with exactly two nonzero components."""
    c = np.asarray(spec.coeffs if isinstance(spec, Vector) else spec, dtype=complex)
    nz = np.flatnonzero(np.abs(c) > 1e-15)
    if nz.size == 1:
        return 0.0, 0.0, 1.0
    if nz.size != 2:
        raise DomainError(f"sphere coordinates need exactly two nonzero components, got {nz.size}")
    pm, pn = c[nz[0]], c[nz[1]]
    cross = np.conj(pm) * pn
    return float(2 * cross.real), float(2 * cross.imag), float(abs(pm) ** 2 - abs(pn) ** 2)


def required_dim(spec: StateSpec, lambda_p: float = 1.0) -> int:
    """Heuristic truncation at which ``spec`` is represented to roundoff."""
    if isinstance(spec, Coherent) and spec.kappa != (0.0, 0.0):
        beta = math.hypot(*spec.kappa) / (math.sqrt(2) * lambda_p)
        return spec.m + int(math.ceil(beta**2 + 10 * beta + 4 * math.sqrt(spec.m + 1))) + 16
    return spec.min_dim() + 8
