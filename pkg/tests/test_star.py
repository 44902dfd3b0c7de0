import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moyalgeo import star as sm
from moyalgeo.errors import DomainError

EXT, RES = 6.0, 64


def named(name, theta=1.0, extent=EXT, res=RES):
    return sm.test_function(name, extent, res, theta)


def plane_wave(j1, j2, theta=1.0):
    k = 2 * np.pi / (2 * EXT)
    return sm.from_function(lambda x1, x2: np.exp(1j * k * (j1 * x1 + j2 * x2)), EXT, RES, theta)


@settings(max_examples=20, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6),
       st.sampled_from([0.3, 1.0, 2.5]))
def test_plane_waves_follow_twisted_rule(a1, a2, b1, b2, theta):
    k = 2 * np.pi / (2 * EXT)
    p, q = (k * a1, k * a2), (k * b1, k * b2)
    got = sm.star(plane_wave(a1, a2, theta), plane_wave(b1, b2, theta)).samples
    want = np.exp(-0.5j * theta * (p[0] * q[1] - p[1] * q[0])) * plane_wave(a1 + b1, a2 + b2).samples
    assert np.abs(got - want).max() < 1e-11


def test_unit_is_neutral():
    f = named("gauss-a")
    one = named("one")
    assert sm.window_norm(sm.star(one, f) - f) < 1e-12
    assert sm.window_norm(sm.star(f, one) - f) < 1e-12


def test_zero_gives_zero():
    f, z = named("gauss"), named("zero")
    assert np.abs(sm.star(f, z).samples).max() == 0
    assert np.abs(sm.star(z, z).samples).max() == 0


def test_ground_projector():
    assert sm.projector_residual(named("ground", extent=8.0)) < 1e-10


def test_coordinate_commutator():
    theta = 1.0
    ext = 24 * math.sqrt(theta)
    x1 = sm.test_function("x1", ext, 256, theta)
    x2 = sm.test_function("x2", ext, 256, theta)
    c = sm.star(x1, x2) - sm.star(x2, x1)
    assert sm.window_norm(c.samples - 1j * theta, c) < 1e-6


def test_associativity():
    f, g, h = named("gauss-a"), named("gauss-b"), named("gauss-c")
    assert sm.associativity_check(f, g, h) < 1e-10


def test_conjugation_reverses_order():
    f, g = named("gauss-a") * (1 + 0.5j), named("gauss-b")
    lhs = sm.star(f, g).conj()
    rhs = sm.star(g.conj(), f.conj())
    # floor set by the periodic wrap of the gauss-b tail at this extent
    assert sm.window_norm(lhs - rhs) < 1e-9


def test_tracial_property():
    f, g = named("gauss-a"), named("gauss-c")
    assert sm.integral(sm.star(f, g)) == pytest.approx(sm.integral(sm.star(g, f)), abs=1e-10)
    pointwise = np.sum(f.samples * g.samples) * (2 * EXT / RES) ** 2
    assert sm.integral(sm.star(f, g)) == pytest.approx(pointwise, abs=1e-10)


def test_commutative_limit_decreases():
    dev = sm.commutative_limit(named("gauss-a"), named("gauss-b"), [1, 0.5, 0.25, 0.125])
    assert all(b < a for a, b in zip(dev, dev[1:]))
    with pytest.raises(DomainError):
        sm.commutative_limit(named("gauss-a"), named("gauss-b"), [0.5, 1])


def test_refinement_converges():
    errs = []
    for res in (64, 128):
        f = sm.test_function("gauss-a", EXT, res, 1.0)
        g = sm.test_function("gauss-b", EXT, res, 1.0)
        p = sm.star(f, g)
        errs.append(p)
    coarse, fine = errs
    diff = np.abs(coarse.samples - fine.samples[::2, ::2]).max()
    assert diff < 1e-10


def test_grid_mismatch():
    with pytest.raises(DomainError):
        sm.star(named("gauss"), named("gauss", res=128))
    with pytest.raises(DomainError):
        sm.star(named("gauss"), named("gauss", theta=0.5))
    with pytest.raises(DomainError):
        sm.GridFunction(1.0, 100, np.zeros((100, 100)), 1.0)
    with pytest.raises(DomainError):
        named("unknown")


def test_csv_round_trip(tmp_path):
    f = named("gauss-a") * (1 - 0.25j)
    sm.write_csv(f, tmp_path / "f.csv")
    back = sm.read_csv(tmp_path / "f.csv")
    assert (back.extent, back.resolution, back.theta) == (f.extent, f.resolution, f.theta)
    assert np.array_equal(back.samples, f.samples)


def test_binary_round_trip(tmp_path):
    f = named("gauss-b", theta=0.75)
    sm.write_binary(f, tmp_path / "f.bin")
    back = sm.read_binary(tmp_path / "f.bin")
    assert back.theta == 0.75
    assert np.allclose(back.samples, f.samples, atol=1e-7)


def test_quadrature_oracle_at_a_point():
    theta, x0 = 1.0, (0.25, -0.25)
    fa = lambda x1, x2: np.exp(-((x1 - 0.5) ** 2 + x2**2))
    fb = lambda x1, x2: np.exp(-(x1**2 + (x2 + 0.7) ** 2) / 2)
    # (f*g)(x) = 1/(pi theta)^2 int f(x+s) g(x+t) exp(2i/theta (s1 t2 - s2 t1)) ds dt
    h = 0.05
    u = np.arange(-7, 7 + h / 2, h)
    s1, s2 = np.meshgrid(u, u, indexing="ij")
    fs = fa(x0[0] + s1, x0[1] + s2)
    gt = fb(x0[0] + s1, x0[1] + s2)                       # indexed [t1, t2]
    e_minus = np.exp(-2j / theta * np.outer(u, u))        # [s2, t1]
    e_plus = np.exp(2j / theta * np.outer(u, u))          # [s1, t2]
    inner = e_minus @ gt @ e_plus.T                       # [s2, s1]
    total = np.sum(fs * inner.T)
    want = total * h**4 / (math.pi * theta) ** 2
    f = sm.from_function(fa, 8.0, 128, theta)
    g = sm.from_function(fb, 8.0, 128, theta)
    p = sm.star(f, g)
    i = np.argmin(np.abs(f.axis - x0[0]))
    j = np.argmin(np.abs(f.axis - x0[1]))
    assert f.axis[i] == pytest.approx(x0[0]) and f.axis[j] == pytest.approx(x0[1])
    assert p.samples[i, j] == pytest.approx(want, abs=1e-8)
