import numpy as np
import pytest

import halfwave as hw


@pytest.fixture(scope="module")
def profiles():
    return hw.build_profiles(L=8.0, N=256)


@pytest.fixture(scope="module")
def ctx(profiles):
    return hw.Context(profiles)


def test_ground_state_is_positive_and_converged():
    gs = hw.ground_state(L=16.0, N=128, tol=1e-9)
    Q = gs["Q"]
    assert Q.shape == (128, 128)
    assert gs["residual"] <= 1e-9
    assert Q.max() == Q[64, 64]
    assert np.allclose(Q, Q.T, atol=1e-12)


def test_bad_grid_raises_value_error():
    with pytest.raises(ValueError):
        hw.ground_state(L=-1.0, N=64)
    with pytest.raises(hw.PreconditionError):
        hw.coordinates(4.0, 96)


def test_profile_constants(profiles):
    assert profiles.e1 > 0
    assert profiles.p1 > 0
    assert profiles.field("S01_2").shape == (256, 256)
    assert profiles.residual_norm(a=0.0) < 1e-8
    with pytest.raises(ValueError):
        profiles.field("nope")


def test_plane_wave_is_exact_under_step():
    L, N = np.pi, 32
    x = np.asarray(hw.coordinates(L, N))
    X, Y = np.meshgrid(x, x, indexing="ij")
    A = 0.5
    u = A * np.exp(1j * (2 * X + Y))
    v = hw.step(u, L, dt=0.1, steps=5, dealias=False)
    k = np.sqrt(5.0)
    expected = u * np.exp(-1j * (k - A) * 0.5)
    assert np.max(np.abs(v - expected)) < 1e-12
    assert hw.functionals(v, L)["mass"] == pytest.approx(A * A * 4 * np.pi**2)


def test_synthesis_round_trip(ctx):
    truth = {"lambda": 0.5, "alpha": [0.02, -0.01], "gamma": 0.4, "a": 0.05, "b": [0.002, 0.0]}
    u = hw.synthesize(ctx, truth, L=4.0, N=256)
    start = dict(truth, **{"lambda": 0.49, "gamma": 0.45, "a": 0.045})
    out = hw.decompose(ctx, u, L=4.0, init=start)
    got = out["params"]
    assert got["lambda"] == pytest.approx(0.5, rel=1e-6)
    assert got["a"] == pytest.approx(0.05, rel=1e-6)
    dx = 2 * 4.0 / 256
    assert max(abs(s) for s in out["ortho"]) < 1e-8 * np.linalg.norm(u) * dx


def test_self_similar_law_and_ode():
    p = hw.self_similar_params(A0=1.0, B0=[0.05, 0.0], t=-1.0)
    assert p["lambda"] == pytest.approx(0.25)
    rows = hw.ode_reference([-1.0, -0.5], p)
    assert rows[-1]["lambda"] == pytest.approx(0.0625, rel=1e-8)


def test_check_tables_are_plain_dicts(profiles):
    t = hw.expansion_checks(profiles)
    assert set(t) >= {"title", "pass", "checks"}
    assert all("value" in c for c in t["checks"])
