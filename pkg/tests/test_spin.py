import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eprod.dnorm import SolverConfig, dnorm
from eprod.measure import entanglement_production
from eprod.spin import (
    ConvergenceError,
    IsingParams,
    SpinCorrelations,
    ising_epsilon,
    ising_limit_table,
    ising_magnetization,
    ising_pipeline_epsilon,
    ising_reduced,
    ising_two_spin_density,
    log_partition,
    meanfield_factorized,
    meanfield_magnetization,
    plane_wave_expectations,
    spin_R1,
)
from eprod.tensor import ValidationError, partial_trace

gs = st.floats(-20, 20)
bs = st.floats(0, 20)


def test_infinite_temperature_density():
    np.testing.assert_allclose(ising_two_spin_density(IsingParams(0, 0)).entries, np.eye(4) / 4, atol=1e-16)


@given(gs, bs)
def test_density_spectrum_and_trace(g, b):
    rho = ising_two_spin_density(IsingParams(g, b))
    d = np.real(np.diagonal(rho.entries))
    assert d.sum() == pytest.approx(1.0, abs=1e-12)
    lz = log_partition(IsingParams(g, b))
    np.testing.assert_allclose(d, np.exp(np.array([g + b, -g, -g, g - b]) - lz), rtol=1e-12, atol=1e-300)


def test_partition_function_small_args():
    g, b = 0.3, 0.7
    Z = 2 * (math.exp(g) * math.cosh(b) + math.exp(-g))
    assert log_partition(IsingParams(g, b)) == pytest.approx(math.log(Z), abs=1e-14)


@given(gs, bs)
def test_reduced_matches_partial_trace(g, b):
    prm = IsingParams(g, b)
    np.testing.assert_allclose(
        ising_reduced(prm).entries, partial_trace(ising_two_spin_density(prm), [0]).entries, atol=1e-12
    )


def test_reduced_zero_field_and_norm():
    np.testing.assert_allclose(ising_reduced(IsingParams(1.3, 0)).entries, np.eye(2) / 2, atol=1e-15)
    g, b = 0.4, 0.9
    Z = 2 * (math.exp(g) * math.cosh(b) + math.exp(-g))
    norm = np.max(np.abs(np.diagonal(ising_reduced(IsingParams(g, b)).entries)))
    assert norm == pytest.approx((math.exp(g + b) + math.exp(-g)) / Z, rel=1e-13)


def test_epsilon_examples():
    assert ising_epsilon(IsingParams(1.0, 0.0)) == pytest.approx(math.log(math.e / math.cosh(1)), abs=1e-12)
    assert ising_epsilon(IsingParams(1.0, 0.0)) == pytest.approx(0.56622, abs=1e-5)
    assert ising_epsilon(IsingParams(300.0, 0.0)) == pytest.approx(math.log(2), abs=1e-12)
    assert ising_epsilon(IsingParams(-300.0, 0.0)) == pytest.approx(math.log(2), abs=1e-12)
    assert ising_epsilon(IsingParams(0.7, 300.0)) == pytest.approx(0.0, abs=1e-12)


def test_epsilon_naive_formula_small_args():
    for g, b in ((0.3, 0.2), (-1.1, 0.5), (2.0, 3.0)):
        x = math.exp(b + 2 * g)
        want = math.log(2 * (1 + math.exp(2 * g) * math.cosh(b)) * max(1, x) / (1 + x) ** 2)
        assert ising_epsilon(IsingParams(g, b)) == pytest.approx(want, abs=1e-13)


@pytest.mark.parametrize("g", np.linspace(-6, 6, 25))
def test_zero_field_specialization(g):
    assert ising_epsilon(IsingParams(g, 0.0)) == pytest.approx(abs(g) - math.log(math.cosh(g)), abs=1e-12)


def test_closed_form_equals_pipeline_grid():
    cfg = SolverConfig()
    worst = 0.0
    for g in np.linspace(-5, 5, 21):
        for b in np.linspace(0, 5, 21):
            prm = IsingParams(float(g), float(b))
            worst = max(worst, abs(ising_pipeline_epsilon(prm, cfg).epsilon - ising_epsilon(prm)))
    assert worst <= 1e-10


def test_large_parameters_stay_finite():
    for g, b in ((700.0, 700.0), (-700.0, 0.0), (-400.0, 800.0)):
        prm = IsingParams(g, b)
        assert math.isfinite(ising_epsilon(prm)) and math.isfinite(ising_magnetization(prm))


def test_magnetization_examples():
    assert ising_magnetization(IsingParams(0.8, 0.0)) == 0.0
    assert ising_magnetization(IsingParams(0.8, 300.0)) == pytest.approx(0.5, abs=1e-12)
    g, b = 0.3, 1.1
    want = math.exp(2 * g) * math.sinh(b) / (2 * (1 + math.exp(2 * g) * math.cosh(b)))
    assert ising_magnetization(IsingParams(g, b)) == pytest.approx(want, rel=1e-13)


def test_magnetization_is_mean_sz():
    prm = IsingParams(-0.4, 0.9)
    d = np.real(np.diagonal(ising_two_spin_density(prm).entries))
    assert ising_magnetization(prm) == pytest.approx(0.5 * (d[0] - d[3]), abs=1e-14)


def test_limit_table():
    rows = ising_limit_table(300.0)
    assert rows and all(r.passed(1e-6) for r in rows), [r for r in rows if not r.passed(1e-6)]
    by = {(r.key, r.quantity, r.ray.split(" ")[0]): r.expected for r in rows}
    assert by[("eq81", "epsilon", "b+2g=0")] == pytest.approx(math.log(0.75))
    assert by[("eq82", "magnetization", "b+2g=0")] == pytest.approx(1 / 6)
    keys = {r.key for r in rows}
    assert keys == {"eq77", "eq78", "eq79", "eq80", "eq81", "eq82"}


@pytest.mark.parametrize("g", [0.0, 0.3, 1.0, 2.5])
def test_b_sweep_complementarity(g):
    bvals = np.linspace(0, 10, 41)
    M = [ising_magnetization(IsingParams(g, b)) for b in bvals]
    E = [ising_epsilon(IsingParams(g, b)) for b in bvals]
    assert all(m2 >= m1 - 1e-15 for m1, m2 in zip(M, M[1:]))
    assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(E, E[1:]))


def test_params_validation():
    with pytest.raises(ValidationError):
        IsingParams(0.1, -1.0)
    with pytest.raises(ValidationError):
        IsingParams(math.inf, 0.0)


def test_meanfield_paramagnetic_root():
    m, _ = meanfield_magnetization(3.0, 0.0, 1.0)
    assert abs(m) < 1e-10


def test_meanfield_saturation():
    m, _ = meanfield_magnetization(200.0, 0.0, 1.0)
    assert m == pytest.approx(0.5, abs=1e-12)


def test_meanfield_fixed_point_oracle():
    J0, B, beta = 6.0, 0.2, 1.0
    m, _ = meanfield_magnetization(J0, B, beta)
    assert m == pytest.approx(0.5 * math.tanh(0.5 * beta * (J0 * m + B)), abs=1e-11)


def test_meanfield_nonconvergence_raises():
    with pytest.raises(ConvergenceError):
        meanfield_magnetization(4.0, 0.0, 1.0, max_iter=50)


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
def test_meanfield_product_state_has_zero_measure(N):
    rng = np.random.default_rng(N)
    for _ in range(3):
        res = meanfield_factorized(N, float(rng.uniform(0.1, 8)), float(rng.uniform(0, 2)), 1.0)
        A = res.assemble()
        assert A.trace() == pytest.approx(1.0)
        assert abs(entanglement_production(A).epsilon) <= 1e-10


def test_spin_R1_uniform_top_eigenvalue():
    N, M, S = 40, 0.3, 0.5
    R1 = spin_R1(SpinCorrelations.uniform(N, M, S))
    assert dnorm(R1).value == pytest.approx(S * S + (N - 1) * M * M, rel=1e-12)
    assert np.max(plane_wave_expectations(R1.entries)) == pytest.approx(S * S + (N - 1) * M * M, rel=1e-12)


def test_spin_R1_paramagnet():
    R1 = spin_R1(SpinCorrelations.uniform(10, 0.0, 0.5))
    assert dnorm(R1).value == pytest.approx(0.25)


def test_spin_R1_random_symmetric(rng):
    X = rng.normal(size=(6, 6))
    C = X @ X.T
    R1 = spin_R1(SpinCorrelations(6, C))
    assert dnorm(R1).value == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(C))), rel=1e-12)


def test_plane_waves_diagonalize_translation_invariant_corr():
    N = 8
    a = np.arange(N)
    dist = np.minimum(np.abs(a[:, None] - a[None, :]), N - np.abs(a[:, None] - a[None, :]))
    C = 0.25 * np.exp(-dist / 2.0)
    assert np.max(plane_wave_expectations(C)) == pytest.approx(np.max(np.linalg.eigvalsh(C)), rel=1e-12)


def test_spin_R1_validation():
    bad = np.array([[0.25, 0.1], [0.0, 0.25]])
    with pytest.raises(ValidationError):
        spin_R1(SpinCorrelations(2, bad))
    full = np.zeros((2, 2, 3, 3))
    for i in range(2):
        full[i, i] = np.eye(3) * 0.25
    spin_R1(SpinCorrelations(2, np.eye(2) * 0.25, full=full))
    full[0, 0, 0, 0] = 1.0
    with pytest.raises(ValidationError):
        spin_R1(SpinCorrelations(2, np.eye(2) * 0.25, full=full))
