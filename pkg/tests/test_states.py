import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eprod.dnorm import SolverConfig, dnorm
from eprod.measure import entanglement_production
from eprod.states import (
    FamilyError,
    FamilySpec,
    expected_epsilon,
    hf_reduced,
    library,
    make_density,
    make_ket,
    mixed_multimode,
)
from eprod.tensor import partial_trace

seeds = st.integers(0, 2**32 - 1)
r2 = 1 / math.sqrt(2)


def test_epr_amplitudes():
    np.testing.assert_allclose(make_ket(FamilySpec("epr", 2, {"sign": 1})).amp, [0, r2, r2, 0])
    np.testing.assert_allclose(make_ket(FamilySpec("epr", 2, {"sign": -1})).amp, [0, r2, -r2, 0])


def test_ghz3_amplitudes():
    amp = np.zeros(8)
    amp[0] = amp[7] = r2
    np.testing.assert_allclose(make_ket(FamilySpec("ghz", 3)).amp, amp)


def test_hartree_fock_n2_bose_is_epr():
    hf = make_ket(FamilySpec("hartree_fock", 2, {"statistics": "bose"}))
    np.testing.assert_allclose(hf.amp, make_ket(FamilySpec("epr", 2)).amp, atol=1e-15)


def test_hartree_fock_normalized_and_antisymmetric():
    for stats, sgn in (("fermi", -1), ("bose", 1)):
        psi = make_ket(FamilySpec("hartree_fock", 3, {"statistics": stats}))
        assert psi.norm() == pytest.approx(1.0)
        t = psi.tensor()
        np.testing.assert_allclose(np.swapaxes(t, 0, 1), sgn * t, atol=1e-15)


def test_separable_example_density():
    np.testing.assert_array_equal(make_density(FamilySpec("separable", 2)).entries, np.diag([0.5, 0, 0, 0.5]))


def test_mixed_multimode_trace_convention():
    A = make_density(FamilySpec("mixed_multimode", 3, {"p": 2, "weights": [0.5, 0.5]}))
    assert A.trace() == pytest.approx(6.0)
    U = mixed_multimode(3, 2, [0.5, 0.5], unit_trace=True)
    assert U.trace() == pytest.approx(1.0)


def test_bell_minus_projector_idempotent():
    P = make_density(FamilySpec("bell", 2, {"sign": -1})).entries
    np.testing.assert_allclose(P @ P, P, atol=1e-15)
    assert np.trace(P) == pytest.approx(1.0)


def test_hf_reduced_examples(cfg):
    A = hf_reduced(4, 2)
    assert dnorm(A, cfg).value == pytest.approx(1 / 12, abs=1e-12)
    np.testing.assert_allclose(hf_reduced(2, 1).entries, 0.5 * np.eye(2), atol=1e-15)
    eps = entanglement_production(A, cfg).epsilon
    assert eps == pytest.approx(math.log(4 / 3), abs=1e-10)


@pytest.mark.parametrize("N,p", [(3, 1), (3, 2), (4, 1), (4, 2), (4, 3)])
def test_hf_reduced_matches_partial_trace(N, p):
    for stats in ("fermi", "bose"):
        rho = make_density(FamilySpec("hartree_fock", N, {"statistics": stats}))
        direct = partial_trace(rho, list(range(p)))
        np.testing.assert_allclose(hf_reduced(N, p, stats).entries, direct.entries, atol=1e-14)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_hf_reduced_norm_closed_form(N, cfg):
    for p in range(1, N):
        assert dnorm(hf_reduced(N, p), cfg).value == pytest.approx(
            math.factorial(N - p) / math.factorial(N), abs=1e-10
        )


def test_expected_epsilon_examples():
    assert expected_epsilon(FamilySpec("multicat", 4, {"c1": 1.0, "c2": 0.0})) == 0.0
    for m in (2, 3, 4):
        spec = FamilySpec("multimode", 3, {"coeffs": np.ones(m) / math.sqrt(m)})
        assert expected_epsilon(spec) == pytest.approx(2 * math.log(m))
    assert expected_epsilon(FamilySpec("ghz", 7)) == pytest.approx(6 * math.log(2))
    assert expected_epsilon(FamilySpec("ghz", 7), base="two") == pytest.approx(6)


def test_family_validation():
    with pytest.raises(FamilyError):
        FamilySpec("nope")
    with pytest.raises(FamilyError):
        FamilySpec("epr", 3)
    with pytest.raises(FamilyError):
        FamilySpec("multicat", 3, {"c1": 0.9, "c2": 0.9})
    with pytest.raises(FamilyError):
        FamilySpec("multimode", 2, {"coeffs": [1, 1]})
    with pytest.raises(FamilyError):
        FamilySpec("hartree_fock", 9)
    with pytest.raises(FamilyError):
        FamilySpec("hf_reduced", 4, {"p": 4})
    with pytest.raises(FamilyError):
        FamilySpec("mixed_multimode", 3, {"p": 2, "weights": [0.7, 0.7]})
    with pytest.raises(FamilyError):
        FamilySpec("hartree_fock", 3, {"statistics": "anyon"})
    assert FamilySpec("hartree-fock", 3).family == "hartree_fock"


@pytest.mark.parametrize("name,spec", library())
def test_library_matches_closed_forms(name, spec, cfg):
    A = make_density(spec)
    assert A.total_dim <= 4096
    eps = entanglement_production(A, cfg).epsilon
    assert abs(eps - expected_epsilon(spec)) <= 1e-8
    assert eps >= -1e-12


@given(st.floats(0, 1), st.integers(2, 4), st.floats(0, 2 * math.pi))
def test_multicat_bound_and_phase_independence(c1, N, phase):
    c2 = math.sqrt(max(0.0, 1 - c1 * c1)) * complex(math.cos(phase), math.sin(phase))
    spec = FamilySpec("multicat", N, {"c1": c1, "c2": c2})
    eps = entanglement_production(make_density(spec), SolverConfig(restarts=4)).epsilon
    assert -1e-9 <= eps <= (N - 1) * math.log(2) + 1e-9
    assert abs(eps - expected_epsilon(spec)) <= 1e-8


@given(st.integers(2, 4), st.integers(2, 3), seeds)
def test_multimode_bound(m, N, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=m) + 1j * rng.normal(size=m)
    c /= np.linalg.norm(c)
    spec = FamilySpec("multimode", N, {"coeffs": c})
    eps = entanglement_production(make_density(spec), SolverConfig(restarts=4)).epsilon
    assert -1e-9 <= eps <= (N - 1) * math.log(m) + 1e-9
    assert abs(eps - expected_epsilon(spec)) <= 1e-8


@given(st.integers(1, 5), st.integers(1, 3), st.integers(1, 3), seeds)
def test_mixed_multimode_pipeline_equals_closed_form(N, p, m, seed):
    if p > N:
        return
    w = np.random.default_rng(seed).dirichlet(np.ones(m))
    spec = FamilySpec("mixed_multimode", N, {"p": p, "weights": w})
    eps = entanglement_production(make_density(spec)).epsilon
    assert abs(eps - expected_epsilon(spec)) <= 1e-9


@pytest.mark.parametrize("N", [2, 3, 4])
def test_fermi_and_bose_hartree_fock_agree(N, cfg):
    fermi = entanglement_production(make_density(FamilySpec("hartree_fock", N, {"statistics": "fermi"})), cfg)
    bose = entanglement_production(make_density(FamilySpec("hartree_fock", N, {"statistics": "bose"})), cfg)
    assert abs(fermi.epsilon - bose.epsilon) <= 1e-8


@pytest.mark.parametrize("N", [3, 4])
def test_bose_hartree_fock_overlap_is_nfact_over_n_to_n(N, cfg):
    # the permanent-type state overlaps a uniform product state more than any basis product
    rho = make_density(FamilySpec("hartree_fock", N, {"statistics": "bose"}))
    assert dnorm(rho, cfg).value == pytest.approx(math.factorial(N) / N**N, abs=1e-10)
    assert entanglement_production(rho, cfg).epsilon == pytest.approx(math.lgamma(N + 1), abs=1e-10)
