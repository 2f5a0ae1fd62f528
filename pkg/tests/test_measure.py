import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eprod.dnorm import SolverConfig
from eprod.factorize import NormalizationError, product_operator
from eprod.measure import (
    LN2,
    entanglement_production,
    epsilon_sequence,
    measure_from_norms,
    order_index,
    order_index_from,
    property_suite,
)
from eprod.states import FamilySpec, expected_epsilon, hartree_fock_ket, library, make_density
from eprod.tensor import MultipartiteOperator, ValidationError, kron, random_hermitian

seeds = st.integers(0, 2**32 - 1)


def test_epr_measure(cfg):
    r = entanglement_production(make_density(FamilySpec("epr", 2)), cfg)
    assert r.epsilon == pytest.approx(math.log(2), abs=1e-12)
    assert r.norm_A == pytest.approx(0.5) and r.norm_prod == pytest.approx(0.25)
    assert r.converged and r.certificate is not None


def test_ghz5_measure(cfg):
    r = entanglement_production(make_density(FamilySpec("ghz", 5)), cfg)
    assert r.epsilon == pytest.approx(4 * math.log(2), abs=1e-12)


@pytest.mark.parametrize("name,spec", library())
def test_product_operator_is_nonentangling(name, spec, cfg):
    P = product_operator(make_density(spec)).assemble()
    assert abs(entanglement_production(P, cfg).epsilon) <= 1e-9


@pytest.mark.parametrize("name", ["epr+", "bell-", "ghz3", "multicat3", "hf3_fermi", "separable", "mixed_mm"])
def test_additivity(name, cfg):
    spec = dict(library())[name]
    A = make_density(spec)
    assert A.total_dim**2 <= 4096
    e1 = entanglement_production(A, cfg).epsilon
    e2 = entanglement_production(kron([A, A]), cfg).epsilon
    assert abs(e2 - 2 * e1) <= 1e-8


def test_base_change_exact(cfg):
    A = make_density(FamilySpec("ghz", 4))
    nat = entanglement_production(A, cfg)
    two = entanglement_production(A, cfg, base="two")
    assert two.epsilon == nat.epsilon / LN2
    assert two.base == "two" and nat.in_base(2).epsilon == two.epsilon


def test_unknown_base():
    with pytest.raises(ValueError):
        entanglement_production(MultipartiteOperator.identity((2, 2)), base="ten")


def test_zero_trace_propagates():
    with pytest.raises(NormalizationError):
        entanglement_production(MultipartiteOperator((2, 2), np.diag([1.0, -1.0, -1.0, 1.0])))


def test_measure_from_norms_examples():
    for N in (3, 10, 10**6):
        assert measure_from_norms(2.5, 2.5, N, 1) == pytest.approx(0.0, abs=1e-9)
    N, p, w = 7, 3, 0.4
    ff = math.factorial(N) / math.factorial(N - p)
    assert measure_from_norms(ff * w, N * w, N, p) == pytest.approx((1 - p) * math.log(w), abs=1e-12)
    for N in (3, 5, 8):
        for p in range(1, N):
            want = math.log(math.factorial(N - p) * N**p / math.factorial(N))
            # Hartree-Fock in the N!/(N-p)! trace convention: both norms are 1
            assert measure_from_norms(1.0, 1.0, N, p) == pytest.approx(want, abs=1e-12)
            # unit-trace norms (N-p)!/N! and 1/N belong to the other convention and count the factor twice
            unit = measure_from_norms(math.factorial(N - p) / math.factorial(N), 1 / N, N, p)
            assert unit == pytest.approx(2 * want, abs=1e-12)
    # log-space: no overflow at N = 10^6
    assert math.isfinite(measure_from_norms(1.0, 1.0, 10**6, 50))
    with pytest.raises(ValidationError):
        measure_from_norms(0.0, 1.0, 4, 2)
    with pytest.raises(ValidationError):
        measure_from_norms(1.0, 1.0, 4, 5)


def test_order_index_examples(cfg):
    N = 7
    rho1 = MultipartiteOperator((3,), np.diag([N, 0.0, 0.0]))
    assert order_index(rho1, cfg=cfg).omega == pytest.approx(1.0)
    ident = MultipartiteOperator.identity((4,))
    assert order_index(ident, cfg=cfg).omega == pytest.approx(0.0)
    tr = 10**4
    assert order_index_from(math.sqrt(tr), tr) == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        order_index(MultipartiteOperator.identity((1,)))
    with pytest.raises(ValidationError):
        order_index_from(1.0, 0.0)
    with pytest.raises(ValueError):
        order_index(ident, norm_used="frobenius")


@given(seeds)
def test_order_index_at_most_one_for_semipositive(seed):
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    A = MultipartiteOperator((2, 2), 5 * V @ V.conj().T)
    if abs(math.log(abs(A.trace()))) < 1e-3 or abs(A.trace()) < 1:
        return
    for which in ("dnorm", "spectral"):
        assert order_index(A, which, SolverConfig(restarts=4)).omega <= 1 + 1e-12


def test_property_suite_bell(cfg):
    rep = property_suite(make_density(FamilySpec("bell", 2)), cfg)
    assert rep.passed, rep.lines()
    assert rep.epsilon == pytest.approx(math.log(2))
    assert set(rep.checks) == {"nonentangling", "additive", "local_unitary", "continuity", "semipositive"}


def test_property_suite_on_product_operator(cfg):
    P = product_operator(make_density(FamilySpec("ghz", 3))).assemble()
    rep = property_suite(P, cfg, n_unitaries=5)
    assert rep.passed
    assert rep.checks["additive"].value <= 1e-12


def test_negative_epsilon_recorded_not_failed(cfg):
    # thermal pair on the b + 2g = 0 ray has a negative measure
    from eprod.spin import IsingParams, ising_two_spin_density

    A = ising_two_spin_density(IsingParams(-5.0, 10.0))
    rep = property_suite(A, cfg, n_unitaries=3)
    assert rep.epsilon < 0
    assert rep.checks["semipositive"].passed
    assert "negative" in rep.checks["semipositive"].detail


def test_continuity_shrinks(cfg):
    A = random_hermitian((2, 2), np.random.default_rng(3))
    A = MultipartiteOperator((2, 2), A.entries + 3 * np.eye(4))
    rep = property_suite(A, cfg, n_unitaries=2)
    assert rep.checks["continuity"].passed, rep.checks["continuity"].detail


def test_ghz_sequence(cfg):
    seq = epsilon_sequence(lambda n: make_density(FamilySpec("ghz", n)), range(2, 9), cfg)
    np.testing.assert_allclose([s.epsilon / math.log(2) for s in seq], range(1, 8), atol=1e-10)
    assert all(s.diff == pytest.approx(math.log(2)) for s in seq[1:])


def test_hartree_fock_sequence():
    cfg = SolverConfig(restarts=2)
    seq = epsilon_sequence(lambda n: MultipartiteOperator.projector(hartree_fock_ket(n)), range(2, 9), cfg)
    for s in seq:
        assert s.error is None
        assert s.epsilon == pytest.approx(expected_epsilon(FamilySpec("hartree_fock", s.size)), abs=1e-8)
    per = [s.per_size for s in seq]
    assert all(b > a for a, b in zip(per, per[1:]))
    assert per[-1] < 1.0


def test_sequence_records_errors_and_continues(cfg):
    def gen(n):
        if n == 3:
            return MultipartiteOperator((2, 2), np.diag([1.0, -1.0, -1.0, 1.0]))
        return make_density(FamilySpec("ghz", n))

    seq = epsilon_sequence(gen, [2, 3, 4], cfg)
    assert seq[1].result is None and "NormalizationError" in seq[1].error
    assert math.isnan(seq[1].epsilon)
    assert seq[2].diff == pytest.approx(3 * math.log(2) - math.log(2))
