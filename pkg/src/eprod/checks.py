"""Reference-value checks, shared by ``eprod reproduce`` and the acceptance tests.

Every check group returns :class:`Check` rows keyed by the reference label
used on the command line (``--only eq75``).  Each group maps to one
numbered acceptance criterion via :data:`CRITERIA`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dnorm import SolverConfig, dnorm, dnorm_bruteforce, max_product_overlap, schmidt_max
from .measure import entanglement_production, property_suite, to_base
from .spin import (
    IsingParams,
    ising_epsilon,
    ising_limit_table,
    ising_pipeline_epsilon,
    meanfield_factorized,
)
from .states import FamilySpec, expected_epsilon, library, make_density, mixed_multimode
from .tensor import MultipartiteOperator, random_hermitian, random_ket
from .transitions import (
    RegimeInput,
    bec_epsilon,
    double_factorial_oracle,
    magnetic_epsilon,
    pairing_count,
    sc_epsilon,
)


@dataclass(frozen=True)
class Check:
    key: str
    name: str
    passed: bool
    value: float
    reference: float
    tol: float
    detail: str = ""

    @property
    def delta(self) -> float:
        if math.isnan(self.value) or math.isnan(self.reference):
            return float("nan")
        return abs(self.value - self.reference)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.key:<8} {self.name:<44} value={self.value:.12g} "
            f"ref={self.reference:.12g} |d|={self.delta:.2e} tol={self.tol:.0e} {self.detail}"
        ).rstrip()


def _cmp(key, name, value, reference, tol, detail="") -> Check:
    ok = abs(value - reference) <= tol
    return Check(key, name, bool(ok), float(value), float(reference), tol, detail)


def _flag(key, name, ok, value=float("nan"), reference=float("nan"), tol=0.0, detail="") -> Check:
    return Check(key, name, bool(ok), float(value), float(reference), tol, detail)


def _pipeline(spec: FamilySpec, cfg, base="natural"):
    return entanglement_production(make_density(spec), cfg, base)


# criterion 1
def check_bipartite(cfg: SolverConfig) -> list[Check]:
    out = []
    for fam, key in (("epr", "eq28"), ("bell", "eq31")):
        for sign in (1, -1):
            spec = FamilySpec(fam, 2, {"sign": sign})
            r = _pipeline(spec, cfg)
            out.append(_cmp(key, f"{fam}{'+' if sign > 0 else '-'} = log 2", r.epsilon, math.log(2), 1e-9))
    return out


# criterion 2
def check_ghz(cfg: SolverConfig, base="natural") -> list[Check]:
    out = []
    for N in range(2, 11):
        spec = FamilySpec("ghz", N)
        r = _pipeline(spec, cfg)
        out.append(_cmp("eq34", f"ghz N={N} = (N-1) log 2", to_base(r.epsilon, base), expected_epsilon(spec, base), 1e-8))
        r2 = to_base(r.epsilon, "two")
        out.append(_cmp("eq34", f"ghz N={N} base 2 = {N - 1}", r2, N - 1, 1e-8))
    return out


# criterion 3
def check_multicat(cfg: SolverConfig) -> list[Check]:
    out = []
    worst, worst_label, bound_ok = 0.0, "", True
    for N in (2, 3, 4):
        for c1 in np.linspace(0.0, 1.0, 11):
            c2 = math.sqrt(max(0.0, 1 - c1 * c1))
            spec = FamilySpec("multicat", N, {"c1": c1, "c2": c2})
            eps = _pipeline(spec, cfg).epsilon
            d = abs(eps - expected_epsilon(spec))
            if d >= worst:
                worst, worst_label = d, f"N={N} c1={c1:.1f}"
            bound_ok &= -1e-9 <= eps <= (N - 1) * math.log(2) + 1e-9
    out.append(Check("eq37", "multicat grid 11 c1 x N in {2,3,4}", worst <= 1e-8, worst, 0.0, 1e-8, f"worst at {worst_label}"))
    out.append(_flag("eq38", "multicat 0 <= eps <= (N-1) log 2", bound_ok))
    return out


# criterion 4
def check_multimode(cfg: SolverConfig, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for m in (2, 3, 4):
        for N in (2, 3):
            worst = 0.0
            for _ in range(3):
                c = rng.normal(size=m) + 1j * rng.normal(size=m)
                c /= np.linalg.norm(c)
                spec = FamilySpec("multimode", N, {"coeffs": c})
                worst = max(worst, abs(_pipeline(spec, cfg).epsilon - expected_epsilon(spec)))
            out.append(Check("eq41", f"multimode m={m} N={N} random coefficients", worst <= 1e-8, worst, 0.0, 1e-8))
            phases = np.exp(2j * np.pi * rng.random(m))
            spec = FamilySpec("multimode", N, {"coeffs": phases / math.sqrt(m)})
            out.append(_cmp("eq42", f"multimode m={m} N={N} equal moduli = (N-1) log m",
                             _pipeline(spec, cfg).epsilon, (N - 1) * math.log(m), 1e-8))
    return out


# criterion 5
def check_hartree_fock(cfg: SolverConfig) -> list[Check]:
    out = []
    for stats in ("fermi", "bose"):
        per_n = []
        for N in range(2, 7):
            spec = FamilySpec("hartree_fock", N, {"statistics": stats})
            eps = _pipeline(spec, cfg).epsilon
            per_n.append(eps / N)
            out.append(_cmp("eq45", f"hartree-fock {stats} N={N} = log(N^N/N!)", eps, expected_epsilon(spec), 1e-8))
        mono = all(b > a for a, b in zip(per_n, per_n[1:]))
        out.append(_flag("eq45", f"hartree-fock {stats} eps/N increasing N=2..6", mono and per_n[-1] < 1.0,
                         per_n[-1], 1.0, detail="approaches log e from below"))
    return out


# criterion 6
def check_hf_reduced(cfg: SolverConfig) -> list[Check]:
    out = []
    worst, label = 0.0, ""
    for N in range(2, 7):
        for p in range(1, N):
            spec = FamilySpec("hf_reduced", N, {"p": p})
            d = abs(_pipeline(spec, cfg).epsilon - expected_epsilon(spec))
            if d >= worst:
                worst, label = d, f"N={N} p={p}"
    out.append(Check("eq47", "reduced hartree-fock N<=6, all p", worst <= 1e-8, worst, 0.0, 1e-8, f"worst at {label}"))
    eps = _pipeline(FamilySpec("hf_reduced", 6, {"p": 2}), cfg).epsilon
    asym = 2 * 1 / (2 * 6)
    ratio = eps / asym
    out.append(Check("eq48", "reduced hartree-fock N=6 p=2 vs p(p-1)/2N", abs(ratio - 1) <= 0.15, ratio, 1.0, 0.15))
    return out


# criterion 7
def check_separable(cfg: SolverConfig) -> list[Check]:
    r = _pipeline(FamilySpec("separable_example", 2), cfg)
    return [_cmp("sepV", "separable mixture (|11><11|+|22><22|)/2 = log 2", r.epsilon, math.log(2), 1e-9)]


def rabi_populations(omega: float, t) -> np.ndarray:
    """Two-mode populations ``(cos^2(omega t / 2), sin^2(omega t / 2))``."""
    w1 = np.cos(0.5 * omega * np.asarray(t, dtype=float)) ** 2
    return np.stack([w1, 1 - w1], axis=-1)


def random_trajectory(m: int, steps: int, rng: np.random.Generator) -> np.ndarray:
    """Populations on the simplex drifting smoothly in time, equal at the midpoint."""
    t = np.linspace(0, 1, steps)
    a, b = rng.normal(size=m), rng.normal(size=m)
    logits = (1 - 2 * t)[:, None] * (a + np.outer(t * (1 - t), b))
    w = np.exp(logits)
    return w / w.sum(axis=1, keepdims=True)


# criterion 8
def check_mixed_multimode(cfg: SolverConfig, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    worst, label = 0.0, ""
    for N in range(1, 6):
        for p in range(1, min(N, 3) + 1):
            for m in (2, 3):
                w = rng.dirichlet(np.ones(m))
                spec = FamilySpec("mixed_multimode", N, {"p": p, "weights": w})
                d = abs(_pipeline(spec, cfg).epsilon - expected_epsilon(spec))
                if d >= worst:
                    worst, label = d, f"N={N} p={p} m={m}"
    out.append(Check("eq60", "mixed multimode N<=5 p<=3 m<=3", worst <= 1e-9, worst, 0.0, 1e-9, f"worst at {label}"))
    in_range = True
    hits_max = True
    for m in (2, 3):
        for p in (2, 3):
            traj = random_trajectory(m, 25, rng)
            traj = np.vstack([traj, np.full(m, 1 / m), np.eye(m)[0]])
            eps = [entanglement_production(mixed_multimode(p, p, w), cfg).epsilon for w in traj]
            top = (p - 1) * math.log(m)
            in_range &= all(-1e-12 <= e <= top + 1e-12 for e in eps)
            hits_max &= abs(eps[-2] - top) <= 1e-9 and abs(eps[-1]) <= 1e-12
    out.append(_flag("eq60", "trajectories stay in [0, (p-1) log m]", in_range))
    out.append(_flag("eq60", "max at equal populations, 0 at a single mode", hits_max))
    return out


# criterion 9
def check_ising(cfg: SolverConfig) -> list[Check]:
    gs = np.linspace(-5, 5, 21)
    bs = np.linspace(0, 5, 21)
    worst, label = 0.0, ""
    for g in gs:
        for b in bs:
            prm = IsingParams(float(g), float(b))
            d = abs(ising_pipeline_epsilon(prm, cfg).epsilon - ising_epsilon(prm))
            if d >= worst:
                worst, label = d, f"g={g:.1f} b={b:.2f}"
    out = [Check("eq75", "ising closed form vs pipeline 21x21 grid", worst <= 1e-10, worst, 0.0, 1e-10, f"worst at {label}")]
    for row in ising_limit_table(300.0):
        out.append(Check(row.key, f"{row.quantity} {row.ray}", row.passed(1e-6), row.estimate, row.expected, 1e-6,
                         "" if row.settled else "not settled"))
    return out


# criterion 10
def check_meanfield(cfg: SolverConfig, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for N in range(1, 7):
        for _ in range(4):
            bJ0 = float(rng.uniform(0.1, 8.0))
            B = float(rng.uniform(0.0, 2.0))
            res = meanfield_factorized(N, bJ0, B, 1.0)
            if N == 1:
                continue
            worst = max(worst, abs(entanglement_production(res.assemble(), cfg).epsilon))
    return [Check("eq85", "mean-field product state N<=6", worst <= 1e-10, worst, 0.0, 1e-10)]


# criterion 11
def check_magnetic() -> list[Check]:
    out = []
    for p, ref in ((2, math.log(3)), (3, math.log(15))):
        out.append(_cmp("eq99", f"magnetic above Tc p={p}", magnetic_epsilon(RegimeInput(p, 10**6, "above_Tc")), ref, 1e-12))
    ok = all(double_factorial_oracle(p) == pairing_count(p) for p in range(1, 8))
    out.append(_flag("eq97", "(2p-1)!! equals pairing count p<=7", ok))
    for p in range(1, 5):
        r = RegimeInput(p, 10**6, "below_Tc", M=0.4)
        out.append(_cmp("eq100", f"magnetic below Tc p={p}", magnetic_epsilon(r), 0.0, 1e-12,
                        f"finite-N {magnetic_epsilon(r, finite_n=True):.2e}"))
    return out


def check_transitions() -> list[Check]:
    out = [_cmp("eq87", "bec above Tc N=100 p=2 = log(100/99)", bec_epsilon(RegimeInput(2, 100, "above_Tc")),
                math.log(100 / 99), 1e-12)]
    worst = max(abs(bec_epsilon(RegimeInput(p, N, "below_Tc"))) for N in (10, 100, 1000) for p in range(1, 5))
    out.append(Check("eq89", "bec below Tc = 0", worst <= 1e-9, worst, 0.0, 1e-9))
    out.append(_cmp("eq90", "superconducting above Tc N=1000 p=3", sc_epsilon(RegimeInput(3, 1000, "above_Tc")),
                    3 / 1000, 1e-15))
    N = 10**6
    for p, k in ((2, 1.0), (3, 1.0), (4, 2.0)):
        r = RegimeInput(p, N, "below_Tc")
        lead = sc_epsilon(r)
        fin = sc_epsilon(r, finite_n=True)
        out.append(_cmp("eq92", f"superconducting below Tc p={p}", lead, k * math.log(N), 1e-12,
                        f"finite-N rel {abs(fin - lead) / lead:.1e}"))
    return out


# criterion 12
def check_properties(cfg: SolverConfig) -> list[Check]:
    out = []
    for name, spec in library():
        A = make_density(spec)
        if A.total_dim > 4096:
            continue
        rep = property_suite(A, cfg)
        bad = [c.name for c in rep.checks.values() if not c.passed]
        worst = max((c.value for k, c in rep.checks.items() if k in ("additive", "local_unitary")), default=0.0)
        out.append(Check("props", f"property suite {name}", rep.passed, worst, 0.0, 1e-8,
                         ("failed: " + ",".join(bad)) if bad else ""))
    return out


# criterion 13
def check_oracles(cfg: SolverConfig, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    ok = True
    for dims in ((2, 2), (3, 2, 2), (2, 3, 4)):
        for _ in range(5):
            d = rng.normal(size=math.prod(dims)) + 1j * rng.normal(size=math.prod(dims))
            A = MultipartiteOperator(dims, np.diag(d))
            ok &= dnorm(A, cfg).value == float(np.max(np.abs(d)))
    out = [_flag("oracle", "dnorm = diagonal maximum (exact)", ok)]
    worst = 0.0
    for _ in range(100):
        da, db = (int(x) for x in rng.integers(2, 5, size=2))
        psi = random_ket((da, db), rng).normalized()
        worst = max(worst, abs(max_product_overlap(psi, cfg, exact=False).value - schmidt_max(psi)))
    out.append(Check("oracle", "max_product_overlap = schmidt_max, 100 kets", worst <= 1e-9, worst, 0.0, 1e-9))
    excess = -math.inf
    for dims in ((2, 2), (2, 2, 2), (2, 3)):
        for _ in range(4):
            A = random_hermitian(dims, rng)
            cert = dnorm(A, cfg)
            if cert.converged:
                excess = max(excess, dnorm_bruteforce(A, samples=4000, seed=int(rng.integers(1 << 30))) - cert.value)
    out.append(Check("oracle", "dnorm_bruteforce <= dnorm + 1e-9", excess <= 1e-9, excess, 0.0, 1e-9))
    return out


GROUPS: dict[str, Callable[..., list[Check]]] = {
    "bipartite": check_bipartite,
    "ghz": check_ghz,
    "multicat": check_multicat,
    "multimode": check_multimode,
    "hartree_fock": check_hartree_fock,
    "hf_reduced": check_hf_reduced,
    "separable": check_separable,
    "mixed_multimode": check_mixed_multimode,
    "ising": check_ising,
    "meanfield": check_meanfield,
    "magnetic": check_magnetic,
    "transitions": check_transitions,
    "properties": check_properties,
    "oracles": check_oracles,
}

CRITERIA = {
    1: "bipartite",
    2: "ghz",
    3: "multicat",
    4: "multimode",
    5: "hartree_fock",
    6: "hf_reduced",
    7: "separable",
    8: "mixed_multimode",
    9: "ising",
    10: "meanfield",
    11: "magnetic",
    12: "properties",
    13: "oracles",
}

# --only filter: reference label -> groups that produce it
KEYS = {
    "eq28": ["bipartite"], "eq31": ["bipartite"], "eq34": ["ghz"], "eq37": ["multicat"], "eq38": ["multicat"],
    "eq41": ["multimode"], "eq42": ["multimode"], "eq45": ["hartree_fock"], "eq47": ["hf_reduced"],
    "eq48": ["hf_reduced"], "sepV": ["separable"], "eq60": ["mixed_multimode"],
    **{f"eq{k}": ["ising"] for k in range(75, 83)}, "eq85": ["meanfield"],
    "eq97": ["magnetic"], "eq99": ["magnetic"], "eq100": ["magnetic"],
    **{f"eq{k}": ["transitions"] for k in (87, 89, 90, 92)}, "props": ["properties"], "oracle": ["oracles"],
}


def run_group(name: str, cfg: SolverConfig | None = None, base="natural") -> list[Check]:
    cfg = cfg or SolverConfig()
    fn = GROUPS[name]
    if name in ("magnetic", "transitions"):
        return fn()
    if name == "ghz":
        return fn(cfg, base)
    if name in ("multimode", "mixed_multimode", "meanfield", "oracles"):
        return fn(cfg, seed=cfg.seed)
    return fn(cfg)


def run_checks(only=None, cfg: SolverConfig | None = None, base="natural") -> list[Check]:
    """Run every check group, or only the rows carrying the labels in ``only``.

    Labels are reference keys (``eq75``, ``props``, ...) or group names
    (``ising``, ``ghz``, ...).
    """
    if not only:
        return [c for g in GROUPS for c in run_group(g, cfg, base)]
    labels = [only] if isinstance(only, str) else list(only)
    unknown = [k for k in labels if k not in KEYS and k not in GROUPS]
    if unknown:
        raise KeyError(f"unknown check label(s): {', '.join(unknown)}")
    groups = []
    for k in labels:
        for g in KEYS.get(k, [k]):
            if g not in groups:
                groups.append(g)
    out = []
    for g in groups:
        whole = g in labels
        out.extend(c for c in run_group(g, cfg, base) if whole or c.key in labels)
    return out
