"""Named verification suites run by the command-line ``check`` command.

Each suite is a list of CheckResult rows: a measured number, the tolerance it
was held to, and the verdict.  Matrix-level suites draw their random
wavevectors from a seeded generator so reports are reproducible; the seed is
recorded in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import algebra, dynamics, fieldbridge, observables
from .kgrid import KGrid
from .state import PhotonState, branch_residual
from .units import NATURAL, Units

DEFAULT_SEED = 20320
N_RANDOM_WAVEVECTORS = 100

DEFAULT_TOLERANCES: dict[str, float] = {
    "matrix_identities": 1e-13,
    "spin_spectrum": 1e-13,
    "h_spin_commutator": 1e-13,
    "projected_spin_commutators": 1e-13,
    "transversality": 1e-12,
    "branch_coupling": 1e-12,
    "rqc_projector_identity": 1e-13,
    "spin_equalities": 1e-10,
    "spin_imag_residue": 1e-10,
    # coarse-grid default: the k-stencil error of a vortex resolved by only a
    # few bins exceeds 1%; tighten via overrides for well-resolved states
    "oam_formula_gap": 0.05,
    "probability_equality": 1e-10,
    "density_integral_spread": 1e-10,
    "kernel_density_integral": 1e-10,
    "dirac_residual": 1e-12,
    "maxwell_residual": 1e-6,
    "maxwell_divergence": 1e-12,
    "norm_drift": 1e-13,
    "probability_drift": 1e-10,
    "spin_drift": 1e-10,
    "oam_drift": 1e-10,
    "total_angular_momentum_drift": 1e-10,
    "classical_roundtrip": 1e-10,
    "hermitian_symmetry": 1e-12,
    "real_part_identity": 1e-12,
    "nonlocal_route_gap": 1e-10,
    "kernel_transform": 0.05,
}

SUITE_NAMES = (
    "algebra",
    "constraint",
    "spin-equalities",
    "oam",
    "probability",
    "densities",
    "maxwell",
    "conservation",
    "fieldbridge",
    "kernels",
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float | None
    passed: bool
    info: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, tolerance: float | None, info: str = "") -> None:
        ok = True if tolerance is None else bool(value <= tolerance)
        self.checks.append(CheckResult(name, float(value), tolerance, ok, info))


def _tol(overrides: dict[str, float] | None, key: str) -> float:
    if overrides and key in overrides:
        return float(overrides[key])
    return DEFAULT_TOLERANCES[key]


def _random_wavevectors(rng: np.random.Generator, count: int) -> np.ndarray:
    k = rng.uniform(-2.0, 2.0, size=(count, 3))
    norms = np.linalg.norm(k, axis=1)
    k[norms < 0.3] += np.array([1.0, 0.0, 0.0])
    return k


def suite_algebra(tolerances=None, seed: int = DEFAULT_SEED) -> SuiteReport:
    rep = SuiteReport("algebra")
    rng = np.random.default_rng(seed)

    identities = algebra.verify_matrix_identities()
    rep.add("matrix_identities", max(identities.values()), _tol(tolerances, "matrix_identities"),
            info=", ".join(f"{k}={v:.1e}" for k, v in identities.items()))

    worst_spec = 0.0
    for _ in range(16):
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        spec = algebra.spin_direction_spectrum(n)
        worst_spec = max(worst_spec, float(np.abs(spec - [-1, -1, 0, 0, 1, 1]).max()))
    rep.add("spin_spectrum", worst_spec, _tol(tolerances, "spin_spectrum"))

    ks = _random_wavevectors(rng, N_RANDOM_WAVEVECTORS)
    worst_comm = max(algebra.commutator_h_spin_residual(k) for k in ks)
    rep.add("h_spin_commutator", worst_comm, _tol(tolerances, "h_spin_commutator"))

    worst_proj = 0.0
    for k in ks:
        s = algebra.projected_spin_matrices(k)
        h = algebra.hamiltonian_matrix(k)
        for i in range(3):
            worst_proj = max(worst_proj, float(np.abs(h @ s[i] - s[i] @ h).max()))
            for j in range(i + 1, 3):
                worst_proj = max(worst_proj, float(np.abs(s[i] @ s[j] - s[j] @ s[i]).max()))
    rep.add("projected_spin_commutators", worst_proj, _tol(tolerances, "projected_spin_commutators"))
    return rep


def suite_constraint(state: PhotonState, tolerances=None, seed: int = DEFAULT_SEED) -> SuiteReport:
    rep = SuiteReport("constraint")
    rng = np.random.default_rng(seed)

    rep.add("transversality", state.rqc_residual, _tol(tolerances, "transversality"))
    rep.add("branch_coupling", branch_residual(state), _tol(tolerances, "branch_coupling"))

    worst = 0.0
    for k in _random_wavevectors(rng, N_RANDOM_WAVEVECTORS):
        gk = np.einsum("a,aij->ij", k, algebra.build_gamma_set().gamma)
        proj = algebra.transverse_projector(k)
        k2 = float(k @ k)
        worst = max(worst, float(np.abs((gk @ gk - k2 * np.eye(6)) @ proj).max()) / k2)
    rep.add("rqc_projector_identity", worst, _tol(tolerances, "rqc_projector_identity"))
    return rep


def suite_spin_equalities(state: PhotonState, tolerances=None, units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("spin-equalities")
    report = observables.observable_report(state, c=units.c)
    rep.add("spin_equalities", report.max_spin_discrepancy, _tol(tolerances, "spin_equalities"),
            info="; ".join(f"{k}={np.array2string(v, precision=6)}" for k, v in report.spin.items()))
    rep.add("spin_imag_residue", report.max_imag_residue, _tol(tolerances, "spin_imag_residue"))
    return rep


def suite_oam(state: PhotonState, tolerances=None, units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("oam")
    l_mom = observables.oam_momentum(state, c=units.c)
    l_pos = observables.oam_position(state)
    gap = float(np.abs(l_mom - l_pos).max()) / max(1.0, float(np.abs(l_mom).max()))
    rep.add("oam_formula_gap", gap, _tol(tolerances, "oam_formula_gap"),
            info=f"momentum={np.array2string(l_mom, precision=6)} position={np.array2string(l_pos, precision=6)}")
    ratio = observables.oam_boundary_ratio(state, c=units.c)
    rep.add("oam_boundary_ratio", ratio, None, info="warning only; gradients unreliable above 1e-8")
    return rep


def suite_probability(state: PhotonState, tolerances=None) -> SuiteReport:
    rep = SuiteReport("probability")
    p_psi, p_up, p_low = observables.probability(state)
    spread = max(abs(p_psi - p_up), abs(p_psi - p_low), abs(p_up - p_low))
    rep.add("probability_equality", spread, _tol(tolerances, "probability_equality"),
            info=f"psi={p_psi:.12f} upper={p_up:.12f} lower={p_low:.12f}")
    return rep


def suite_densities(state: PhotonState, tolerances=None) -> SuiteReport:
    rep = SuiteReport("densities")
    dc = observables.density_candidates(state)
    rep.add("density_integral_spread",
            max(dc.max_spin_integral_spread, dc.max_prob_integral_spread),
            _tol(tolerances, "density_integral_spread"))
    _, nl = observables.nonlocal_spin_density(state)
    rep.add("kernel_density_integral", nl["integral_vs_projected"],
            _tol(tolerances, "kernel_density_integral"))
    rep.add("spin_density_gap_upper", dc.spin_gap_upper, None,
            info="normalized pointwise gap; nonzero certifies candidate inequality")
    rep.add("spin_density_gap_lower", dc.spin_gap_lower, None)
    rep.add("spin_density_gap_kernel", dc.spin_gap_kernel, None)
    rep.add("prob_density_gap_upper", dc.prob_gap_upper, None)
    rep.add("prob_density_gap_lower", dc.prob_gap_lower, None)
    return rep


def suite_maxwell(state: PhotonState, tolerances=None, units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("maxwell")
    rep.add("dirac_residual", dynamics.dirac_residual(state, units), _tol(tolerances, "dirac_residual"))
    mr = dynamics.maxwell_residual(state, units=units)
    rep.add("maxwell_residual", mr.curl_residual, _tol(tolerances, "maxwell_residual"),
            info=f"dt={mr.dt:.3e}")
    rep.add("maxwell_divergence", mr.divergence_residual, _tol(tolerances, "maxwell_divergence"))
    return rep


def suite_conservation(state: PhotonState, times=(0.0, 1.0, 10.0), tolerances=None,
                       units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("conservation")
    cons = dynamics.continuity_and_conservation(state, times, units)
    rep.add("probability_drift", cons.probability_drift, _tol(tolerances, "probability_drift"),
            info=f"times={list(cons.times)}")
    rep.add("spin_drift", cons.spin_drift, _tol(tolerances, "spin_drift"))
    rep.add("oam_drift", cons.oam_drift, _tol(tolerances, "oam_drift"))
    rep.add("total_angular_momentum_drift", cons.total_drift,
            _tol(tolerances, "total_angular_momentum_drift"))
    evolved = dynamics.evolve(state, 1.0, units=units)
    rep.add("norm_drift", evolved.norm_drift, _tol(tolerances, "norm_drift"))
    return rep


def suite_fieldbridge(state: PhotonState, tolerances=None, units: Units = NATURAL) -> SuiteReport:
    rep = SuiteReport("fieldbridge")
    pair, cf = fieldbridge.classical_from_state(state, units)
    back = fieldbridge.state_from_classical(cf, units)
    peak = float(np.abs(state.psi.values).max())
    roundtrip = float(np.abs(back.psi.values - state.psi.values).max()) / peak
    rep.add("classical_roundtrip", roundtrip, _tol(tolerances, "classical_roundtrip"))

    herm = max(
        fieldbridge.hermitian_symmetry_residual(cf.eps_k),
        fieldbridge.hermitian_symmetry_residual(cf.eta_k),
    )
    rep.add("hermitian_symmetry", herm, _tol(tolerances, "hermitian_symmetry"))

    nl = fieldbridge.nonlocal_relation_check(cf, units)
    rep.add("real_part_identity", max(nl.e_real_part_residual, nl.h_real_part_residual),
            _tol(tolerances, "real_part_identity"))
    rep.add("nonlocal_route_gap", nl.combined, _tol(tolerances, "nonlocal_route_gap"))
    return rep


def suite_kernels(grid: KGrid, tolerances=None) -> SuiteReport:
    rep = SuiteReport("kernels")
    for kind in fieldbridge.KERNEL_KINDS:
        try:
            result = fieldbridge.kernel_pair_check(kind, grid)
        except ValueError as exc:
            rep.checks.append(CheckResult(f"kernel_{kind}", float("nan"), None, False, str(exc)))
            continue
        rep.add(f"kernel_{kind}", result.max_rel_error, _tol(tolerances, "kernel_transform"),
                info=f"shell=[{result.k_low:.3g},{result.k_high:.3g}] "
                     f"vs_analytic={result.max_rel_error_analytic:.3g} (window-truncation limited)")
    return rep


def run_suites(names, state: PhotonState, tolerances=None, times=(0.0, 1.0, 10.0),
               units: Units = NATURAL, seed: int = DEFAULT_SEED) -> list[SuiteReport]:
    unknown = [n for n in names if n not in SUITE_NAMES]
    if unknown:
        raise ValueError(
            f"unknown suite(s) {unknown}; available: {', '.join(SUITE_NAMES)}"
        )
    reports = []
    for name in names:
        if name == "algebra":
            reports.append(suite_algebra(tolerances, seed))
        elif name == "constraint":
            reports.append(suite_constraint(state, tolerances, seed))
        elif name == "spin-equalities":
            reports.append(suite_spin_equalities(state, tolerances, units))
        elif name == "oam":
            reports.append(suite_oam(state, tolerances, units))
        elif name == "probability":
            reports.append(suite_probability(state, tolerances))
        elif name == "densities":
            reports.append(suite_densities(state, tolerances))
        elif name == "maxwell":
            reports.append(suite_maxwell(state, tolerances, units))
        elif name == "conservation":
            reports.append(suite_conservation(state, times, tolerances, units))
        elif name == "fieldbridge":
            reports.append(suite_fieldbridge(state, tolerances, units))
        elif name == "kernels":
            reports.append(suite_kernels(state.grid, tolerances))
    return reports
