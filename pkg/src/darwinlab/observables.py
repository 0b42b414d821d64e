"""Expectation values computed by every alternative formula.

The point of this module is redundancy: the photon spin has one value but
many inequivalent-looking expressions (canonical momentum-space form,
momentum-projected form, cross products of either block in either
representation, and the integral of the nonlocal kernel density).  For states
satisfying the transversality constraint all of them must agree; the local
*densities* behind them do not, and the candidates are computed side by side
so the disagreement can be quantified.

Spin and orbital angular momentum are reported in units of hbar.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import kgrid
from .kgrid import k_gradient, momentum_field, to_position
from .state import PhotonState

IMAG_RESIDUE_LIMIT = 1e-8


def _cross_density(f: np.ndarray) -> np.ndarray:
    """-i f* x f per bin; Hermitian form, real up to round-off."""
    return -1j * np.cross(np.conj(f), f)


def _peeled_block(state: PhotonState, block: str, c: float = 1.0) -> np.ndarray:
    """Block amplitude with the free-evolution phase removed.

    Finite differences in k assume a slowly varying amplitude; the dynamical
    phase exp(-i c |k| t) oscillates arbitrarily fast at late times while
    contributing nothing to k x grad_k (its gradient is parallel to k).  It is
    therefore peeled off analytically before any k-derivative is taken.
    """
    if block == "upper":
        f = state.f_upper()
    elif block == "lower":
        f = state.f_lower()
    else:
        raise ValueError(f"block must be 'upper' or 'lower', got {block!r}")
    if state.time != 0.0:
        f = f * np.exp(1j * c * state.grid.kmag * state.time)[..., None]
    return f


def _integrate_vector(density: np.ndarray, measure: float) -> tuple[np.ndarray, float]:
    total = np.sum(density, axis=(0, 1, 2)) * measure
    return total.real, float(np.abs(total.imag).max())


def _spin_canonical(state: PhotonState) -> tuple[np.ndarray, float]:
    d = 0.5 * (_cross_density(state.f_upper()) + _cross_density(state.f_lower()))
    return _integrate_vector(d, state.psi.measure)


def _spin_projected(state: PhotonState) -> tuple[np.ndarray, float]:
    g = state.grid
    d = 0.5 * (_cross_density(state.f_upper()) + _cross_density(state.f_lower()))
    helicity_density = np.sum(g.khat * d, axis=-1)
    return _integrate_vector(helicity_density[..., None] * g.khat, state.psi.measure)


def _spin_cross(state: PhotonState, block: str) -> tuple[np.ndarray, float]:
    f = state.f_upper() if block == "upper" else state.f_lower()
    return _integrate_vector(_cross_density(f), state.psi.measure)


def _spin_position(state: PhotonState, block: str) -> tuple[np.ndarray, float]:
    f = state.f_upper() if block == "upper" else state.f_lower()
    F = to_position(momentum_field(f, state.grid, state.time))
    return _integrate_vector(_cross_density(F.values), F.measure)


def spin_canonical(state: PhotonState) -> np.ndarray:
    """<spin> from the constant block-diagonal spin matrices, momentum space."""
    return _spin_canonical(state)[0]


def spin_projected(state: PhotonState) -> np.ndarray:
    """<spin> from the momentum-projected operator (spin . w) w."""
    return _spin_projected(state)[0]


def spin_cross(state: PhotonState, block: str = "upper") -> np.ndarray:
    """<spin> = -i integral f* x f d3k over a single block."""
    return _spin_cross(state, block)[0]


def spin_position(state: PhotonState, block: str = "upper") -> np.ndarray:
    """<spin> = -i integral F* x F d3x over a single block, position space."""
    return _spin_position(state, block)[0]


def projected_spin_momentum_density(state: PhotonState) -> np.ndarray:
    """(spin . w) applied to psi, bin by bin.

    Multiplying by the direction components w_i and transforming gives the
    three fields entering the nonlocal kernel density."""
    g = state.grid
    f_u = state.psi.values[..., :3]
    f_l = state.psi.values[..., 3:]
    # (sigma . w) f = i w x f
    chi_u = 1j * np.cross(g.khat, f_u)
    chi_l = 1j * np.cross(g.khat, f_l)
    return np.concatenate([chi_u, chi_l], axis=-1)


def nonlocal_spin_density(state: PhotonState) -> tuple[np.ndarray, dict]:
    """Spin density built from the nonlocal momentum-projected operator.

    s_i(x) = Re[ Psi(x)^dag  Phi_i(x) ] with Phi_i the position transform of
    (spin . w) w_i psi.  This realizes the convolution with the singular
    direction-dyadic kernel spectrally, which is exact on the grid.  Its
    integral reproduces the projected-spin expectation; pointwise it is not
    the canonical density, and the diagnostics quantify the gap.
    """
    g = state.grid
    psi_pos = to_position(state.psi)
    chi = projected_spin_momentum_density(state)
    s = np.empty(g.shape + (3,), dtype=np.float64)
    integral = np.empty(3)
    integral_imag = 0.0
    pointwise_imag = 0.0
    for i in range(3):
        phi = to_position(momentum_field(g.khat[..., i, None] * chi, g, state.time))
        dens = np.sum(np.conj(psi_pos.values) * phi.values, axis=-1)
        s[..., i] = dens.real
        total = np.sum(dens) * psi_pos.measure
        integral[i] = total.real
        integral_imag = max(integral_imag, abs(total.imag))
        # the density itself is complex away from the single-mode limit; only
        # its integral is a Hermitian form, so only that must be real
        pointwise_imag = max(pointwise_imag, float(np.abs(dens.imag).max()))

    canonical = canonical_spin_density(state)
    peak = float(np.abs(canonical).max())
    gap = float(np.abs(s - canonical).max() / peak) if peak > 0.0 else 0.0
    diagnostics = {
        "integral": integral,
        "integral_vs_projected": float(
            np.abs(integral - spin_projected(state)).max()
        ),
        "pointwise_gap_vs_canonical": gap,
        "imag_residue": integral_imag,
        "pointwise_imag": pointwise_imag,
    }
    return s, diagnostics


def canonical_spin_density(state: PhotonState) -> np.ndarray:
    """Psi^dag spin Psi in position space (the would-be local density)."""
    psi_pos = to_position(state.psi)
    F_u = np.sqrt(2.0) * psi_pos.values[..., :3]
    F_l = np.sqrt(2.0) * psi_pos.values[..., 3:]
    return 0.5 * (_cross_density(F_u) + _cross_density(F_l)).real


def oam_momentum(state: PhotonState, block: str = "upper", c: float = 1.0) -> np.ndarray:
    """<L> = -i integral f^dag (k x grad_k) f d3k, in units of hbar."""
    g = state.grid
    f = _peeled_block(state, block, c)
    grad = k_gradient(momentum_field(f, g, 0.0))
    acc = np.zeros(3, dtype=np.complex128)
    for comp in range(3):
        gradvec = np.stack([grad.components[a].values[..., comp] for a in range(3)], axis=-1)
        kx = np.cross(g.kvec, gradvec)
        acc += np.sum(np.conj(f[..., comp, None]) * kx, axis=(0, 1, 2))
    total = -1j * acc * g.dk**3
    return total.real


def oam_boundary_ratio(state: PhotonState, block: str = "upper", c: float = 1.0) -> float:
    f = _peeled_block(state, block, c)
    return kgrid.boundary_amplitude_ratio(momentum_field(f, state.grid, 0.0))


def oam_position(state: PhotonState, block: str = "upper") -> np.ndarray:
    """<L> = -i integral F^dag (x x grad) F d3x with an exact spectral gradient."""
    g = state.grid
    f = state.f_upper() if block == "upper" else state.f_lower()
    F = to_position(momentum_field(f, g, state.time))
    grads = kgrid.spectral_gradient(F)
    acc = np.zeros(3, dtype=np.complex128)
    for comp in range(3):
        gradvec = np.stack([grads[a].values[..., comp] for a in range(3)], axis=-1)
        xg = np.cross(g.xvec, gradvec)
        acc += np.sum(np.conj(F.values[..., comp, None]) * xg, axis=(0, 1, 2))
    total = -1j * acc * g.dx**3
    return total.real


def probability(state: PhotonState) -> tuple[float, float, float]:
    """Total probability three ways: |Psi|^2, |F_u|^2 and |F_l|^2 integrals."""
    psi_pos = to_position(state.psi)
    dens_u = np.sum(np.abs(psi_pos.values[..., :3]) ** 2, axis=-1)
    dens_l = np.sum(np.abs(psi_pos.values[..., 3:]) ** 2, axis=-1)
    m = psi_pos.measure
    p_upper = 2.0 * float(np.sum(dens_u)) * m
    p_lower = 2.0 * float(np.sum(dens_l)) * m
    p_psi = float(np.sum(dens_u + dens_l)) * m
    return p_psi, p_upper, p_lower


_SPIN_FORMULAS = (
    "canonical",
    "projected",
    "cross_upper",
    "cross_lower",
    "position_upper",
    "position_lower",
    "kernel_integral",
)


@dataclass(frozen=True)
class ObservableReport:
    """All alternative evaluations side by side, plus their disagreements."""

    spin: dict[str, np.ndarray]
    oam_momentum: np.ndarray
    oam_position: np.ndarray
    total_angular_momentum: np.ndarray
    probability_psi: float
    probability_upper: float
    probability_lower: float
    spin_discrepancies: dict[str, float]
    max_spin_discrepancy: float
    max_probability_discrepancy: float
    oam_formula_gap: float
    boundary_ratio: float
    max_imag_residue: float
    nonlocal_diagnostics: dict = dc_field(default_factory=dict)

    @property
    def imag_flagged(self) -> bool:
        """Hermitian expectation values should be real to round-off."""
        return self.max_imag_residue > IMAG_RESIDUE_LIMIT

    def spin_value(self, name: str) -> np.ndarray:
        return self.spin[name]


def observable_report(state: PhotonState, c: float = 1.0) -> ObservableReport:
    s_nl, nl_diag = nonlocal_spin_density(state)
    pairs = {
        "canonical": _spin_canonical(state),
        "projected": _spin_projected(state),
        "cross_upper": _spin_cross(state, "upper"),
        "cross_lower": _spin_cross(state, "lower"),
        "position_upper": _spin_position(state, "upper"),
        "position_lower": _spin_position(state, "lower"),
        "kernel_integral": (nl_diag["integral"], nl_diag["imag_residue"]),
    }
    spin = {name: value for name, (value, _) in pairs.items()}
    imag_residue = max(res for _, res in pairs.values())
    discrepancies: dict[str, float] = {}
    for i, a in enumerate(_SPIN_FORMULAS):
        for b in _SPIN_FORMULAS[i + 1:]:
            discrepancies[f"{a}|{b}"] = float(np.abs(spin[a] - spin[b]).max())

    L_mom = oam_momentum(state, "upper", c)
    L_pos = oam_position(state, "upper")
    p_psi, p_up, p_low = probability(state)
    probs = (p_psi, p_up, p_low)
    prob_gap = max(abs(x - y) for x in probs for y in probs)

    return ObservableReport(
        spin=spin,
        oam_momentum=L_mom,
        oam_position=L_pos,
        total_angular_momentum=L_mom + spin["canonical"],
        probability_psi=p_psi,
        probability_upper=p_up,
        probability_lower=p_low,
        spin_discrepancies=discrepancies,
        max_spin_discrepancy=max(discrepancies.values()),
        max_probability_discrepancy=prob_gap,
        oam_formula_gap=float(np.abs(L_mom - L_pos).max()),
        boundary_ratio=oam_boundary_ratio(state, "upper", c),
        max_imag_residue=imag_residue,
        nonlocal_diagnostics=nl_diag,
    )


@dataclass(frozen=True)
class DensityCandidates:
    """Competing position-space densities and how far apart they sit.

    Three spin-density candidates (full, upper-block weighted, lower-block
    weighted) plus the nonlocal kernel density; three probability densities.
    Each integrates to the same number; the pointwise gaps are normalized by
    the peak of the reference candidate.
    """

    spin_density_full: np.ndarray      # Psi^dag spin Psi
    spin_density_upper: np.ndarray     # upper-block (1 + gamma0) weighting
    spin_density_lower: np.ndarray     # lower-block (1 - gamma0) weighting
    spin_density_kernel: np.ndarray    # nonlocal kernel density
    prob_density_psi: np.ndarray
    prob_density_upper: np.ndarray
    prob_density_lower: np.ndarray
    spin_integrals: dict[str, np.ndarray]
    prob_integrals: dict[str, float]
    max_spin_integral_spread: float
    max_prob_integral_spread: float
    spin_gap_upper: float
    spin_gap_lower: float
    spin_gap_kernel: float
    prob_gap_upper: float
    prob_gap_lower: float
    imag_residue: float


def density_candidates(state: PhotonState) -> DensityCandidates:
    g = state.grid
    psi_pos = to_position(state.psi)
    F_u = np.sqrt(2.0) * psi_pos.values[..., :3]
    F_l = np.sqrt(2.0) * psi_pos.values[..., 3:]
    m = psi_pos.measure

    cross_u = _cross_density(F_u)
    cross_l = _cross_density(F_l)
    imag_residue = float(max(np.abs(cross_u.imag).max(), np.abs(cross_l.imag).max()))

    spin_full = 0.5 * (cross_u + cross_l).real
    spin_upper = cross_u.real
    spin_lower = cross_l.real
    spin_kernel, nl_diag = nonlocal_spin_density(state)
    imag_residue = max(imag_residue, nl_diag["imag_residue"])

    prob_psi = 0.5 * (np.sum(np.abs(F_u) ** 2, axis=-1) + np.sum(np.abs(F_l) ** 2, axis=-1))
    prob_upper = np.sum(np.abs(F_u) ** 2, axis=-1)
    prob_lower = np.sum(np.abs(F_l) ** 2, axis=-1)

    spin_integrals = {
        "full": np.sum(spin_full, axis=(0, 1, 2)) * m,
        "upper": np.sum(spin_upper, axis=(0, 1, 2)) * m,
        "lower": np.sum(spin_lower, axis=(0, 1, 2)) * m,
        "kernel": np.sum(spin_kernel, axis=(0, 1, 2)) * m,
    }
    prob_integrals = {
        "psi": float(np.sum(prob_psi)) * m,
        "upper": float(np.sum(prob_upper)) * m,
        "lower": float(np.sum(prob_lower)) * m,
    }

    svals = list(spin_integrals.values())
    spin_spread = max(
        float(np.abs(a - b).max()) for a in svals for b in svals
    )
    pvals = list(prob_integrals.values())
    prob_spread = max(abs(a - b) for a in pvals for b in pvals)

    def gap(candidate: np.ndarray, reference: np.ndarray) -> float:
        peak = float(np.abs(reference).max())
        if peak == 0.0:
            return 0.0
        return float(np.abs(candidate - reference).max() / peak)

    return DensityCandidates(
        spin_density_full=spin_full,
        spin_density_upper=spin_upper,
        spin_density_lower=spin_lower,
        spin_density_kernel=spin_kernel,
        prob_density_psi=prob_psi,
        prob_density_upper=prob_upper,
        prob_density_lower=prob_lower,
        spin_integrals=spin_integrals,
        prob_integrals=prob_integrals,
        max_spin_integral_spread=spin_spread,
        max_prob_integral_spread=prob_spread,
        spin_gap_upper=gap(spin_upper, spin_full),
        spin_gap_lower=gap(spin_lower, spin_full),
        spin_gap_kernel=gap(spin_kernel, spin_full),
        prob_gap_upper=gap(prob_upper, prob_psi),
        prob_gap_lower=gap(prob_lower, prob_psi),
        imag_residue=imag_residue,
    )
