import numpy as np

from darwinlab import ModeSpec, synthesize
from darwinlab.algebra import build_gamma_set
from darwinlab.kgrid import momentum_field, norm_squared
from darwinlab.observables import (
    canonical_spin_density,
    density_candidates,
    nonlocal_spin_density,
    oam_momentum,
    oam_position,
    observable_report,
    probability,
    spin_canonical,
    spin_cross,
    spin_position,
    spin_projected,
)
from darwinlab.state import PhotonState, transversality_residual

GAMMA = build_gamma_set()


def matrix_spin_oracle(state):
    """Independent route: sandwich the dense 6x6 spin matrices per bin."""
    psi = state.psi.values
    out = np.einsum("xyzc,icd,xyzd->i", np.conj(psi), GAMMA.spin, psi) * state.psi.measure
    assert np.abs(out.imag).max() < 1e-12
    return out.real


def matrix_projected_oracle(state):
    """Independent route for the momentum-projected operator (spin . w) w_i."""
    psi = state.psi.values
    g = state.grid
    spin_w = np.einsum("xyza,acd->xyzcd", g.khat, GAMMA.spin)
    scalar = np.einsum("xyzc,xyzcd,xyzd->xyz", np.conj(psi), spin_w, psi)
    out = np.einsum("xyz,xyza->a", scalar, g.khat) * state.psi.measure
    assert np.abs(out.imag).max() < 1e-12
    return out.real


class TestSpinFormulas:
    def test_helicity_plus_about_z(self, g32):
        st = synthesize([ModeSpec(kind="gaussian", k0=(0, 0, 8), sigma_k=8e-3, helicity=1)], g32)
        assert np.abs(spin_canonical(st) - [0, 0, 1]).max() < 1e-6

    def test_helicity_minus_about_z(self, g32):
        # oracle: conjugate mode flips the cross product sign
        st = synthesize([ModeSpec(kind="gaussian", k0=(0, 0, 8), sigma_k=8e-3, helicity=-1)], g32)
        assert np.abs(spin_canonical(st) - [0, 0, -1]).max() < 1e-6

    def test_linear_polarization_is_spinless(self, g32):
        st = synthesize(
            [ModeSpec(kind="gaussian", k0=(0, 0, 8), sigma_k=1.2, helicity=None,
                      polarization=(1, 0, 0))],
            g32,
        )
        assert np.abs(spin_canonical(st)).max() < 1e-10

    def test_matches_matrix_oracle(self, two_direction_state):
        assert np.abs(spin_canonical(two_direction_state)
                      - matrix_spin_oracle(two_direction_state)).max() < 1e-12
        assert np.abs(spin_projected(two_direction_state)
                      - matrix_projected_oracle(two_direction_state)).max() < 1e-12

    def test_projected_equals_canonical_for_constrained(self, two_direction_state):
        gap = np.abs(spin_projected(two_direction_state) - spin_canonical(two_direction_state))
        assert gap.max() < 1e-10

    def test_unprojected_state_shows_discrepancy(self, g16, rng):
        vals = rng.normal(size=g16.shape + (6,)) + 1j * rng.normal(size=g16.shape + (6,))
        vals[0, 0, 0] = 0.0
        psi = momentum_field(vals / np.sqrt(norm_squared(momentum_field(vals, g16))), g16)
        st = PhotonState(psi=psi, norm=1.0, rqc_residual=transversality_residual(psi))
        gap = np.abs(spin_projected(st) - spin_canonical(st)).max()
        assert gap > 1e-3

    def test_diagonal_axis_spin_along_beam(self, g32):
        # helicity about a diagonal axis: <spin> parallel to the beam within
        # the spread-induced tolerance
        k0 = 8.0 * np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
        st = synthesize([ModeSpec(kind="gaussian", k0=tuple(k0), sigma_k=0.8, helicity=1)], g32)
        s = spin_projected(st)
        axis = k0 / np.linalg.norm(k0)
        transverse = s - (s @ axis) * axis
        assert s @ axis > 0.95
        assert np.linalg.norm(transverse) < 0.05

    def test_cross_blocks_agree(self, two_direction_state):
        up = spin_cross(two_direction_state, "upper")
        low = spin_cross(two_direction_state, "lower")
        assert np.abs(up - low).max() < 1e-10
        assert np.abs(up - spin_canonical(two_direction_state)).max() < 1e-10

    def test_real_amplitudes_have_no_spin(self, g16):
        vals = np.zeros(g16.shape + (6,), dtype=complex)
        vals[2, 3, 4, 1] = 0.7  # single real entry
        psi = momentum_field(vals, g16)
        st = PhotonState(psi=psi, norm=norm_squared(psi), rqc_residual=0.0)
        assert np.abs(spin_cross(st, "upper")).max() == 0.0

    def test_position_space_formulas(self, two_direction_state):
        for block in ("upper", "lower"):
            gap = np.abs(spin_position(two_direction_state, block)
                         - spin_cross(two_direction_state, block))
            assert gap.max() < 1e-10

    def test_two_plane_wave_frozen_values(self, g16):
        # brute-force hand computation: two single bins, equal weight,
        # helicity +1 along z and -1 along x -> spin (-1/2, 0, +1/2)
        st = synthesize(
            [
                ModeSpec(kind="plane", k0=(0, 0, 3), helicity=1),
                ModeSpec(kind="plane", k0=(3, 0, 0), helicity=-1),
            ],
            g16,
        )
        expect = np.array([-0.5, 0.0, 0.5])
        rep = observable_report(st)
        for name, value in rep.spin.items():
            assert np.abs(value - expect).max() < 1e-12, name
        # isolated bins have vanishing finite-difference gradients
        assert np.abs(rep.oam_momentum).max() < 1e-12

    def test_seven_way_equality(self, two_direction_state):
        rep = observable_report(two_direction_state)
        assert rep.max_spin_discrepancy < 1e-10
        assert rep.max_imag_residue < 1e-10


class TestOam:
    def ring(self, grid, charge, helicity=None, polarization=(1, 0, 0)):
        return synthesize(
            [ModeSpec(kind="vortex", k0=(0, 0, 7), sigma_k=1.6, helicity=helicity,
                      polarization=polarization, vortex_charge=charge, ring_radius=7.0)],
            grid,
        )

    def test_charge_sets_axial_oam(self, g32):
        # oracle: the azimuthal phase gradient contributes exactly charge
        # units per quantum of norm; remaining error is the k-stencil
        for charge in (-1, 2):
            st = self.ring(g32, charge)
            assert abs(oam_momentum(st)[2] - charge) < 0.06 * max(1, abs(charge))
            assert abs(oam_position(st)[2] - charge) < 1e-6

    def test_centered_gaussian_has_no_oam(self, g32):
        st = synthesize(
            [ModeSpec(kind="gaussian", k0=(0, 0, 8), sigma_k=1.2, helicity=None,
                      polarization=(1, 0, 0))],
            g32,
        )
        assert np.abs(oam_momentum(st)).max() < 1e-8

    def test_total_angular_momentum(self, g32):
        # sum of independent oracles: J_z = charge + helicity
        for charge, hel in ((2, 1), (-1, 1)):
            st = self.ring(g32, charge, helicity=hel, polarization=None)
            jz = oam_position(st)[2] + spin_canonical(st)[2]
            assert abs(jz - (charge + hel)) < 1e-6

    def test_momentum_position_agreement(self, g32):
        # coarse-grid smoke level; the 1% claims run on n=64 in acceptance
        st = self.ring(g32, 2)
        gap = abs(oam_momentum(st)[2] - oam_position(st)[2])
        assert gap < 0.12


class TestProbability:
    def test_normalized_triple(self, two_direction_state):
        p = probability(two_direction_state)
        assert np.abs(np.array(p) - 1.0).max() < 1e-10

    def test_momentum_block_norm_equality(self, two_direction_state):
        dk3 = two_direction_state.psi.measure
        nu = np.sum(np.abs(two_direction_state.f_upper()) ** 2) * dk3
        nl = np.sum(np.abs(two_direction_state.f_lower()) ** 2) * dk3
        assert abs(nu - nl) < 1e-12

    def test_quadratic_scaling(self, helicity_state):
        psi = momentum_field(2.0 * helicity_state.psi.values, helicity_state.grid)
        st = PhotonState(psi=psi, norm=norm_squared(psi), rqc_residual=0.0)
        p = probability(st)
        assert np.abs(np.array(p) - 4.0).max() < 1e-9


class TestDensities:
    def test_two_mode_candidates_disagree_pointwise(self, two_direction_state):
        dc = density_candidates(two_direction_state)
        assert dc.spin_gap_upper > 0.05
        assert dc.spin_gap_lower > 0.05
        assert dc.prob_gap_upper > 0.05
        assert dc.prob_gap_lower > 0.05
        assert dc.max_spin_integral_spread < 1e-10
        assert dc.max_prob_integral_spread < 1e-10
        assert dc.imag_residue < 1e-10

    def test_single_mode_candidates_nearly_agree(self, helicity_state):
        # single-beam limit: upper and lower densities become proportional
        dc = density_candidates(helicity_state)
        assert dc.spin_gap_upper < 0.02
        assert dc.prob_gap_upper < 0.02

    def test_probability_density_identities(self, two_direction_state):
        dc = density_candidates(two_direction_state)
        # psi-density is the mean of the block densities by construction
        mean = 0.5 * (dc.prob_density_upper + dc.prob_density_lower)
        assert np.abs(dc.prob_density_psi - mean).max() < 1e-14
        assert dc.prob_density_psi.min() >= 0.0


class TestNonlocalDensity:
    def test_integral_matches_projected_spin(self, two_direction_state):
        s, diag = nonlocal_spin_density(two_direction_state)
        assert diag["integral_vs_projected"] < 1e-10
        assert diag["imag_residue"] < 1e-10

    def test_two_mode_kernel_density_deviates(self, two_direction_state):
        _, diag = nonlocal_spin_density(two_direction_state)
        assert diag["pointwise_gap_vs_canonical"] > 0.05

    def test_single_mode_kernel_density_close(self, g32):
        # narrow single mode: kernel density approaches helicity * |Psi|^2
        st = synthesize([ModeSpec(kind="gaussian", k0=(0, 0, 8), sigma_k=0.5, helicity=1)], g32)
        s, diag = nonlocal_spin_density(st)
        assert diag["pointwise_gap_vs_canonical"] < 0.05
        dens = canonical_spin_density(st)
        prob = density_candidates(st).prob_density_psi
        assert np.abs(dens[..., 2] - prob).max() < 0.05 * prob.max()
