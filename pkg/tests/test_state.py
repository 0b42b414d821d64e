import numpy as np
import pytest

from darwinlab import ModeSpec, synthesize
from darwinlab.algebra import helicity_vectors
from darwinlab.kgrid import momentum_field, norm_squared, to_position
from darwinlab.state import (
    PhotonState,
    branch_residual,
    normalize,
    project_positive_energy,
    project_transverse,
    transversality_residual,
)


def manual_state(grid, f_upper, f_lower, energy_sign=1):
    psi = momentum_field(np.concatenate([f_upper, f_lower], axis=-1) / np.sqrt(2.0), grid)
    return PhotonState(
        psi=psi,
        norm=norm_squared(psi),
        rqc_residual=transversality_residual(psi),
        energy_sign=energy_sign,
    )


def branch_state(grid, sign, k0=(0, 0, 8), sigma=1.2):
    """Gaussian helicity state placed by hand on either energy branch."""
    k0 = np.asarray(k0, dtype=float)
    env = np.exp(-np.sum((grid.kvec - k0) ** 2, axis=-1) / (2 * sigma**2))
    pol = helicity_vectors(k0 / np.linalg.norm(k0))[0]
    f_u = env[..., None] * pol
    f_u -= np.sum(grid.khat * f_u, axis=-1)[..., None] * grid.khat
    f_u[grid.dc_index] = 0.0
    f_l = sign * np.cross(grid.khat, f_u)
    return manual_state(grid, f_u, f_l, energy_sign=sign)


class TestModeSpec:
    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            ModeSpec(kind="bessel", k0=(0, 0, 1))

    def test_rejects_zero_center(self):
        with pytest.raises(ValueError, match="nonzero"):
            ModeSpec(kind="gaussian", k0=(0, 0, 0), sigma_k=1.0)

    def test_rejects_missing_width(self):
        with pytest.raises(ValueError, match="sigma_k"):
            ModeSpec(kind="gaussian", k0=(0, 0, 1))

    def test_rejects_bad_helicity(self):
        with pytest.raises(ValueError, match="helicity"):
            ModeSpec(kind="gaussian", k0=(0, 0, 1), sigma_k=1.0, helicity=2)

    def test_linear_needs_polarization(self):
        with pytest.raises(ValueError, match="polarization"):
            ModeSpec(kind="gaussian", k0=(0, 0, 1), sigma_k=1.0, helicity=None)


class TestSynthesize:
    def test_helicity_coupling_on_axis(self, g32):
        # hand evaluation: at the center bin w = z and f_l = z x e+ = -i e+
        st = synthesize([ModeSpec(kind="gaussian", k0=(0, 0, 8), sigma_k=1.2, helicity=1)], g32)
        idx = (0, 0, 8)
        fu = st.f_upper()[idx]
        fl = st.f_lower()[idx]
        assert np.abs(fl + 1j * fu).max() < 1e-13 * np.abs(fu).max()

    def test_normalized_and_constrained(self, helicity_state):
        assert helicity_state.norm == pytest.approx(1.0, abs=1e-13)
        assert helicity_state.rqc_residual < 1e-12
        assert branch_residual(helicity_state) < 1e-12

    def test_superposition_normalizes(self, two_direction_state):
        assert two_direction_state.norm == pytest.approx(1.0, abs=1e-13)

    def test_vortex_transversality(self, g32):
        st = synthesize(
            [ModeSpec(kind="vortex", k0=(0, 0, 8), sigma_k=1.2, helicity=1, vortex_charge=1)],
            g32,
        )
        assert st.rqc_residual < 1e-12

    def test_plane_mode_single_bin(self, g16):
        st = synthesize([ModeSpec(kind="plane", k0=(0, 0, 3), helicity=1)], g16)
        amp = np.linalg.norm(st.psi.values, axis=-1)
        assert np.count_nonzero(amp) == 1
        assert amp[0, 0, 3] > 0.0

    def test_out_of_band_spectrum_rejected(self, g16):
        # center far outside the resolvable band: envelope underflows to zero
        with pytest.raises(ValueError, match="zero"):
            synthesize([ModeSpec(kind="gaussian", k0=(0, 0, 500.0), sigma_k=1.0, helicity=1)], g16)

    def test_dc_bin_zero(self, two_direction_state):
        assert np.abs(two_direction_state.psi.values[0, 0, 0]).max() == 0.0

    def test_block_moduli_match(self, two_direction_state):
        # |f_u| = |f_l| per bin follows from the unit-norm coupling direction
        fu = np.linalg.norm(two_direction_state.f_upper(), axis=-1)
        fl = np.linalg.norm(two_direction_state.f_lower(), axis=-1)
        assert np.abs(fu - fl).max() < 1e-12 * fu.max()


class TestProjectTransverse:
    def test_fixed_point(self, helicity_state):
        again = project_transverse(helicity_state)
        dev = np.abs(again.psi.values - helicity_state.psi.values).max()
        assert dev < 1e-14

    def test_removes_longitudinal(self, g16, rng):
        vals = rng.normal(size=g16.shape + (6,)) + 1j * rng.normal(size=g16.shape + (6,))
        psi = momentum_field(vals, g16)
        st = PhotonState(psi=psi, norm=norm_squared(psi), rqc_residual=transversality_residual(psi))
        assert st.rqc_residual > 0.1  # random data is far from transverse
        projected = project_transverse(st)
        assert projected.rqc_residual < 1e-13

    def test_pure_longitudinal_annihilated(self, g16):
        f_u = g16.khat.astype(complex)
        st = manual_state(g16, f_u, np.zeros_like(f_u))
        projected = project_transverse(st)
        assert projected.norm < 1e-28
        with pytest.raises(ValueError, match="zero-norm"):
            normalize(projected)


class TestProjectPositiveEnergy:
    def test_synthesized_state_is_fixed_point(self, helicity_state):
        proj = project_positive_energy(helicity_state)
        dev = np.abs(proj.psi.values - helicity_state.psi.values).max()
        assert dev < 1e-12

    def test_negative_branch_annihilated(self, g32):
        # oracle: the branches are orthogonal eigenspaces
        neg = branch_state(g32, -1)
        proj = project_positive_energy(neg)
        assert proj.norm < 1e-24 * neg.norm

    def test_equal_mixture_norm_halves(self, g32):
        pos = branch_state(g32, +1)
        neg = branch_state(g32, -1)
        mix_vals = (pos.psi.values + neg.psi.values) / np.sqrt(2.0)
        psi = momentum_field(mix_vals, g32)
        mix = PhotonState(psi=psi, norm=norm_squared(psi), rqc_residual=0.0)
        proj = project_positive_energy(mix)
        assert proj.norm == pytest.approx(mix.norm / 2.0, rel=1e-12)

    def test_commutes_with_transverse_projection(self, g16, rng):
        vals = rng.normal(size=g16.shape + (6,)) + 1j * rng.normal(size=g16.shape + (6,))
        psi = momentum_field(vals, g16)
        st = PhotonState(psi=psi, norm=norm_squared(psi), rqc_residual=transversality_residual(psi))
        a = project_transverse(project_positive_energy(st))
        b = project_positive_energy(project_transverse(st))
        assert np.abs(a.psi.values - b.psi.values).max() < 1e-12 * np.abs(a.psi.values).max()

    def test_projected_state_satisfies_coupling(self, g16, rng):
        vals = rng.normal(size=g16.shape + (6,)) + 1j * rng.normal(size=g16.shape + (6,))
        psi = momentum_field(vals, g16)
        st = PhotonState(psi=psi, norm=norm_squared(psi), rqc_residual=transversality_residual(psi))
        proj = project_positive_energy(st)
        assert branch_residual(proj) < 1e-12
        assert proj.rqc_residual < 1e-12


class TestNormalize:
    def test_scaling_invariance(self, helicity_state):
        scaled_vals = 3.0 * helicity_state.psi.values
        psi = momentum_field(scaled_vals, helicity_state.grid)
        st = PhotonState(psi=psi, norm=norm_squared(psi), rqc_residual=helicity_state.rqc_residual)
        back = normalize(st)
        assert np.abs(back.psi.values - helicity_state.psi.values).max() < 1e-14
        assert back.scale_factor == pytest.approx(3.0, rel=1e-12)

    def test_unit_norm(self, two_direction_state):
        assert two_direction_state.norm == pytest.approx(1.0, abs=1e-13)

    def test_position_space_norm_matches(self, helicity_state):
        # oracle: Parseval ties both representations together
        pos = to_position(helicity_state.psi)
        assert norm_squared(pos) == pytest.approx(1.0, abs=1e-12)
