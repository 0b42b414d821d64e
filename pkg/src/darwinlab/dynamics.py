"""Time evolution and the residual/conservation suite.

Free evolution is diagonal in momentum space, so it is applied as an exact
per-bin phase exp(-i c |k| t); no time stepping is ever performed.  The
Maxwell-form residual deliberately goes the other way -- a centered
finite-difference time stencil against spectral curls in position space -- to
provide an error signal that is independent of the evolution path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kgrid, observables
from .kgrid import Field, spectral_curl, spectral_divergence, to_position
from .state import PhotonState, transversality_residual
from .units import NATURAL, Units

DEFAULT_DT_FRACTION = 1e-3


def default_maxwell_dt(grid: kgrid.KGrid, units: Units = NATURAL) -> float:
    """Stencil step small against the fastest representable oscillation."""
    return DEFAULT_DT_FRACTION / (units.c * grid.k_max)


def _phase_evolved(state: PhotonState, t: float, units: Units) -> PhotonState:
    if t == 0.0:
        return state
    g = state.grid
    phase = np.exp(-1j * units.c * g.kmag * t)
    psi = Field(state.psi.values * phase[..., None], kgrid.MOMENTUM, g, state.time + t)
    return PhotonState(
        psi=psi,
        norm=kgrid.norm_squared(psi),
        rqc_residual=transversality_residual(psi),
        energy_sign=state.energy_sign,
        scale_factor=state.scale_factor,
    )


def dirac_residual(state: PhotonState, units: Units = NATURAL) -> float:
    """Relative eigenvalue-equation residual, max over occupied bins.

    Per bin: |i c gamma0 (gamma . k) psi - omega psi| / (omega |psi|) with
    omega = c |k|.  Zero for exact positive-energy states, about 2 for the
    negative branch.
    """
    g = state.grid
    f_u = state.psi.values[..., :3]
    f_l = state.psi.values[..., 3:]
    # H psi = hbar c (-k x f_l, k x f_u) on the block split
    h_u = -units.c * np.cross(g.kvec, f_l)
    h_l = units.c * np.cross(g.kvec, f_u)
    omega = units.c * g.kmag
    residual = np.linalg.norm(
        np.concatenate([h_u, h_l], axis=-1) - omega[..., None] * state.psi.values,
        axis=-1,
    )
    amp = np.linalg.norm(state.psi.values, axis=-1)
    peak = float(amp.max())
    if peak == 0.0:
        return 0.0
    mask = (amp > 1e-12 * peak) & (g.kmag > 0.0)
    if not mask.any():
        return 0.0
    return float((residual[mask] / (omega[mask] * amp[mask])).max())


@dataclass(frozen=True)
class CurrentField:
    """Four-current of the wave equation in position space.

    j0 is the pointwise-positive candidate probability density |Psi|^2 times
    c; the spatial components come out real for any state because the
    sandwiched matrices are anti-Hermitian.  No interpretation beyond the
    continuity equation is attached to the spatial part.
    """

    j0: np.ndarray   # (n, n, n) real, >= 0
    j: np.ndarray    # (n, n, n, 3) real
    grid: kgrid.KGrid
    time: float


def four_current(state: PhotonState, units: Units = NATURAL) -> CurrentField:
    """j0 = c Psi^dag Psi and j_a = i c (Psi^dag gamma0 gamma_a Psi).

    On the block split the spatial part reduces to cross products:
    j = 2 c Re(Psi_u* x Psi_l), with Psi_u, Psi_l the (1/sqrt 2)-scaled blocks.
    """
    pos = to_position(state.psi)
    upper = pos.values[..., :3]
    lower = pos.values[..., 3:]
    j0 = units.c * np.sum(np.abs(pos.values) ** 2, axis=-1)
    j = 2.0 * units.c * np.real(np.cross(np.conj(upper), lower))
    return CurrentField(j0=j0, j=j, grid=state.grid, time=state.time)


def continuity_residual(state: PhotonState, dt: float | None = None, units: Units = NATURAL) -> float:
    """Pointwise residual of d(j0/c)/dt + div j = 0, via a centered stencil.

    The time derivative uses the exactly evolved state at t +- dt; the
    divergence is spectral.  O(dt^2), like the Maxwell-form check, provided
    the current's spectrum fits the band: the current is quadratic in the
    amplitudes, so its bandwidth doubles, and states occupying more than half
    the band alias into a dt-independent floor.
    """
    g = state.grid
    if dt is None:
        dt = default_maxwell_dt(g, units)
    before = four_current(_phase_evolved(state, -dt, units), units)
    after = four_current(_phase_evolved(state, +dt, units), units)
    now = four_current(state, units)
    drho_dt = (after.j0 - before.j0) / (2.0 * dt * units.c)
    div_j = kgrid.spectral_divergence(
        kgrid.position_field(now.j.astype(np.complex128), g, state.time)
    ).values[..., 0].real
    scale = float(np.abs(div_j).max())
    if scale == 0.0:
        return 0.0
    return float(np.abs(drho_dt + div_j).max()) / scale


@dataclass(frozen=True)
class MaxwellReport:
    """Residuals of the curl-coupled first-order form in position space."""

    curl_residual: float
    divergence_residual: float
    dt: float

    @property
    def combined(self) -> float:
        return max(self.curl_residual, self.divergence_residual)


def maxwell_residual(state: PhotonState, dt: float | None = None, units: Units = NATURAL) -> MaxwellReport:
    """Check d(F_u)/dt = c curl F_l and d(F_l)/dt = -c curl F_u.

    The time derivative is a centered finite difference of the exactly
    evolved state at t +- dt, so the residual is O(dt^2) and must shrink
    fourfold when dt is halved; the divergence of both blocks is reported
    alongside, normalized by the same curl scale.
    """
    g = state.grid
    if dt is None:
        dt = default_maxwell_dt(g, units)

    def blocks_at(offset: float) -> tuple[np.ndarray, np.ndarray]:
        st = _phase_evolved(state, offset, units)
        pos = to_position(st.psi)
        return (
            np.sqrt(2.0) * pos.values[..., :3],
            np.sqrt(2.0) * pos.values[..., 3:],
        )

    u_minus, l_minus = blocks_at(-dt)
    u_plus, l_plus = blocks_at(+dt)
    u_now, l_now = blocks_at(0.0)

    du_dt = (u_plus - u_minus) / (2.0 * dt)
    dl_dt = (l_plus - l_minus) / (2.0 * dt)

    field_u = kgrid.position_field(u_now, g, state.time)
    field_l = kgrid.position_field(l_now, g, state.time)
    curl_u = spectral_curl(field_u).values
    curl_l = spectral_curl(field_l).values

    scale = max(float(np.abs(units.c * curl_l).max()), float(np.abs(units.c * curl_u).max()))
    if scale == 0.0:
        return MaxwellReport(0.0, 0.0, dt)

    res_u = float(np.abs(du_dt - units.c * curl_l).max()) / scale
    res_l = float(np.abs(dl_dt + units.c * curl_u).max()) / scale

    div_u = float(np.abs(spectral_divergence(field_u).values).max())
    div_l = float(np.abs(spectral_divergence(field_l).values).max())
    div_res = units.c * max(div_u, div_l) / scale

    return MaxwellReport(
        curl_residual=max(res_u, res_l),
        divergence_residual=div_res,
        dt=dt,
    )


@dataclass(frozen=True)
class EvolutionResult:
    state_t: PhotonState
    dirac_residual: float
    maxwell_residual: MaxwellReport
    norm_drift: float


def evolve(state: PhotonState, t: float, units: Units = NATURAL, dt: float | None = None) -> EvolutionResult:
    """Evolve by a time increment t and re-certify the evolved state."""
    evolved = _phase_evolved(state, t, units)
    return EvolutionResult(
        state_t=evolved,
        dirac_residual=dirac_residual(evolved, units),
        maxwell_residual=maxwell_residual(evolved, dt=dt, units=units),
        norm_drift=abs(evolved.norm - state.norm),
    )


@dataclass(frozen=True)
class ConservationReport:
    """Constants of motion sampled at the requested times."""

    times: tuple[float, ...]
    probability: list[float]
    spin: list[np.ndarray]
    oam: list[np.ndarray]
    total_angular_momentum: list[np.ndarray]
    probability_drift: float
    spin_drift: float
    oam_drift: float
    total_drift: float
    transversality_drift: float


def continuity_and_conservation(state: PhotonState, times, units: Units = NATURAL) -> ConservationReport:
    """Track P, <spin>, <L> and <L> + <spin> across a list of times.

    All four are exact constants for positive-energy states; the report
    returns the maximum drift of each relative to the first sampled time.
    """
    times = tuple(float(t) for t in times)
    probs: list[float] = []
    spins: list[np.ndarray] = []
    oams: list[np.ndarray] = []
    totals: list[np.ndarray] = []
    trans: list[float] = []
    for t in times:
        st = _phase_evolved(state, t - state.time, units)
        p_psi, _, _ = observables.probability(st)
        s = observables.spin_canonical(st)
        l = observables.oam_momentum(st, "upper", c=units.c)
        probs.append(p_psi)
        spins.append(s)
        oams.append(l)
        totals.append(l + s)
        trans.append(st.rqc_residual)

    def drift_scalar(values: list[float]) -> float:
        return max(abs(v - values[0]) for v in values)

    def drift_vector(values: list[np.ndarray]) -> float:
        return max(float(np.abs(v - values[0]).max()) for v in values)

    return ConservationReport(
        times=times,
        probability=probs,
        spin=spins,
        oam=oams,
        total_angular_momentum=totals,
        probability_drift=drift_scalar(probs),
        spin_drift=drift_vector(spins),
        oam_drift=drift_vector(oams),
        total_drift=drift_vector(totals),
        transversality_drift=drift_scalar(trans),
    )
