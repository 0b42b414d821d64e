"""Discrete momentum grid and the Fourier contract between representations.

Conventions (fixed once, everything downstream depends on them):

* momentum -> position uses the +i k.x kernel with (2 pi)^(-3/2) prefactor,
  position -> momentum the -i k.x kernel;
* bins are laid out in standard FFT order, the k = 0 (DC) bin sits at array
  index (0, 0, 0), signed frequencies run over -n/2 .. n/2 - 1;
* the continuum measures d3k and d3x become the bin volumes dk^3 and dx^3,
  with dx = 2 pi / (n dk), which makes the discrete Parseval identity exact;
* the dual position grid uses signed coordinates, so position bins cover
  [-L/2, L/2) with L = 2 pi / dk.

Gradients with respect to k are centered finite differences (the amplitudes
are not periodic in k, so an FFT-based derivative would alias); spatial
derivatives are exact spectral multiplications by i k.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

ArrayC = NDArray[np.complex128]
ArrayR = NDArray[np.float64]

MOMENTUM = "momentum"
POSITION = "position"

_FT_NORM = (2.0 * np.pi) ** 1.5


@dataclass(frozen=True)
class KGrid:
    """Uniform Cartesian momentum grid, n bins per axis with spacing dk."""

    n: int
    dk: float

    def __post_init__(self) -> None:
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        if not (self.dk > 0.0):
            raise ValueError(f"grid spacing must be positive, got {self.dk}")

    @property
    def box_length(self) -> float:
        return 2.0 * np.pi / self.dk

    @property
    def dx(self) -> float:
        return self.box_length / self.n

    @property
    def k_nyquist(self) -> float:
        return 0.5 * self.n * self.dk

    @property
    def k_max(self) -> float:
        """Largest |k| representable on the grid (box corner)."""
        return np.sqrt(3.0) * self.k_nyquist

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @cached_property
    def signed_index(self) -> NDArray[np.int64]:
        return np.rint(np.fft.fftfreq(self.n) * self.n).astype(np.int64)

    @cached_property
    def k1d(self) -> ArrayR:
        return self.signed_index * self.dk

    @cached_property
    def x1d(self) -> ArrayR:
        return self.signed_index * self.dx

    @cached_property
    def kvec(self) -> ArrayR:
        kx, ky, kz = np.meshgrid(self.k1d, self.k1d, self.k1d, indexing="ij")
        return np.stack([kx, ky, kz], axis=-1)

    @cached_property
    def xvec(self) -> ArrayR:
        x, y, z = np.meshgrid(self.x1d, self.x1d, self.x1d, indexing="ij")
        return np.stack([x, y, z], axis=-1)

    @cached_property
    def kmag(self) -> ArrayR:
        return np.linalg.norm(self.kvec, axis=-1)

    @cached_property
    def khat(self) -> ArrayR:
        """Unit momentum direction per bin; zero at the DC bin."""
        safe = np.where(self.kmag > 0.0, self.kmag, 1.0)
        w = self.kvec / safe[..., None]
        w[0, 0, 0, :] = 0.0
        return w

    @cached_property
    def rmag(self) -> ArrayR:
        return np.linalg.norm(self.xvec, axis=-1)

    @property
    def dc_index(self) -> tuple[int, int, int]:
        return (0, 0, 0)


def reverse_bins(values: np.ndarray) -> np.ndarray:
    """Map bin (i, j, l) to (-i, -j, -l) mod n over the first three axes."""
    out = values
    for axis in range(3):
        out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return out


@dataclass(frozen=True)
class Field:
    """Complex multi-component amplitude field over a grid.

    ``values`` has shape (n, n, n, c) with c in {1, 3, 6}; ``rep`` tags the
    representation the bins live in.  Fields are immutable values: every
    operation returns a new Field.
    """

    values: ArrayC
    rep: str
    grid: KGrid
    time: float = 0.0

    def __post_init__(self) -> None:
        if self.rep not in (MOMENTUM, POSITION):
            raise ValueError(f"unknown representation {self.rep!r}")
        expect = self.grid.shape
        v = self.values
        if v.ndim != 4 or v.shape[:3] != expect or v.shape[3] not in (1, 3, 6):
            raise ValueError(
                f"field values must have shape (n, n, n, c) with c in (1, 3, 6); got {v.shape}"
            )
        if not np.isfinite(v).all():
            raise ValueError("field contains non-finite entries")

    @property
    def ncomp(self) -> int:
        return self.values.shape[3]

    @property
    def measure(self) -> float:
        return self.grid.dk**3 if self.rep == MOMENTUM else self.grid.dx**3


def momentum_field(values, grid: KGrid, time: float = 0.0) -> Field:
    return Field(np.asarray(values, dtype=np.complex128), MOMENTUM, grid, time)


def position_field(values, grid: KGrid, time: float = 0.0) -> Field:
    return Field(np.asarray(values, dtype=np.complex128), POSITION, grid, time)


def _require(field: Field, rep: str) -> None:
    if field.rep != rep:
        raise ValueError(f"expected a {rep}-representation field, got {field.rep}")


def to_position(field: Field) -> Field:
    """Transform momentum amplitudes to the position representation."""
    _require(field, MOMENTUM)
    g = field.grid
    scale = g.n**3 * g.dk**3 / _FT_NORM
    values = np.fft.ifftn(field.values, axes=(0, 1, 2)) * scale
    return Field(values, POSITION, g, field.time)


def to_momentum(field: Field) -> Field:
    """Inverse of :func:`to_position` (the -i k.x kernel)."""
    _require(field, POSITION)
    g = field.grid
    scale = g.dx**3 / _FT_NORM
    values = np.fft.fftn(field.values, axes=(0, 1, 2)) * scale
    return Field(values, MOMENTUM, g, field.time)


def norm_squared(field: Field) -> float:
    return float(np.sum(np.abs(field.values) ** 2)) * field.measure


def inner(a: Field, b: Field) -> complex:
    """Grid inner product <a|b> including the bin-volume measure."""
    if a.rep != b.rep or a.grid is not b.grid and a.grid != b.grid:
        raise ValueError("inner product requires matching grids and representations")
    return complex(np.sum(np.conj(a.values) * b.values) * a.measure)


def boundary_amplitude_ratio(field: Field) -> float:
    """Max |field| on the outermost bin shell divided by the global max."""
    mags = np.linalg.norm(field.values, axis=-1)
    peak = float(mags.max())
    if peak == 0.0:
        return 0.0
    shifted = np.fft.fftshift(mags)
    edge = 0.0
    for axis in range(3):
        lead = np.take(shifted, 0, axis=axis)
        trail = np.take(shifted, -1, axis=axis)
        edge = max(edge, float(lead.max()), float(trail.max()))
    return edge / peak


BOUNDARY_DECAY_LIMIT = 1e-8


@dataclass(frozen=True)
class KGradient:
    """Result of a finite-difference k-gradient."""

    components: tuple[Field, Field, Field]
    boundary_ratio: float

    @property
    def boundary_decayed(self) -> bool:
        return self.boundary_ratio <= BOUNDARY_DECAY_LIMIT


def k_gradient(field: Field) -> KGradient:
    """Centered finite-difference gradient along the three k-axes.

    The array is unwrapped to monotonically ordered frequencies before
    differencing, so stencils never straddle the Nyquist wrap; the boundary
    bins use one-sided second-order differences.  The result records how well
    the amplitude has decayed at the grid boundary, where the one-sided
    stencils (and the non-periodicity of the data) make the derivative
    unreliable.
    """
    _require(field, MOMENTUM)
    g = field.grid
    ratio = boundary_amplitude_ratio(field)
    shifted = np.fft.fftshift(field.values, axes=(0, 1, 2))
    comps = []
    for axis in range(3):
        d = np.gradient(shifted, g.dk, axis=axis, edge_order=2)
        comps.append(Field(np.fft.ifftshift(d, axes=(0, 1, 2)), MOMENTUM, g, field.time))
    return KGradient(components=(comps[0], comps[1], comps[2]), boundary_ratio=ratio)


def spectral_gradient(field: Field) -> tuple[Field, Field, Field]:
    """Exact spatial gradient of a position field, one Field per axis."""
    _require(field, POSITION)
    f = to_momentum(field)
    g = field.grid
    out = []
    for axis in range(3):
        mult = 1j * g.kvec[..., axis, None]
        out.append(to_position(Field(mult * f.values, MOMENTUM, g, field.time)))
    return out[0], out[1], out[2]


def spectral_curl(field: Field) -> Field:
    """Curl of a 3-component position field via i k x (.) in momentum space."""
    _require(field, POSITION)
    if field.ncomp != 3:
        raise ValueError("curl requires a 3-component field")
    f = to_momentum(field)
    curled = 1j * np.cross(field.grid.kvec, f.values)
    return to_position(Field(curled, MOMENTUM, field.grid, field.time))


def spectral_divergence(field: Field) -> Field:
    """Divergence of a 3-component position field, returned as a scalar field."""
    _require(field, POSITION)
    if field.ncomp != 3:
        raise ValueError("divergence requires a 3-component field")
    f = to_momentum(field)
    div = 1j * np.sum(field.grid.kvec * f.values, axis=-1)
    return to_position(Field(div[..., None], MOMENTUM, field.grid, field.time))
