"""Array geometry, physical constants and admittance-block assembly.

All admittances relate magnetic voltages (amperes) to magnetic currents
(volts), so magnitudes are in the tens of siemens at 10 GHz.  Ports are
z-oriented magnetic dipoles lying in the plane x = 0 on top of a PEC
ground plane; waveguides run along z and are stacked along y.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import epsilon_0


class Architecture(str, enum.Enum):
    FULL_DIGITAL = "fd"
    HYBRID = "hybrid"
    DMA = "dma"


class CouplingMode(str, enum.Enum):
    """Element-coupling ablations used when *designing* a DMA precoder."""

    FULL = "full"
    NO_AIR = "no_air"
    NO_COUPLING = "no_coupling"


class UserSpacing(str, enum.Enum):
    #: free-space dipoles, self-admittance k*w*eps/(6*pi)
    FREE_SPACE = "free_space"
    #: dipoles over a ground plane, self-admittance k*w*eps/(3*pi)
    GROUND_PLANE = "ground_plane"


class DegenerateGeometryError(ValueError):
    """Two ports share a location, so the mutual admittance is singular."""


@dataclass(frozen=True)
class PhysicalConstants:
    frequency: float = 10e9
    permittivity: float = epsilon_0
    characteristic_admittance: float = 35.33

    def __post_init__(self):
        if self.frequency <= 0 or self.permittivity <= 0 or self.characteristic_admittance <= 0:
            raise ValueError("physical constants must be strictly positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def wavenumber(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def angular_frequency(self) -> float:
        return 2 * np.pi * self.frequency

    @property
    def dipole_self_admittance(self) -> float:
        """Radiation admittance k*w*eps/(3*pi) of a dipole over the ground plane."""
        k, w, eps = self.wavenumber, self.angular_frequency, self.permittivity
        return k * w * eps / (3 * np.pi)


@dataclass(frozen=True)
class ArrayGeometry:
    """Port layout of the base station.

    For a DMA, ``element_guide[l]`` names the waveguide feeding element ``l``
    and ``element_positions[l, 2]`` is its distance from the feed.  For FD and
    hybrid arrays the same fields describe a rectangular antenna grid and
    ``waveguide_count`` is just the number of rows.
    """

    architecture: Architecture
    waveguide_count: int
    elements_per_waveguide: int
    element_positions: np.ndarray
    element_guide: np.ndarray
    waveguide_width: float
    waveguide_height: float
    element_spacing: float
    waveguide_spacing: float
    waveguide_length: float

    def __post_init__(self):
        if self.element_spacing <= 0 or self.waveguide_spacing <= 0:
            raise ValueError("spacings must be positive")
        pos = np.asarray(self.element_positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError("element_positions must be an (L, 3) array")
        if len(pos) != self.waveguide_count * self.elements_per_waveguide:
            raise ValueError("element count must equal waveguides x elements per waveguide")
        guide = np.asarray(self.element_guide, dtype=int)
        if guide.shape != (len(pos),):
            raise ValueError("element_guide must have one entry per element")
        for n in range(self.waveguide_count):
            z = pos[guide == n, 2]
            if np.any(np.diff(z) <= 0):
                raise ValueError(f"element positions along waveguide {n} must be strictly increasing")
        pos.setflags(write=False)
        guide.setflags(write=False)
        object.__setattr__(self, "element_positions", pos)
        object.__setattr__(self, "element_guide", guide)

    @property
    def element_count(self) -> int:
        return len(self.element_positions)

    @property
    def port_count(self) -> int:
        """Transmit-side ports seen by the wireless channel."""
        return self.element_count

    @property
    def rf_chains(self) -> int:
        if self.architecture == Architecture.FULL_DIGITAL:
            return self.element_count
        return self.waveguide_count


def planar_array(
    architecture: Architecture | str,
    waveguide_count: int,
    elements_per_waveguide: int,
    constants: PhysicalConstants,
    element_spacing_wl: float = 0.5,
    waveguide_spacing_wl: float = 1.0,
    width_wl: float = 0.73,
    height_wl: float = 0.167,
) -> ArrayGeometry:
    """Rectangular layout: element ``i`` of guide ``n`` sits at
    ``(0, n * waveguide_spacing, (i + 1/2) * element_spacing)``."""
    lam = constants.wavelength
    dz = element_spacing_wl * lam
    dy = waveguide_spacing_wl * lam
    n_idx, i_idx = np.meshgrid(np.arange(waveguide_count), np.arange(elements_per_waveguide), indexing="ij")
    n_idx, i_idx = n_idx.ravel(), i_idx.ravel()
    positions = np.column_stack([np.zeros(n_idx.size), n_idx * dy, (i_idx + 0.5) * dz])
    return ArrayGeometry(
        architecture=Architecture(architecture),
        waveguide_count=waveguide_count,
        elements_per_waveguide=elements_per_waveguide,
        element_positions=positions,
        element_guide=n_idx,
        waveguide_width=width_wl * lam,
        waveguide_height=height_wl * lam,
        element_spacing=dz,
        waveguide_spacing=dy,
        waveguide_length=elements_per_waveguide * dz,
    )


def _pairwise_offsets(points_a, points_b):
    diff = points_a[:, None, :] - points_b[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    return diff, dist


class FreeSpaceDipoleCoupling:
    """Mutual admittance between z-oriented magnetic dipoles over a PEC plane.

    Off-diagonal entries are ``j*2*w*eps*G_zz(r, r')`` with the zz component of
    the free-space dyadic Green's function (time convention exp(+jwt), so
    waves go as exp(-jkR)).  The image in the ground plane accounts for the
    factor 2.  The self-term is the real radiation admittance k*w*eps/(3*pi),
    which is also the R -> 0 limit of the real part of the mutual term.
    """

    def __init__(self, constants: PhysicalConstants):
        self.constants = constants

    def green_zz(self, diff: np.ndarray, dist: np.ndarray) -> np.ndarray:
        k = self.constants.wavenumber
        kr = k * dist
        cos2 = (diff[..., 2] / dist) ** 2
        transverse = 1 - 1j / kr - 1 / kr**2
        radial = -1 + 3j / kr + 3 / kr**2
        return np.exp(-1j * kr) / (4 * np.pi * dist) * (transverse + cos2 * radial)

    def mutual(self, r1, r2) -> complex:
        diff = np.asarray(r1, float) - np.asarray(r2, float)
        dist = np.linalg.norm(diff)
        if dist == 0:
            raise DegenerateGeometryError("coincident ports")
        w, eps = self.constants.angular_frequency, self.constants.permittivity
        return complex(2j * w * eps * self.green_zz(diff, dist))

    def self_term(self) -> float:
        return self.constants.dipole_self_admittance

    def matrix(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, float)
        diff, dist = _pairwise_offsets(points, points)
        off = ~np.eye(len(points), dtype=bool)
        if np.any(dist[off] == 0):
            raise DegenerateGeometryError("coincident ports in array")
        w, eps = self.constants.angular_frequency, self.constants.permittivity
        Y = np.empty(dist.shape, dtype=complex)
        Y[off] = 2j * w * eps * self.green_zz(diff[off], dist[off])
        Y[~off] = self.self_term()
        return (Y + Y.T) / 2


class WaveguideTE10Coupling:
    """Serial-feed coupling inside one rectangular waveguide (TE10 mode only).

    The guide runs from the feed at ``z = 0`` to a termination at
    ``z = length``.  Between two ports at ``z`` and ``z'`` the admittance is
    the 1-D line Green's function

        Yw/2 * u(z<) w(z>) / (1 - G0 GL exp(-2j b length))

    with ``u(z) = exp(jbz) + G0 exp(-jbz)`` and
    ``w(z) = exp(-jbz) + GL exp(-jb(2 length - z))``.  The feed sits against the
    back wall (``G0 = +1``), so an element-free matched guide presents exactly
    ``Yw`` at the feed.  ``termination`` is GL (0 = matched load).
    """

    def __init__(self, constants: PhysicalConstants, width: float, mode_admittance: float | None = None,
                 termination: complex = 0.0, back_reflection: complex = 1.0):
        k = constants.wavenumber
        cutoff = np.pi / width
        if k <= cutoff:
            raise ValueError("TE10 mode is below cutoff for this waveguide width")
        self.beta = np.sqrt(k**2 - cutoff**2)
        self.mode_admittance = constants.characteristic_admittance if mode_admittance is None else mode_admittance
        self.termination = complex(termination)
        self.back_reflection = complex(back_reflection)

    def matrix(self, za: np.ndarray, zb: np.ndarray, length: float) -> np.ndarray:
        za = np.asarray(za, float)[:, None]
        zb = np.asarray(zb, float)[None, :]
        b, g0, gl = self.beta, self.back_reflection, self.termination
        lo, hi = np.minimum(za, zb), np.maximum(za, zb)
        u = np.exp(1j * b * lo) + g0 * np.exp(-1j * b * lo)
        w = np.exp(-1j * b * hi) + gl * np.exp(-1j * b * (2 * length - hi))
        denom = 1 - g0 * gl * np.exp(-2j * b * length)
        return self.mode_admittance / 2 * u * w / denom

    def mutual(self, z1: float, z2: float, length: float) -> complex:
        return complex(self.matrix([z1], [z2], length)[0, 0])


@dataclass(frozen=True)
class AdmittanceSet:
    """Admittance blocks of the reduced network.

    ``Y_wireless`` (the channel) is drawn separately; see :mod:`dmasim.channel`.
    ``Y_st`` and ``Y_ss`` are ``None`` for FD and hybrid arrays.
    """

    Y_tt: np.ndarray
    Y_rr: np.ndarray
    Y_r: np.ndarray
    Y_st: np.ndarray | None = None
    Y_ss: np.ndarray | None = None
    R_s: float = 0.0
    Y0: float = 35.33
    notes: dict = field(default_factory=dict)

    @property
    def Y_ss_tilde(self) -> np.ndarray:
        return self.R_s * np.eye(len(self.Y_ss)) + self.Y_ss

    def with_coupling(self, Y_ss: np.ndarray) -> "AdmittanceSet":
        return AdmittanceSet(self.Y_tt, self.Y_rr, self.Y_r, self.Y_st, Y_ss, self.R_s, self.Y0, self.notes)


def assemble_fd_Ytt(geometry: ArrayGeometry, constants: PhysicalConstants, air_model=None) -> np.ndarray:
    if geometry.architecture == Architecture.DMA:
        raise ValueError("assemble_fd_Ytt expects a FD or hybrid array")
    air_model = air_model or FreeSpaceDipoleCoupling(constants)
    return air_model.matrix(geometry.element_positions)


def assemble_dma_admittances(
    geometry: ArrayGeometry,
    constants: PhysicalConstants,
    air_model=None,
    guide_model=None,
    coupling_mode: CouplingMode | str = CouplingMode.FULL,
    termination: complex = 0.0,
):
    """Return ``(Y_tt, Y_st, Y_ss)`` for a waveguide-fed metasurface.

    ``Y_ss`` is the sum of the block-diagonal guide coupling and the air
    coupling between all elements.  ``coupling_mode`` drops the air
    off-diagonal terms (``no_air``) or every off-diagonal term
    (``no_coupling``).
    """
    if geometry.architecture != Architecture.DMA:
        raise ValueError("assemble_dma_admittances expects a DMA geometry")
    coupling_mode = CouplingMode(coupling_mode)
    air_model = air_model or FreeSpaceDipoleCoupling(constants)
    guide_model = guide_model or WaveguideTE10Coupling(constants, geometry.waveguide_width, termination=termination)

    N, L = geometry.waveguide_count, geometry.element_count
    guide = geometry.element_guide
    if np.any(guide < 0) or np.any(guide >= N):
        raise IndexError("element assigned to a nonexistent waveguide")
    z = geometry.element_positions[:, 2]
    length = geometry.waveguide_length

    Y_tt = np.zeros((N, N), dtype=complex)
    Y_st = np.zeros((L, N), dtype=complex)
    Y_guide = np.zeros((L, L), dtype=complex)
    for n in range(N):
        idx = np.flatnonzero(guide == n)
        Y_tt[n, n] = guide_model.matrix([0.0], [0.0], length)[0, 0]
        Y_st[idx, n] = guide_model.matrix(z[idx], [0.0], length)[:, 0]
        Y_guide[np.ix_(idx, idx)] = guide_model.matrix(z[idx], z[idx], length)

    Y_air = air_model.matrix(geometry.element_positions)
    if coupling_mode == CouplingMode.FULL:
        Y_ss = Y_guide + Y_air
    elif coupling_mode == CouplingMode.NO_AIR:
        Y_ss = Y_guide + np.diag(np.diag(Y_air))
    else:
        Y_ss = np.diag(np.diag(Y_guide) + np.diag(Y_air))
    Y_ss = (Y_ss + Y_ss.T) / 2
    return Y_tt, Y_st, Y_ss


def assemble_user_block(M: int, constants: PhysicalConstants,
                        user_spacing_mode: UserSpacing | str = UserSpacing.FREE_SPACE):
    """Well-separated users: ``Y_rr`` diagonal, conjugate-matched loads ``Y_r``."""
    if M < 1:
        raise ValueError("need at least one user")
    mode = UserSpacing(user_spacing_mode)
    y = constants.dipole_self_admittance
    if mode == UserSpacing.FREE_SPACE:
        y = y / 2
    Y_rr = y * np.eye(M, dtype=complex)
    Y_r = np.diag(np.conj(np.diag(Y_rr)))
    return Y_rr, Y_r


def assemble(geometry: ArrayGeometry, constants: PhysicalConstants, M: int,
             coupling_mode: CouplingMode | str = CouplingMode.FULL, R_s: float = 0.0,
             termination: complex = 0.0,
             user_spacing_mode: UserSpacing | str = UserSpacing.FREE_SPACE) -> AdmittanceSet:
    """Convenience wrapper building every non-wireless block for ``geometry``."""
    Y_rr, Y_r = assemble_user_block(M, constants, user_spacing_mode)
    Y0 = constants.characteristic_admittance
    if geometry.architecture == Architecture.DMA:
        Y_tt, Y_st, Y_ss = assemble_dma_admittances(
            geometry, constants, coupling_mode=coupling_mode, termination=termination)
        return AdmittanceSet(Y_tt, Y_rr, Y_r, Y_st, Y_ss, R_s=R_s, Y0=Y0)
    return AdmittanceSet(assemble_fd_Ytt(geometry, constants), Y_rr, Y_r, Y0=Y0)
