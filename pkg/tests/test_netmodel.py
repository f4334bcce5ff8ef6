import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dmasim.netmodel import (
    ArrayGeometry, Architecture, CouplingMode, DegenerateGeometryError, FreeSpaceDipoleCoupling,
    PhysicalConstants, UserSpacing, WaveguideTE10Coupling, assemble, assemble_dma_admittances,
    assemble_fd_Ytt, assemble_user_block, planar_array,
)


def scalar_green(k, r):
    R = np.linalg.norm(r)
    return np.exp(-1j * k * R) / (4 * np.pi * R)


def green_zz_oracle(k, r, h=1e-6):
    # (1 + d^2/dz^2 / k^2) g, second derivative by central differences
    ez = np.array([0, 0, h])
    d2 = (scalar_green(k, r + ez) - 2 * scalar_green(k, r) + scalar_green(k, r - ez)) / h**2
    return scalar_green(k, r) + d2 / k**2


def test_constants(consts):
    assert consts.wavelength == pytest.approx(0.0299792458)
    k, w, eps = consts.wavenumber, consts.angular_frequency, consts.permittivity
    assert consts.dipole_self_admittance == pytest.approx(k * w * eps / (3 * np.pi))
    with pytest.raises(ValueError):
        PhysicalConstants(frequency=0)


@pytest.mark.parametrize("r", [(0, 0.01, 0.0), (0, 0.0, 0.02), (0, 0.013, 0.007), (0.004, -0.02, 0.03)])
def test_green_zz_matches_scalar_green_derivative(consts, r):
    lam = consts.wavelength
    r = np.array(r) * lam / 0.03
    model = FreeSpaceDipoleCoupling(consts)
    got = model.green_zz(r, np.linalg.norm(r))
    want = green_zz_oracle(consts.wavenumber, r, h=1e-5 * lam)
    assert abs(got - want) / abs(want) < 1e-5


def test_self_term_is_limit_of_mutual_real_part(consts):
    model = FreeSpaceDipoleCoupling(consts)
    lam = consts.wavelength
    for direction in ([0, 1, 0], [0, 0, 1], [0, 0.6, 0.8]):
        near = model.mutual([0, 0, 0], np.array(direction) * 1e-5 * lam)
        assert near.real == pytest.approx(model.self_term(), rel=1e-6)


def test_mutual_coincident_rejected(consts):
    with pytest.raises(DegenerateGeometryError):
        FreeSpaceDipoleCoupling(consts).mutual([0, 0, 0], [0, 0, 0])
    with pytest.raises(DegenerateGeometryError):
        FreeSpaceDipoleCoupling(consts).matrix(np.zeros((2, 3)))


def test_air_coupling_decays(consts):
    model = FreeSpaceDipoleCoupling(consts)
    lam = consts.wavelength
    mags = [abs(model.mutual([0, 0, 0], [0, d * lam, 0])) for d in (1, 2, 4, 8)]
    assert all(np.diff(mags) < 0)


def image_series(model, z1, z2, length, g0, gl, terms=200):
    b, yw = model.beta, model.mode_admittance
    total = 0
    for n in range(terms):
        loop = (g0 * gl * np.exp(-2j * b * length)) ** n
        total += loop * (np.exp(-1j * b * abs(z1 - z2)) + g0 * np.exp(-1j * b * (z1 + z2))
                         + gl * np.exp(-1j * b * (2 * length - z1 - z2))
                         + g0 * gl * np.exp(-1j * b * (2 * length - abs(z1 - z2))))
    return yw / 2 * total


@pytest.mark.parametrize("gl", [0.0, 0.5, -0.3 + 0.4j])
def test_waveguide_green_matches_image_series(consts, gl):
    lam = consts.wavelength
    model = WaveguideTE10Coupling(consts, 0.73 * lam, termination=gl)
    length = 3 * lam
    z = np.array([0.0, 0.25, 1.1, 2.9]) * lam
    got = model.matrix(z, z, length)
    want = np.array([[image_series(model, a, b, length, 1.0, gl) for b in z] for a in z])
    np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)


def test_matched_guide_input_admittance_is_Y0(consts):
    model = WaveguideTE10Coupling(consts, 0.73 * consts.wavelength)
    assert model.mutual(0, 0, 1.0) == pytest.approx(consts.characteristic_admittance)


def test_waveguide_below_cutoff(consts):
    with pytest.raises(ValueError):
        WaveguideTE10Coupling(consts, 0.4 * consts.wavelength)


def test_planar_array_layout(consts):
    g = planar_array("dma", 3, 4, consts, element_spacing_wl=0.5, waveguide_spacing_wl=1.0)
    lam = consts.wavelength
    assert g.element_count == 12 and g.rf_chains == 3
    assert g.waveguide_length == pytest.approx(4 * 0.5 * lam)
    np.testing.assert_allclose(g.element_positions[5], [0, lam, 1.5 * 0.5 * lam])
    assert list(g.element_guide) == [0] * 4 + [1] * 4 + [2] * 4
    fd = planar_array("fd", 3, 4, consts)
    assert fd.rf_chains == 12
    with pytest.raises(ValueError):
        planar_array("dma", 2, 2, consts, element_spacing_wl=0)


def test_geometry_rejects_unsorted_guide(consts):
    with pytest.raises(ValueError):
        ArrayGeometry(Architecture.DMA, 1, 2, np.array([[0, 0, 0.2], [0, 0, 0.1]]), np.array([0, 0]),
                      0.02, 0.005, 0.01, 0.03, 0.3)


def test_dma_block_structure(consts):
    g = planar_array("dma", 2, 2, consts)
    Y_tt, Y_st, Y_ss = assemble_dma_admittances(g, consts)
    assert np.all(np.count_nonzero(Y_st, axis=0) == 2)
    assert np.all(Y_st[2:, 0] == 0) and np.all(Y_st[:2, 1] == 0)
    _, _, Y_guide_only = assemble_dma_admittances(g, consts, air_model=_ZeroAir())
    assert np.all(Y_guide_only[:2, 2:] == 0)
    assert np.array_equal(Y_tt, np.diag(np.diag(Y_tt)))


class _ZeroAir:
    def matrix(self, points):
        return np.zeros((len(points), len(points)), complex)


def test_ablations(consts):
    g = planar_array("dma", 3, 4, consts, element_spacing_wl=0.2)
    _, _, full = assemble_dma_admittances(g, consts)
    _, _, no_air = assemble_dma_admittances(g, consts, coupling_mode=CouplingMode.NO_AIR)
    _, _, none = assemble_dma_admittances(g, consts, coupling_mode="no_coupling")
    _, _, guide = assemble_dma_admittances(g, consts, air_model=_ZeroAir())
    air = FreeSpaceDipoleCoupling(consts).matrix(g.element_positions)
    np.testing.assert_array_equal(none, np.diag(np.diag(none)))
    np.testing.assert_allclose(no_air, guide + np.diag(np.diag(air)))
    np.testing.assert_allclose(np.diag(none), np.diag(no_air))
    np.testing.assert_allclose(np.diag(none), np.diag(full))


def test_dma_rejects_bad_guide_index(consts):
    g = planar_array("dma", 2, 2, consts)
    bad = ArrayGeometry(Architecture.DMA, 2, 2, g.element_positions, np.array([0, 0, 5, 5]), g.waveguide_width,
                        g.waveguide_height, g.element_spacing, g.waveguide_spacing, g.waveguide_length)
    with pytest.raises(IndexError):
        assemble_dma_admittances(bad, consts)
    with pytest.raises(ValueError):
        assemble_dma_admittances(planar_array("fd", 2, 2, consts), consts)
    with pytest.raises(ValueError):
        assemble_fd_Ytt(g, consts)


@settings(max_examples=25, deadline=None)
@given(N=st.integers(1, 4), epw=st.integers(1, 6), spacing=st.floats(0.1, 1.0), wg=st.floats(0.5, 2.0))
def test_reciprocity_and_passivity(N, epw, spacing, wg):
    c = PhysicalConstants()
    g = planar_array("dma", N, epw, c, element_spacing_wl=spacing, waveguide_spacing_wl=wg)
    Y_tt, Y_st, Y_ss = assemble_dma_admittances(g, c)
    assert np.linalg.norm(Y_ss - Y_ss.T) == 0
    assert np.all(np.diag(Y_ss).real >= 0) and np.all(np.diag(Y_tt).real > 0)
    # lossless passive network: Hermitian part of the full admittance matrix is PSD
    full = np.block([[Y_tt, Y_st.T], [Y_st, Y_ss]])
    herm = (full + full.conj().T) / 2
    assert np.linalg.eigvalsh(herm).min() >= -1e-9 * np.abs(herm).max()
    fd = assemble_fd_Ytt(planar_array("fd", N, epw, c, element_spacing_wl=spacing, waveguide_spacing_wl=wg), c)
    assert np.linalg.norm(fd - fd.T) == 0


def test_scaling_changes_only_off_diagonal(consts):
    a = assemble_fd_Ytt(planar_array("fd", 2, 3, consts, 0.5, 1.0), consts)
    b = assemble_fd_Ytt(planar_array("fd", 2, 3, consts, 1.0, 2.0), consts)
    np.testing.assert_array_equal(np.diag(a), np.diag(b))
    off = ~np.eye(6, dtype=bool)
    assert not np.allclose(a[off], b[off])


def test_user_block(consts):
    y = consts.dipole_self_admittance
    Y_rr, Y_r = assemble_user_block(1, consts, UserSpacing.GROUND_PLANE)
    assert Y_rr[0, 0] == pytest.approx(y) and Y_r[0, 0] == pytest.approx(y)
    Y_rr, Y_r = assemble_user_block(5, consts)
    assert Y_rr.shape == (5, 5) and np.count_nonzero(Y_rr - np.diag(np.diag(Y_rr))) == 0
    assert np.allclose(np.diag(Y_rr), y / 2)
    np.testing.assert_allclose(np.diag(Y_r + Y_rr).real, 2 * np.diag(Y_rr).real)
    with pytest.raises(ValueError):
        assemble_user_block(0, consts)


def test_assemble_set(consts):
    admit = assemble(planar_array("dma", 2, 3, consts), consts, 2, R_s=0.5)
    np.testing.assert_allclose(admit.Y_ss_tilde, admit.Y_ss + 0.5 * np.eye(6))
    assert admit.Y0 == consts.characteristic_admittance
    fd = assemble(planar_array("fd", 2, 3, consts), consts, 2)
    assert fd.Y_st is None and fd.Y_tt.shape == (6, 6)
