"""Characteristic functions, the generating-function log-ratio, and cumulants."""

import numpy as np
import pytest

from phasekin import (
    DegenerateFitError,
    EvolutionParams,
    ImaginaryResidueError,
    InsufficientSupportError,
    characteristic_function,
    classical_joint,
    classical_limit_scan,
    coupling_kernel,
    gaussian_density,
    gaussian_wigner,
    harmonic_potential,
    heisenberg_check,
    kappa22,
    make_grid,
    phi_field,
    phi_series_coefficients,
    propagate,
    quantum_joint_spectral,
    quartic_potential,
    sample_joint,
)
from phasekin.grids import fourier_forward
from phasekin.verification import kappa22_closed_form_oracle


class TestCharacteristicFunction:
    def test_origin_is_total_probability(self, rho_default, wigner_default):
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        assert abs(characteristic_function(F).origin_value() - 1.0) < 1e-7

    def test_classical_joint_factorizes(self, rho_default, wigner_default, grid64):
        F = classical_joint(rho_default, wigner_default)
        out = characteristic_function(F).values
        rho_t = fourier_forward(rho_default.values, (grid64,), (0,))
        w_t = fourier_forward(wigner_default.values, (grid64, grid64), (0, 1))
        assert np.abs(out - rho_t[:, None, None] * w_t[None, :, :]).max() < 1e-9

    def test_gaussian_axis_profile(self, rho_default, wigner_default, grid64):
        F = classical_joint(rho_default, wigner_default)
        cf = characteristic_function(F)
        K = cf.freq_R.frequencies
        mid = grid64.n // 2
        profile = np.abs(cf.values[:, mid, mid])
        assert np.abs(profile - np.exp(-(K**2) / 2.0)).max() < 1e-8

    def test_hermitian_symmetry(self, rho_default, wigner_default):
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        v = characteristic_function(F).values
        flipped = np.conj(v[::-1, ::-1, ::-1])
        # index 0 is the unpaired Nyquist plane; mirror of index i is n - i
        assert np.abs(v[1:, 1:, 1:] - flipped[:-1, :-1, :-1]).max() < 1e-10


class TestPhiField:
    def test_classical_phi_vanishes(self, rho_default, wigner_default):
        F = classical_joint(rho_default, wigner_default)
        phi = phi_field(F, rho_default, wigner_default)
        assert np.abs(phi.values[phi.mask]).max() < 1e-9

    def test_phi_equals_log_kernel_on_lattice(self, rho_default, wigner_default):
        hbar = 1.0
        F = quantum_joint_spectral(rho_default, wigner_default, hbar)
        phi = phi_field(F, rho_default, wigner_default)
        K = phi.freq_K.frequencies
        q = phi.freq_q.frequencies
        x = hbar * np.multiply.outer(K, q) / 2.0
        expected = np.array([[coupling_kernel(v).log_sinc_value for v in row] for row in x])
        sel = phi.mask & np.isfinite(expected)
        assert np.abs(phi.values[sel] - expected[sel]).max() < 1e-7

    def test_k_slices_agree(self, rho_default, wigner_default, grid64):
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        mid = grid64.n // 2
        a = phi_field(F, rho_default, wigner_default, k_index=mid)
        b = phi_field(F, rho_default, wigner_default, k_index=mid + 3)
        common = a.mask & b.mask
        assert np.abs(a.values[common] - b.values[common]).max() < 1e-7

    def test_phi_even_under_sign_flip(self, rho_default, wigner_default):
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        phi = phi_field(F, rho_default, wigner_default)
        v = phi.values[1:, 1:]
        keep = phi.mask[1:, 1:] & phi.mask[1:, 1:][::-1, ::-1]
        assert np.abs(v - v[::-1, ::-1])[keep].max() < 1e-8

    def test_mismatched_inputs_raise_imaginary_residue(self, rho_default, wigner_default, grid64):
        # a momentum-shifted denominator puts a phase in the ratio
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        shifted = gaussian_wigner(grid64, grid64, 1.0, 0.0, 2**-0.5, 2**-0.5)
        with pytest.raises(ImaginaryResidueError):
            phi_field(F, rho_default, shifted)

    def test_reconstruction_identity(self, rho_default, wigner_default, grid64):
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        phi = phi_field(F, rho_default, wigner_default)
        mid = grid64.n // 2
        f_t = characteristic_function(F).values[:, :, mid]
        rho_t = fourier_forward(rho_default.values, (grid64,), (0,))
        w_t = fourier_forward(wigner_default.values, (grid64, grid64), (0, 1))[:, mid]
        recon = np.exp(phi.values[phi.mask]) * (rho_t[:, None] * w_t[None, :])[phi.mask]
        assert np.abs(recon - f_t[phi.mask]).max() < 1e-7


class TestPhiSeriesCoefficients:
    def test_leading_coefficients(self, rho_default, wigner_default):
        hbar = 1.0
        F = quantum_joint_spectral(rho_default, wigner_default, hbar)
        c2, c4 = phi_series_coefficients(phi_field(F, rho_default, wigner_default), hbar)
        assert abs(c2 + 1.0 / 24.0) * 24.0 < 2e-3
        assert abs(c4 + 1.0 / 2880.0) * 2880.0 < 5e-2

    def test_hbar_zero_trivial(self, rho_default, wigner_default):
        F = classical_joint(rho_default, wigner_default)
        c2, c4 = phi_series_coefficients(phi_field(F, rho_default, wigner_default), 0.0)
        assert abs(c2) < 1e-8 and abs(c4) < 1e-8

    def test_insufficient_support(self, rho_default, wigner_default):
        # a steep kernel scale leaves too few small-argument lattice points
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        phi = phi_field(F, rho_default, wigner_default)
        with pytest.raises(InsufficientSupportError):
            phi_series_coefficients(phi, 8.0)

    def test_coefficients_independent_of_preset_widths(self, grid64):
        hbar = 1.0
        results = []
        for sigma_R, sigma_p in ((1.0, 2**-0.5), (0.8, 0.9)):
            rho = gaussian_density(grid64, 0.0, sigma_R)
            W = gaussian_wigner(grid64, grid64, 0.0, 0.0, sigma_p, sigma_p)
            F = quantum_joint_spectral(rho, W, hbar)
            results.append(phi_series_coefficients(phi_field(F, rho, W), hbar))
        (a2, a4), (b2, b4) = results
        assert abs(a2 - b2) * 24 < 2e-3
        assert abs(a4 - b4) * 2880 < 5e-2


class TestKappa22:
    def test_classical_joint_uncorrelated(self, rho_default, wigner_default):
        F = classical_joint(rho_default, wigner_default)
        assert abs(kappa22(F)) < 1e-6

    def test_hbar_scaling(self, rho_default, wigner_default):
        a = kappa22(quantum_joint_spectral(rho_default, wigner_default, 1.0))
        b = kappa22(quantum_joint_spectral(rho_default, wigner_default, 0.5))
        assert abs(a / b / 4.0 - 1.0) < 1e-4

    def test_strictly_negative_for_quantum(self, rho_default, wigner_default):
        assert kappa22(quantum_joint_spectral(rho_default, wigner_default, 1.0)) < 0

    def test_matches_closed_form_oracle(self, rho_default, wigner_default):
        hbar = 1.0
        measured = kappa22(quantum_joint_spectral(rho_default, wigner_default, hbar))
        oracle = kappa22_closed_form_oracle(1.0, 2**-0.5, hbar)
        assert abs(measured - oracle) / abs(oracle) < 1e-5

    def test_oracle_stencil_accuracy(self):
        # pure-product transform has a zero cross combination; the stencil
        # reproduces it down to its own h^4 rounding floor
        assert abs(kappa22_closed_form_oracle(1.0, 0.7, 0.0)) < 1e-7

    def test_kappa_over_hbar_squared_constant(self, rho_default, wigner_default):
        hbars = [1 / 16, 1 / 8, 1 / 4, 1 / 2]
        ratios = [
            kappa22(quantum_joint_spectral(rho_default, wigner_default, h)) / h**2 for h in hbars
        ]
        spread = (max(ratios) - min(ratios)) / abs(ratios[0])
        assert spread < 1e-3


class TestHeisenberg:
    def test_gaussian_sigma_R2(self, rho_default, wigner_default):
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        report = heisenberg_check(F, 1.0)
        assert abs(report.sigma_R2 - np.sqrt(2.0)) < 1e-5

    @pytest.mark.parametrize("hbar", [0.5, 1.0])
    def test_cauchy_schwarz_bound(self, rho_default, wigner_default, hbar):
        F = quantum_joint_spectral(rho_default, wigner_default, hbar)
        report = heisenberg_check(F, hbar)
        assert report.cauchy_schwarz_ok
        assert report.kappa22 >= -report.heisenberg_lhs

    def test_hbar_zero_trivial(self, rho_default, wigner_default):
        report = heisenberg_check(classical_joint(rho_default, wigner_default), 0.0)
        assert report.heisenberg_rhs == 0.0
        assert report.heisenberg_lhs >= 0.0

    def test_reference_value_recorded(self, rho_default, wigner_default):
        F = quantum_joint_spectral(rho_default, wigner_default, 1.0)
        report = heisenberg_check(F, 1.0)
        assert report.kappa22_reference == -0.5
        # measured value differs from the nominal constant in 1-D; both live in the report
        assert abs(report.kappa22 + 1.0 / 6.0) < 1e-4


class TestClassicalLimitScan:
    def test_slope(self, rho_default, wigner_default):
        slope = classical_limit_scan(rho_default, wigner_default, [1 / 16, 1 / 8, 1 / 4, 1 / 2])
        assert abs(slope - 2.0) < 0.1

    def test_single_value_rejected(self, rho_default, wigner_default):
        with pytest.raises(ValueError):
            classical_limit_scan(rho_default, wigner_default, [0.5])

    def test_narrow_span_rejected(self, rho_default, wigner_default):
        with pytest.raises(ValueError):
            classical_limit_scan(rho_default, wigner_default, [0.2, 0.3, 0.4, 0.5])

    def test_underflowing_departure_rejected(self, rho_default, wigner_default):
        with pytest.raises(DegenerateFitError):
            classical_limit_scan(rho_default, wigner_default, [1e-8, 2e-8, 4e-8, 1e-7])


class TestMonteCarloConsistency:
    def test_sampled_kappa_matches_quadrature(self, rho_default, wigner_default):
        # near-classical joint admits sampling; batch means give the error bar
        hbar = 1 / 8
        F = quantum_joint_spectral(rho_default, wigner_default, hbar)
        quad = kappa22(F)
        samples = sample_joint(F, 10**6, seed=123)
        R, p = samples[:, 0], samples[:, 1]
        batches = 10
        R_b = R.reshape(batches, -1)
        p_b = p.reshape(batches, -1)
        kappas = (R_b**2 * p_b**2).mean(axis=1) - (R_b**2).mean(axis=1) * (p_b**2).mean(axis=1)
        estimate = kappas.mean()
        se = kappas.std(ddof=1) / np.sqrt(batches)
        assert abs(estimate - quad) <= 4 * se


class TestPhiAlongTrajectory:
    def test_phi_time_independent(self, grid64, rho_default):
        # rebuild the joint from each snapshot with the static density;
        # the log-ratio must stay the pure kernel at every time.  A
        # rotating coherent state gives real time dependence while its
        # tails stay far inside the box.
        hbar = 1.0
        W0 = gaussian_wigner(grid64, grid64, 0.0, 1.0, 2**-0.5, 2**-0.5)
        U = harmonic_potential(grid64, 1.0)
        params = EvolutionParams(mass=1.0, hbar=hbar, dt=1e-3, steps=600, snapshot_every=200)
        traj = propagate(W0, U, params)
        reference = None
        for _, snap in traj.snapshots:
            F = quantum_joint_spectral(rho_default, snap, hbar)
            phi = phi_field(F, rho_default, snap)
            if reference is None:
                reference = phi
                continue
            common = reference.mask & phi.mask
            assert np.abs(reference.values[common] - phi.values[common]).max() < 1e-6
