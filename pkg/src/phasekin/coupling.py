"""Joint-distribution builders and the sinc coupling kernel.

Two independent constructions of the same object:

* a derivative series pairing even derivatives of the density with even
  momentum derivatives of the phase-space distribution, and
* a spectral product in which the transformed joint factorizes as
  ``rho_hat(K) * sinc(hbar K q / 2) * W_hat(q, k)``.

Each is the other's test oracle.  The series is evaluated with spectral
derivatives; factor spectra are floored at 1e-13 of their peak before
amplification so box-truncation noise cannot masquerade as high-order
structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import ImaginaryResidueError, NonConvergenceError
from .grids import conjugate, fourier_forward, fourier_inverse, native_frequencies, require_same_grid
from .states import JointDistribution, VirtualDensity, WignerDistribution

SERIES_CAP = 20
SERIES_CONVERGED_REL = 1e-12
SERIES_FAIL_REL = 1e-8
SPECTRAL_FLOOR_REL = 1e-13
IMAG_RESIDUE_TOL = 1e-9
KERNEL_SWITCH = 1e-4


@dataclass(frozen=True)
class CouplingKernelSample:
    """One evaluation of the sinc coupling kernel and its logarithm."""

    x: float
    sinc_value: float
    log_sinc_value: float


def sinc_values(x: np.ndarray) -> np.ndarray:
    """sin(x)/x, switching to its Taylor series below |x| = 1e-4."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    big = np.abs(x) >= KERNEL_SWITCH
    out[big] = np.sin(x[big]) / x[big]
    xs = x[~big]
    out[~big] = 1.0 - xs**2 / 6.0 + xs**4 / 120.0
    return out


def log_sinc_values(x: np.ndarray) -> np.ndarray:
    """ln(sin(x)/x); NaN at (and within float noise of) the kernel zeros
    and throughout the negative lobes."""
    x = np.asarray(x, dtype=float)
    out = np.full_like(x, np.nan)
    small = np.abs(x) < KERNEL_SWITCH
    xs = x[small]
    out[small] = -(xs**2) / 6.0 - xs**4 / 180.0
    s = sinc_values(x[~small])
    ok = s > 1e-15
    with np.errstate(invalid="ignore", divide="ignore"):
        out[~small] = np.where(ok, np.log(np.where(ok, s, 1.0)), np.nan)
    return out


def coupling_kernel(x: float) -> CouplingKernelSample:
    """Evaluate the kernel at one dimensionless argument x = hbar K q / 2."""
    if not np.isfinite(x):
        raise ValueError(f"kernel argument must be finite, got {x}")
    arr = np.array([float(x)])
    return CouplingKernelSample(float(x), float(sinc_values(arr)[0]), float(log_sinc_values(arr)[0]))


def _check_joint_inputs(rho: VirtualDensity, W: WignerDistribution) -> None:
    require_same_grid(rho.grid, W.grid_r, "joint builder (R vs r axis)")


def classical_joint(rho: VirtualDensity, W: WignerDistribution) -> JointDistribution:
    """Factorized joint: the outer product rho(R) W(p, r)."""
    _check_joint_inputs(rho, W)
    return JointDistribution(rho.grid, W.grid_p, W.grid_r, np.multiply.outer(rho.values, W.values), 0.0)


def _floored_spectrum(values: np.ndarray, axis: int) -> np.ndarray:
    hat = np.fft.fft(values, axis=axis)
    peak = np.abs(hat).max()
    hat[np.abs(hat) < SPECTRAL_FLOOR_REL * peak] = 0.0
    return hat


def quantum_joint_series(
    rho: VirtualDensity,
    W: WignerDistribution,
    hbar: float,
    n_max="auto",
) -> JointDistribution:
    """Joint built from the even-derivative series; real term by term.

    With ``n_max="auto"`` terms are added until the latest term's sup
    norm falls below 1e-12 of the running sum's (cap 20); growth of the
    term norms stops the summation early, and a cap- or growth-limited
    sum whose last term still exceeds 1e-8 relative raises
    :class:`NonConvergenceError`.
    """
    _check_joint_inputs(rho, W)
    auto = n_max == "auto"
    if not auto:
        if int(n_max) != n_max or n_max < 0 or n_max > SERIES_CAP:
            raise ValueError(f"n_max must be 'auto' or an integer in [0, {SERIES_CAP}], got {n_max}")
        n_max = int(n_max)

    total = np.multiply.outer(rho.values, W.values)
    if hbar == 0.0 or (not auto and n_max == 0):
        return JointDistribution(rho.grid, W.grid_p, W.grid_r, total, hbar)

    rho_hat = _floored_spectrum(rho.values.astype(complex), 0)
    w_hat = _floored_spectrum(W.values.astype(complex), 0)
    mult_R = (1j * native_frequencies(rho.grid)) ** 2
    mult_p = ((1j * native_frequencies(W.grid_p)) ** 2)[:, None]

    cap = SERIES_CAP if auto else n_max
    prev_norm = np.inf
    last_norm = 0.0
    reached_cap = True
    for n in range(1, cap + 1):
        rho_hat *= mult_R
        w_hat *= mult_p
        d_rho = np.fft.ifft(rho_hat).real
        d_w = np.fft.ifft(w_hat, axis=0).real
        coeff = (-1.0) ** n * (hbar / 2.0) ** (2 * n) / factorial(2 * n + 1)
        term = coeff * np.multiply.outer(d_rho, d_w)
        term_norm = float(np.abs(term).max())
        if auto and n >= 2 and term_norm > prev_norm:
            # asymptotic regime or noise floor: keep the smaller partial sum
            last_norm = prev_norm
            reached_cap = True
            break
        total += term
        prev_norm = last_norm = term_norm
        if auto and term_norm <= SERIES_CONVERGED_REL * float(np.abs(total).max()):
            reached_cap = False
            break
    if auto and reached_cap and last_norm > SERIES_FAIL_REL * float(np.abs(total).max()):
        raise NonConvergenceError(
            f"derivative series did not converge: last term is "
            f"{last_norm / float(np.abs(total).max()):.3e} of the sum after cap/growth stop"
        )
    return JointDistribution(rho.grid, W.grid_p, W.grid_r, total, hbar)


def quantum_joint_spectral(rho: VirtualDensity, W: WignerDistribution, hbar: float) -> JointDistribution:
    """Joint built in Fourier space via the sinc kernel on the (K, q) lattice.

    The kernel is evaluated everywhere, including its negative lobes; no
    windowing is applied.
    """
    _check_joint_inputs(rho, W)
    grids = (rho.grid, W.grid_p, W.grid_r)
    rho_t = fourier_forward(rho.values, (rho.grid,), (0,))
    w_t = fourier_forward(W.values, (W.grid_p, W.grid_r), (0, 1))
    K = conjugate(rho.grid).frequencies
    q = conjugate(W.grid_p).frequencies
    kernel = sinc_values(hbar * np.outer(K, q) / 2.0)
    f_t = rho_t[:, None, None] * kernel[:, :, None] * w_t[None, :, :]
    f = fourier_inverse(f_t, grids, (0, 1, 2))
    re_max = float(np.abs(f.real).max())
    im_max = float(np.abs(f.imag).max())
    if im_max > IMAG_RESIDUE_TOL * re_max:
        raise ImaginaryResidueError(
            f"spectral joint has imaginary residue {im_max:.3e} vs real max {re_max:.3e}; "
            "aliasing or a broken kernel"
        )
    return JointDistribution(rho.grid, W.grid_p, W.grid_r, f.real, hbar)
