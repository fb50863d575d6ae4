"""Phase-space evolution: transport right-hand sides and the propagator.

Sign conventions, fixed once and machine-checked against the quartic
potential (where the odd-derivative series terminates and is exact):

* classical transport:  dW/dt = -p dW/dr / m + dU/dr dW/dp
* quantum transport adds odd-derivative corrections in powers of
  (hbar/2)^2; in the momentum-spectral domain the whole potential term
  resums to multiplication by
  (i/hbar) [U(r + hbar lam/2) - U(r - hbar lam/2)], lam the FFT-native
  conjugate of p.

The time stepper is Strang-split: an exact streaming shear for dt/2, an
exact potential phase kick for dt, and streaming again for dt/2.  Both
substeps are unimodular in the spectral domain, so total probability is
conserved to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import DecayGuardError, ImaginaryResidueError, NonConvergenceError
from .grids import (
    Field,
    Grid1D,
    derivative_array,
    native_frequencies,
    require_same_grid,
)
from .states import JointDistribution, VirtualDensity, WignerDistribution, marginal_over_R

SERIES_CAP = 20
SERIES_CONVERGED_REL = 1e-12
SERIES_FAIL_REL = 1e-8
SPECTRAL_FLOOR_REL = 1e-13
IMAG_RESIDUE_TOL = 1e-9
# Snapshot guard during propagation: anharmonic transport grows physical
# interference tails that saturate near 1e-7 of the peak at default
# resolution; real boundary escape shows up at 1e-2 and above.
PROPAGATION_DECAY_TOL = 1e-5

POTENTIAL_KINDS = ("free", "harmonic", "quartic", "from_density")


@dataclass(frozen=True)
class Potential:
    """Newtonian potential on a grid: an analytic preset or a scaled density."""

    kind: str
    grid: Grid1D
    omega: float = 0.0
    a2: float = 0.0
    a4: float = 0.0
    epsilon: float = 0.0
    rho: VirtualDensity | None = None

    def __post_init__(self) -> None:
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "quartic" and not self.a4 > 0:
            raise ValueError("quartic potential needs a4 > 0 for confinement")
        if self.kind == "from_density":
            if self.rho is None:
                raise ValueError("from_density potential needs a density")
            require_same_grid(self.rho.grid, self.grid, "from_density potential")

    def samples(self, mass: float = 1.0) -> np.ndarray:
        return self.samples_at(self.grid.points, mass)

    def samples_at(self, x, mass: float = 1.0) -> np.ndarray:
        """U evaluated at arbitrary points.

        Analytic presets extend naturally beyond the box; the density
        form uses its trigonometric interpolant (2L-periodic), which is
        faithful because the density vanishes at the boundary.
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            return 0.5 * mass * self.omega**2 * x**2
        if self.kind == "quartic":
            return self.a2 * x**2 + self.a4 * x**4
        return self.epsilon * self._interpolate_density(x)

    def _interpolate_density(self, x: np.ndarray) -> np.ndarray:
        g = self.grid
        hat = np.fft.fft(self.rho.values) / g.n
        w = native_frequencies(g)
        # evaluate sum_k hat_k exp(i w_k (x - x_0)) at arbitrary x
        phase = np.exp(1j * np.multiply.outer(x - g.points[0], w))
        return (phase @ hat).real

    def derivative_samples(self, order: int, mass: float = 1.0) -> np.ndarray:
        """d^order U / dr^order on the grid; analytic where possible."""
        x = self.grid.points
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            c = mass * self.omega**2
            return {1: c * x, 2: np.full_like(x, c)}.get(order, np.zeros_like(x))
        if self.kind == "quartic":
            if order == 1:
                return 2 * self.a2 * x + 4 * self.a4 * x**3
            if order == 2:
                return 2 * self.a2 + 12 * self.a4 * x**2
            if order == 3:
                return 24 * self.a4 * x
            if order == 4:
                return np.full_like(x, 24 * self.a4)
            return np.zeros_like(x)
        hat = np.fft.fft(self.rho.values.astype(complex))
        hat[np.abs(hat) < SPECTRAL_FLOOR_REL * np.abs(hat).max()] = 0.0
        w = native_frequencies(self.grid)
        mult = (1j * w) ** order
        if order % 2 == 1:
            mult[self.grid.n // 2] = 0.0
        return self.epsilon * np.fft.ifft(hat * mult).real


def free_potential(grid: Grid1D) -> Potential:
    return Potential("free", grid)


def harmonic_potential(grid: Grid1D, omega: float) -> Potential:
    return Potential("harmonic", grid, omega=omega)


def quartic_potential(grid: Grid1D, a2: float, a4: float) -> Potential:
    return Potential("quartic", grid, a2=a2, a4=a4)


def potential_from_density(rho: VirtualDensity, epsilon: float) -> Potential:
    """Contact-coupling potential: epsilon times the density, shared grid."""
    return Potential("from_density", rho.grid, epsilon=epsilon, rho=rho)


@dataclass(frozen=True)
class EvolutionParams:
    mass: float
    hbar: float
    dt: float
    steps: int
    n_max: object = "auto"
    method: str = "spectral_kernel"
    snapshot_every: int = 100

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.hbar < 0:
            raise ValueError("hbar must be nonnegative")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.method not in ("series", "spectral_kernel"):
            raise ValueError(f"method must be 'series' or 'spectral_kernel', got {self.method!r}")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")


@dataclass
class Trajectory:
    """Snapshots plus a conserved-quantity log along one propagation."""

    snapshots: list = field(default_factory=list)  # (time, WignerDistribution)
    conserved: list = field(default_factory=list)  # (time, total probability, mean energy)

    @property
    def times(self):
        return [t for t, _ in self.snapshots]

    def final(self) -> WignerDistribution:
        return self.snapshots[-1][1]


def _check_rhs_inputs(W: WignerDistribution, U: Potential) -> None:
    require_same_grid(U.grid, W.grid_r, "potential vs Wigner r axis")


def _streaming_term(W: WignerDistribution, mass: float) -> np.ndarray:
    dWdr = derivative_array(W.values, W.grid_r, 1, 1)
    return -W.grid_p.points[:, None] * dWdr / mass


def liouville_rhs(W: WignerDistribution, U: Potential, mass: float) -> Field:
    """Classical transport right-hand side, spectrally differentiated."""
    _check_rhs_inputs(W, U)
    dWdp = derivative_array(W.values, W.grid_p, 0, 1)
    rhs = _streaming_term(W, mass) + U.derivative_samples(1, mass)[None, :] * dWdp
    return Field((W.grid_p, W.grid_r), rhs)


def moyal_rhs_series(W, U: Potential, hbar: float, mass: float, n_max="auto") -> Field:
    """Quantum transport as the truncated odd-derivative series.

    For polynomial potentials the series terminates exactly; for a
    density-backed potential derivatives are spectral with the same
    floor filter and truncation rules as the joint-distribution series.
    """
    _check_rhs_inputs(W, U)
    auto = n_max == "auto"
    if not auto:
        if int(n_max) != n_max or n_max < 0 or n_max > SERIES_CAP:
            raise ValueError(f"n_max must be 'auto' or an integer in [0, {SERIES_CAP}], got {n_max}")
        n_max = int(n_max)
    base = liouville_rhs(W, U, mass)
    if hbar == 0.0 or (not auto and n_max == 0):
        return base

    total = base.values
    w_hat = np.fft.fft(W.values.astype(complex), axis=0)
    w_hat[np.abs(w_hat) < SPECTRAL_FLOOR_REL * np.abs(w_hat).max()] = 0.0
    lam = native_frequencies(W.grid_p)
    odd = (1j * lam).copy()
    odd[W.grid_p.n // 2] = 0.0
    w_hat = w_hat * odd[:, None]  # first odd derivative accumulator
    mult = ((1j * lam) ** 2)[:, None]

    cap = SERIES_CAP if auto else n_max
    prev_norm = np.inf
    last_norm = 0.0
    reached_cap = True
    for n in range(1, cap + 1):
        w_hat = w_hat * mult
        dW = np.fft.ifft(w_hat, axis=0).real
        coeff = (-1.0) ** n * (hbar / 2.0) ** (2 * n) / factorial(2 * n + 1)
        term = coeff * U.derivative_samples(2 * n + 1, mass)[None, :] * dW
        term_norm = float(np.abs(term).max())
        if auto and n >= 2 and term_norm > prev_norm:
            last_norm = prev_norm
            reached_cap = True
            break
        total = total + term
        prev_norm = last_norm = term_norm
        if auto and term_norm <= SERIES_CONVERGED_REL * float(np.abs(total).max()):
            reached_cap = False
            break
    if auto and reached_cap and last_norm > SERIES_FAIL_REL * float(np.abs(total).max()):
        raise NonConvergenceError(
            f"odd-derivative series did not converge: last term is "
            f"{last_norm / float(np.abs(total).max()):.3e} of the sum"
        )
    return Field((W.grid_p, W.grid_r), total)


def moyal_rhs_spectral(W: WignerDistribution, U: Potential, hbar: float, mass: float) -> Field:
    """Quantum transport via the resummed shifted-potential multiplier."""
    _check_rhs_inputs(W, U)
    if not hbar > 0:
        raise ValueError("moyal_rhs_spectral needs hbar > 0; use liouville_rhs at hbar = 0")
    lam = native_frequencies(W.grid_p)
    shift = hbar * lam / 2.0
    r = W.grid_r.points
    u_plus = U.samples_at(r[None, :] + shift[:, None], mass)
    u_minus = U.samples_at(r[None, :] - shift[:, None], mass)
    w_hat = np.fft.fft(W.values, axis=0)
    kicked = np.fft.ifft((1j / hbar) * (u_plus - u_minus) * w_hat, axis=0)
    re_max = float(np.abs(kicked.real).max())
    im_max = float(np.abs(kicked.imag).max())
    if im_max > IMAG_RESIDUE_TOL * max(re_max, 1e-300):
        raise ImaginaryResidueError(
            f"spectral transport term has imaginary residue {im_max:.3e} vs {re_max:.3e}"
        )
    return Field((W.grid_p, W.grid_r), _streaming_term(W, mass) + kicked.real)


def collision_rhs(F: JointDistribution, epsilon: float, mass: float) -> Field:
    """Transport right-hand side from the joint via the collision integral.

    The interaction term is the momentum derivative of
    ``epsilon * dF/dR`` sliced exactly on the diagonal R = r.
    """
    dF = derivative_array(F.values, F.grid_R, 0, 1)
    G = epsilon * np.einsum("iki->ki", dF)
    W = marginal_over_R(F)
    dGdp = derivative_array(G, F.grid_p, 0, 1)
    return Field((F.grid_p, F.grid_r), _streaming_term(W, mass) + dGdp)


def _kick_phase(U: Potential, grid_p: Grid1D, grid_r: Grid1D, params: EvolutionParams) -> np.ndarray:
    lam = native_frequencies(grid_p)
    r = grid_r.points
    if params.hbar == 0.0:
        gen = np.multiply.outer(lam, U.derivative_samples(1, params.mass))
    elif params.method == "spectral_kernel":
        shift = params.hbar * lam / 2.0
        du = U.samples_at(r[None, :] + shift[:, None], params.mass) - U.samples_at(
            r[None, :] - shift[:, None], params.mass
        )
        gen = du / params.hbar
    else:
        cap = SERIES_CAP if params.n_max == "auto" else int(params.n_max)
        s = params.hbar * lam / 2.0
        gen = np.multiply.outer(lam, U.derivative_samples(1, params.mass))
        for n in range(1, cap + 1):
            du = U.derivative_samples(2 * n + 1, params.mass)
            if not np.any(du):
                break
            gen = gen + np.multiply.outer(lam * s ** (2 * n), du) / factorial(2 * n + 1)
    return np.exp(1j * params.dt * gen)


def _energy(W: WignerDistribution, U: Potential, mass: float) -> float:
    vol = W.grid_p.step * W.grid_r.step
    kinetic = float(((W.grid_p.points**2 / (2.0 * mass))[:, None] * W.values).sum() * vol)
    potential = float((U.samples(mass)[None, :] * W.values).sum() * vol)
    return kinetic + potential


def propagate(W0: WignerDistribution, U: Potential, params: EvolutionParams) -> Trajectory:
    """Strang split-step evolution with snapshots and a conservation log."""
    _check_rhs_inputs(W0, U)
    grid_p, grid_r = W0.grid_p, W0.grid_r
    k = native_frequencies(grid_r)
    half_stream = np.exp(
        -1j * np.multiply.outer(grid_p.points, k) * params.dt / (2.0 * params.mass)
    )
    kick = _kick_phase(U, grid_p, grid_r, params)

    traj = Trajectory()
    traj.snapshots.append((0.0, W0))
    traj.conserved.append((0.0, W0.normalization, _energy(W0, U, params.mass)))

    values = W0.values.astype(complex)
    for step in range(1, params.steps + 1):
        values = np.fft.ifft(np.fft.fft(values, axis=1) * half_stream, axis=1)
        values = np.fft.ifft(np.fft.fft(values, axis=0) * kick, axis=0)
        values = np.fft.ifft(np.fft.fft(values, axis=1) * half_stream, axis=1)
        if step % params.snapshot_every == 0 or step == params.steps:
            t = step * params.dt
            try:
                snap = WignerDistribution(grid_p, grid_r, values.real, decay_tol=PROPAGATION_DECAY_TOL)
            except DecayGuardError as exc:
                raise DecayGuardError(f"decay guard violated at t = {t}: {exc}") from exc
            traj.snapshots.append((t, snap))
            traj.conserved.append((t, snap.normalization, _energy(snap, U, params.mass)))
    return traj


def analytic_free_evolution(W0: WignerDistribution, t: float, mass: float) -> WignerDistribution:
    """Exact free streaming by characteristics via a spectral shear."""
    k = native_frequencies(W0.grid_r)
    phase = np.exp(-1j * np.multiply.outer(W0.grid_p.points, k) * t / mass)
    sheared = np.fft.ifft(np.fft.fft(W0.values, axis=1) * phase, axis=1).real
    return WignerDistribution(W0.grid_p, W0.grid_r, sheared)
