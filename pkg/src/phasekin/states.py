"""Distribution types, Gaussian presets, marginals, moments, and sampling.

The joint distribution couples the force-carrier position R to the real
particle's phase-space point (p, r).  R and r live on one shared grid so
the contraction at R = r is an exact diagonal slice.  Away from the
classical limit the joint may carry genuine tails in R of magnitude up
to ~1e-10 of its peak; 3-axis decay checks therefore use a looser guard
than the 1e-10 used for 1- and 2-axis fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DecayGuardError, NormalizationError, SignedDensityError
from .grids import (
    DECAY_TOL,
    Field,
    Grid1D,
    ensure_decaying,
    require_same_grid,
)

# Decay guard applied to 3-axis joints: quantum corrections carry physical
# R-tails around 1e-10 of the peak (1e-8 once built from evolved snapshots),
# so the aliasing alarm sits above them.
JOINT_DECAY_TOL = 1e-7

NORMALIZATION_TOL = 1e-8
JOINT_NORMALIZATION_TOL = 1e-7
MAX_MOMENT_ORDER = 8


def _quadrature(values: np.ndarray, grids) -> float:
    return float(values.sum() * np.prod([g.step for g in grids]))


@dataclass(frozen=True)
class WignerDistribution:
    """Real quasi-probability W(p, r); may be negative, integrates to one.

    ``decay_tol`` is the boundary guard level; the propagator relaxes it
    for mid-run snapshots, where anharmonic evolution grows physical
    interference tails around 1e-7 of the peak.
    """

    grid_p: Grid1D
    grid_r: Grid1D
    values: np.ndarray
    decay_tol: float = DECAY_TOL

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid_p.n, self.grid_r.n):
            raise ValueError(f"W shape {v.shape} does not match grids")
        if not np.all(np.isfinite(v)):
            raise ValueError("W contains non-finite values")
        norm = _quadrature(v, (self.grid_p, self.grid_r))
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"W integrates to {norm!r}, expected 1 within {NORMALIZATION_TOL}")
        object.__setattr__(self, "normalization", norm)
        ensure_decaying(v, self.decay_tol, "Wigner distribution")

    normalization: float = field(init=False, repr=False, compare=False)

    def as_field(self) -> Field:
        return Field((self.grid_p, self.grid_r), self.values)


@dataclass(frozen=True)
class VirtualDensity:
    """Nonnegative normalized density of the force-carrier position."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.n,):
            raise ValueError(f"density shape {v.shape} does not match grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("density contains non-finite values")
        if v.min() < -1e-12:
            raise ValueError(f"density has negative values down to {v.min()!r}")
        norm = _quadrature(v, (self.grid,))
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"density integrates to {norm!r}, expected 1 within {NORMALIZATION_TOL}")
        ensure_decaying(v, DECAY_TOL, "virtual density")

    def as_field(self) -> Field:
        return Field((self.grid,), self.values)


@dataclass(frozen=True)
class JointDistribution:
    """Real joint density F(R, p, r) of virtual position and real phase space.

    R and r share one grid.  Values may be negative away from the
    classical limit.
    """

    grid_R: Grid1D
    grid_p: Grid1D
    grid_r: Grid1D
    values: np.ndarray
    hbar_used: float = 0.0

    def __post_init__(self) -> None:
        require_same_grid(self.grid_R, self.grid_r, "joint distribution R/r axes")
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid_R.n, self.grid_p.n, self.grid_r.n):
            raise ValueError(f"F shape {v.shape} does not match grids")
        if not np.all(np.isfinite(v)):
            raise ValueError("F contains non-finite values")
        norm = _quadrature(v, (self.grid_R, self.grid_p, self.grid_r))
        if abs(norm - 1.0) > JOINT_NORMALIZATION_TOL:
            raise NormalizationError(f"F integrates to {norm!r}, expected 1 within {JOINT_NORMALIZATION_TOL}")

    def as_field(self) -> Field:
        return Field((self.grid_R, self.grid_p, self.grid_r), self.values)


@dataclass(frozen=True)
class MomentSet:
    """Raw moments keyed by per-variable order tuples."""

    moments: dict

    def __getitem__(self, key):
        if isinstance(key, int):
            key = (key,)
        return self.moments[tuple(key)]

    def items(self):
        return self.moments.items()


def _check_preset_fits(grid: Grid1D, center: float, sigma: float, name: str) -> None:
    if not sigma > 0:
        raise ValueError(f"{name}: sigma must be positive, got {sigma}")
    if grid.half_width < abs(center) + 8.0 * sigma:
        raise DecayGuardError(
            f"{name}: grid half_width {grid.half_width} cannot hold a Gaussian at "
            f"mean {center} with sigma {sigma} (needs |mean| + 8 sigma)"
        )


def gaussian_density(grid: Grid1D, mean: float, sigma: float) -> VirtualDensity:
    """Normalized Gaussian density preset; quadrature-renormalized."""
    _check_preset_fits(grid, mean, sigma, "gaussian_density")
    v = np.exp(-((grid.points - mean) ** 2) / (2.0 * sigma * sigma))
    v /= v.sum() * grid.step
    return VirtualDensity(grid, v)


def gaussian_wigner(
    grid_p: Grid1D,
    grid_r: Grid1D,
    p0: float,
    r0: float,
    sigma_p: float,
    sigma_r: float,
) -> WignerDistribution:
    """Product-Gaussian phase-space preset centered at (p0, r0).

    With sigma_r * sigma_p = hbar / 2 this is a coherent state.
    """
    _check_preset_fits(grid_p, p0, sigma_p, "gaussian_wigner (p axis)")
    _check_preset_fits(grid_r, r0, sigma_r, "gaussian_wigner (r axis)")
    gp = np.exp(-((grid_p.points - p0) ** 2) / (2.0 * sigma_p * sigma_p))
    gr = np.exp(-((grid_r.points - r0) ** 2) / (2.0 * sigma_r * sigma_r))
    v = np.multiply.outer(gp, gr)
    v /= v.sum() * grid_p.step * grid_r.step
    return WignerDistribution(grid_p, grid_r, v)


def marginal_over_R(F: JointDistribution) -> WignerDistribution:
    """Integrate out the virtual position; recovers W."""
    w = F.values.sum(axis=0) * F.grid_R.step
    return WignerDistribution(F.grid_p, F.grid_r, w)


def marginal_over_pr(F: JointDistribution) -> VirtualDensity:
    """Integrate out the real-particle phase space; recovers the density."""
    rho = F.values.sum(axis=(1, 2)) * F.grid_p.step * F.grid_r.step
    return VirtualDensity(F.grid_R, rho)


def _moment_grids(obj):
    if isinstance(obj, VirtualDensity):
        return (obj.grid,), obj.values, DECAY_TOL
    if isinstance(obj, WignerDistribution):
        return (obj.grid_p, obj.grid_r), obj.values, DECAY_TOL
    if isinstance(obj, JointDistribution):
        return (obj.grid_R, obj.grid_p, obj.grid_r), obj.values, JOINT_DECAY_TOL
    if isinstance(obj, Field):
        return tuple(obj.axes), obj.values, DECAY_TOL
    raise TypeError(f"cannot compute moments of {type(obj).__name__}")


def moments(obj, orders) -> MomentSet:
    """Quadrature raw moments of a distribution or field.

    Order tuples index the object's leading axes; for a joint
    distribution a pair (a, b) means <R^a p^b> with r integrated out.
    Total order is capped at 8.
    """
    grids, values, tol = _moment_grids(obj)
    ensure_decaying(values, tol, "moment input")
    vol = float(np.prod([g.step for g in grids]))
    out = {}
    for order in orders:
        key = (order,) if isinstance(order, int) else tuple(order)
        if len(key) > len(grids):
            raise ValueError(f"order tuple {key} has more entries than axes")
        if any(o < 0 or int(o) != o for o in key):
            raise ValueError(f"orders must be nonnegative integers, got {key}")
        if sum(key) > MAX_MOMENT_ORDER:
            raise ValueError(f"total moment order {sum(key)} exceeds cap {MAX_MOMENT_ORDER}")
        weighted = values
        for ax, o in enumerate(key):
            if o:
                shape = [1] * values.ndim
                shape[ax] = grids[ax].n
                weighted = weighted * (grids[ax].points ** o).reshape(shape)
        out[key] = float(weighted.sum() * vol)
    return MomentSet(out)


def sample_joint(F: JointDistribution, count: int, seed: int) -> np.ndarray:
    """Draw (R, p, r) triples from an effectively nonnegative joint.

    Inverse-CDF over the flattened grid with per-cell uniform jitter;
    reproducible for a fixed seed.  Returns an array of shape (count, 3).
    """
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    vmax = float(F.values.max())
    vmin = float(F.values.min())
    if vmin < -1e-9 * vmax:
        raise SignedDensityError(
            f"joint has negative lobes (min {vmin:.3e} vs max {vmax:.3e}); "
            "no sampling interpretation exists"
        )
    weights = np.clip(F.values, 0.0, None).ravel()
    cdf = np.cumsum(weights)
    total = cdf[-1]
    rng = np.random.default_rng(seed)
    picks = np.searchsorted(cdf, rng.random(count) * total, side="right")
    picks = np.minimum(picks, weights.size - 1)
    idx = np.unravel_index(picks, F.values.shape)
    jitter = rng.random((count, 3)) - 0.5
    grids = (F.grid_R, F.grid_p, F.grid_r)
    cols = [g.points[i] + jitter[:, ax] * g.step for ax, (g, i) in enumerate(zip(grids, idx))]
    return np.stack(cols, axis=1)
