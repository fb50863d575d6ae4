"""Uniform grids, Fourier transforms, and spectral differentiation.

Transform convention
--------------------
The forward transform uses the characteristic-function sign and an
integral normalization::

    F(w) = sum_j f(x_j) exp(+i w x_j) * step

so the value at zero frequency equals the quadrature integral of ``f``.
The inverse carries the ``1/(2 pi)`` per axis.  Frequencies are stored
zero-centered with spacing ``pi / half_width``; the mapping to the FFT's
native ordering is internal.

Derivatives are evaluated in the FFT-native spectral domain, where
``d/dx`` is multiplication by ``(i w)``; on real input the result is
real (the unmatched Nyquist mode is dropped for odd orders).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DecayGuardError, GridMismatchError

# Boundary magnitude above this fraction of the global max fails the decay
# guard for 1- and 2-axis fields.  Exactly constant fields are exempt: they
# are trivially periodic and carry no aliasing risk.
DECAY_TOL = 1e-10


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of ``n`` samples on ``[-half_width, half_width)``."""

    n: int
    half_width: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 16, got {self.n}")
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "half_width", float(self.half_width))
        step = 2.0 * self.half_width / self.n
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "points", -self.half_width + step * np.arange(self.n))
        self.points.setflags(write=False)

    step: float = field(init=False, repr=False, compare=False)
    points: np.ndarray = field(init=False, repr=False, compare=False)


@dataclass(frozen=True)
class ConjugateGrid1D:
    """Angular-frequency dual of a :class:`Grid1D`, zero-centered."""

    n: int
    half_width: float

    def __post_init__(self) -> None:
        Grid1D(self.n, self.half_width)  # reuse validation
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "half_width", float(self.half_width))
        step = np.pi / self.half_width
        object.__setattr__(self, "step", step)
        freqs = step * np.arange(-self.n // 2, self.n // 2)
        object.__setattr__(self, "frequencies", freqs)
        self.frequencies.setflags(write=False)

    step: float = field(init=False, repr=False, compare=False)
    frequencies: np.ndarray = field(init=False, repr=False, compare=False)

    def parent(self) -> Grid1D:
        return Grid1D(self.n, self.half_width)


def conjugate(grid: Grid1D) -> ConjugateGrid1D:
    return ConjugateGrid1D(grid.n, grid.half_width)


@dataclass(frozen=True)
class Field:
    """Dense values on an ordered tuple of axes (1, 2, or 3)."""

    axes: tuple
    values: np.ndarray

    def __post_init__(self) -> None:
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        if not 1 <= len(axes) <= 3:
            raise ValueError("Field supports 1 to 3 axes")
        shape = tuple(a.n for a in axes)
        if self.values.shape != shape:
            raise ValueError(f"value shape {self.values.shape} does not match axes {shape}")

    @property
    def steps(self) -> tuple:
        return tuple(a.step for a in self.axes)

    def integral(self) -> complex:
        return self.values.sum() * float(np.prod(self.steps))


def make_grid(n: int, half_width: float) -> Grid1D:
    """Build a uniform grid; rejects non-power-of-two n and bad widths."""
    return Grid1D(n, half_width)


def boundary_ratio(values: np.ndarray) -> float:
    """Largest boundary-face magnitude over the global max magnitude."""
    gmax = float(np.abs(values).max())
    if gmax == 0.0:
        return 0.0
    worst = 0.0
    for ax in range(values.ndim):
        for idx in (0, -1):
            sl = [slice(None)] * values.ndim
            sl[ax] = idx
            worst = max(worst, float(np.abs(values[tuple(sl)]).max()))
    return worst / gmax


def ensure_decaying(values: np.ndarray, tol: float = DECAY_TOL, what: str = "field") -> None:
    """Raise :class:`DecayGuardError` unless boundary faces are negligible.

    Constant fields pass: they are exactly periodic.
    """
    gmax = float(np.abs(values).max())
    if gmax == 0.0:
        return
    if float(np.ptp(values.real)) <= 1e-14 * gmax and float(np.ptp(values.imag)) <= 1e-14 * gmax:
        return
    ratio = boundary_ratio(values)
    if ratio > tol:
        raise DecayGuardError(
            f"{what} is not decaying: boundary magnitude is {ratio:.3e} of the "
            f"global maximum (allowed {tol:.1e})"
        )


def _alternating(n: int) -> np.ndarray:
    alt = np.ones(n)
    alt[1::2] = -1.0
    return alt


def _reshape_for(vec: np.ndarray, ndim: int, axis: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = vec.size
    return vec.reshape(shape)


def fourier_forward(values: np.ndarray, grids, axes) -> np.ndarray:
    """Forward transform (``exp(+i w x)``, integral-normalized) along ``axes``.

    Output is complex with the transformed axes in zero-centered
    frequency order.
    """
    out = values.astype(complex, copy=True)
    for ax in axes:
        g = grids[ax]
        out = np.fft.fftshift(np.fft.ifft(out, axis=ax), axes=ax) * g.n
        out *= _reshape_for(g.step * _alternating(g.n), out.ndim, ax)
    return out


def fourier_inverse(values: np.ndarray, grids, axes) -> np.ndarray:
    """Inverse of :func:`fourier_forward` along ``axes``."""
    out = values.astype(complex, copy=True)
    for ax in axes:
        g = grids[ax]
        out *= _reshape_for(_alternating(g.n), out.ndim, ax)
        out = np.fft.fft(np.fft.ifftshift(out, axes=ax), axis=ax)
        out /= g.n * g.step
    return out


def forward_transform(f: Field, axes=None) -> Field:
    """Transform a field; returns a field on the conjugate axes.

    For a decaying field the value at all-zero frequency equals the
    quadrature integral.
    """
    if not np.all(np.isfinite(f.values)):
        raise ValueError("cannot transform a field with non-finite values")
    axes = tuple(range(len(f.axes))) if axes is None else tuple(axes)
    grids = [a if isinstance(a, Grid1D) else a.parent() for a in f.axes]
    out = fourier_forward(f.values, grids, axes)
    new_axes = list(f.axes)
    for ax in axes:
        new_axes[ax] = conjugate(grids[ax])
    return Field(tuple(new_axes), out)


def inverse_transform(f: Field, axes=None) -> Field:
    """Invert :func:`forward_transform` on the given axes."""
    if not np.all(np.isfinite(f.values)):
        raise ValueError("cannot transform a field with non-finite values")
    axes = tuple(i for i, a in enumerate(f.axes) if isinstance(a, ConjugateGrid1D)) if axes is None else tuple(axes)
    grids = [a.parent() if isinstance(a, ConjugateGrid1D) else a for a in f.axes]
    out = fourier_inverse(f.values, grids, axes)
    new_axes = list(f.axes)
    for ax in axes:
        new_axes[ax] = grids[ax]
    return Field(tuple(new_axes), out)


def native_frequencies(grid: Grid1D) -> np.ndarray:
    """Angular frequencies in the FFT's native ordering."""
    return 2.0 * np.pi * np.fft.fftfreq(grid.n, grid.step)


def derivative_array(values: np.ndarray, grid: Grid1D, axis: int, order: int) -> np.ndarray:
    """Spectral derivative of given order along one axis of a plain array."""
    w = native_frequencies(grid)
    mult = (1j * w) ** order
    if order % 2 == 1:
        mult[grid.n // 2] = 0.0  # unmatched Nyquist mode has no real odd derivative
    spec = np.fft.fft(values, axis=axis) * _reshape_for(mult, values.ndim, axis)
    out = np.fft.ifft(spec, axis=axis)
    return out.real if np.isrealobj(values) else out


def spectral_derivative(f: Field, axis: int, order: int) -> Field:
    """Differentiate a field ``order`` times along ``axis``.

    The field must decay along that axis; orders above ``n/4`` are
    rejected as spectrally meaningless.
    """
    if order < 0 or int(order) != order:
        raise ValueError(f"derivative order must be a nonnegative integer, got {order}")
    grid = f.axes[axis]
    if not isinstance(grid, Grid1D):
        raise ValueError("spectral_derivative acts on coordinate axes, not conjugate axes")
    if order > grid.n // 4:
        raise ValueError(f"order {order} exceeds n/4 = {grid.n // 4} on this grid")
    if order == 0:
        return Field(f.axes, f.values.copy())
    ensure_decaying(f.values, what=f"derivative input (axis {axis})")
    return Field(f.axes, derivative_array(f.values, grid, axis, order))


def require_same_grid(a: Grid1D, b: Grid1D, what: str) -> None:
    if a != b:
        raise GridMismatchError(f"{what}: grids differ ({a} vs {b})")
