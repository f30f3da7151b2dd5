"""Uniform grids, quadrature, spectral utilities and the complex error function.

Every other module builds on the containers defined here. Fields are stored
as numpy arrays on uniform axes and integrated with the trapezoidal rule,
which is spectrally accurate for the rapidly decaying integrands that occur
in phase-space work.

Fourier sums on arbitrary uniform input and output grids are evaluated with a
Bluestein chirp-z algorithm (:func:`chirp_dft`), so neither grid size nor the
ratio of grid spacings is restricted.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.fft as sfft
import scipy.special

from .errors import (
    AccuracyWarning,
    DomainError,
    InvalidFieldError,
    RangeError,
    ShapeError,
)

__all__ = [
    "Axis",
    "Wavefunction1D",
    "PhaseSpaceField",
    "trapezoid_weights",
    "integrate_1d",
    "integrate_2d",
    "inner_product",
    "l2_norm",
    "spectral_derivative",
    "spectral_diff",
    "central_diff",
    "complex_erf",
    "chirp_dft",
    "fourier_eval",
    "fft_workers",
]

#: Largest |Im z| for which :func:`complex_erf` is used.
ERF_IMAG_LIMIT = 12.0

#: Relative edge magnitude above which a field counts as non-decaying.
EDGE_TOLERANCE = 1e-8


def fft_workers() -> int:
    """Number of FFT worker threads, taken from ``PHASEPAD_THREADS`` (default 1)."""
    raw = os.environ.get("PHASEPAD_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)


@dataclass(frozen=True)
class Axis:
    """Uniform one-dimensional grid ``min, min + h, ..., max`` with ``n`` points.

    Parameters
    ----------
    min, max : float
        End points, both included.
    n : int
        Number of samples, at least 8.
    """

    min: float
    max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise ValueError("axis end points must be finite")
        if not self.min < self.max:
            raise ValueError(f"axis requires min < max, got {self.min}, {self.max}")
        if int(self.n) != self.n or self.n < 8:
            raise ValueError(f"axis needs an integer n >= 8, got {self.n}")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "n", int(self.n))

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return self.min + self.spacing * np.arange(self.n)

    @property
    def nyquist(self) -> float:
        """Largest angular frequency representable on the axis."""
        return np.pi / self.spacing

    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights."""
        return trapezoid_weights(self)

    def contains(self, lo: float, hi: float, slack: float = 1e-12) -> bool:
        """Whether ``[lo, hi]`` lies inside the axis range."""
        tol = slack * max(1.0, abs(self.min), abs(self.max))
        return lo >= self.min - tol and hi <= self.max + tol

    def to_string(self) -> str:
        return f"{self.min!r},{self.max!r},{self.n}"

    @classmethod
    def default(cls) -> "Axis":
        """The default phase-space axis ``[-8, 8]`` with 256 points."""
        return cls(-8.0, 8.0, 256)


def _as_complex_array(values, n_expected: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.array(values, dtype=complex if np.iscomplexobj(values) else float)
    if arr.shape != n_expected:
        raise InvalidFieldError(f"{what} has shape {arr.shape}, expected {n_expected}")
    if not np.all(np.isfinite(arr)):
        raise InvalidFieldError(f"{what} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Wavefunction1D:
    """Samples of a one-dimensional function on a uniform axis.

    Attributes
    ----------
    axis : Axis
        Sampling grid.
    values : numpy.ndarray
        Read-only samples, complex or real, of length ``axis.n``.
    flags : tuple of str
        Accuracy flags attached by the routine that produced the samples.
    """

    axis: Axis
    values: np.ndarray
    flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "values", _as_complex_array(self.values, (self.axis.n,), "wavefunction")
        )

    @classmethod
    def from_function(cls, func, axis: Axis) -> "Wavefunction1D":
        """Sample ``func`` on ``axis``."""
        return cls(axis, np.asarray(func(axis.points)))

    @property
    def x(self) -> np.ndarray:
        return self.axis.points

    def norm(self) -> float:
        """L² norm computed with the trapezoidal rule."""
        return float(np.sqrt(integrate_1d(np.abs(self.values) ** 2, self.axis).real))

    def normalized(self) -> "Wavefunction1D":
        nrm = self.norm()
        if nrm == 0:
            raise InvalidFieldError("cannot normalize the zero function")
        return Wavefunction1D(self.axis, self.values / nrm, self.flags)

    def inner(self, other: "Wavefunction1D") -> complex:
        """Trapezoidal ``<self|other>``, antilinear in ``self``."""
        if self.axis != other.axis:
            raise ShapeError("wavefunctions live on different axes")
        return complex(integrate_1d(np.conj(self.values) * other.values, self.axis))

    def with_values(self, values) -> "Wavefunction1D":
        return Wavefunction1D(self.axis, values)

    def __add__(self, other: "Wavefunction1D") -> "Wavefunction1D":
        if self.axis != other.axis:
            raise ShapeError("wavefunctions live on different axes")
        return Wavefunction1D(self.axis, self.values + other.values)

    def __sub__(self, other: "Wavefunction1D") -> "Wavefunction1D":
        if self.axis != other.axis:
            raise ShapeError("wavefunctions live on different axes")
        return Wavefunction1D(self.axis, self.values - other.values)

    def __mul__(self, scalar) -> "Wavefunction1D":
        return Wavefunction1D(self.axis, self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class PhaseSpaceField:
    """Samples of a function on a uniform ``q x p`` grid.

    ``values[i, j]`` holds the sample at ``(q_axis.points[i], p_axis.points[j])``
    so rows run along ``q`` (row-major storage).
    """

    q_axis: Axis
    p_axis: Axis
    values: np.ndarray
    flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        shape = (self.q_axis.n, self.p_axis.n)
        vals = np.asarray(self.values)
        if vals.ndim == 1 and vals.size == shape[0] * shape[1]:
            vals = vals.reshape(shape)
        object.__setattr__(self, "values", _as_complex_array(vals, shape, "phase-space field"))

    @classmethod
    def from_function(cls, func, q_axis: Axis, p_axis: Axis) -> "PhaseSpaceField":
        """Sample ``func(q, p)`` on the product grid."""
        q, p = np.meshgrid(q_axis.points, p_axis.points, indexing="ij")
        return cls(q_axis, p_axis, np.broadcast_to(func(q, p), q.shape))

    @classmethod
    def zeros(cls, q_axis: Axis, p_axis: Axis) -> "PhaseSpaceField":
        return cls(q_axis, p_axis, np.zeros((q_axis.n, p_axis.n), dtype=complex))

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays ``(q, p)`` matching ``values``."""
        return np.meshgrid(self.q_axis.points, self.p_axis.points, indexing="ij")

    def same_grid(self, other: "PhaseSpaceField") -> bool:
        return self.q_axis == other.q_axis and self.p_axis == other.p_axis

    def _check(self, other: "PhaseSpaceField"):
        if not self.same_grid(other):
            raise ShapeError("phase-space fields live on different grids")

    def with_values(self, values, flags=()) -> "PhaseSpaceField":
        return PhaseSpaceField(self.q_axis, self.p_axis, values, tuple(flags))

    def conj(self) -> "PhaseSpaceField":
        return self.with_values(np.conj(self.values))

    def abs2(self) -> "PhaseSpaceField":
        return self.with_values(np.abs(self.values) ** 2)

    @property
    def real(self) -> "PhaseSpaceField":
        return self.with_values(self.values.real)

    @property
    def imag(self) -> "PhaseSpaceField":
        return self.with_values(self.values.imag)

    def norm(self) -> float:
        """L² norm ``sqrt(∫|f|² dΓ)``."""
        return l2_norm(self)

    def __add__(self, other: "PhaseSpaceField") -> "PhaseSpaceField":
        self._check(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "PhaseSpaceField") -> "PhaseSpaceField":
        self._check(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, other) -> "PhaseSpaceField":
        if isinstance(other, PhaseSpaceField):
            self._check(other)
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * other)

    __rmul__ = __mul__

    def __neg__(self) -> "PhaseSpaceField":
        return self.with_values(-self.values)


# ---------------------------------------------------------------------------
# quadrature


def trapezoid_weights(axis: Axis) -> np.ndarray:
    w = np.full(axis.n, axis.spacing)
    w[0] = w[-1] = 0.5 * axis.spacing
    return w


def integrate_1d(values: np.ndarray, axis: Axis) -> complex:
    """Trapezoidal integral of samples on ``axis`` (last array axis)."""
    return np.asarray(values) @ trapezoid_weights(axis)


def integrate_2d(f: PhaseSpaceField) -> complex:
    """Trapezoidal approximation of ``∫ f dq dp``.

    The summation order is fixed (rows first, then columns), so the result is
    reproducible bit for bit.

    Raises
    ------
    InvalidFieldError
        If the field contains non-finite entries.
    """
    vals = np.asarray(f.values)
    if not np.all(np.isfinite(vals)):
        raise InvalidFieldError("field contains non-finite entries")
    wq = trapezoid_weights(f.q_axis)
    wp = trapezoid_weights(f.p_axis)
    total = wq @ (vals @ wp)
    return complex(total)


def inner_product(f1: PhaseSpaceField, f2: PhaseSpaceField) -> complex:
    """``∫ conj(f1) f2 dΓ`` on a shared grid."""
    if not f1.same_grid(f2):
        raise ShapeError("inner product of fields on different grids")
    return integrate_2d(f1.with_values(np.conj(f1.values) * f2.values))


def l2_norm(f: PhaseSpaceField) -> float:
    return float(np.sqrt(max(integrate_2d(f.with_values(np.abs(f.values) ** 2)).real, 0.0)))


# ---------------------------------------------------------------------------
# derivatives


def _wavenumbers(n: int, h: float) -> np.ndarray:
    return 2 * np.pi * sfft.fftfreq(n, d=h)


def spectral_diff(values: np.ndarray, h: float, order: int = 1, axis: int = -1) -> np.ndarray:
    """FFT derivative of ``order`` along ``axis`` for periodic-extendable samples.

    For odd orders the unpaired Nyquist mode of an even-length grid is
    discarded, which keeps the derivative of a real function real.
    """
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    values = np.asarray(values)
    if order == 0:
        return values.copy()
    n = values.shape[axis]
    k = _wavenumbers(n, h)
    mult = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    spec = sfft.fft(values, axis=axis, workers=fft_workers())
    out = sfft.ifft(spec * mult.reshape(shape), axis=axis, workers=fft_workers())
    if not np.iscomplexobj(values):
        out = out.real
    return out


def _edge_ratio(values: np.ndarray, axis: int) -> float:
    peak = np.max(np.abs(values))
    if peak == 0:
        return 0.0
    edges = np.take(values, [0, -1], axis=axis)
    return float(np.max(np.abs(edges)) / peak)


def spectral_derivative(f, axis="q", order: int = 1):
    """Spectral derivative of a sampled function.

    Parameters
    ----------
    f : Wavefunction1D or PhaseSpaceField
        Samples to differentiate. They should decay to zero at the grid
        edges, so that the periodic extension is smooth.
    axis : {"q", "p", "x", 0, 1}
        Direction of differentiation. Wavefunctions accept only ``"x"``
        (or 0); fields accept ``"q"``/0 and ``"p"``/1.
    order : int
        Positive derivative order.

    Returns
    -------
    Wavefunction1D or PhaseSpaceField
        Same type as ``f``. If ``f`` does not decay at the edges, an
        ``"edge-nondecaying"`` flag is attached and an
        :class:`~phasepad.errors.AccuracyWarning` is emitted.
    """
    if int(order) != order or order < 1:
        raise ValueError("order must be a positive integer")
    if isinstance(f, Wavefunction1D):
        if axis not in ("x", 0, "q"):
            raise ValueError(f"unknown axis {axis!r} for a wavefunction")
        vals = spectral_diff(f.values, f.axis.spacing, order)
        flags = _decay_flags(f.values, -1)
        return Wavefunction1D(f.axis, vals, flags)
    if isinstance(f, PhaseSpaceField):
        if axis in ("q", 0):
            ax, h = 0, f.q_axis.spacing
        elif axis in ("p", 1):
            ax, h = 1, f.p_axis.spacing
        else:
            raise ValueError(f"unknown axis {axis!r} for a phase-space field")
        vals = spectral_diff(f.values, h, order, axis=ax)
        return f.with_values(vals, _decay_flags(f.values, ax))
    raise TypeError("spectral_derivative expects a Wavefunction1D or PhaseSpaceField")


def _decay_flags(values: np.ndarray, axis: int) -> tuple:
    if _edge_ratio(values, axis) > EDGE_TOLERANCE:
        warnings.warn(
            "field does not decay at the grid edges; spectral derivative is inaccurate",
            AccuracyWarning,
            stacklevel=3,
        )
        return ("edge-nondecaying",)
    return ()


def _fd_weights(order: int, radius: int) -> np.ndarray:
    """Central finite-difference weights for the ``order``-th derivative."""
    offsets = np.arange(-radius, radius + 1, dtype=float)
    vander = np.vander(offsets, increasing=True).T
    rhs = np.zeros(2 * radius + 1)
    rhs[order] = factorial(order)
    return np.linalg.solve(vander, rhs)


def central_diff(values: np.ndarray, h: float, order: int = 1, axis: int = -1,
                 radius: int = 4) -> np.ndarray:
    """Central finite differences with a ``2 * radius + 1`` point stencil.

    Points closer than ``radius`` to either end are returned as NaN. This
    suits functions that do not decay at the grid edges, where
    :func:`spectral_diff` would suffer from the periodic wrap-around.
    """
    values = np.moveaxis(np.asarray(values), axis, -1)
    wts = _fd_weights(order, radius) / h**order
    n = values.shape[-1]
    out = np.full(values.shape, np.nan, dtype=np.result_type(values, float))
    acc = np.zeros(values.shape[:-1] + (n - 2 * radius,), dtype=out.dtype)
    for j, wt in enumerate(wts):
        acc = acc + wt * values[..., j:n - 2 * radius + j]
    out[..., radius:n - radius] = acc
    return np.moveaxis(out, -1, axis)


# ---------------------------------------------------------------------------
# special functions


def complex_erf(z):
    """Error function of a complex argument.

    Evaluated through the Faddeeva function, which is accurate to about
    1e-13 relative over the whole supported strip ``|Im z| <= 12``.

    Raises
    ------
    DomainError
        If any argument has ``|Im z| > 12``, where ``erf`` grows like
        ``exp(|Im z|²)`` and relative accuracy degrades.
    """
    z = np.asarray(z)
    if np.any(~np.isfinite(z)):
        raise DomainError("complex_erf requires finite arguments")
    if np.any(np.abs(np.imag(z)) > ERF_IMAG_LIMIT):
        raise DomainError(f"complex_erf is supported only for |Im z| <= {ERF_IMAG_LIMIT}")
    out = scipy.special.erf(z.astype(complex))
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# Fourier sums on arbitrary uniform grids


def chirp_dft(values, x0: float, dx: float, w0: float, dw: float, m: int,
              sign: int = -1, axis: int = -1) -> np.ndarray:
    """Evaluate ``Σ_n values[n] exp(sign·i·ω_k·x_n)`` for ``k = 0..m-1``.

    Here ``x_n = x0 + n·dx`` is the input grid and ``ω_k = w0 + k·dw`` the
    output frequency grid; neither spacing is tied to the other. The sum is
    computed with Bluestein's algorithm in ``O((n + m) log(n + m))``.

    Parameters
    ----------
    values : array_like
        Samples, summed along ``axis``.
    x0, dx : float
        Start and spacing of the input grid.
    w0, dw : float
        Start and spacing of the output frequencies.
    m : int
        Number of output frequencies.
    sign : {-1, +1}
        Sign of the exponent.
    axis : int
        Array axis to transform.
    """
    values = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
    n = values.shape[-1]
    s = float(sign)
    theta = s * dw * dx
    jn = np.arange(n)
    km = np.arange(m)
    # pre-twiddle, chirp and convolution kernel
    pre = np.exp(1j * s * w0 * dx * jn) * np.exp(0.5j * theta * (jn * jn).astype(float))
    a = values * pre
    length = sfft.next_fast_len(n + m - 1)
    idx = np.arange(-(n - 1), m)
    kernel = np.exp(-0.5j * theta * (idx * idx).astype(float))
    kern_padded = np.zeros(length, dtype=complex)
    kern_padded[: m] = kernel[n - 1:]
    if n > 1:
        kern_padded[length - (n - 1):] = kernel[: n - 1]
    workers = fft_workers()
    fa = sfft.fft(a, n=length, axis=-1, workers=workers)
    fk = sfft.fft(kern_padded, workers=workers)
    conv = sfft.ifft(fa * fk, axis=-1, workers=workers)[..., :m]
    post = np.exp(0.5j * theta * (km * km).astype(float)) * np.exp(1j * s * (w0 + km * dw) * x0)
    out = conv * post
    return np.moveaxis(out, -1, axis)


def direct_dft(values, x: np.ndarray, w: np.ndarray, sign: int = -1, axis: int = -1) -> np.ndarray:
    """Reference ``O(n·m)`` evaluation of the sum computed by :func:`chirp_dft`."""
    values = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
    mat = np.exp(sign * 1j * np.outer(x, w))
    return np.moveaxis(values @ mat, -1, axis)


def _symmetric_spectrum(values: np.ndarray, axis: Axis) -> tuple[np.ndarray, np.ndarray]:
    """Fourier coefficients of the trigonometric interpolant, centred and symmetric.

    Returns coefficients ``c`` (last axis) and uniformly spaced wavenumbers
    ``k`` such that the interpolant is ``Σ c_j exp(i k_j (x - x0))``. For even
    lengths the Nyquist coefficient is split evenly between ``±k_N`` so the
    interpolant of real data is real.
    """
    n = values.shape[-1]
    spec = sfft.fft(values, axis=-1, workers=fft_workers()) / n
    spec = sfft.fftshift(spec, axes=-1)
    dk = 2 * np.pi / (n * axis.spacing)
    if n % 2 == 0:
        half = 0.5 * spec[..., :1]
        spec = np.concatenate([half, spec[..., 1:], half], axis=-1)
        k0 = -(n // 2) * dk
    else:
        k0 = -((n - 1) // 2) * dk
    return spec, k0 + dk * np.arange(spec.shape[-1])


def fourier_eval(values, axis: Axis, start: float, step: float, m: int,
                 offsets=None, along: int = -1) -> np.ndarray:
    """Evaluate the trigonometric interpolant of samples on a new uniform grid.

    The samples are taken as one period of a band-limited periodic function
    on ``axis``; the interpolant is evaluated at ``start + offset + j·step``
    for ``j = 0..m-1``. ``step`` may be negative or differ from the axis
    spacing.

    Parameters
    ----------
    values : array_like
        Samples; the interpolated direction is ``along``.
    axis : Axis
        Grid of the samples.
    start, step : float
        Output grid origin and spacing.
    m : int
        Output length.
    offsets : array_like, optional
        Extra shift for each slice across the remaining dimensions, for
        instance a different origin per row. Must broadcast against the
        array with ``along`` removed.
    along : int
        Array axis holding the samples.
    """
    values = np.moveaxis(np.asarray(values, dtype=complex), along, -1)
    if values.shape[-1] != axis.n:
        raise ShapeError("sample count does not match the axis")
    coeffs, k = _symmetric_spectrum(values, axis)
    if offsets is not None:
        off = np.asarray(offsets, dtype=float)[..., None]
        coeffs = coeffs * np.exp(1j * k * off)
    dk = k[1] - k[0]
    out = chirp_dft(coeffs, k[0], dk, start - axis.min, step, m, sign=+1)
    return np.moveaxis(out, -1, along)


def fourier_resample(values, axis: Axis, new_axis: Axis, along: int = -1,
                     check_range: bool = True) -> np.ndarray:
    """Band-limited interpolation of samples onto another uniform axis."""
    if check_range and not axis.contains(new_axis.min, new_axis.max):
        raise RangeError("target axis extends beyond the support of the samples")
    return fourier_eval(values, axis, new_axis.min, new_axis.spacing, new_axis.n, along=along)
