"""Window states φ₀ in coordinate and momentum representation.

A window is a fixed unit-norm reference state. Four kinds are supported:

* :class:`GaussianWindow` with width parameter ``beta`` centred at
  ``(x_w, k_w)``;
* :class:`SquareWindow`, constant on ``[-a, a]``;
* :class:`OscillatorWindow`, the ``n``-th excitation of a Gaussian window;
* :class:`CustomWindow`, arbitrary samples.

Momentum representations use ``φ̃(k) = (2π)^{-1/2} ∫ φ(x) e^{-ikx} dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate, special

from .errors import ConfigError, TruncationError
from .numgrid import Axis, Wavefunction1D

__all__ = [
    "GaussianWindow",
    "SquareWindow",
    "OscillatorWindow",
    "CustomWindow",
    "WindowSpec",
    "sample_window",
    "window_momentum_rep",
    "excited_window",
    "hermite_functions",
    "parse_window",
    "format_window",
]

#: Largest tail mass tolerated when sampling a window.
SAMPLE_TAIL = 1e-12
#: Largest tail mass tolerated for excited windows.
EXCITED_TAIL = 1e-10
#: Highest supported excitation order.
MAX_EXCITATION = 12


def hermite_functions(nmax: int, xi) -> np.ndarray:
    """Normalized Hermite functions ``h_0..h_nmax`` at ``xi``.

    ``h_n(ξ) = π^{-1/4} (2ⁿ n!)^{-1/2} H_n(ξ) e^{-ξ²/2}``, computed with the
    stable three-term recurrence. The result has shape ``(nmax + 1,) + xi.shape``.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((nmax + 1,) + xi.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * xi**2)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * xi * out[0]
    for n in range(1, nmax):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * xi * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


@dataclass(frozen=True)
class GaussianWindow:
    """Gaussian window ``(β²/π)^{1/4} exp(-β²(x-x_W)²/2 + i k_W (x - x_W/2))``."""

    beta: float = 1.0
    x_w: float = 0.0
    k_w: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    @property
    def lam(self) -> complex:
        """Complex centre ``λ = x_W + i k_W / β²``."""
        return complex(self.x_w, self.k_w / self.beta**2)

    @classmethod
    def from_lambda(cls, beta: float, lam: complex) -> "GaussianWindow":
        lam = complex(lam)
        return cls(beta, lam.real, lam.imag * beta**2)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        b = self.beta
        return (b * b / np.pi) ** 0.25 * np.exp(
            -0.5 * b * b * (x - self.x_w) ** 2 + 1j * self.k_w * (x - 0.5 * self.x_w)
        )

    def momentum(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        b = self.beta
        return (1.0 / (b * b * np.pi)) ** 0.25 * np.exp(
            -0.5 * (k - self.k_w) ** 2 / (b * b) - 1j * (k - 0.5 * self.k_w) * self.x_w
        )

    def tail_mass(self, lo: float, hi: float) -> float:
        """Probability outside ``[lo, hi]``."""
        b = self.beta
        return 0.5 * (special.erfc(b * (hi - self.x_w)) + special.erfc(b * (self.x_w - lo)))

    def momentum_tail_mass(self, lo: float, hi: float) -> float:
        b = self.beta
        return 0.5 * (special.erfc((hi - self.k_w) / b) + special.erfc((self.k_w - lo) / b))


@dataclass(frozen=True)
class SquareWindow:
    """Square window ``1/√(2a)`` on ``|x| < a``, zero outside.

    At the jumps ``|x| = a`` the sampled value is the midpoint
    ``1/(2√(2a))``.
    """

    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("square window half-width must be positive")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = 1.0 / np.sqrt(2 * self.a)
        ax = np.abs(x)
        scale = max(1.0, self.a)
        edge = np.isclose(ax, self.a, rtol=0, atol=1e-12 * scale)
        out = np.where(ax < self.a, h, 0.0)
        return np.where(edge, 0.5 * h, out).astype(complex)

    def momentum(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        a = self.a
        # sin(ka)/(k√(πa)), written through sinc to stay finite at k = 0
        return (np.sqrt(a / np.pi) * np.sinc(k * a / np.pi)).astype(complex)

    def tail_mass(self, lo: float, hi: float) -> float:
        return 0.0 if (lo <= -self.a and hi >= self.a) else 1.0

    def momentum_tail_mass(self, lo: float, hi: float) -> float:
        # ∫_{|k|>K} sin²(ka)/(πak²) dk, from the sine integral
        def one_side(kk):
            if kk <= 0:
                return 1.0 - one_side(-kk) if kk < 0 else 0.5
            if np.isinf(kk):
                return 0.0
            u = 2 * self.a * kk
            si, _ = special.sici(u)
            return (np.sin(self.a * kk) ** 2 / (self.a * kk) - si + np.pi / 2) / np.pi
        return float(one_side(hi) + one_side(-lo))


@dataclass(frozen=True)
class OscillatorWindow:
    """``n``-th oscillator excitation of the Gaussian window with the same parameters.

    ``φ̌_n(x) = √β h_n(β(x - x_W)) e^{i k_W (x - x_W/2)}`` where ``h_n`` are the
    normalized Hermite functions, i.e. the Gaussian window acted on ``n`` times
    by the creation operator ``(β(x - λ̄) - ∂ₓ/β)/√2`` and divided by ``√n!``.
    """

    n: int = 1
    beta: float = 1.0
    x_w: float = 0.0
    k_w: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError("excitation order must be a nonnegative integer")
        if self.n > MAX_EXCITATION:
            raise ValueError(f"excitation order above {MAX_EXCITATION} is not supported")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        object.__setattr__(self, "n", int(self.n))

    @property
    def base(self) -> GaussianWindow:
        return GaussianWindow(self.beta, self.x_w, self.k_w)

    @property
    def lam(self) -> complex:
        return self.base.lam

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xi = self.beta * (x - self.x_w)
        h = hermite_functions(self.n, xi)[self.n]
        return np.sqrt(self.beta) * h * np.exp(1j * self.k_w * (x - 0.5 * self.x_w))

    def momentum(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        kappa = (k - self.k_w) / self.beta
        h = hermite_functions(self.n, kappa)[self.n]
        return ((-1j) ** self.n / np.sqrt(self.beta)) * h * np.exp(
            -1j * (k - 0.5 * self.k_w) * self.x_w
        )

    def _tail(self, lo_xi: float, hi_xi: float) -> float:
        def dens(xi):
            return float(hermite_functions(self.n, xi)[self.n] ** 2)

        upper = integrate.quad(dens, hi_xi, np.inf, epsabs=1e-16, limit=200)[0]
        lower = integrate.quad(dens, -np.inf, lo_xi, epsabs=1e-16, limit=200)[0]
        return upper + lower

    def tail_mass(self, lo: float, hi: float) -> float:
        b = self.beta
        return self._tail(b * (lo - self.x_w), b * (hi - self.x_w))

    def momentum_tail_mass(self, lo: float, hi: float) -> float:
        b = self.beta
        return self._tail((lo - self.k_w) / b, (hi - self.k_w) / b)


@dataclass(frozen=True, eq=False)
class CustomWindow:
    """Window given by samples; evaluated off-grid by band-limited interpolation.

    Points outside the sampled range evaluate to zero.
    """

    samples: Wavefunction1D

    def __post_init__(self):
        nrm = self.samples.norm()
        if abs(nrm - 1.0) > 1e-8:
            raise ValueError(f"custom window must have unit norm, got {nrm:.12g}")

    @property
    def axis(self) -> Axis:
        return self.samples.axis

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        ax = self.axis
        out = np.zeros(flat.shape, dtype=complex)
        inside = (flat >= ax.min) & (flat <= ax.max)
        if np.any(inside):
            pts = flat[inside]
            # direct evaluation of the trigonometric interpolant at scattered points
            n = ax.n
            k = 2 * np.pi * np.fft.fftfreq(n, d=ax.spacing)
            spec = np.fft.fft(self.samples.values) / n
            if n % 2 == 0:
                spec = spec.copy()
                nyq = spec[n // 2]
                spec[n // 2] = 0.5 * nyq
                k = np.append(k, -k[n // 2])
                spec = np.append(spec, 0.5 * nyq)
            out[inside] = np.exp(1j * np.outer(pts - ax.min, k)) @ spec
        return out.reshape(x.shape)

    def momentum(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        ax = self.axis
        w = ax.weights()
        vals = self.samples.values * w
        return (np.exp(-1j * np.outer(k.ravel(), ax.points)) @ vals / np.sqrt(2 * np.pi)).reshape(
            k.shape
        )

    def tail_mass(self, lo: float, hi: float) -> float:
        ax = self.axis
        x = ax.points
        dens = np.abs(self.samples.values) ** 2
        outside = (x < lo) | (x > hi)
        return float(np.sum(dens[outside] * ax.weights()[outside]))

    def momentum_tail_mass(self, lo: float, hi: float) -> float:
        ax = self.axis
        k = np.linspace(-ax.nyquist, ax.nyquist, 4 * ax.n + 1)
        dens = np.abs(self.momentum(k)) ** 2
        dk = k[1] - k[0]
        outside = (k < lo) | (k > hi)
        return float(np.sum(dens[outside]) * dk)


WindowSpec = Union[GaussianWindow, SquareWindow, OscillatorWindow, CustomWindow]


def _check_tail(spec, axis: Axis, limit: float, momentum: bool = False):
    lo, hi = axis.min, axis.max
    if isinstance(spec, SquareWindow) and not momentum:
        if not (lo <= -spec.a and hi >= spec.a):
            raise TruncationError(
                f"axis [{lo}, {hi}] does not contain the square window support [-{spec.a}, {spec.a}]"
            )
        return
    if isinstance(spec, SquareWindow) and momentum:
        # the sinc spectrum decays slowly; only the normalization warning applies
        return
    tail = spec.momentum_tail_mass(lo, hi) if momentum else spec.tail_mass(lo, hi)
    if tail > limit:
        raise TruncationError(f"window tail mass {tail:.3g} outside the axis exceeds {limit:g}")


def sample_window(spec: WindowSpec, axis: Axis) -> Wavefunction1D:
    """Sample a window on ``axis``.

    Analytic windows are evaluated exactly; no renormalization is applied,
    so the samples inherit the exact unit norm of the closed form.

    Raises
    ------
    TruncationError
        If the window mass outside the axis exceeds ``1e-12`` or the axis
        misses part of the square window support.
    """
    _check_tail(spec, axis, SAMPLE_TAIL)
    if isinstance(spec, CustomWindow):
        if spec.axis == axis:
            return spec.samples
        return Wavefunction1D(axis, spec(axis.points))
    return Wavefunction1D(axis, spec(axis.points))


def window_momentum_rep(spec: WindowSpec, k_axis: Axis) -> Wavefunction1D:
    """Sample ``φ̃₀(k)`` on ``k_axis``."""
    _check_tail(spec, k_axis, SAMPLE_TAIL, momentum=True)
    return Wavefunction1D(k_axis, spec.momentum(k_axis.points))


def excited_window(base: GaussianWindow, n: int, axis: Axis) -> Wavefunction1D:
    """``n``-th excitation of a Gaussian window sampled on ``axis``.

    Raises
    ------
    ValueError
        If ``n`` is negative or above 12.
    TruncationError
        If the excited window has more than ``1e-10`` of its mass outside
        the axis.
    """
    if not isinstance(base, GaussianWindow):
        raise TypeError("excited_window needs a Gaussian base window")
    spec = OscillatorWindow(n, base.beta, base.x_w, base.k_w)
    _check_tail(spec, axis, EXCITED_TAIL)
    return Wavefunction1D(axis, spec(axis.points))


def square_window_norm(spec: SquareWindow, axis: Axis) -> float:
    """Exact L² norm of the sampled square window, treating the jumps exactly.

    The trapezoidal rule misplaces the jump by up to half a cell, so the
    norm is integrated piecewise: the sample value is constant between the
    jump points, which are handled analytically.
    """
    x = axis.points
    total = 0.0
    for i in range(axis.n - 1):
        x0, x1 = x[i], x[i + 1]
        lo, hi = max(x0, -spec.a), min(x1, spec.a)
        if hi > lo:
            total += (hi - lo) / (2 * spec.a)
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# text form used by the command line and configuration files

_WINDOW_KEYS = {
    "gaussian": {"beta": "beta", "xw": "x_w", "kw": "k_w"},
    "square": {"a": "a"},
    "oscillator": {"n": "n", "beta": "beta", "xw": "x_w", "kw": "k_w"},
}


def parse_window(text: str) -> WindowSpec:
    """Parse ``name:key=value,...`` into a window.

    Examples
    --------
    >>> parse_window("gaussian:beta=2,xw=0.5")
    GaussianWindow(beta=2.0, x_w=0.5, k_w=0.0)
    >>> parse_window("square:a=1")
    SquareWindow(a=1.0)
    """
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name not in _WINDOW_KEYS:
        raise ConfigError(f"unknown window {name!r}; expected one of {sorted(_WINDOW_KEYS)}")
    keys = _WINDOW_KEYS[name]
    kwargs = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        key = key.strip().lower()
        if not eq or key not in keys:
            raise ConfigError(f"bad window parameter {item!r} for {name}")
        try:
            kwargs[keys[key]] = int(value) if key == "n" else float(value)
        except ValueError as exc:
            raise ConfigError(f"bad number in window parameter {item!r}") from exc
    try:
        if name == "gaussian":
            return GaussianWindow(**kwargs)
        if name == "square":
            return SquareWindow(**kwargs)
        return OscillatorWindow(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def format_window(spec: WindowSpec) -> str:
    """Inverse of :func:`parse_window`."""
    if isinstance(spec, GaussianWindow):
        return f"gaussian:beta={spec.beta!r},xw={spec.x_w!r},kw={spec.k_w!r}"
    if isinstance(spec, SquareWindow):
        return f"square:a={spec.a!r}"
    if isinstance(spec, OscillatorWindow):
        return f"oscillator:n={spec.n},beta={spec.beta!r},xw={spec.x_w!r},kw={spec.k_w!r}"
    raise ConfigError("custom windows have no text form")

