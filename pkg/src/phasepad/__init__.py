"""Phase-space amplitudes of quantum states.

The amplitude of a state ``ψ`` relative to a window ``φ₀`` is

    Ψ(q, p) = √(2/π) ∫ ψ(u) conj(φ₀(2q − u)) e^{2ip(q − u)} du,

with ``ħ = 1``. Submodules:

``numgrid``
    Grids, sampled fields, quadrature, derivatives and Fourier helpers.
``windows``
    Gaussian, square, oscillator-excited and sampled window states.
``xform``
    Forward and inverse transforms, Gabor, symplectic Fourier, spectrogram.
``staralg``
    Polynomial symbols, Moyal star products, Bopp operators, Born relation.
``analytic``
    Closed-form amplitudes, Wigner functions and the Bargmann representation.
``dynamics``
    Split-step evolution and eigen-expansions.
``validation``, ``figures``, ``cli``
    Acceptance checks, figure data and the command-line front end.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .numgrid import Axis, PhaseSpaceField, Wavefunction1D, inner_product, integrate_2d, l2_norm  # noqa: E402
from .windows import (  # noqa: E402
    CustomWindow,
    GaussianWindow,
    OscillatorWindow,
    SquareWindow,
    format_window,
    parse_window,
    sample_window,
)
from .xform import (  # noqa: E402
    TransformPlan,
    forward_amplitude,
    gabor_transform,
    inverse_amplitude,
    pointwise_inverse,
    spectrogram_husimi,
    symplectic_fourier,
)
from .staralg import (  # noqa: E402
    PolySymbol,
    born_wigner,
    bopp_apply,
    expectation,
    star_product,
    state_projection_residual,
    subspace_residual,
    wigner_of,
)
