"""Spectra and resonances of complex Higgs oscillators on hyperbolic spaces.

The package is layered: ``special_functions`` (complex Gamma and 2F1),
``poschl_teller`` (closed-form scattering data of the Pöschl–Teller channel),
``models`` (the plane, Eckart and half-cylinder oscillators reduced to
channels), ``numerics`` (independent oracles) and ``cli``.
"""

from .errors import (
    DomainError,
    HiggsError,
    IncompleteEnumeration,
    InvalidMode,
    NoConvergence,
)
from .models import (
    EckartHiggs,
    HalfCylinder,
    HyperbolicPlane,
    deformation_path,
    model_eigenvalues,
    model_resonances,
    reduce,
)
from .poschl_teller import (
    Boundary,
    ChannelParams,
    Kind,
    SpectralPoint,
    WindowRect,
    discrete_spectrum,
    resonances,
    scattering_det_munu,
    scattering_det_nu,
)
from .special_functions import gamma, gauss_2f1, log_gamma

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "ChannelParams",
    "DomainError",
    "EckartHiggs",
    "HalfCylinder",
    "HiggsError",
    "HyperbolicPlane",
    "IncompleteEnumeration",
    "InvalidMode",
    "Kind",
    "NoConvergence",
    "SpectralPoint",
    "WindowRect",
    "deformation_path",
    "discrete_spectrum",
    "gamma",
    "gauss_2f1",
    "log_gamma",
    "model_eigenvalues",
    "model_resonances",
    "reduce",
    "resonances",
    "scattering_det_munu",
    "scattering_det_nu",
]
