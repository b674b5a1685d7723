"""Complex Higgs oscillators reduced to Pöschl–Teller channels.

Three models are supported:

* ``HyperbolicPlane``: Delta_H2 + omega^2 tanh^2 r.  Conjugating by sinh^{1/2} r
  and expanding in angular modes m gives channels with mu = |m| - 1/2,
  nu = sqrt(omega^2 + 1/4) - 1/2 and shift omega^2 + 1/4.
* ``EckartHiggs``: D_r^2 + alpha cosh^{-2} r + omega^2 tanh^2 r on the line,
  a single full-line channel with nu = sqrt(omega^2 - alpha + 1/4) - 1/2 and
  shift omega^2.
* ``HalfCylinder``: the half-cylinder dr^2 + cosh^2 r dtheta^2 of length l with a
  Dirichlet condition at r = 0.  Fourier mode m gives mu = 0,
  nu = sqrt(omega^2 - (2 pi m / l)^2) - 1/2 and shift omega^2 + 1/4.

All square roots are principal: Re >= 0, and Im >= 0 when Re = 0.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, Union

from .errors import DomainError, IncompleteEnumeration, InvalidMode
from .poschl_teller import (
    BOUNDARY_MARGIN,
    Boundary,
    ChannelParams,
    Enumeration,
    Kind,
    SpectralPoint,
    WindowRect,
    discrete_spectrum,
    eigenvalue_margin,
    resonances,
)

__all__ = [
    "HyperbolicPlane",
    "EckartHiggs",
    "HalfCylinder",
    "ModelSpec",
    "WindowRect",
    "principal_sqrt",
    "reduce",
    "model_channels",
    "model_eigenvalues",
    "eigenvalues_complete",
    "model_resonances",
    "resonance_value",
    "deformation_path",
    "DeformationPath",
    "eckart_eigenvalue_counts",
]


@dataclass(frozen=True)
class HyperbolicPlane:
    omega2: complex
    name = "plane"

    def scaled(self, t: float) -> "HyperbolicPlane":
        return replace(self, omega2=t * complex(self.omega2))


@dataclass(frozen=True)
class EckartHiggs:
    omega2: complex
    alpha: complex
    name = "eckart"

    def scaled(self, t: float) -> "EckartHiggs":
        return replace(self, omega2=t * complex(self.omega2))


@dataclass(frozen=True)
class HalfCylinder:
    omega2: complex
    ell: float
    name = "half-cylinder"

    def __post_init__(self):
        if not self.ell > 0:
            raise DomainError(f"half-cylinder length must be positive, got {self.ell}")

    def scaled(self, t: float) -> "HalfCylinder":
        return replace(self, omega2=t * complex(self.omega2))

    def wavenumber(self, m: int) -> float:
        return 2.0 * math.pi * m / self.ell


ModelSpec = Union[HyperbolicPlane, EckartHiggs, HalfCylinder]


def principal_sqrt(w: complex) -> complex:
    """Square root with Re >= 0, choosing Im >= 0 on the cut."""
    root = cmath.sqrt(complex(w))
    if root.real == 0.0 and root.imag < 0.0:
        root = -root
    return root


def reduce(model: ModelSpec, m: int = 0) -> ChannelParams:
    """Radial Pöschl–Teller channel of ``model`` for angular/Fourier index m."""
    omega2 = complex(model.omega2)
    if isinstance(model, HyperbolicPlane):
        return ChannelParams(
            mu=abs(m) - 0.5,
            nu=principal_sqrt(omega2 + 0.25) - 0.5,
            boundary=Boundary.HALF_LINE_REGULAR,
            shift=omega2 + 0.25,
        )
    if isinstance(model, EckartHiggs):
        if m != 0:
            raise InvalidMode("the Eckart model lives on the line and has no Fourier modes")
        return ChannelParams(
            mu=0.0,
            nu=principal_sqrt(omega2 - complex(model.alpha) + 0.25) - 0.5,
            boundary=Boundary.FULL_LINE,
            shift=omega2,
        )
    if isinstance(model, HalfCylinder):
        q = model.wavenumber(m)
        return ChannelParams(
            mu=0.0,
            nu=principal_sqrt(omega2 - q * q) - 0.5,
            boundary=Boundary.HALF_LINE_DIRICHLET,
            shift=omega2 + 0.25,
        )
    raise TypeError(f"unknown model {model!r}")


def _mode_list(model: ModelSpec, m_max: int, modes: Iterable[int] | None) -> list[int]:
    if isinstance(model, EckartHiggs):
        if modes is not None and any(m != 0 for m in modes):
            raise InvalidMode("the Eckart model only has m = 0")
        return [0]
    if modes is not None:
        out = sorted(set(int(m) for m in modes))
        if isinstance(model, HyperbolicPlane) and any(m < 0 for m in out):
            raise InvalidMode("plane angular indices are taken in N (m >= 0)")
        return out
    if m_max < 0:
        raise DomainError("m_max must be >= 0")
    if isinstance(model, HalfCylinder):
        return list(range(-m_max, m_max + 1))
    return list(range(m_max + 1))


def model_channels(model: ModelSpec, m_max: int = 0, modes: Iterable[int] | None = None):
    """(m, ChannelParams) pairs in enumeration order."""
    return [(m, reduce(model, m)) for m in _mode_list(model, m_max, modes)]


def _tag(point: SpectralPoint, model: ModelSpec, m: int) -> SpectralPoint:
    flags = list(point.flags)
    if isinstance(model, HyperbolicPlane) and m >= 1:
        flags.append("multiplicity-2")
    return replace(point, m=m, flags=tuple(flags))


def model_eigenvalues(
    model: ModelSpec, m_max: int, n_max: int, modes: Iterable[int] | None = None
) -> list[SpectralPoint]:
    """Closed-form eigenvalues over the channels m (see module docstring), sorted by (m, n)."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    points = []
    for m, channel in model_channels(model, m_max, modes):
        points.extend(_tag(p, model, m) for p in discrete_spectrum(channel, n_max=n_max))
    return points


def eigenvalues_complete(
    model: ModelSpec, m_max: int, n_max: int, modes: Iterable[int] | None = None
) -> bool:
    """True if ``model_eigenvalues`` with these bounds returns the whole discrete spectrum.

    Per channel the index n_max + 1 must already violate the eigenvalue
    inequality.  Without explicit ``modes`` the first omitted channel must have
    no eigenvalues either; its margin only decreases with |m|.
    """
    for _, channel in model_channels(model, m_max, modes):
        if eigenvalue_margin(channel, n_max + 1) >= -BOUNDARY_MARGIN:
            return False
    if modes is None and not isinstance(model, EckartHiggs):
        if eigenvalue_margin(reduce(model, m_max + 1), 0) >= -BOUNDARY_MARGIN:
            return False
    return True


def _modes_escape(model: ModelSpec, window: WindowRect, m_max: int) -> bool:
    """True if every channel with |m| > m_max lies entirely outside the window."""
    if isinstance(model, EckartHiggs):
        return True
    omega2 = complex(model.omega2)
    if isinstance(model, HyperbolicPlane):
        root = principal_sqrt(omega2 + 0.25)
        a = m_max + 2  # smallest m + 1 + 2n among the omitted channels
        reach = window.max_distance(omega2 + 0.25)
        return a >= root.real and abs(root - a) ** 2 > reach
    q = model.wavenumber(m_max + 1)
    # |z - shift| >= (Im sqrt(omega^2 - q^2))^2 >= q^2 - (|omega^2| + Re omega^2) / 2
    bound = q * q - 0.5 * (abs(omega2) + omega2.real)
    return bound > window.max_distance(omega2 + 0.25)


def model_resonances(
    model: ModelSpec,
    window: WindowRect,
    m_max: int,
    n_max: int,
    modes: Iterable[int] | None = None,
) -> Enumeration:
    """Closed-form resonances inside ``window`` (eigenvalues included), sorted by (m, n).

    ``complete`` is True when the (m_max, n_max) truncation provably contains
    every member of the model's resonance set lying in the window.  With an
    explicit ``modes`` list completeness refers to those modes only.
    """
    points = []
    complete = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IncompleteEnumeration)
        for m, channel in model_channels(model, m_max, modes):
            found = resonances(channel, window, n_max)
            complete &= found.complete
            points.extend(_tag(p, model, m) for p in found)
    if modes is None:
        complete &= _modes_escape(model, window, m_max)
    if not complete:
        warnings.warn(
            f"m_max={m_max}, n_max={n_max} do not provably exhaust {window}",
            IncompleteEnumeration,
            stacklevel=2,
        )
    return Enumeration(points, complete)


def resonance_value(model: ModelSpec, m: int, n: int) -> complex:
    """Closed-form z for index (m, n) of the model's resonance family."""
    channel = reduce(model, m)
    if channel.boundary is Boundary.FULL_LINE:
        base, step = channel.nu, 1
    elif channel.boundary is Boundary.HALF_LINE_DIRICHLET:
        base, step = channel.nu - 1, 2
    else:
        base, step = channel.nu - channel.mu - 1, 2
    return channel.shift - (base - step * n) ** 2


@dataclass
class DeformationPath:
    t: list[float]
    values: list[complex]
    jumps: list[int]

    @property
    def branch_jump(self) -> bool:
        return bool(self.jumps)

    @property
    def max_step(self) -> float:
        return max(abs(b - a) for a, b in zip(self.values, self.values[1:]))


def deformation_path(
    model: ModelSpec, m: int, n: int, steps: int, jump_factor: float = 5.0
) -> DeformationPath:
    """Follow resonance (m, n) while omega^2 is scaled by t from 0 to 1.

    Step j is flagged as a branch jump when it exceeds ``jump_factor`` times the
    larger of its neighbouring steps.
    """
    if steps < 2:
        raise DomainError("steps must be >= 2")
    ts = [j / (steps - 1) for j in range(steps)]
    values = [resonance_value(model.scaled(t), m, n) for t in ts]
    deltas = [abs(b - a) for a, b in zip(values, values[1:])]
    scale = max(abs(v) for v in values) + 1.0
    jumps = []
    for j, d in enumerate(deltas):
        neighbours = deltas[max(j - 1, 0) : j] + deltas[j + 1 : j + 2]
        if not neighbours:
            continue
        if d > jump_factor * max(neighbours) and d > 1e-12 * scale:
            jumps.append(j)
    return DeformationPath(ts, values, jumps)


def eckart_eigenvalue_counts(model: EckartHiggs, n_max: int = 10_000) -> tuple[int, int]:
    """Eigenvalue counts under two readings of the Eckart inequality.

    Returns (count with n < Re nu, nu = sqrt(omega^2 - alpha + 1/4) - 1/2,
    count with n < Re sqrt(omega^2 + 1/4) - 1/2).  The first is the one used
    by ``model_eigenvalues``.
    """
    channel = reduce(model)
    proved = sum(1 for n in range(n_max + 1) if eigenvalue_margin(channel, n) > 0)
    printed_bound = principal_sqrt(complex(model.omega2) + 0.25).real - 0.5
    printed = sum(1 for n in range(n_max + 1) if n < printed_bound)
    return proved, printed


def sort_points(points: Sequence[SpectralPoint]) -> list[SpectralPoint]:
    return sorted(points, key=lambda p: (p.m, p.n))
