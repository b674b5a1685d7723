"""Exactly solvable Pöschl–Teller channels.

The potential is

    V(r) = mu (mu + 1) / sinh^2 r - nu (nu + 1) / cosh^2 r

and every channel is the radial problem (D_r^2 + V) psi = k^2 psi on the half
line (or, for ``FullLine``, on the whole line with mu = 0).  A channel carries
an additive ``shift`` so that the spectral value of the model operator is
z = shift + k^2.

Conventions
-----------
Both scattering determinants are written so that their poles in the k-plane
sit at k = i(nu - mu - 1 - 2n) (half line) and k = i(nu - n) (full line).
Poles with positive imaginary part and the required real-part inequality are
L^2 eigenvalues; the rest are resonances.  ``s(k) s(-k) = 1`` identically.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .errors import (
    DegenerateK,
    DegenerateMu,
    DomainError,
    IncompleteEnumeration,
    KZero,
    OnPole,
    PoleOfGamma,
)
from .special_functions import gauss_2f1, log_gamma, nearest_nonpositive_integer

__all__ = [
    "Boundary",
    "Kind",
    "ChannelParams",
    "SpectralPoint",
    "Enumeration",
    "WindowRect",
    "potential",
    "scattering_det_munu",
    "scattering_det_nu",
    "log_scattering_det_munu",
    "log_scattering_det_nu",
    "channel_scattering_det",
    "neumann_reflection",
    "eigenfunction_E",
    "eigenfunction_F",
    "asymptotic_E",
    "AsymptoticE",
    "discrete_spectrum",
    "eigenvalue_margin",
    "resonances",
    "scattering_divisor",
    "DivisorPoint",
    "BOUNDARY_MARGIN",
]

BOUNDARY_MARGIN = 1e-9
_K_ZERO_TOL = 1e-12
_MU_HALF_TOL = 1e-8
_IK_INT_TOL = 1e-8
_LOG2 = math.log(2.0)


class Boundary(enum.Enum):
    FULL_LINE = "full-line"
    HALF_LINE_DIRICHLET = "half-line-dirichlet"
    HALF_LINE_REGULAR = "half-line-regular"


class Kind(enum.Enum):
    EIGENVALUE = "eigenvalue"
    RESONANCE = "resonance"


@dataclass(frozen=True)
class WindowRect:
    """Closed axis-aligned rectangle in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min <= self.re_max and self.im_min <= self.im_max):
            raise DomainError(f"malformed window {self}")
        for v in (self.re_min, self.re_max, self.im_min, self.im_max):
            if not math.isfinite(v):
                raise DomainError(f"window bounds must be finite: {self}")

    @classmethod
    def around(cls, center: complex, half_width: float, half_height: float | None = None):
        if half_height is None:
            half_height = half_width
        return cls(
            center.real - half_width,
            center.real + half_width,
            center.imag - half_height,
            center.imag + half_height,
        )

    def contains(self, z: complex) -> bool:
        return self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max

    def corners(self) -> tuple[complex, complex, complex, complex]:
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    def max_distance(self, point: complex) -> float:
        """Largest distance from ``point`` to any point of the window."""
        return max(abs(c - point) for c in self.corners())

    def boundary_distance(self, point: complex) -> float:
        """Distance from ``point`` to the boundary curve of the window."""
        x, y = point.real, point.imag
        cx = min(max(x, self.re_min), self.re_max)
        cy = min(max(y, self.im_min), self.im_max)
        if self.contains(point):
            return min(x - self.re_min, self.re_max - x, y - self.im_min, self.im_max - y)
        return math.hypot(x - cx, y - cy)


@dataclass(frozen=True)
class ChannelParams:
    """One radial Pöschl–Teller problem with spectral value z = shift + k^2."""

    mu: complex
    nu: complex
    boundary: Boundary = Boundary.HALF_LINE_REGULAR
    shift: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "mu", complex(self.mu))
        object.__setattr__(self, "nu", complex(self.nu))
        object.__setattr__(self, "shift", complex(self.shift))
        if self.boundary is not Boundary.HALF_LINE_REGULAR and self.mu != 0:
            raise DomainError(f"{self.boundary.value} channels require mu = 0, got {self.mu}")

    @property
    def coupling_sinh(self) -> complex:
        return self.mu * (self.mu + 1)

    @property
    def coupling_cosh(self) -> complex:
        return self.nu * (self.nu + 1)


@dataclass(frozen=True)
class SpectralPoint:
    z: complex
    k: complex
    m: int
    n: int
    kind: Kind
    flags: tuple[str, ...] = ()
    channel: ChannelParams | None = field(default=None, compare=False)

    def same_index(self, other: "SpectralPoint") -> bool:
        return (self.m, self.n) == (other.m, other.n)


@dataclass
class Enumeration:
    """Enumerated spectral points plus a provable-completeness flag."""

    points: list[SpectralPoint]
    complete: bool = True

    def __iter__(self) -> Iterator[SpectralPoint]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


# ---------------------------------------------------------------------------
# potential and scattering determinants


def _inv_sinh2(r):
    q = np.exp(-2.0 * r)
    return 4.0 * q / np.expm1(-2.0 * r) ** 2


def _inv_cosh2(r):
    q = np.exp(-2.0 * r)
    return 4.0 * q / (1.0 + q) ** 2


def potential(mu: complex, nu: complex, r):
    """V(r) = mu(mu+1)/sinh^2 r - nu(nu+1)/cosh^2 r for r > 0 (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise DomainError("potential needs r > 0")
    mu, nu = complex(mu), complex(nu)
    value = mu * (mu + 1) * _inv_sinh2(r_arr) - nu * (nu + 1) * _inv_cosh2(r_arr)
    if np.ndim(value) == 0:
        return complex(value)
    return value


def _lg(name: str, arg: complex) -> complex:
    try:
        return log_gamma(arg)
    except PoleOfGamma:
        raise OnPole(name, arg) from None


def _check_k(k: complex) -> complex:
    k = complex(k)
    if abs(k) < _K_ZERO_TOL:
        raise KZero(f"scattering determinant undefined at k = {k}")
    return k


def log_scattering_det_munu(mu: complex, nu: complex, k: complex) -> complex:
    """log of s_{mu,nu}(k) (any branch); see ``scattering_det_munu``."""
    mu, nu, k = complex(mu), complex(nu), _check_k(k)
    ik = 1j * k
    num = (
        _lg("Gamma(ik)", ik)
        + _lg("Gamma((mu+nu-ik)/2+1)", (mu + nu - ik) / 2 + 1)
        + _lg("Gamma((mu-nu-ik+1)/2)", (mu - nu - ik + 1) / 2)
    )
    den = (
        _lg("Gamma(-ik)", -ik)
        + _lg("Gamma((mu+nu+ik)/2+1)", (mu + nu + ik) / 2 + 1)
        + _lg("Gamma((mu-nu+ik+1)/2)", (mu - nu + ik + 1) / 2)
    )
    return 1j * math.pi + num - den - 2.0 * ik * _LOG2


def scattering_det_munu(mu: complex, nu: complex, k: complex) -> complex:
    """Scattering determinant of D_r^2 + V_{mu,nu} on the half line.

    s(k) = - Gamma(ik) Gamma((mu+nu-ik)/2+1) Gamma((mu-nu-ik+1)/2) 2^{-ik}
             / (Gamma(-ik) Gamma((mu+nu+ik)/2+1) Gamma((mu-nu+ik+1)/2) 2^{ik})

    evaluated as the exponential of a sum of log-Gamma values.
    """
    return cmath.exp(log_scattering_det_munu(mu, nu, k))


def log_scattering_det_nu(nu: complex, k: complex) -> complex:
    nu, k = complex(nu), _check_k(k)
    ik = 1j * k
    num = (
        2.0 * _lg("Gamma(ik)", ik)
        + _lg("Gamma(nu-ik+1)", nu - ik + 1)
        + _lg("Gamma(-nu-ik)", -nu - ik)
    )
    den = (
        2.0 * _lg("Gamma(-ik)", -ik)
        + _lg("Gamma(nu+ik+1)", nu + ik + 1)
        + _lg("Gamma(-nu+ik)", -nu + ik)
    )
    return 1j * math.pi + num - den


def scattering_det_nu(nu: complex, k: complex) -> complex:
    """Scattering determinant of D_r^2 + V_{0,nu} on the whole line.

    s(k) = - Gamma(ik)^2 Gamma(nu-ik+1) Gamma(-nu-ik)
             / (Gamma(-ik)^2 Gamma(nu+ik+1) Gamma(-nu+ik))
    """
    return cmath.exp(log_scattering_det_nu(nu, k))


def neumann_reflection(nu: complex, k: complex) -> complex:
    """Even-sector reflection coefficient of V_{0,nu}, as s_nu / s_{0,nu}."""
    return cmath.exp(log_scattering_det_nu(nu, k) - log_scattering_det_munu(0.0, nu, k))


def channel_scattering_det(channel: ChannelParams, k: complex) -> complex:
    """The determinant that governs ``channel``: s_nu on the line, s_{mu,nu} otherwise."""
    if channel.boundary is Boundary.FULL_LINE:
        return scattering_det_nu(channel.nu, k)
    return scattering_det_munu(channel.mu, channel.nu, k)


# ---------------------------------------------------------------------------
# eigenfunctions


def _log_sinh(r: float) -> float:
    return r + math.log(-math.expm1(-2.0 * r)) - _LOG2


def _log_cosh(r: float) -> float:
    return r + math.log1p(math.exp(-2.0 * r)) - _LOG2


def _series_budget(r: float) -> int:
    # Pfaff series converges like tanh^{2n} r
    return max(10000, int(80.0 * math.cosh(r) ** 2) + 1000)


def _frobenius_solution(p, q, a, b, c, r, derivative):
    """sinh^p r cosh^q r 2F1(a, b; c; -sinh^2 r) and optionally its r-derivative."""
    if r <= 0:
        raise DomainError("eigenfunctions need r > 0")
    u = -math.sinh(r) ** 2
    budget = _series_budget(r)
    hyp = gauss_2f1(a, b, c, u, max_terms=budget)
    pref = cmath.exp(p * _log_sinh(r) + q * _log_cosh(r))
    value = pref * hyp
    if not derivative:
        return value
    dhyp = a * b / c * gauss_2f1(a + 1, b + 1, c + 1, u, max_terms=budget)
    coth, tanh = 1.0 / math.tanh(r), math.tanh(r)
    deriv = value * (p * coth + q * tanh) + pref * dhyp * (-2.0 * math.sinh(r) * math.cosh(r))
    return value, deriv


def eigenfunction_E(mu: complex, nu: complex, k: complex, r: float, derivative: bool = False):
    """Regular solution E(r) ~ sinh^{1+mu} r at the origin.

    E = sinh^{1+mu} r cosh^{1+nu} r 2F1((mu+nu-ik+2)/2, (mu+nu+ik+2)/2; mu+3/2; -sinh^2 r).
    With ``derivative=True`` returns ``(E, dE/dr)``.
    """
    mu, nu, k = complex(mu), complex(nu), complex(k)
    if abs(mu + 0.5) < _MU_HALF_TOL:
        raise DegenerateMu("mu = -1/2: logarithmic case not implemented")
    ik = 1j * k
    return _frobenius_solution(
        1 + mu, 1 + nu, (mu + nu - ik + 2) / 2, (mu + nu + ik + 2) / 2, mu + 1.5, r, derivative
    )


def eigenfunction_F(mu: complex, nu: complex, k: complex, r: float, derivative: bool = False):
    """Second solution F(r) ~ sinh^{-mu} r at the origin.

    F = sinh^{-mu} r cosh^{1+nu} r 2F1((-mu+nu-ik+1)/2, (-mu+nu+ik+1)/2; 1/2-mu; -sinh^2 r).
    """
    mu, nu, k = complex(mu), complex(nu), complex(k)
    c = 0.5 - mu
    if c.real < 0.5 and abs(c - round(c.real)) < 1e-10:
        raise DegenerateMu(f"1/2 - mu = {c} is a nonpositive integer")
    ik = 1j * k
    return _frobenius_solution(
        -mu, 1 + nu, (-mu + nu - ik + 1) / 2, (-mu + nu + ik + 1) / 2, c, r, derivative
    )


class AsymptoticE(NamedTuple):
    """Two-branch large-r representation of E.

    ``outgoing``/``incoming`` are the sinh^{+ik} and sinh^{-ik} branch terms at r
    (with their 2F1(-sinh^{-2} r) corrections); ``value`` is their sum.  The
    amplitudes are the coefficients of e^{+ikr} and e^{-ikr} as r -> infinity.
    """

    incoming: complex
    outgoing: complex
    value: complex
    incoming_amplitude: complex
    outgoing_amplitude: complex


def _branch_coefficient(mu, nu, sik):
    # Gamma(mu+3/2) Gamma(sik) / (Gamma((mu+nu+sik+2)/2) Gamma((mu-nu+sik+1)/2))
    log_num = log_gamma(mu + 1.5) + log_gamma(sik)
    log_den = 0j
    for arg in ((mu + nu + sik + 2) / 2, (mu - nu + sik + 1) / 2):
        if nearest_nonpositive_integer(arg) is not None:
            return 0j
        log_den += log_gamma(arg)
    return cmath.exp(log_num - log_den)


def asymptotic_E(mu: complex, nu: complex, k: complex, r: float) -> AsymptoticE:
    """Connection-formula evaluation of E at large r (needs sinh^{-2} r <= 1/2).

    Each branch is coth^{nu+1} r sinh^{+-ik} r times a 2F1 in -sinh^{-2} r whose
    parameters follow from the 1/u connection formula:

        2F1((mu+nu-+ik+2)/2, (-mu+nu-+ik+1)/2; 1-+ik; -sinh^{-2} r).
    """
    mu, nu, k = complex(mu), complex(nu), complex(k)
    ik = 1j * k
    if abs(ik - round(ik.real)) <= _IK_INT_TOL:
        raise DegenerateK(f"ik = {ik} is (nearly) an integer")
    if r <= 0 or math.sinh(r) ** -2 > 0.5:
        raise DomainError(f"asymptotic expansion needs sinh^-2 r <= 1/2, got r = {r}")
    x = -1.0 / math.sinh(r) ** 2
    log_coth = _log_cosh(r) - _log_sinh(r)
    log_sh = _log_sinh(r)
    terms = []
    amplitudes = []
    for sik in (ik, -ik):
        coeff = _branch_coefficient(mu, nu, sik)
        hyp = gauss_2f1((mu + nu - sik + 2) / 2, (-mu + nu - sik + 1) / 2, 1 - sik, x)
        terms.append(coeff * cmath.exp((nu + 1) * log_coth + sik * log_sh) * hyp)
        amplitudes.append(coeff * cmath.exp(-sik * _LOG2))
    outgoing, incoming = terms
    return AsymptoticE(
        incoming=incoming,
        outgoing=outgoing,
        value=incoming + outgoing,
        incoming_amplitude=amplitudes[1],
        outgoing_amplitude=amplitudes[0],
    )


# ---------------------------------------------------------------------------
# closed-form spectra


def _family(channel: ChannelParams):
    """Return (base, step, index_map) describing k_n = i (base - step n)."""
    if channel.boundary is Boundary.HALF_LINE_REGULAR:
        return channel.nu - channel.mu - 1, 2
    if channel.boundary is Boundary.HALF_LINE_DIRICHLET:
        # odd members n = 2j + 1 of the full-line family nu - n
        return channel.nu - 1, 2
    return channel.nu, 1


def _point(channel, base, step, n, kind, flags=()):
    k = 1j * (base - step * n)
    z = channel.shift + k * k
    return SpectralPoint(z=z, k=k, m=0, n=n, kind=kind, flags=tuple(flags), channel=channel)


def eigenvalue_margin(channel: ChannelParams, n: int) -> float:
    """Re(base) - step n: positive exactly when index n is an L^2 eigenvalue."""
    base, step = _family(channel)
    return base.real - step * n


def discrete_spectrum(
    channel: ChannelParams, window: WindowRect | None = None, n_max: int | None = None
) -> list[SpectralPoint]:
    """Closed-form L^2 eigenvalues of a channel, sorted by n.

    Half line:  k = i(nu - mu - 1 - 2n) with 2n < Re(nu - mu - 1).
    Full line:  k = i(nu - n) with n < Re nu.
    Dirichlet half line (mu = 0): the odd members of the full-line list,
    reported with index j where n = 2j + 1.
    Indices whose inequality margin is within 1e-9 of zero are kept and
    flagged ``boundary-ambiguous``.
    """
    base, step = _family(channel)
    points = []
    n = 0
    while base.real - step * n >= -BOUNDARY_MARGIN:
        if n_max is not None and n > n_max:
            break
        margin = base.real - step * n
        flags = ("boundary-ambiguous",) if abs(margin) <= BOUNDARY_MARGIN else ()
        p = _point(channel, base, step, n, Kind.EIGENVALUE, flags)
        if window is None or window.contains(p.z):
            points.append(p)
        n += 1
    return points


def _escaped(channel: ChannelParams, window: WindowRect, n: int) -> bool:
    """True if every family member with index >= n lies outside ``window``."""
    base, step = _family(channel)
    if step * n < base.real:
        return False
    # |z - shift| = |base - step n|^2 grows with n once step n >= Re(base)
    return abs(base - step * n) ** 2 > window.max_distance(channel.shift)


def resonances(channel: ChannelParams, window: WindowRect, n_max: int) -> Enumeration:
    """Closed-form pole family of the channel's determinant inside ``window``.

    Same k_n as ``discrete_spectrum`` without the inequality, for n <= n_max.
    ``complete`` is True when members beyond n_max provably leave the window.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    base, step = _family(channel)
    points = []
    for n in range(n_max + 1):
        margin = base.real - step * n
        flags = ("boundary-ambiguous",) if abs(margin) <= BOUNDARY_MARGIN else ()
        p = _point(channel, base, step, n, Kind.RESONANCE, flags)
        if window.contains(p.z):
            points.append(p)
    complete = _escaped(channel, window, n_max + 1)
    if not complete:
        warnings.warn(
            f"n_max={n_max} does not provably exhaust {window}", IncompleteEnumeration, stacklevel=2
        )
    return Enumeration(points, complete)


class DivisorPoint(NamedTuple):
    k: complex
    order: int
    source: str


def scattering_divisor(channel: ChannelParams, k_window: WindowRect) -> list[DivisorPoint]:
    """All zeros (order < 0) and poles (order > 0) of the channel determinant in a k-window.

    Read off factor by factor from the Gamma quotient.  Besides the family
    returned by ``resonances`` this includes the companion family obtained from
    nu -> -1 - nu and the points k = +-ij coming from Gamma(+-ik).  Orders of
    coincident points simply add.
    """
    mu, nu = channel.mu, channel.nu
    reach = max(abs(k_window.im_min), abs(k_window.im_max)) + abs(mu) + abs(nu) + 4
    count = int(reach) + 1
    out: list[DivisorPoint] = []
    if channel.boundary is Boundary.FULL_LINE:
        families = [
            (lambda j: 1j * j, 2, "Gamma(ik)^2"),
            (lambda j: -1j * j, -2, "1/Gamma(-ik)^2"),
            (lambda n: 1j * (nu - n), 1, "resonance"),
            (lambda n: -1j * (nu + 1 + n), 1, "companion"),
            (lambda n: -1j * (nu - n), -1, "mirror-resonance"),
            (lambda n: 1j * (nu + 1 + n), -1, "mirror-companion"),
        ]
    else:
        families = [
            (lambda j: 1j * j, 1, "Gamma(ik)"),
            (lambda j: -1j * j, -1, "1/Gamma(-ik)"),
            (lambda n: 1j * (nu - mu - 1 - 2 * n), 1, "resonance"),
            (lambda n: -1j * (mu + nu + 2 + 2 * n), 1, "companion"),
            (lambda n: -1j * (nu - mu - 1 - 2 * n), -1, "mirror-resonance"),
            (lambda n: 1j * (mu + nu + 2 + 2 * n), -1, "mirror-companion"),
        ]
    for make, order, source in families:
        for n in range(count):
            k = make(n)
            if k_window.contains(k):
                out.append(DivisorPoint(k, order, source))
    return out
