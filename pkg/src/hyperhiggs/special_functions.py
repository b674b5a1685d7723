"""Complex Gamma and Gauss hypergeometric functions.

Everything here works on plain Python ``complex`` values.  ``log_gamma``
returns the principal branch of log Gamma (the branch that is real on the
positive axis and analytic on the plane slit along the negative axis), so
sums and differences of log-Gamma values can be exponentiated safely.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import DomainError, NoConvergence, ParameterDegenerate, PoleOfGamma

__all__ = ["log_gamma", "gamma", "gauss_2f1", "nearest_nonpositive_integer"]

POLE_TOL = 1e-12
_C_TOL = 1e-10
_STIRLING_MIN_ABS = 12.0
_CONNECTION_MIN = 2.0
_LOG_PI = math.log(math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2k / (2k (2k - 1)) for k = 1..10
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
)


def nearest_nonpositive_integer(z: complex) -> int | None:
    """Return n <= 0 if z is within POLE_TOL of n, else None."""
    z = complex(z)
    if z.real > 0.5:
        return None
    n = round(z.real)
    if abs(z - n) < POLE_TOL:
        return int(n)
    return None


def _log_gamma_stirling(z: complex) -> complex:
    # valid for Re z >= 1/2
    shift = 0j
    while abs(z) < _STIRLING_MIN_ABS:
        shift += cmath.log(z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0j
    power = inv
    for coeff in _STIRLING_COEFFS:
        series += coeff * power
        power *= inv2
    return (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + series - shift


def _expm1_complex(w: complex) -> complex:
    u, v = w.real, w.imag
    re = math.expm1(u) * math.cos(v) - 2.0 * math.sin(0.5 * v) ** 2
    im = math.exp(u) * math.sin(v)
    return complex(re, im)


def _log_sin_pi_upper(z: complex) -> complex:
    """log sin(pi z) on the branch analytic in Im z >= 0 (limit from above on the axis).

    Uses sin(pi z) = exp(-i pi z) (1 - exp(2 pi i z)) / (2i); the periodic factor
    is evaluated on the fractional part of Re z so it stays accurate near
    integers and for large |Re z|.
    """
    frac = z.real - round(z.real)
    one_minus = -_expm1_complex(2j * math.pi * complex(frac, z.imag))
    return -1j * math.pi * z + 0.5j * math.pi - math.log(2.0) + cmath.log(one_minus)


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    Stirling series after an upward shift for Re z >= 1/2, reflection formula
    otherwise.  Raises PoleOfGamma within 1e-12 of a nonpositive integer.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {z!r}")
    pole = nearest_nonpositive_integer(z)
    if pole is not None:
        raise PoleOfGamma(z, pole)
    if z.real >= 0.5:
        return _log_gamma_stirling(z)
    if z.imag < 0.0:
        return log_gamma(z.conjugate()).conjugate()
    return _LOG_PI - _log_sin_pi_upper(z) - _log_gamma_stirling(1.0 - z)


def gamma(z: complex) -> complex:
    """Gamma(z) = exp(log_gamma(z))."""
    return cmath.exp(log_gamma(z))


def _series(a, b, c, z, max_terms, tol=1e-17):
    """Sum (a)_n (b)_n / ((c)_n n!) z^n, stopping on a geometric tail bound.

    Terms are generated in numpy chunks; the tail after term n is bounded by
    |t_n| rho / (1 - rho) with rho = max(|t_{n+1}/t_n|, |z|).
    """
    absz = abs(z)
    warmup = abs(a) + abs(b) + abs(c) + 2.0
    last = 1.0 + 0j
    parts = [np.array([1.0 + 0j])]
    running = 1.0 + 0j
    start = 0
    chunk = 64
    while start < max_terms:
        stop = min(start + chunk, max_terms)
        n = np.arange(start, stop, dtype=float)
        ratios = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        terms = last * np.cumprod(ratios)
        zero = np.flatnonzero(terms == 0)
        if zero.size:
            parts.append(terms[: zero[0]])
            return _fsum(parts)
        m = n + 1.0
        rho = np.abs((a + m) * (b + m) / ((c + m) * (m + 1.0))) * absz
        rho = np.maximum(rho, absz)
        partial = running + np.cumsum(terms)
        with np.errstate(divide="ignore"):
            bound = np.abs(terms) * rho / (1.0 - rho)
        ok = (m >= warmup) & (rho < 1.0) & (bound <= tol * np.abs(partial))
        hit = np.flatnonzero(ok)
        if hit.size:
            parts.append(terms[: hit[0] + 1])
            return _fsum(parts)
        parts.append(terms)
        running = partial[-1]
        last = terms[-1]
        start = stop
        chunk = min(chunk * 4, 1 << 16)
    raise NoConvergence(
        f"2F1({a}, {b}; {c}; {z}) series did not converge in {max_terms} terms"
    )


def _fsum(parts) -> complex:
    terms = np.concatenate(parts)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _connection_term(a, b, c, x, max_terms):
    # Gamma(c) Gamma(b-a) / (Gamma(b) Gamma(c-a)) (-x)^{-a} 2F1(a, a-c+1; a-b+1; 1/x)
    try:
        log_den = log_gamma(b) + log_gamma(c - a)
    except PoleOfGamma:
        return 0j
    log_coeff = log_gamma(c) + log_gamma(b - a) - log_den - a * math.log(-x)
    return cmath.exp(log_coeff) * _series(a, a - c + 1.0, a - b + 1.0, 1.0 / x, max_terms)


def _connection(a, b, c, x, max_terms):
    """2F1 on x <= -2 from the expansion around infinity, or None if unreliable.

    Unreliable means a - b within 1e-2 of an integer, where both terms diverge
    and cancel.
    """
    d = a - b
    if abs(d - round(d.real)) < 1e-2:
        return None
    value = _connection_term(a, b, c, x, max_terms) + _connection_term(b, a, c, x, max_terms)
    return value if cmath.isfinite(value) else None


def gauss_2f1(a: complex, b: complex, c: complex, z: complex, max_terms: int = 10000) -> complex:
    """Gauss hypergeometric function 2F1(a, b; c; z).

    Supported arguments: |z| <= 0.9, or z real and <= 0.  Uses the Taylor
    series at the origin for |z| <= 0.5, the expansion around infinity for
    real z <= -2 when a - b is safely non-integer, and the Pfaff transformation
    z -> z/(z-1) otherwise.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if c.real < 0.5 and abs(c - round(c.real)) < _C_TOL:
        raise ParameterDegenerate(c)
    if z == 0:
        return 1.0 + 0j
    real_negative = z.imag == 0.0 and z.real < 0.0
    if abs(z) > 0.9 and not real_negative:
        raise DomainError(f"2F1 argument {z!r} outside |z| <= 0.9 and (-inf, 0]")
    if abs(z) <= 0.5 or z.real >= 0.0:
        return _series(a, b, c, z, max_terms)
    if z.real <= -_CONNECTION_MIN:
        value = _connection(a, b, c, z.real, max_terms)
        if value is not None:
            return value
    w = z / (z - 1.0)
    # pick the Pfaff form whose terms decay like n^{-|Re(a-b)|-1}
    if a.real <= b.real:
        return cmath.exp(-a * cmath.log(1.0 - z)) * _series(a, c - b, c, w, max_terms)
    return cmath.exp(-b * cmath.log(1.0 - z)) * _series(c - a, b, c, w, max_terms)
