"""Independent numerical oracles for the closed-form results.

None of these routines use the Gamma-function formulas: the radial equation is
integrated directly, reflection coefficients are read off plane waves,
poles are counted with the argument principle and eigenvalues come from a
finite-difference matrix.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from scipy.integrate import solve_ivp

from .errors import (
    ContourTooClose,
    DomainError,
    HiggsError,
    MatchingIllConditioned,
    NoConvergence,
    NonIntegerWinding,
    OnPole,
    StepFailure,
    TruncationSuspect,
)
from .poschl_teller import Boundary, ChannelParams, WindowRect

__all__ = [
    "OdeSolution",
    "PoleCount",
    "integrate_radial",
    "frobenius_init",
    "numeric_reflection",
    "count_poles",
    "refine_root",
    "matrix_eigens",
    "richardson_eigens",
    "match_eigenvalues",
]

log = logging.getLogger(__name__)


@dataclass
class OdeSolution:
    r_grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    method_order: int
    est_error: float


@dataclass
class PoleCount:
    window: WindowRect
    count: int
    quad_points: int
    residual: float


# ---------------------------------------------------------------------------
# radial ODE


def _potential_scalar(g_sinh: complex, g_cosh: complex, r: float) -> complex:
    q = math.exp(-2.0 * r)
    return g_sinh * 4.0 * q / math.expm1(-2.0 * r) ** 2 - g_cosh * 4.0 * q / (1.0 + q) ** 2


def frobenius_init(channel: ChannelParams, k: complex, r0: float, regular: bool = True):
    """(psi, psi') at small r0 from the two-term Frobenius series.

    ``regular=True`` gives psi ~ r^{1+mu}, otherwise psi ~ r^{-mu}; error O(r0^4).
    """
    mu = channel.mu
    g = channel.coupling_sinh
    exponent = 1 + mu if regular else -mu
    v1 = -g / 3.0 - channel.coupling_cosh
    denom = (exponent + 2) * (exponent + 1) - g
    c = (v1 - complex(k) ** 2) / denom
    lead = cmath.exp(exponent * math.log(r0))
    value = lead * (1 + c * r0 * r0)
    deriv = lead / r0 * (exponent + c * (exponent + 2) * r0 * r0)
    return value, deriv


def integrate_radial(
    channel: ChannelParams,
    k: complex,
    r0: float,
    r1: float,
    init: tuple[complex, complex],
    r_eval: Sequence[float] | None = None,
    rtol: float = 1e-12,
) -> OdeSolution:
    """Integrate psi'' = (V(r) - k^2) psi from r0 to r1 with an 8th-order adaptive scheme.

    ``est_error`` compares against a run at 100x looser tolerance, which
    over-estimates the error of the returned solution.
    """
    if not 0 < r0 < r1:
        raise DomainError(f"need 0 < r0 < r1, got {r0}, {r1}")
    y0 = np.array(init, dtype=complex)
    if not np.all(np.isfinite(y0)):
        raise DomainError("initial data must be finite")
    g_s, g_c = channel.coupling_sinh, channel.coupling_cosh
    k2 = complex(k) ** 2

    def rhs(r, y):
        return np.array([y[1], (_potential_scalar(g_s, g_c, r) - k2) * y[0]])

    t_eval = None if r_eval is None else np.asarray(r_eval, dtype=float)

    def run(tol):
        sol = solve_ivp(rhs, (r0, r1), y0, method="DOP853", rtol=tol, atol=tol * 1e-6,
                        t_eval=t_eval)
        if sol.status != 0:
            raise StepFailure(sol.message)
        return sol

    sol = run(rtol)
    rough = run(min(rtol * 100, 1e-6))
    scale = np.max(np.abs(sol.y[0])) or 1.0
    est = float(np.max(np.abs(sol.y[0][-1] - rough.y[0][-1])) / scale)
    return OdeSolution(sol.t, sol.y[0], sol.y[1], 8, est)


def _match(value, deriv, k, R):
    ik = 1j * k
    matrix = np.array([[cmath.exp(ik * R), cmath.exp(-ik * R)],
                       [ik * cmath.exp(ik * R), -ik * cmath.exp(-ik * R)]])
    cond = np.linalg.cond(matrix)
    if cond > 1e8:
        raise MatchingIllConditioned(f"plane-wave matching condition number {cond:.3g}")
    c_out, c_in = np.linalg.solve(matrix, np.array([value, deriv]))
    return complex(c_out / c_in)


def _sector_ratio(channel, k, R, regular=True, r0=1e-3):
    value, deriv = frobenius_init(channel, k, r0, regular=regular)
    sol = integrate_radial(channel, k, r0, R, (value, deriv))
    return _match(sol.values[-1], sol.derivs[-1], k, R)


def numeric_reflection(channel: ChannelParams, k: float, R: float = 15.0) -> complex:
    """Outgoing/incoming plane-wave ratio of the regular solution at r = R.

    psi(r) ~ c_out e^{ikr} + c_in e^{-ikr} beyond the potential; returns
    c_out / c_in.  For full-line channels the odd (r^{1}) and even (r^{0})
    sectors are integrated separately and the product of their ratios is
    returned.  In every case the closed-form determinant equals minus this.
    """
    if R < 10:
        raise DomainError("matching radius R must be >= 10")
    if isinstance(k, complex):
        if k.imag != 0:
            raise DomainError("numeric_reflection needs real k")
        k = k.real
    if abs(k) < 0.05:
        raise DomainError("|k| must be >= 0.05")
    if channel.boundary is Boundary.FULL_LINE:
        odd = _sector_ratio(channel, k, R, regular=True)
        even_channel = ChannelParams(-1.0 + 0j, channel.nu, Boundary.HALF_LINE_REGULAR)
        even = _sector_ratio(even_channel, k, R, regular=True)
        return odd * even
    return _sector_ratio(channel, k, R)


# ---------------------------------------------------------------------------
# argument principle and Newton


def _contour(window: WindowRect, per_unit: float, minimum: int):
    """Gauss-Legendre nodes/weights on the four edges, counter-clockwise."""
    corners = window.corners()
    nodes, weights = [], []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        n = max(minimum, int(math.ceil(abs(b - a) * per_unit)))
        x, w = np.polynomial.legendre.leggauss(n)
        nodes.append((a + b) / 2 + (b - a) / 2 * x)
        weights.append((b - a) / 2 * w)
    return np.concatenate(nodes), np.concatenate(weights)


def count_poles(
    f: Callable[[complex], complex],
    window: WindowRect,
    quad_points: int = 256,
    max_refinements: int = 4,
) -> PoleCount:
    """Zeros minus poles of ``f`` inside ``window`` via the argument principle.

    Integrates f'/f along the boundary with composite Gauss-Legendre
    quadrature; f' uses fourth-order central differences with step
    1e-5 x (window size).  Quadrature is doubled until the integral is within
    0.05 of an integer (at most ``max_refinements`` times).
    """
    if quad_points < 64:
        raise DomainError("quad_points must be >= 64")
    width = window.re_max - window.re_min
    height = window.im_max - window.im_min
    perimeter = 2 * (width + height)
    if perimeter <= 0:
        raise DomainError("degenerate window")
    h = 1e-5 * max(width, height)

    def evaluate(z):
        try:
            return complex(f(z))
        except HiggsError as exc:
            raise ContourTooClose(f"f fails on the contour at {z}: {exc}") from exc
        except OverflowError as exc:
            raise ContourTooClose(f"f overflows on the contour at {z}") from exc

    points = quad_points
    for attempt in range(max_refinements + 1):
        per_edge_min = max(16, points // 4)
        nodes, weights = _contour(window, points / perimeter, per_edge_min)
        total = 0j
        moduli = []
        for z, w in zip(nodes, weights):
            fz = evaluate(z)
            moduli.append(abs(fz))
            if abs(fz) <= 1e-10:
                raise ContourTooClose(f"|f| = {abs(fz):.2e} on the contour at {z}")
            d = (-evaluate(z + 2 * h) + 8 * evaluate(z + h) - 8 * evaluate(z - h)
                 + evaluate(z - 2 * h)) / (12 * h)
            total += w * d / fz
        winding = total / (2j * math.pi)
        count = round(winding.real)
        residual = abs(winding - count)
        if residual < 0.05:
            break
        points *= 2
    if residual >= 0.2:
        # a zero or pole between the nodes shows up as a dip or spike in |f|
        typical = float(np.median(moduli))
        if min(moduli) < 1e-2 * typical or max(moduli) > 1e2 * typical:
            raise ContourTooClose(f"winding {winding}: a zero or pole sits on the contour")
        raise NonIntegerWinding(f"winding {winding} not close to an integer")
    return PoleCount(window, int(count), len(nodes), float(residual))


def refine_root(
    f: Callable[[complex], complex], seed: complex, tol: float = 1e-12, max_iter: int = 50
) -> tuple[complex, float]:
    """Newton iteration with a central-difference derivative; returns (root, |f(root)|).

    Iteration stops once |f| <= tol and the last step is below 1e-11 relative.
    An iterate that lands exactly on a pole of the reciprocal (OnPole or
    ZeroDivisionError after a small step) is returned as the root with residual 0.
    """
    z = complex(seed)
    fz = complex(f(z))
    if not cmath.isfinite(fz):
        raise DomainError(f"f is not finite at the seed {seed}")
    for _ in range(max_iter):
        if fz == 0:
            return z, 0.0
        h = 1e-7 * (1.0 + abs(z))
        d = (complex(f(z + h)) - complex(f(z - h))) / (2 * h)
        if d == 0:
            raise NoConvergence(f"zero derivative at {z}")
        step = fz / d
        z -= step
        try:
            fz = complex(f(z))
        except (ZeroDivisionError, OnPole):
            # f = 1/g with g evaluated exactly at its pole: z is the root
            if abs(step) <= 1e-6 * (1.0 + abs(z)):
                return z, 0.0
            raise
        # a small |f| alone is not enough when f is flat (reciprocal of a large residue)
        scale = 1.0 + abs(z)
        if abs(step) <= 4e-16 * scale or (abs(fz) <= tol and abs(step) <= 1e-11 * scale):
            return z, abs(fz)
    if abs(fz) <= tol:
        return z, abs(fz)
    raise NoConvergence(f"Newton did not converge from {seed}: |f| = {abs(fz):.3g}")


# ---------------------------------------------------------------------------
# finite-difference eigenvalues


def _sectors(channel: ChannelParams) -> list[ChannelParams]:
    if channel.boundary is Boundary.FULL_LINE:
        # odd sector psi ~ r, even sector psi ~ 1 (mu = -1 gives mu(mu+1) = 0)
        return [
            ChannelParams(0j, channel.nu, Boundary.HALF_LINE_REGULAR),
            ChannelParams(-1.0 + 0j, channel.nu, Boundary.HALF_LINE_REGULAR),
        ]
    return [ChannelParams(channel.mu, channel.nu, Boundary.HALF_LINE_REGULAR)]


def _fd_rows(sector: ChannelParams, R: float, N: int, size: int):
    """Tridiagonal coefficients for phi = tanh^{-(1+mu)}(r) psi on r_j = j h.

    With s = 1 + mu the conjugated operator is

        -phi'' - (4 s / sinh 2r) phi' + (s(s+1) - nu(nu+1)) / cosh^2 r phi,

    free of singular terms; phi is smooth and even, so the ghost phi_{-1} = phi_1
    closes row 0, where the drift term tends to -2 s phi''(0).  Returns
    (lower, diag, upper, ghost) with ``ghost`` the coefficient of phi_size in
    the last row.
    """
    s = 1.0 + sector.mu
    h = R / N
    r = np.arange(size + 1) * h
    inv_h2 = 1.0 / h**2
    weight = (s * (s + 1) - sector.coupling_cosh) / np.cosh(r[:size]) ** 2
    drift = np.zeros(size + 1, dtype=complex)
    drift[1:] = s * 4.0 / np.sinh(2.0 * r[1:])
    diag = 2.0 * inv_h2 + weight.astype(complex)
    diag[0] = (1 + 2 * s) * 2.0 * inv_h2 + weight[0]
    lower = -inv_h2 + drift[1:size] / (2 * h)
    upper = np.empty(size - 1, dtype=complex)
    upper[0] = -(1 + 2 * s) * 2.0 * inv_h2
    upper[1:] = -inv_h2 - drift[1 : size - 1] / (2 * h)
    ghost = -inv_h2 - drift[size - 1] / (2 * h)
    return lower, diag, upper, ghost


def _fd_matrix(sector: ChannelParams, R: float, N: int):
    """FD matrix with phi(R) = 0; unknowns phi_0 .. phi_{N-1}."""
    lower, diag, upper, _ = _fd_rows(sector, R, N, N)
    return scipy.sparse.diags([lower, diag, upper], [-1, 0, 1], format="csc")


def _nearest_eigs(matrix, targets: Sequence[complex], dense: bool) -> list[complex]:
    if dense:
        values = scipy.linalg.eigvals(matrix.toarray())
        return [complex(values[np.argmin(np.abs(values - t))]) for t in targets]
    out = []
    v0 = np.ones(matrix.shape[0], dtype=complex)
    for t in targets:
        vals = scipy.sparse.linalg.eigs(matrix, k=1, sigma=t, v0=v0, which="LM",
                                        return_eigenvectors=False)
        out.append(complex(vals[0]))
    return out


def _transparent_eig(sector: ChannelParams, R: float, N: int, lam_target: complex,
                     dense: bool) -> complex:
    """Eigenvalue under the exact discrete decaying condition phi_{N+1} = zeta phi_N.

    Past R the scheme is the free difference equation (up to e^{-2R} terms),
    whose decaying solutions are zeta^j with zeta + 1/zeta = 2 - lambda h^2 and
    |zeta| < 1.  Multiplying by zeta gives the quadratic pencil
    zeta^2 (E + I/h^2) + zeta (A - 2I/h^2) + I/h^2, linearised and solved by
    shift-invert around the zeta of the target.
    """
    h = R / N
    size = N + 1
    inv_h2 = 1.0 / h**2
    lower, diag, upper, ghost = _fd_rows(sector, R, N, size)
    a_matrix = scipy.sparse.diags([lower, diag, upper], [-1, 0, 1], format="csc")
    p2 = np.full(size, inv_h2, dtype=complex)
    p2[-1] += ghost  # ~ e^{-2R}: the pencil's leading coefficient is singular
    eye = scipy.sparse.identity(size, dtype=complex, format="csc")
    zero = scipy.sparse.csc_matrix((size, size), dtype=complex)
    pencil_a = scipy.sparse.bmat(
        [[zero, eye], [-inv_h2 * eye, -(a_matrix - 2.0 * inv_h2 * eye)]], format="csc"
    )
    pencil_m = scipy.sparse.block_diag([eye, scipy.sparse.diags(p2)], format="csc")
    b = 2.0 - lam_target * h * h
    disc = cmath.sqrt(b * b - 4.0)
    zeta0 = min(((b + disc) / 2, (b - disc) / 2), key=abs)
    # shift-invert on A x = zeta M x: theta = 1 / (zeta - zeta0)
    lu = scipy.sparse.linalg.splu((pencil_a - zeta0 * pencil_m).tocsc())
    if dense:
        op = np.linalg.solve((pencil_a - zeta0 * pencil_m).toarray(), pencil_m.toarray())
        thetas = scipy.linalg.eigvals(op)
        theta = complex(thetas[np.argmax(np.abs(thetas))])
    else:
        op = scipy.sparse.linalg.LinearOperator(
            pencil_a.shape, matvec=lambda x: lu.solve(pencil_m @ x), dtype=complex
        )
        v0 = np.ones(2 * size, dtype=complex)
        theta = complex(scipy.sparse.linalg.eigs(op, k=1, which="LM", v0=v0,
                                                 return_eigenvectors=False)[0])
    zeta = zeta0 + 1.0 / theta
    if abs(zeta) >= 1.0:
        log.warning("transparent boundary root |zeta| = %.6f is not decaying", abs(zeta))
    return (2.0 - zeta - 1.0 / zeta) * inv_h2


def matrix_eigens(
    channel: ChannelParams,
    R: float,
    N: int,
    how_many: int | None = None,
    targets: Sequence[complex] | None = None,
    outer: str = "dirichlet",
    dense: bool | None = None,
    check_truncation: bool = False,
) -> list[complex]:
    """Eigenvalues z = shift + lambda of a second-order FD discretisation of the channel.

    The radial operator is discretised after conjugation by tanh^{1+mu} r (see
    ``_fd_rows``); the regular behaviour r^{1+mu} at the origin becomes an even
    smooth function.  With ``targets`` (spectral values z) the eigenvalue
    nearest to each target is returned in the same order; otherwise the
    ``how_many`` eigenvalues with the most negative real part of lambda.

    ``outer="dirichlet"`` puts a hard wall at R; ``outer="transparent"`` closes
    the grid with the exact decaying solution of the free difference equation,
    which removes the truncation error for states that decay slowly.
    ``check_truncation`` repeats the solve with 2R (same spacing) and raises
    TruncationSuspect if an eigenvalue moves by more than 1e-4 relative.
    """
    if N < 200:
        raise DomainError("N must be >= 200")
    if R < 15:
        raise DomainError("R must be >= 15")
    if outer not in ("dirichlet", "transparent"):
        raise DomainError(f"unknown outer boundary {outer!r}")
    if dense is None:
        dense = N <= 1500 and targets is None
    shift = channel.shift
    sectors = _sectors(channel)

    if targets is None:
        if not dense:
            raise DomainError("sparse solves need targets")
        if outer != "dirichlet":
            raise DomainError("the transparent boundary needs targets")
        values = []
        for sector in sectors:
            values.extend(scipy.linalg.eigvals(_fd_matrix(sector, R, N).toarray()))
        values = sorted((complex(v) for v in values), key=lambda v: (v.real, v.imag))
        result = [shift + v for v in values[: how_many or len(values)]]
    else:
        result = []
        for target in targets:
            lam_t = complex(target) - shift
            best = None
            for sector in sectors:
                if outer == "transparent":
                    lam = _transparent_eig(sector, R, N, lam_t, dense)
                else:
                    lam = _nearest_eigs(_fd_matrix(sector, R, N), [lam_t], dense)[0]
                if best is None or abs(lam - lam_t) < abs(best - lam_t):
                    best = lam
            result.append(shift + best)

    if check_truncation:
        wider = matrix_eigens(channel, 2 * R, 2 * N, how_many,
                              targets=result if targets is not None else None,
                              outer=outer, dense=dense)
        for a, b in zip(result, wider):
            if abs(a - b) > 1e-4 * abs(a):
                raise TruncationSuspect(f"eigenvalue {a} moves to {b} when R doubles")
    return result


def richardson_eigens(
    channel: ChannelParams,
    R: float,
    N: int,
    targets: Sequence[complex],
    outer: str = "dirichlet",
) -> list[complex]:
    """Second-order Richardson extrapolation from spacings R/(N/2) and R/N."""
    coarse = matrix_eigens(channel, R, N // 2, targets=targets, outer=outer)
    fine = matrix_eigens(channel, R, N, targets=targets, outer=outer)
    return [(4 * f - c) / 3 for c, f in zip(coarse, fine)]


def match_eigenvalues(
    closed: Sequence[complex], numeric: Sequence[complex], radius: float = 1e-3
) -> tuple[list[tuple[complex, complex]], list[complex]]:
    """Greedy nearest-neighbour pairing; returns (pairs, unmatched closed-form values)."""
    pool = list(numeric)
    pairs, missed = [], []
    candidates = sorted(
        ((abs(c - v), i, j) for i, c in enumerate(closed) for j, v in enumerate(pool)),
    )
    used_c, used_v = set(), set()
    for dist, i, j in candidates:
        if i in used_c or j in used_v or dist > radius:
            continue
        used_c.add(i)
        used_v.add(j)
        pairs.append((closed[i], pool[j]))
    missed = [c for i, c in enumerate(closed) if i not in used_c]
    return pairs, missed
