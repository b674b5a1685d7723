"""End-to-end acceptance checks, one test per criterion (criterion 7 split by clause).

Each test records a single PASS/FAIL line (shown in the terminal summary and
printed with ``-s``) and then asserts the same verdict.
"""

import cmath
import math
import time

import mpmath
import numpy as np
import pytest

from conftest import SUMMARY
from hyperhiggs.cli import main, pole_count_checks, reflection_channels, svg_dataset
from hyperhiggs.models import (
    EckartHiggs,
    HalfCylinder,
    HyperbolicPlane,
    deformation_path,
    model_eigenvalues,
    reduce,
)
from hyperhiggs.numerics import matrix_eigens, numeric_reflection
from hyperhiggs.poschl_teller import (
    Boundary,
    ChannelParams,
    channel_scattering_det,
    discrete_spectrum,
    scattering_det_munu,
    scattering_det_nu,
)
from hyperhiggs.special_functions import gamma, gauss_2f1

PLANE = HyperbolicPlane(-100j)


def report(label, ok, detail):
    line = f"{label}: {'PASS' if ok else 'FAIL'} ({detail})"
    SUMMARY.append(line)
    print(line)
    assert ok, line


def rel(a, b):
    return abs(a - b) / abs(b)


def mpc(z):
    return mpmath.mpc(z.real, z.imag)


def random_complex(rng, scale):
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def test_criterion_1_special_functions():
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    hyp_errors = []
    mpmath.mp.dps = 30
    try:
        while len(hyp_errors) < 500:
            a, b, c = (random_complex(rng, 3) for _ in range(3))
            if c.real < 0.5 and abs(c - round(c.real)) < 1e-2:
                continue
            if len(hyp_errors) % 2:
                z = complex(rng.uniform(-100, 0))
            else:
                z = 0.9 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            expected = complex(mpmath.hyp2f1(mpc(a), mpc(b), mpc(c), mpc(z)))
            hyp_errors.append(rel(gauss_2f1(a, b, c, z), expected))
    finally:
        mpmath.mp.dps = 15
    gamma_errors = []
    for _ in range(250):
        z = random_complex(rng, 15)
        gamma_errors.append(rel(gamma(z + 1), z * gamma(z)))
        gamma_errors.append(abs(gamma(z) * gamma(1 - z) * cmath.sin(math.pi * z) / math.pi - 1))
    elapsed = time.perf_counter() - start
    ok = max(hyp_errors) <= 1e-10 and max(gamma_errors) <= 1e-10 and elapsed < 10
    report("CRITERION 1 special functions", ok,
           f"2F1 max rel {max(hyp_errors):.1e} over 500, Gamma identities max {max(gamma_errors):.1e}"
           f" over 500, {elapsed:.1f}s")


def test_criterion_2_scattering_identities():
    start = time.perf_counter()
    rng = np.random.default_rng(102)
    unitarity = []
    for _ in range(100):
        mu, nu, k = rng.uniform(-0.45, 4), rng.uniform(-0.45, 5), rng.uniform(0.05, 10)
        unitarity.append(abs(abs(scattering_det_munu(mu, nu, k)) - 1))
        unitarity.append(abs(abs(scattering_det_nu(nu, k)) - 1))
    functional = []
    while len(functional) < 200:
        mu, nu = random_complex(rng, 3), random_complex(rng, 5)
        k = complex(rng.uniform(-6, 6), rng.uniform(-3, 3))
        try:
            functional.append(abs(scattering_det_munu(mu, nu, k) * scattering_det_munu(mu, nu, -k) - 1))
            functional.append(abs(scattering_det_nu(nu, k) * scattering_det_nu(nu, -k) - 1))
        except ArithmeticError:
            continue
    elapsed = time.perf_counter() - start
    ok = max(unitarity) <= 1e-10 and max(functional) <= 1e-10 and elapsed < 5
    report("CRITERION 2 scattering identities", ok,
           f"unitarity max {max(unitarity):.1e}, functional equation max {max(functional):.1e},"
           f" {elapsed:.1f}s")


CRITERION_3_CHANNELS = [
    *(reduce(PLANE, m) for m in range(4)),
    ChannelParams(0, 5, Boundary.FULL_LINE),
    ChannelParams(0.5, 4),
    ChannelParams(0, 3.5, Boundary.HALF_LINE_DIRICHLET),
    ChannelParams(0.7 + 0.3j, 5 + 1j),
    reduce(EckartHiggs(40 - 10j, 3)),
    reduce(HalfCylinder(60 - 20j, 2 * math.pi), 1),
]


def test_criterion_3_spectra_vs_oracle():
    start = time.perf_counter()
    sizes = [500, 1000, 2000, 4000]
    worst_raw = worst_extrapolated = 0.0
    slopes, counted, empty = [], 0, 0
    for channel in CRITERION_3_CHANNELS:
        targets = [p.z for p in discrete_spectrum(channel)
                   if not p.flags and abs(p.z - channel.shift) <= 50]
        if not targets:
            empty += 1
            continue
        counted += len(targets)
        values = {n: matrix_eigens(channel, 20, n, targets=targets, outer="transparent")
                  for n in sizes}
        errors = np.array([[rel(v, t) for t, v in zip(targets, values[n])] for n in sizes])
        extrapolated = [(4 * f - c) / 3 for c, f in zip(values[2000], values[4000])]
        worst_raw = max(worst_raw, errors[-1].max())
        worst_extrapolated = max(worst_extrapolated,
                                 max(rel(v, t) for t, v in zip(targets, extrapolated)))
        slopes.extend(np.polyfit(np.log(sizes), np.log(errors), 1)[0])
    elapsed = time.perf_counter() - start
    slopes = np.array(slopes)
    ok = worst_extrapolated <= 1e-4 and np.all(np.abs(slopes + 2) <= 0.15) and elapsed < 300
    report("CRITERION 3 spectra vs FD oracle", ok,
           f"{counted} eigenvalues in 10 channels ({empty} with none in reach), "
           f"Richardson(N=2000,4000) max rel {worst_extrapolated:.1e}, raw N=4000 max rel {worst_raw:.1e}, slopes "
           f"{slopes.min():.2f}..{slopes.max():.2f}, {elapsed:.0f}s")


def test_criterion_4_pole_counts():
    start = time.perf_counter()
    rng = np.random.default_rng(104)
    cases = [(PLANE, (0, 1, 2, 3)), (EckartHiggs(-100j, 3), (0,)),
             (HalfCylinder(-100j, 2 * math.pi), (0, 1, 10))]
    mismatches = windows = rejected = poles = 0
    for model, modes in cases:
        for counted, expected, skipped in pole_count_checks(model, modes, rng, per_model=10):
            windows += 1
            poles += abs(expected)
            mismatches += counted != expected
            rejected += skipped
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and windows == 30 and elapsed < 120
    report("CRITERION 4 resonances as poles", ok,
           f"{windows} windows, {mismatches} mismatches, total |order| {poles}, "
           f"{rejected} redrawn, {elapsed:.0f}s")


def test_criterion_5_reflection():
    start = time.perf_counter()
    rng = np.random.default_rng(105)
    errors = []
    for channel, k in reflection_channels(rng, 20):
        closed = channel_scattering_det(channel, k)
        errors.append(rel(-numeric_reflection(channel, k, R=15.0), closed))
    elapsed = time.perf_counter() - start
    ok = max(errors) <= 1e-6 and elapsed < 60
    report("CRITERION 5 reflection coefficients", ok,
           f"20 channels, max rel {max(errors):.1e}, {elapsed:.1f}s")


def test_criterion_6_no_small_omega_eigenvalues():
    start = time.perf_counter()
    found = 0
    for radius in np.linspace(0, 0.5, 20):
        for arg in np.linspace(0, 2 * math.pi, 20, endpoint=False):
            omega = radius * cmath.exp(1j * arg)
            found += len(model_eigenvalues(HyperbolicPlane(omega * omega), 40, 40))
    elapsed = time.perf_counter() - start
    report("CRITERION 6 no eigenvalues for |omega| <= 1/2", found == 0 and elapsed < 5,
           f"400 grid points, {found} eigenvalues, {elapsed:.2f}s")


@pytest.fixture(scope="module")
def figures(tmp_path_factory):
    out = {}
    for fig in ("fig1", "fig2"):
        path = tmp_path_factory.mktemp("figures") / f"{fig}.svg"
        assert main(["plot", "--reproduce", fig, "--out", str(path)]) == 0
        out[fig] = svg_dataset(path.read_text())
    return out


def _model_of(meta):
    omega2 = complex(meta["parameters"]["omega2"]["re"], meta["parameters"]["omega2"]["im"])
    if meta["model"] == "plane":
        return HyperbolicPlane(omega2)
    return HalfCylinder(omega2, meta["parameters"]["ell"])


def test_criterion_7a_reference_real(figures):
    parts, ok = [], True
    for fig, data in figures.items():
        refs = [p for p in data["points"] if "reference" in p["flags"]]
        bad = sorted({p["m"] for p in refs if abs(p["z"]["im"]) > 1e-10})
        ok &= bool(refs) and not bad
        worst = max(abs(p["z"]["im"]) for p in refs)
        parts.append(f"{fig}: {len(refs)} references, max |Im z| {worst:.1e}"
                     + (f", non-real for m={bad}" if bad else ""))
    report("CRITERION 7a omega=0 references real", ok, "; ".join(parts))


def test_criterion_7b_eigenvalues_in_resonances(figures):
    parts, ok = [], True
    for fig, data in figures.items():
        key = lambda p: (p["m"], p["n"], p["z"]["re"], p["z"]["im"])
        resonances = {key(p) for p in data["points"]
                      if p["kind"] == "resonance" and "reference" not in p["flags"]}
        eig = [p for p in data["points"] if p["kind"] == "eigenvalue"]
        missing = [key(p) for p in eig if key(p) not in resonances]
        ok &= bool(eig) and not missing
        parts.append(f"{fig}: {len(eig)} eigenvalues, {len(missing)} missing")
    report("CRITERION 7b eigenvalues within resonances", ok, "; ".join(parts))


def test_criterion_7c_no_branch_jumps(figures):
    parts, ok = [], True
    for fig, data in figures.items():
        meta = data["meta"]
        model = _model_of(meta)
        modes = meta["modes"] if meta["modes"] is not None else range(11)
        jumps, paths = [], 0
        for m in modes:
            for n in range(6):
                if m + 2 * n > 10:
                    continue
                paths += 1
                path = deformation_path(model, m, n, 200)
                if path.branch_jump:
                    jumps.append((m, n))
        ok &= not jumps
        parts.append(f"{fig}: {paths} paths" + (f", BranchJump at {jumps}" if jumps else ", no jumps"))
    report("CRITERION 7c deformation paths continuous", ok, "; ".join(parts))
