"""Command-line front end.

    hyperhiggs spectrum   --model plane --omega2 0-100i --m-max 40 --n-max 40
    hyperhiggs resonances --model eckart --omega2 0-100i --alpha 3+0i --window -200,50,-150,20
    hyperhiggs verify     --suite unitarity --suite reflection
    hyperhiggs plot       --reproduce fig1 --out fig1.svg

Exit codes: 0 success, 1 verification failure, 2 configuration error or
empty plot, 3 incomplete enumeration (override with --allow-incomplete).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .errors import ContourTooClose, HiggsError, IncompleteEnumeration, OnPole
from .models import (
    EckartHiggs,
    HalfCylinder,
    HyperbolicPlane,
    ModelSpec,
    eckart_eigenvalue_counts,
    eigenvalues_complete,
    model_channels,
    model_eigenvalues,
    model_resonances,
)
from .numerics import count_poles, integrate_radial, numeric_reflection, richardson_eigens
from .poschl_teller import (
    Boundary,
    ChannelParams,
    WindowRect,
    channel_scattering_det,
    discrete_spectrum,
    eigenfunction_E,
    scattering_det_munu,
    scattering_det_nu,
    scattering_divisor,
)
from .special_functions import gamma, gauss_2f1

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_INCOMPLETE = 3

SUITES = (
    "special-functions",
    "unitarity",
    "functional-eq",
    "ode-residual",
    "eigen-oracle",
    "pole-count",
    "reflection",
    "eckart-condition",
)

TWO_PI = 2.0 * math.pi

FIGURES = {
    "fig1": dict(
        model=HyperbolicPlane(-100j),
        m_max=40,
        n_max=40,
        modes=None,
        window=WindowRect(-300.0, 100.0, -150.0, 20.0),
    ),
    "fig2": dict(
        model=HalfCylinder(-100j, TWO_PI),
        m_max=20,
        n_max=40,
        modes=(0, 10, 20),
        window=WindowRect(-300.0, 500.0, -250.0, 250.0),
    ),
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# parsing

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^([+-]?{_NUM})([+-]{_NUM})i$")


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` / ``a-bi`` (no spaces)."""
    match = _COMPLEX_RE.match(text.strip())
    if not match:
        raise ConfigError(f"cannot parse complex number {text!r}; use a+bi or a-bi")
    return complex(float(match.group(1)), float(match.group(2)))


def format_complex(z: complex) -> str:
    return f"{_fmt(z.real)}{'-' if z.imag < 0 else '+'}{_fmt(abs(z.imag))}i"


def parse_window(text: str) -> WindowRect:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"--window needs re0,re1,im0,im1, got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"bad --window {text!r}") from exc
    try:
        return WindowRect(*values)
    except HiggsError as exc:
        raise ConfigError(str(exc)) from exc


def parse_modes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --modes {text!r}") from exc


def worker_count() -> int:
    raw = os.environ.get("HIGGS_SPEC_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"HIGGS_SPEC_THREADS must be a positive integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError(f"HIGGS_SPEC_THREADS must be a positive integer, got {raw!r}")
    return value


def _pool_map(func, items):
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers == 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    command: str
    model: ModelSpec | None
    window: WindowRect | None
    m_max: int
    n_max: int
    modes: tuple[int, ...] | None
    output_format: str
    output_path: str
    verify_suites: list[str] = field(default_factory=list)
    allow_incomplete: bool = False
    allow_empty: bool = False
    reference: bool = False
    reproduce: str | None = None


def _build_model(args) -> ModelSpec | None:
    if args.model is None:
        if args.command == "verify" and args.omega2 is not None and args.alpha is not None:
            return EckartHiggs(parse_complex(args.omega2), parse_complex(args.alpha))
        return None
    if args.omega2 is None:
        raise ConfigError("--omega2 is required with --model")
    omega2 = parse_complex(args.omega2)
    if args.model == "plane":
        return HyperbolicPlane(omega2)
    if args.model == "eckart":
        if args.alpha is None:
            raise ConfigError("--alpha is required for the eckart model")
        return EckartHiggs(omega2, parse_complex(args.alpha))
    if args.ell is None:
        raise ConfigError("--ell is required for the half-cylinder model")
    if not (math.isfinite(args.ell) and args.ell > 0):
        raise ConfigError("--ell must be a positive real")
    return HalfCylinder(omega2, args.ell)


def build_config(args) -> RunConfig:
    worker_count()  # reject a malformed HIGGS_SPEC_THREADS before any work
    fmt = args.format
    if fmt is None:
        fmt = "svg" if args.command == "plot" else ("json" if args.command == "verify" else "csv")
    if args.command == "plot" and fmt != "svg":
        raise ConfigError("plot only writes svg")
    if args.command == "verify" and fmt != "json":
        raise ConfigError("verify reports are json")
    if args.m_max is not None and args.m_max < 0 or args.n_max is not None and args.n_max < 0:
        raise ConfigError("--m-max and --n-max must be >= 0")
    suites = []
    for entry in args.suite or []:
        suites.extend(s for s in entry.split(",") if s)
    for s in suites:
        if s not in SUITES:
            raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    modes = parse_modes(args.modes) if args.modes else None
    window = parse_window(args.window) if args.window else None

    if args.reproduce:
        if args.command == "verify":
            raise ConfigError("--reproduce applies to spectrum, resonances and plot")
        fig = FIGURES[args.reproduce]
        model = fig["model"]
        m_max = fig["m_max"] if args.m_max is None else args.m_max
        n_max = fig["n_max"] if args.n_max is None else args.n_max
        modes = fig["modes"] if modes is None else modes
        window = fig["window"] if window is None else window
        reference = True
    else:
        model = _build_model(args)
        m_max = 20 if args.m_max is None else args.m_max
        n_max = 20 if args.n_max is None else args.n_max
        reference = args.reference
        if model is None and args.command != "verify":
            raise ConfigError("--model (or --reproduce) is required")
        if args.command in ("resonances", "plot") and window is None:
            raise ConfigError("--window is required: resonance sets are infinite")
    if isinstance(model, EckartHiggs) and modes is not None and any(m != 0 for m in modes):
        raise ConfigError("the eckart model only has mode 0")
    if isinstance(model, HyperbolicPlane) and modes is not None and any(m < 0 for m in modes):
        raise ConfigError("plane modes are angular indices m >= 0")
    if args.command == "verify" and not suites:
        suites = list(SUITES)
    out = args.out or "-"
    if out != "-":
        parent = os.path.dirname(os.path.abspath(out))
        if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
            raise ConfigError(f"output path {out!r} is not writable")
    return RunConfig(
        command=args.command,
        model=model,
        window=window,
        m_max=m_max,
        n_max=n_max,
        modes=modes,
        output_format=fmt,
        output_path=out,
        verify_suites=suites,
        allow_incomplete=args.allow_incomplete,
        allow_empty=args.allow_empty,
        reference=reference,
        reproduce=args.reproduce,
    )


# ---------------------------------------------------------------------------
# datasets


@dataclass(frozen=True)
class Record:
    kind: str
    m: int
    n: int
    z: complex
    flags: tuple[str, ...] = ()


@dataclass
class Dataset:
    config: RunConfig
    records: list[Record]
    complete: bool


def _records(points, kind: str, extra_flags: tuple[str, ...] = ()) -> list[Record]:
    out = [Record(kind, p.m, p.n, p.z, tuple(p.flags) + extra_flags) for p in points]
    return sorted(out, key=lambda r: (r.m, r.n))


def _eigen_records(config: RunConfig):
    points = model_eigenvalues(config.model, config.m_max, config.n_max, config.modes)
    complete = eigenvalues_complete(config.model, config.m_max, config.n_max, config.modes)
    if config.window is not None:
        points = [p for p in points if config.window.contains(p.z)]
    return _records(points, "eigenvalue"), complete


def _resonance_records(config: RunConfig, model: ModelSpec, extra=()):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IncompleteEnumeration)
        found = model_resonances(model, config.window, config.m_max, config.n_max, config.modes)
    return _records(found, "resonance", extra), found.complete


def build_dataset(config: RunConfig) -> Dataset:
    records: list[Record] = []
    complete = True
    if config.command in ("spectrum", "plot"):
        eig, ok = _eigen_records(config)
        records += eig
        complete &= ok
    if config.command in ("resonances", "plot"):
        res, ok = _resonance_records(config, config.model)
        records += res
        complete &= ok
        if config.reference:
            ref, ok = _resonance_records(config, config.model.scaled(0.0), ("reference",))
            records += ref
            complete &= ok
    return Dataset(config, records, complete)


def _model_parameters(model: ModelSpec) -> dict:
    params = {"omega2": _complex_obj(model.omega2)}
    if isinstance(model, EckartHiggs):
        params["alpha"] = _complex_obj(model.alpha)
    if isinstance(model, HalfCylinder):
        params["ell"] = float(model.ell)
    return params


def _complex_obj(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


# ---------------------------------------------------------------------------
# serialisation


def _fmt(x: float) -> str:
    x = float(x) + 0.0  # drop negative zero
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x}")
    return format(x, ".17g")


def canonical_json(obj) -> str:
    """JSON with insertion-ordered keys, no whitespace and 17-significant-digit floats."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{canonical_json(v)}" for k, v in obj.items()) + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dataset_meta(data: Dataset) -> dict:
    config = data.config
    meta = {
        "model": config.model.name,
        "parameters": _model_parameters(config.model),
        "branch": "principal",
        "complete": bool(data.complete),
        "version": __version__,
        "m_max": config.m_max,
        "n_max": config.n_max,
        "modes": list(config.modes) if config.modes is not None else None,
        "window": None,
    }
    if config.window is not None:
        w = config.window
        meta["window"] = {"re_min": w.re_min, "re_max": w.re_max,
                          "im_min": w.im_min, "im_max": w.im_max}
    return meta


def to_json(data: Dataset) -> str:
    doc = {
        "meta": dataset_meta(data),
        "points": [
            {"kind": r.kind, "m": r.m, "n": r.n, "z": _complex_obj(r.z), "flags": list(r.flags)}
            for r in data.records
        ],
    }
    return canonical_json(doc) + "\n"


def to_csv(data: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "kind", "m", "n", "z_re", "z_im", "flags"])
    name = data.config.model.name
    for r in data.records:
        writer.writerow([name, r.kind, r.m, r.n, _fmt(r.z.real), _fmt(r.z.imag), ";".join(r.flags)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# SVG

_W, _H = 800, 600
_LEFT, _RIGHT, _TOP, _BOTTOM = 80, 30, 30, 80


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _bounds(data: Dataset) -> tuple[float, float, float, float]:
    w = data.config.window
    if w is not None:
        re0, re1, im0, im1 = w.re_min, w.re_max, w.im_min, w.im_max
    elif data.records:
        re = [r.z.real for r in data.records]
        im = [r.z.imag for r in data.records]
        re0, re1, im0, im1 = min(re), max(re), min(im), max(im)
    else:
        re0, re1, im0, im1 = -1.0, 1.0, -1.0, 1.0
    if re1 - re0 <= 0:
        re0, re1 = re0 - 1, re1 + 1
    if im1 - im0 <= 0:
        im0, im1 = im0 - 1, im1 + 1
    pad_re, pad_im = 0.03 * (re1 - re0), 0.03 * (im1 - im0)
    return re0 - pad_re, re1 + pad_re, im0 - pad_im, im1 + pad_im


def _stamp(data: Dataset) -> str:
    config = data.config
    model = config.model
    parts = [model.name, f"omega^2={format_complex(complex(model.omega2))}"]
    if isinstance(model, EckartHiggs):
        parts.append(f"alpha={format_complex(complex(model.alpha))}")
    if isinstance(model, HalfCylinder):
        parts.append(f"l={_fmt(model.ell)}")
    if config.modes is not None:
        parts.append("modes=" + ",".join(str(m) for m in config.modes))
    else:
        parts.append(f"m_max={config.m_max}")
    parts.append(f"n_max={config.n_max}")
    if not data.complete:
        parts.append("INCOMPLETE")
    parts.append(f"v{__version__}")
    return "  ".join(parts)


def to_svg(data: Dataset) -> str:
    """Deterministic scatter plot of the dataset; the records are embedded as JSON metadata."""
    re0, re1, im0, im1 = _bounds(data)
    plot_w = _W - _LEFT - _RIGHT
    plot_h = _H - _TOP - _BOTTOM

    def sx(x):
        return _LEFT + (x - re0) / (re1 - re0) * plot_w

    def sy(y):
        return _TOP + (im1 - y) / (im1 - im0) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        "<metadata><![CDATA[" + to_json(data).strip() + "]]></metadata>",
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>',
    ]
    if re0 < 0 < re1:
        out.append(f'<line x1="{sx(0):.2f}" y1="{_TOP}" x2="{sx(0):.2f}" y2="{_TOP + plot_h}" '
                   'stroke="#bbbbbb" stroke-dasharray="4,3"/>')
    if im0 < 0 < im1:
        out.append(f'<line x1="{_LEFT}" y1="{sy(0):.2f}" x2="{_LEFT + plot_w}" y2="{sy(0):.2f}" '
                   'stroke="#bbbbbb" stroke-dasharray="4,3"/>')
    for t in _nice_ticks(re0, re1):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{_TOP + plot_h}" x2="{x:.2f}" '
                   f'y2="{_TOP + plot_h + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{_TOP + plot_h + 18}" '
                   f'text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(im0, im1):
        y = sy(t)
        out.append(f'<line x1="{_LEFT - 5}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{_LEFT + plot_w / 2:.2f}" y="{_H - 45}" '
               'text-anchor="middle">Re z</text>')
    out.append(f'<text x="20" y="{_TOP + plot_h / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {_TOP + plot_h / 2:.2f})">Im z</text>')

    styles = {
        "reference": ('fill="blue" stroke="blue"', 3.0),
        "resonance": ('fill="black" stroke="black"', 3.0),
        "eigenvalue": ('fill="red" stroke="red"', 4.5),
    }
    layers = {"reference": [], "resonance": [], "eigenvalue": []}
    for r in data.records:
        layer = "reference" if "reference" in r.flags else r.kind
        layers[layer].append(r)
    for layer in ("reference", "resonance", "eigenvalue"):
        style, radius = styles[layer]
        for r in layers[layer]:
            out.append(
                f'<circle class="{layer}" cx="{sx(r.z.real):.2f}" cy="{sy(r.z.imag):.2f}" '
                f'r="{radius}" {style} data-m="{r.m}" data-n="{r.n}"/>'
            )

    legend_x, legend_y = _LEFT + plot_w - 190, _TOP + 10
    out.append(f'<rect x="{legend_x}" y="{legend_y}" width="180" height="62" '
               'fill="white" stroke="#888888"/>')
    entries = [("eigenvalue", "eigenvalues"), ("resonance", "resonances"),
               ("reference", "resonances, omega = 0")]
    for i, (layer, label) in enumerate(entries):
        style, radius = styles[layer]
        y = legend_y + 14 + 18 * i
        out.append(f'<circle cx="{legend_x + 14}" cy="{y}" r="{radius}" {style}/>')
        out.append(f'<text x="{legend_x + 28}" y="{y + 4}">{label}</text>')
    out.append(f'<text x="{_LEFT}" y="{_H - 15}" font-size="11">{_stamp(data)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_dataset(svg_text: str) -> dict:
    """Recover the JSON dataset embedded in an SVG written by ``to_svg``."""
    match = re.search(r"<metadata><!\[CDATA\[(.*?)\]\]></metadata>", svg_text, re.S)
    if not match:
        raise ValueError("no dataset metadata in SVG")
    return json.loads(match.group(1))


# ---------------------------------------------------------------------------
# verification suites


@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    checks: int
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "checks": self.checks,
            "details": self.details,
        }


def _result(name, errors, tol, **details) -> SuiteResult:
    worst = max(errors) if errors else 0.0
    return SuiteResult(name, bool(errors) and bool(worst <= tol), float(worst), tol, len(errors),
                       details)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _random_complex(rng, re, im) -> complex:
    return complex(rng.uniform(*re), rng.uniform(*im))


def suite_special_functions(config: RunConfig, rng) -> SuiteResult:
    """Gamma recurrence/reflection and 2F1 identities with closed elementary forms."""
    errors = []
    for _ in range(100):
        z = _random_complex(rng, (-8, 8), (-8, 8))
        errors.append(_rel(gamma(z + 1), z * gamma(z)))
        errors.append(_rel(gamma(z) * gamma(1 - z), math.pi / np.sin(math.pi * z)))
    for _ in range(60):
        z = _random_complex(rng, (-0.6, 0.6), (-0.6, 0.6))
        a = _random_complex(rng, (-3, 3), (-3, 3))
        b = _random_complex(rng, (0.5, 3), (-3, 3))
        errors.append(_rel(gauss_2f1(a, b, b, z), (1 - z) ** (-a)))
        errors.append(_rel(gauss_2f1(1, 1, 2, z), -np.log(1 - z) / z))
        c = b + _random_complex(rng, (0.5, 2), (-1, 1))
        errors.append(_rel(gauss_2f1(a, b, c, z),
                           (1 - z) ** (c - a - b) * gauss_2f1(c - a, c - b, c, z)))
        x = rng.uniform(-3, 3)
        errors.append(_rel(gauss_2f1(0.5, 1, 1.5, -x * x), math.atan(x) / x))
    return _result("special-functions", errors, 1e-10)


def suite_unitarity(config: RunConfig, rng) -> SuiteResult:
    errors = []
    for _ in range(100):
        mu, nu = rng.uniform(-0.45, 3), rng.uniform(0.1, 5)
        k = rng.uniform(0.1, 10) * rng.choice([-1.0, 1.0])
        errors.append(abs(abs(scattering_det_munu(mu, nu, k)) - 1))
        errors.append(abs(abs(scattering_det_nu(nu, k)) - 1))
    return _result("unitarity", errors, 1e-10)


def suite_functional_eq(config: RunConfig, rng) -> SuiteResult:
    errors = []
    while len(errors) < 200:
        mu = _random_complex(rng, (-0.4, 3), (-1.5, 1.5))
        nu = _random_complex(rng, (-1, 5), (-2, 2))
        k = _random_complex(rng, (-6, 6), (-2.5, 2.5))
        try:
            if len(errors) % 2:
                product = scattering_det_nu(nu, k) * scattering_det_nu(nu, -k)
            else:
                product = scattering_det_munu(mu, nu, k) * scattering_det_munu(mu, nu, -k)
        except OnPole:
            continue
        errors.append(abs(product - 1))
    return _result("functional-eq", errors, 1e-10)


def suite_ode_residual(config: RunConfig, rng) -> SuiteResult:
    cases = [(0.3, 1.7, 1.2), (0.5, 4.0, 2.0 + 0.5j), (1.5, 2.5 + 0.5j, 0.8), (0.0, 3.0, 1.5j),
             (2.5, 1.0 - 0.3j, 3.0)]
    errors = []
    r0, r1 = 1e-3, 3.0
    for mu, nu, k in cases:
        channel = ChannelParams(mu, nu)
        init = eigenfunction_E(mu, nu, k, r0, derivative=True)
        sol = integrate_radial(channel, k, r0, r1, init)
        errors.append(_rel(sol.values[-1], eigenfunction_E(mu, nu, k, r1)))
    return _result("ode-residual", errors, 1e-8)


def _oracle_channels(config: RunConfig):
    model = config.model or HyperbolicPlane(-100j)
    m_max = config.m_max if config.model is not None else 10
    return model, model_channels(model, m_max, config.modes)


def suite_eigen_oracle(config: RunConfig, rng) -> SuiteResult:
    """Closed-form eigenvalues vs the Richardson-extrapolated FD oracle at R=20, N=4000."""
    model, channels = _oracle_channels(config)

    def check(item):
        m, channel = item
        targets = [p.z for p in discrete_spectrum(channel, n_max=config.n_max) if not p.flags]
        if not targets:
            return []
        numeric = richardson_eigens(channel, 20.0, 4000, targets, outer="transparent")
        return [_rel(v, t) for t, v in zip(targets, numeric)]

    errors = [e for errs in _pool_map(check, channels) for e in errs]
    result = _result("eigen-oracle", errors, 1e-4, model=model.name)
    if not errors:
        result.passed = True
        result.details["note"] = "no eigenvalues to compare"
    return result


def _pole_window(channel: ChannelParams, rng, span: float):
    """Random k-plane window whose edges stay 0.05 away from every divisor point.

    Every other draw is centred near a member of the resonance family so that
    the windows are not mostly empty.
    """
    anchored = bool(rng.integers(2))
    while True:
        if anchored:
            n = int(rng.integers(6))
            seed = [d.k for d in scattering_divisor(channel, WindowRect(-span, span, -span, span))
                    if d.source == "resonance"]
            centre = seed[n % len(seed)] if seed else 0j
            cx, cy = centre.real + rng.uniform(-1, 1), centre.imag + rng.uniform(-1, 1)
        else:
            cx, cy = rng.uniform(-span, span), rng.uniform(-span, span)
        w, h = rng.uniform(0.5, 4), rng.uniform(0.5, 4)
        window = WindowRect(cx - w, cx + w, cy - h, cy + h)
        near = scattering_divisor(channel, WindowRect(cx - w - 1, cx + w + 1, cy - h - 1, cy + h + 1))
        if all(window.boundary_distance(d.k) > 0.05 for d in near):
            return window, sum(d.order for d in scattering_divisor(channel, window))


def pole_count_checks(model: ModelSpec, modes: Sequence[int], rng, per_model: int = 10):
    """(argument-principle count, closed-form count, rejected draws) for random k-windows.

    The closed-form count is the total order of the determinant's divisor in
    the window (resonance family, its companion and the Gamma(+-ik) points);
    the winding number of 1/s counts exactly that.  Windows on which |1/s|
    underflows the contour test are redrawn and tallied as rejected.
    """
    channels = [c for _, c in model_channels(model, 0, modes)]
    out = []
    for j in range(per_model):
        channel = channels[j % len(channels)]
        span = abs(channel.nu) + 4.0

        def inv_s(k, channel=channel):
            return 1.0 / channel_scattering_det(channel, k)

        rejected = 0
        while True:
            window, expected = _pole_window(channel, rng, span)
            try:
                counted = count_poles(inv_s, window, quad_points=128).count
            except ContourTooClose:
                rejected += 1
                continue
            break
        out.append((counted, expected, rejected))
    return out


def suite_pole_count(config: RunConfig, rng) -> SuiteResult:
    if config.model is not None:
        cases = [(config.model, config.modes or (0,))]
    else:
        cases = [(HyperbolicPlane(-100j), (0, 1, 2, 3)),
                 (EckartHiggs(-100j, 3.0), (0,)),
                 (HalfCylinder(-100j, TWO_PI), (0, 1, 10))]
    mismatches = total = rejected = 0
    for model, modes in cases:
        for counted, expected, skipped in pole_count_checks(model, modes, rng):
            total += 1
            mismatches += counted != expected
            rejected += skipped
    result = _result("pole-count", [float(mismatches)] if total else [], 0.0,
                     windows=total, mismatches=mismatches, rejected_draws=rejected)
    return result


def reflection_channels(rng, count: int = 20) -> list[tuple[ChannelParams, float]]:
    kinds = [Boundary.HALF_LINE_REGULAR, Boundary.HALF_LINE_DIRICHLET, Boundary.FULL_LINE]
    out = []
    for j in range(count):
        boundary = kinds[j % 3]
        mu = rng.uniform(-0.4, 2.5) if boundary is Boundary.HALF_LINE_REGULAR else 0.0
        nu = rng.uniform(0.1, 4.5)
        k = rng.uniform(0.3, 5.0)
        out.append((ChannelParams(mu, nu, boundary), k))
    return out


def suite_reflection(config: RunConfig, rng) -> SuiteResult:
    errors = []
    for channel, k in reflection_channels(rng):
        numeric = numeric_reflection(channel, k, R=15.0)
        errors.append(_rel(-numeric, channel_scattering_det(channel, k)))
    return _result("reflection", errors, 1e-6)


def suite_eckart_condition(config: RunConfig, rng) -> SuiteResult:
    model = config.model
    if not isinstance(model, EckartHiggs):
        # no eckart model given: report the example where the two readings differ
        model = EckartHiggs(9.0, 5.0)
    proved, printed = eckart_eigenvalue_counts(model)
    return SuiteResult(
        "eckart-condition", True, 0.0, 0.0, 1,
        {
            "omega2": _complex_obj(model.omega2),
            "alpha": _complex_obj(model.alpha),
            "count_nu_with_alpha": proved,
            "count_printed_without_alpha": printed,
            "readings_differ": proved != printed,
        },
    )


SUITE_FUNCS: dict[str, Callable] = {
    "special-functions": suite_special_functions,
    "unitarity": suite_unitarity,
    "functional-eq": suite_functional_eq,
    "ode-residual": suite_ode_residual,
    "eigen-oracle": suite_eigen_oracle,
    "pole-count": suite_pole_count,
    "reflection": suite_reflection,
    "eckart-condition": suite_eckart_condition,
}


def run_suites(config: RunConfig, names: Sequence[str]) -> list[SuiteResult]:
    results = []
    for i, name in enumerate(names):
        rng = np.random.default_rng(1000 + SUITES.index(name))
        try:
            results.append(SUITE_FUNCS[name](config, rng))
        except ConfigError:
            raise
        except HiggsError as exc:
            results.append(SuiteResult(name, False, math.inf, 0.0, 0,
                                       {"error": f"{type(exc).__name__}: {exc}"}))
    return results


# ---------------------------------------------------------------------------
# commands


def _write(config: RunConfig, text: str) -> None:
    if config.output_path == "-":
        sys.stdout.write(text)
    else:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _render(data: Dataset) -> str:
    fmt = data.config.output_format
    if fmt == "json":
        return to_json(data)
    if fmt == "svg":
        return to_svg(data)
    return to_csv(data)


def _incomplete(data: Dataset) -> bool:
    if data.complete or data.config.allow_incomplete:
        return False
    print("error: enumeration is not provably complete; raise --m-max/--n-max "
          "or pass --allow-incomplete", file=sys.stderr)
    return True


def cmd_spectrum(config: RunConfig) -> int:
    data = build_dataset(config)
    if _incomplete(data):
        return EXIT_INCOMPLETE
    _write(config, _render(data))
    return EXIT_OK


def cmd_resonances(config: RunConfig) -> int:
    return cmd_spectrum(config)


def cmd_plot(config: RunConfig) -> int:
    data = build_dataset(config)
    if not data.records and not config.allow_empty:
        print("error: nothing to plot (pass --allow-empty for an empty frame)", file=sys.stderr)
        return EXIT_CONFIG
    if _incomplete(data):
        return EXIT_INCOMPLETE
    _write(config, to_svg(data))
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    results = run_suites(config, config.verify_suites)
    passed = all(r.passed for r in results)
    report = {"pass": passed, "version": __version__, "suites": [r.as_dict() for r in results]}
    _write(config, json.dumps(report, indent=2, default=float) + "\n")
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


COMMANDS = {
    "spectrum": cmd_spectrum,
    "resonances": cmd_resonances,
    "verify": cmd_verify,
    "plot": cmd_plot,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperhiggs", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--model", choices=["plane", "eckart", "half-cylinder"])
        p.add_argument("--omega2", help="complex a+bi")
        p.add_argument("--alpha", help="complex a+bi (eckart)")
        p.add_argument("--ell", type=float, help="half-cylinder length l > 0")
        p.add_argument("--m-max", type=int)
        p.add_argument("--n-max", type=int)
        p.add_argument("--modes", help="comma-separated mode list, e.g. 0,10,20")
        p.add_argument("--window", help="re0,re1,im0,im1 in the z-plane")
        p.add_argument("--format", choices=["csv", "json", "svg"])
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--allow-incomplete", action="store_true")
        p.add_argument("--allow-empty", action="store_true")
        p.add_argument("--reproduce", choices=sorted(FIGURES))
        p.add_argument("--reference", action="store_true",
                       help="add the omega = 0 resonances, flagged 'reference'")
        p.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)}")
    return parser


_VALUE_OPTIONS = ("--window", "--omega2", "--alpha", "--modes")


def _join_values(argv: Sequence[str]) -> list[str]:
    """Glue ``--window -100,1,-1,1`` into ``--window=-100,1,-1,1`` so argparse
    does not mistake negative values for options."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_join_values(argv))
        config = build_config(args)
        return COMMANDS[config.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HiggsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
