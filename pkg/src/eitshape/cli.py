"""Command-line interface: scenario configs, runs, and reports.

Scenario files are INI key-value text with the sections

    [geometry]  kind = concentric_disc | star_shaped | small_discs  (+ shape keys)
    [gamma]     kind = constant | exp_cos | tabulated               (+ values)
    [forward]   path = series | bie | born | asymptotic, basis orders, node counts
    [noise]     delta, seed
    [method]    kind = music | factorization  (+ tau / filter / alpha / level)
    [sampling]  step, margin
    [scaling]   epsilons            (scaling subcommand)
    [convergence] orders, reference (convergence subcommand)

``--config`` accepts a filesystem path or the name of a bundled scenario.
Exit codes: 0 success, 2 configuration error, 3 solver failure.  All output
files are written atomically (temp file + rename) into ``--out``.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .core import (BoundaryGrid, ConcentricDisc, CurrentGapMatrix,
                   FourierBasisSet, Geometry, IndicatorField,
                   RobinCoefficient, SamplingGrid, SmallDiscs, StarShaped)
from .factorization import (FilterSpec, NoisySystem, apply_noise,
                            contour_points, level_set, w_field)
from .forward_bie import (asymptotic_current_gap_matrix,
                          asymptotic_scaling_report, born_current_gap_matrix,
                          current_gap_matrix)
from .forward_series import SeriesCoefficients, assemble_series_operator, \
    truncation_error_report
from .music import (assemble_response, detect_rank, extract_peaks,
                    music_field)
from . import report as figures

GEOMETRY_KINDS = ("concentric_disc", "star_shaped", "small_discs")
GAMMA_KINDS = ("constant", "exp_cos", "tabulated")
FORWARD_PATHS = ("series", "bie", "born", "asymptotic")
METHOD_KINDS = ("music", "factorization")
FILTER_KINDS = ("tikhonov", "landweber", "spectral_cutoff")


class ConfigError(ValueError):
    """Raised when a scenario configuration cannot be used."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario parameters (primitives only; see the builders below)."""

    name: str
    geometry_kind: str = "concentric_disc"
    radius: float = 0.5
    base: float = 0.25
    amplitude: float = 0.15
    frequency: int = 3
    centers: tuple = ()
    scales: tuple = ()
    epsilon: float = 0.01
    gamma_kind: str = "constant"
    gamma_value: float = 1.0
    gamma_table: tuple = ()
    path: str = ""
    max_order: int = 0
    boundary_nodes: int = 64
    inclusion_nodes: int = 0
    truncation: int = 10
    delta: float = 0.0
    seed: int = 0
    method: str = "factorization"
    tau: float = 0.01
    filter_kind: str = "tikhonov"
    alpha: float = 1e-7
    beta: float | None = None
    level: float = 0.1
    expected_components: int | None = None
    step: float = 0.0202
    margin: float | None = None
    scaling_epsilons: tuple = (0.02, 0.04, 0.08)
    convergence_orders: tuple = tuple(range(2, 9))
    convergence_reference: int = 40


def _parse_pairs(text: str) -> tuple:
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p for p in chunk.replace(",", " ").split() if p]
        if len(parts) != 2:
            raise ConfigError("expected coordinate pairs, got %r" % chunk)
        pairs.append((float(parts[0]), float(parts[1])))
    return tuple(pairs)


def _parse_floats(text: str) -> tuple:
    return tuple(float(p) for p in text.replace(",", " ").split())


def _parse_ints(text: str) -> tuple:
    return tuple(int(p) for p in text.replace(",", " ").split())


def _config_text(spec: str) -> tuple[str, str]:
    """Resolve a path or bundled scenario name to (name, INI text)."""
    p = Path(spec)
    if p.is_file():
        return p.stem, p.read_text()
    name = spec[:-4] if spec.endswith(".ini") else spec
    try:
        res = resources.files("eitshape").joinpath("scenarios", name + ".ini")
        if res.is_file():
            return name, res.read_text()
    except (FileNotFoundError, ModuleNotFoundError):
        pass
    raise ConfigError("config %r is neither a file nor a bundled scenario"
                      % spec)


def bundled_scenarios() -> tuple[str, ...]:
    root = resources.files("eitshape").joinpath("scenarios")
    return tuple(sorted(f.name[:-4] for f in root.iterdir()
                        if f.name.endswith(".ini")))


def load_config(spec: str) -> ScenarioConfig:
    """Parse a scenario file (or bundled scenario name) into a config."""
    name, text = _config_text(spec)
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("cannot parse config: %s" % exc) from exc

    cfg = ScenarioConfig(name=name)
    try:
        g = parser["geometry"] if parser.has_section("geometry") else {}
        cfg = replace(
            cfg,
            geometry_kind=g.get("kind", cfg.geometry_kind).strip(),
            radius=float(g.get("radius", cfg.radius)),
            base=float(g.get("base", cfg.base)),
            amplitude=float(g.get("amplitude", cfg.amplitude)),
            frequency=int(g.get("frequency", cfg.frequency)),
            centers=_parse_pairs(g["centers"]) if "centers" in g else (),
            scales=_parse_floats(g["scales"]) if "scales" in g else (),
            epsilon=float(g.get("epsilon", cfg.epsilon)),
        )
        ga = parser["gamma"] if parser.has_section("gamma") else {}
        cfg = replace(
            cfg,
            gamma_kind=ga.get("kind", cfg.gamma_kind).strip(),
            gamma_value=float(ga.get("value", cfg.gamma_value)),
            gamma_table=_parse_floats(ga["values"]) if "values" in ga else (),
        )
        fw = parser["forward"] if parser.has_section("forward") else {}
        me = parser["method"] if parser.has_section("method") else {}
        method = me.get("kind", cfg.method).strip()
        default_path = "born" if method == "music" else (
            "series" if cfg.geometry_kind == "concentric_disc" else "bie")
        default_order = 20 if method == "music" else 30
        default_inner = 32 if cfg.geometry_kind == "small_discs" else 128
        expected = me.get("expected_components", "").strip()
        cfg = replace(
            cfg,
            path=fw.get("path", default_path).strip(),
            max_order=int(fw.get("max_order", default_order)),
            boundary_nodes=int(fw.get("boundary_nodes", cfg.boundary_nodes)),
            inclusion_nodes=int(fw.get("inclusion_nodes", default_inner)),
            truncation=int(fw.get("truncation", cfg.truncation)),
            method=method,
            tau=float(me.get("tau", cfg.tau)),
            filter_kind=me.get("filter", cfg.filter_kind).strip(),
            alpha=float(me.get("alpha", cfg.alpha)),
            beta=float(me["beta"]) if me.get("beta", "").strip() else None,
            level=float(me.get("level", cfg.level)),
            expected_components=int(expected) if expected else None,
        )
        no = parser["noise"] if parser.has_section("noise") else {}
        sa = parser["sampling"] if parser.has_section("sampling") else {}
        cfg = replace(
            cfg,
            delta=float(no.get("delta", cfg.delta)),
            seed=int(no.get("seed", cfg.seed)),
            step=float(sa.get("step", cfg.step)),
            margin=float(sa["margin"]) if sa.get("margin", "").strip() else None,
        )
        sc = parser["scaling"] if parser.has_section("scaling") else {}
        cv = parser["convergence"] if parser.has_section("convergence") else {}
        cfg = replace(
            cfg,
            scaling_epsilons=_parse_floats(sc["epsilons"])
            if "epsilons" in sc else cfg.scaling_epsilons,
            convergence_orders=_parse_ints(cv["orders"])
            if "orders" in cv else cfg.convergence_orders,
            convergence_reference=int(cv.get("reference",
                                             cfg.convergence_reference)),
        )
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("invalid config value: %s" % exc) from exc
    return cfg


def build_geometry(cfg: ScenarioConfig) -> Geometry:
    if cfg.geometry_kind == "concentric_disc":
        return ConcentricDisc(radius=cfg.radius)
    if cfg.geometry_kind == "star_shaped":
        return StarShaped.cosine(cfg.base, cfg.amplitude, cfg.frequency)
    if cfg.geometry_kind == "small_discs":
        if not cfg.centers:
            raise ConfigError("small_discs geometry needs centers")
        scales = cfg.scales if cfg.scales else (1.0,) * len(cfg.centers)
        if len(scales) != len(cfg.centers):
            raise ConfigError("scales must match centers")
        comps = tuple((c, s) for c, s in zip(cfg.centers, scales))
        return SmallDiscs(components=comps, epsilon=cfg.epsilon)
    raise ConfigError("unknown geometry kind %r" % cfg.geometry_kind)


def build_gamma(cfg: ScenarioConfig) -> RobinCoefficient:
    if cfg.gamma_kind == "constant":
        return RobinCoefficient.constant(cfg.gamma_value)
    if cfg.gamma_kind == "exp_cos":
        return RobinCoefficient.exp_cos()
    if cfg.gamma_kind == "tabulated":
        if not cfg.gamma_table:
            raise ConfigError("tabulated gamma needs values")
        return RobinCoefficient.tabulated(cfg.gamma_table)
    raise ConfigError("unknown gamma kind %r" % cfg.gamma_kind)


def build_filter(cfg: ScenarioConfig) -> FilterSpec:
    if cfg.filter_kind == "landweber":
        return FilterSpec.landweber(cfg.alpha, cfg.beta)
    if cfg.filter_kind == "tikhonov":
        return FilterSpec.tikhonov(cfg.alpha)
    if cfg.filter_kind == "spectral_cutoff":
        return FilterSpec.spectral_cutoff(cfg.alpha)
    raise ConfigError("unknown filter kind %r" % cfg.filter_kind)


def validate_config(cfg: ScenarioConfig) -> list[str]:
    """All detected configuration problems (empty when runnable)."""
    problems: list[str] = []

    def check(fn, *args):
        try:
            return fn(*args)
        except (ConfigError, ValueError) as exc:
            problems.append(str(exc))
            return None

    geometry = check(build_geometry, cfg)
    gamma = check(build_gamma, cfg)
    if gamma is not None:
        check(gamma.validate)
    if cfg.method not in METHOD_KINDS:
        problems.append("method must be one of %s" % (METHOD_KINDS,))
        return problems
    if cfg.path not in FORWARD_PATHS:
        problems.append("forward path must be one of %s" % (FORWARD_PATHS,))
    if cfg.boundary_nodes < 8 or cfg.boundary_nodes % 2:
        problems.append("boundary_nodes must be even and at least 8")
    if cfg.inclusion_nodes < 8 or cfg.inclusion_nodes % 2:
        problems.append("inclusion_nodes must be even and at least 8")
    if cfg.max_order < 1:
        problems.append("max_order must be at least 1")
    if cfg.delta < 0:
        problems.append("noise level delta must be nonnegative")
    if cfg.step <= 0:
        problems.append("sampling step must be positive")
    if cfg.margin is not None and cfg.margin < 0:
        problems.append("sampling margin must be nonnegative")
    if cfg.method == "music":
        if not 0 < cfg.tau < 1:
            problems.append("tau must lie in (0, 1)")
        if cfg.path == "series":
            problems.append("the music method needs voltage-indexed data "
                            "(path born, bie, or asymptotic)")
        if cfg.geometry_kind != "small_discs":
            problems.append("the music method localizes small_discs "
                            "geometries")
        elif geometry is not None and cfg.max_order + 1 <= geometry.count:
            problems.append("violated premise: the voltage count must exceed "
                            "the component count (max_order + 1 > J; got "
                            "%d <= %d)" % (cfg.max_order + 1, geometry.count))
        if cfg.expected_components is not None and cfg.expected_components < 1:
            problems.append("expected_components must be at least 1")
        if 2 * cfg.max_order >= cfg.boundary_nodes:
            problems.append("boundary grid must resolve the voltage basis "
                            "(boundary_nodes > 2*max_order)")
    else:
        if cfg.path not in ("series", "bie"):
            problems.append("factorization imaging needs the full operator "
                            "(path series or bie)")
        if cfg.path == "series":
            if cfg.geometry_kind != "concentric_disc":
                problems.append("the series path requires a concentric disc")
            if cfg.gamma_kind != "constant":
                problems.append("the series path requires constant gamma")
            if cfg.truncation < 1:
                problems.append("series truncation must be at least 1")
        if cfg.path == "bie" and 2 * cfg.max_order >= cfg.boundary_nodes:
            problems.append("boundary grid must resolve the voltage basis "
                            "(boundary_nodes > 2*max_order)")
        if not 0 < cfg.level < 1:
            problems.append("level must lie in (0, 1)")
        check(build_filter, cfg)
    return problems


def _require_valid(cfg: ScenarioConfig) -> None:
    problems = validate_config(cfg)
    if problems:
        raise ConfigError("; ".join(problems))


# ---------------------------------------------------------------------------
# data assembly


def music_data(cfg: ScenarioConfig) -> CurrentGapMatrix:
    """Voltage-indexed gap data for the localization method."""
    geometry, gamma = build_geometry(cfg), build_gamma(cfg)
    grid = BoundaryGrid(cfg.boundary_nodes)
    basis = FourierBasisSet.lowpass(cfg.max_order)
    if cfg.path == "born":
        return born_current_gap_matrix(geometry, gamma, basis, grid,
                                       cfg.inclusion_nodes)
    if cfg.path == "bie":
        return current_gap_matrix(geometry, gamma, basis, grid,
                                  cfg.inclusion_nodes)
    if cfg.path == "asymptotic":
        return asymptotic_current_gap_matrix(geometry, gamma, basis, grid)
    raise ConfigError("unsupported forward path %r for music" % cfg.path)


def factorization_system(cfg: ScenarioConfig) -> np.ndarray:
    """Data matrix whose singular system drives the indicator.

    The series path yields the nodal collocation matrix of the gap kernel
    (K x K); the bie path yields the measured node-by-voltage data matrix
    (K x (2 max_order + 1)).  Either way the left singular vectors live in
    the nodal space the probe vectors are sampled in.
    """
    geometry, gamma = build_geometry(cfg), build_gamma(cfg)
    grid = BoundaryGrid(cfg.boundary_nodes)
    if cfg.path == "series":
        coeffs = SeriesCoefficients(rho=cfg.radius, gamma=cfg.gamma_value,
                                    truncation=cfg.truncation)
        return assemble_series_operator(coeffs, grid).values
    if cfg.path == "bie":
        basis = FourierBasisSet.symmetric(cfg.max_order)
        data = current_gap_matrix(geometry, gamma, basis, grid,
                                  cfg.inclusion_nodes)
        return data.values.T
    raise ConfigError("unsupported forward path %r for factorization"
                      % cfg.path)


# ---------------------------------------------------------------------------
# atomic output helpers


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_text(path: Path, text: str) -> None:
    _atomic_write(path, text.encode())


def write_field_csv(path, field: IndicatorField) -> None:
    """Field samples as x,y,W rows with full round-trip precision."""
    rows = ["x,y,W"]
    for (x, y), w in zip(field.grid.points(), field.masked_values()):
        rows.append("%r,%r,%r" % (float(x), float(y), float(w)))
    _atomic_write_text(Path(path), "\n".join(rows) + "\n")


def read_field_csv(path) -> IndicatorField:
    """Rebuild an indicator field from a written field CSV."""
    xs, ys, ws = [], [], []
    with open(path) as handle:
        header = handle.readline().strip()
        if header != "x,y,W":
            raise ConfigError("unexpected field header %r" % header)
        for line in handle:
            parts = line.strip().split(",")
            if len(parts) != 3:
                continue
            xs.append(float(parts[0]))
            ys.append(float(parts[1]))
            ws.append(float(parts[2]))
    x_axis = np.unique(np.asarray(xs))
    y_axis = np.unique(np.asarray(ys))
    mask = np.zeros((x_axis.size, y_axis.size), dtype=bool)
    values = np.full(mask.shape, np.nan)
    xi = np.searchsorted(x_axis, xs)
    yi = np.searchsorted(y_axis, ys)
    mask[xi, yi] = True
    values[xi, yi] = ws
    grid = SamplingGrid(x=x_axis, y=y_axis, mask=mask)
    return IndicatorField(grid=grid, values=values, method="loaded")


def write_spectrum_csv(path, sigmas: np.ndarray) -> None:
    rows = ["j,sigma"]
    for j, s in enumerate(sigmas, start=1):
        rows.append("%d,%r" % (j, float(s)))
    _atomic_write_text(Path(path), "\n".join(rows) + "\n")


def write_peaks_csv(path, peaks: np.ndarray) -> None:
    rows = ["x,y,value"]
    for x, y, v in peaks:
        rows.append("%r,%r,%r" % (float(x), float(y), float(v)))
    _atomic_write_text(Path(path), "\n".join(rows) + "\n")


def write_contour_csv(path, segments: np.ndarray) -> None:
    rows = ["x1,y1,x2,y2"]
    for seg in segments:
        rows.append("%r,%r,%r,%r" % (float(seg[0][0]), float(seg[0][1]),
                                     float(seg[1][0]), float(seg[1][1])))
    _atomic_write_text(Path(path), "\n".join(rows) + "\n")


def write_report_txt(path, info: dict) -> None:
    rows = ["%s = %s" % (k, v) for k, v in info.items()]
    _atomic_write_text(Path(path), "\n".join(rows) + "\n")


def write_pgm(path, field: IndicatorField) -> None:
    """8-bit graymap of round(255 W), masked points black, top row y max."""
    vals = np.where(np.isfinite(field.values), field.values, 0.0)
    img = np.round(255.0 * vals).astype(np.uint8).T[::-1, :]
    header = b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0])
    _atomic_write(Path(path), header + img.tobytes())


# ---------------------------------------------------------------------------
# subcommand drivers


@dataclass
class RunReport:
    name: str
    method: str
    out_dir: Path
    files: list = field(default_factory=list)
    info: dict = field(default_factory=dict)


def _emit(quiet: bool, text: str) -> None:
    if not quiet:
        print(text)


def run_scenario(cfg: ScenarioConfig, out_dir, quiet: bool = False) -> RunReport:
    """Execute a scenario end to end and write every report artifact."""
    _require_valid(cfg)
    out = Path(out_dir)
    geometry = build_geometry(cfg)
    sampling = SamplingGrid.from_step(cfg.step, margin=cfg.margin)
    rep = RunReport(name=cfg.name, method=cfg.method, out_dir=out)
    info = {"scenario": cfg.name, "method": cfg.method,
            "geometry": cfg.geometry_kind, "forward_path": cfg.path,
            "boundary_nodes": cfg.boundary_nodes,
            "inclusion_nodes": cfg.inclusion_nodes,
            "delta": cfg.delta, "seed": cfg.seed,
            "sampling_step": cfg.step}

    if cfg.method == "music":
        data = music_data(cfg)
        noisy = apply_noise(data.values, cfg.delta, cfg.seed)
        noisy_data = CurrentGapMatrix(values=noisy.noisy, grid=data.grid,
                                      provenance=data.provenance + "+noise",
                                      basis=data.basis)
        response = assemble_response(noisy_data)
        sigmas = response.singular_values()
        rank = detect_rank(response, cfg.tau)
        fld = music_field(response, sampling, tau=cfg.tau)
        peaks = extract_peaks(fld, cfg.expected_components)
        info.update({"max_order": cfg.max_order, "tau": cfg.tau,
                     "rank": rank, "peak_count": len(peaks)})
        for i, (x, y, v) in enumerate(peaks, start=1):
            info["peak_%d" % i] = "(%r, %r)" % (float(x), float(y))
        write_peaks_csv(out / "peaks.csv", peaks)
        rep.files.append(out / "peaks.csv")
        figures.save_music_figure(fld, peaks, geometry, out / "field.png")
        extra_figure = out / "field.png"
    else:
        system = apply_noise(factorization_system(cfg), cfg.delta, cfg.seed)
        spec_f = build_filter(cfg)
        grid = BoundaryGrid(cfg.boundary_nodes)
        fld = w_field(system, spec_f, sampling, grid)
        segments = level_set(fld, cfg.level)
        pts = contour_points(segments)
        info.update({"filter": cfg.filter_kind, "alpha": cfg.alpha,
                     "level": cfg.level,
                     "contour_segments": len(segments)})
        for key, value in fld.metadata.items():
            info.setdefault(key, value)
        if pts.size:
            radii = np.hypot(pts[:, 0], pts[:, 1])
            info["contour_mean_radius"] = float(radii.mean())
            info["contour_std_radius"] = float(radii.std())
        sigmas = system.s
        write_contour_csv(out / "contour.csv", segments)
        rep.files.append(out / "contour.csv")
        figures.save_factorization_figure(fld, segments, geometry, cfg.level,
                                          out / "field.png")
        extra_figure = out / "field.png"

    write_field_csv(out / "field.csv", fld)
    write_spectrum_csv(out / "spectrum.csv", sigmas)
    write_pgm(out / "heatmap.pgm", fld)
    figures.save_spectrum_figure(np.asarray(sigmas), out / "spectrum.png",
                                 title="%s spectrum" % cfg.name)
    rep.files.extend([out / "field.csv", out / "spectrum.csv",
                      out / "heatmap.pgm", extra_figure, out / "spectrum.png"])
    write_report_txt(out / "report.txt", info)
    rep.files.append(out / "report.txt")
    rep.info = info
    _emit(quiet, "scenario %s (%s) finished" % (cfg.name, cfg.method))
    for key in ("rank", "peak_count", "contour_mean_radius",
                "contour_std_radius"):
        if key in info:
            _emit(quiet, "  %s = %s" % (key, info[key]))
    _emit(quiet, "  wrote %d files to %s" % (len(rep.files), out))
    return rep


def spectrum_report(cfg: ScenarioConfig, out_dir, quiet: bool = False) -> RunReport:
    """Write the singular spectrum of the configured data operator."""
    _require_valid(cfg)
    out = Path(out_dir)
    if cfg.method == "music":
        data = music_data(cfg)
        noisy = apply_noise(data.values, cfg.delta, cfg.seed)
        sigmas = np.linalg.svd(
            assemble_response(CurrentGapMatrix(
                values=noisy.noisy, grid=data.grid,
                provenance=data.provenance, basis=data.basis)).values,
            compute_uv=False)
    else:
        sigmas = apply_noise(factorization_system(cfg), cfg.delta, cfg.seed).s
    write_spectrum_csv(out / "spectrum.csv", sigmas)
    figures.save_spectrum_figure(sigmas, out / "spectrum.png",
                                 title="%s spectrum" % cfg.name)
    info = {"scenario": cfg.name, "count": sigmas.size,
            "sigma_max": float(sigmas[0]), "sigma_min": float(sigmas[-1]),
            "delta": cfg.delta, "seed": cfg.seed}
    write_report_txt(out / "report.txt", info)
    _emit(quiet, "wrote spectrum (%d values) to %s" % (sigmas.size, out))
    return RunReport(name=cfg.name, method="spectrum", out_dir=out,
                     files=[out / "spectrum.csv", out / "spectrum.png",
                            out / "report.txt"], info=info)


def scaling_report_cmd(cfg: ScenarioConfig, out_dir, quiet: bool = False) -> RunReport:
    """Empirical small-volume scaling table for a small-disc scenario."""
    if cfg.geometry_kind != "small_discs":
        raise ConfigError("scaling reports need a small_discs geometry")
    geometry = build_geometry(cfg)
    gamma = build_gamma(cfg)
    gamma.validate()
    out = Path(out_dir)
    basis = FourierBasisSet.lowpass(cfg.max_order if cfg.method == "music"
                                    else 20)
    rep = asymptotic_scaling_report(geometry.components, gamma,
                                    cfg.scaling_epsilons, basis=basis,
                                    grid=BoundaryGrid(cfg.boundary_nodes),
                                    nodes=cfg.inclusion_nodes)
    rows = ["epsilon,norm_born,norm_full_minus_born,norm_full_minus_asymptotic"]
    for eps, nb, nfb, nfa in rep.rows():
        rows.append("%r,%r,%r,%r" % (eps, nb, nfb, nfa))
    _atomic_write_text(out / "scaling.csv", "\n".join(rows) + "\n")
    figures.save_scaling_figure(
        rep.epsilons,
        {"born": rep.norm_born, "full - born": rep.norm_full_minus_born,
         "full - asymptotic": rep.norm_full_minus_asymptotic},
        out / "scaling.png")
    info = {"scenario": cfg.name, "epsilons": [float(e) for e in rep.epsilons],
            "born_slope": rep.born_slope(),
            "correction_slope": rep.correction_slope()}
    write_report_txt(out / "report.txt", info)
    _emit(quiet, "born slope %.3f, correction slope %.3f"
          % (rep.born_slope(), rep.correction_slope()))
    return RunReport(name=cfg.name, method="scaling", out_dir=out,
                     files=[out / "scaling.csv", out / "scaling.png",
                            out / "report.txt"], info=info)


def convergence_report_cmd(cfg: ScenarioConfig, out_dir,
                           quiet: bool = False) -> RunReport:
    """Series truncation-error table for a concentric-disc scenario."""
    if cfg.geometry_kind != "concentric_disc" or cfg.gamma_kind != "constant":
        raise ConfigError("convergence reports need a concentric disc with "
                          "constant gamma")
    out = Path(out_dir)
    rep = truncation_error_report(cfg.radius, cfg.gamma_value,
                                  cfg.convergence_orders,
                                  reference_order=cfg.convergence_reference)
    rows = ["order,measured,bound"]
    for i, n in enumerate(rep.orders):
        rows.append("%d,%r,%r" % (n, float(rep.measured[i]),
                                  float(rep.bound[i])))
    _atomic_write_text(out / "convergence.csv", "\n".join(rows) + "\n")
    figures.save_convergence_figure(rep.orders, rep.measured, rep.bound,
                                    out / "convergence.png")
    info = {"scenario": cfg.name, "reference_order": rep.reference_order,
            "log_slope": rep.log_slope(),
            "expected_slope": 2.0 * math.log(cfg.radius),
            "ratio_spread": rep.ratio_spread()}
    write_report_txt(out / "report.txt", info)
    _emit(quiet, "log slope %.4f (expected %.4f)"
          % (rep.log_slope(), 2.0 * math.log(cfg.radius)))
    return RunReport(name=cfg.name, method="convergence", out_dir=out,
                     files=[out / "convergence.csv", out / "convergence.png",
                            out / "report.txt"], info=info)


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eitshape",
        description="Gap-current simulation and qualitative inclusion "
                    "reconstruction in the unit disk")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
            ("run", "run a scenario and write field/spectrum/report files"),
            ("validate", "check a scenario configuration"),
            ("spectrum", "write the operator singular spectrum"),
            ("scaling", "empirical small-volume scaling report"),
            ("convergence", "series truncation convergence report")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True,
                       help="scenario file path or bundled scenario name")
        if name != "validate":
            p.add_argument("--out", default="eitshape-out",
                           help="output directory (default: eitshape-out)")
            p.add_argument("--seed", type=int, default=None,
                           help="override the scenario noise seed")
        p.add_argument("--quiet", action="store_true",
                       help="suppress progress output")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if getattr(args, "seed", None) is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.command == "validate":
            problems = validate_config(cfg)
            if problems:
                for p in problems:
                    print("invalid: %s" % p, file=sys.stderr)
                return 2
            _emit(args.quiet, "config %s is valid" % cfg.name)
            return 0
        driver = {"run": run_scenario, "spectrum": spectrum_report,
                  "scaling": scaling_report_cmd,
                  "convergence": convergence_report_cmd}[args.command]
        driver(cfg, args.out, quiet=args.quiet)
        return 0
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except (RuntimeError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print("solver error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
