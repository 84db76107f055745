"""
Experiments exercising both directions of the main theorem on concrete families.

Key Functions:
- experiment_thick_side(): rays -> K_m construction in G² -> independent check,
  for every (radius, m); the largest verified m must not drop as radius grows
- experiment_tree_side(): QI certificate, fiber probe, Hadwiger number and both
  clique bounds per radius
- run_experiment(): dispatches on the configured experiment and writes
  report.json, report.txt, rows.csv, timings.json and DOT/model documents

Rows run concurrently on worker threads (anyio) bounded by Config.workers and
are reassembled in (radius, m) order, so report.json is deterministic.
"""

import csv
import io
import json
import logging
import time
from pathlib import Path

import anyio
from pydantic import ValidationError

from .builder import build_km_minor
from .config import Config
from .errors import (
    ConfigError,
    ConstructionError,
    InternalCheckError,
    QiInputError,
    SquareMinorsError,
    TheoremCheckError,
)
from .families import cut_window, max_degree
from .graphs import square
from .models import (
    BoundInputs,
    BoundVariant,
    CliqueBound,
    ExperimentConfig,
    ExperimentKind,
    ExperimentReport,
    ExperimentRow,
    FiniteGraph,
    RowTiming,
    ThickSummary,
    TreeSummary,
    Window,
)
from .oracle import hadwiger_number, verify_model
from .qi import clique_bound, fiber_check, is_tree_family, shipped_certificate, verify_qi
from .rays import disjoint_rays
from .utils import bundle_to_dot, graph_to_dot, model_to_dot, write_text

logger = logging.getLogger(__name__)

CSV_HEADER = ("radius", "m", "ray_found", "built", "verified", "oracle_nodes", "outcome")


def _millis(start: float) -> int:
    return int((time.perf_counter() - start) * 1000)


def _thick_row(
    w: Window, m: int, check_stages: bool, artifacts: dict[str, str]
) -> tuple[ExperimentRow, int]:
    start = time.perf_counter()
    radius = w.radius
    bundle = disjoint_rays(w, m, max(1, radius // 2))
    if bundle is None:
        row = ExperimentRow(radius=radius, m=m, outcome="no_rays")
        return row, _millis(start)
    try:
        model = build_km_minor(bundle, w, m, check_stages=check_stages)
    except ConstructionError as exc:
        row = ExperimentRow(
            radius=radius, m=m, ray_found=True, outcome="construction_failed", detail=str(exc)
        )
        return row, _millis(start)
    check = verify_model(square(w.graph), FiniteGraph.complete(m), model)
    if not check.ok:
        row = ExperimentRow(
            radius=radius,
            m=m,
            ray_found=True,
            built=True,
            outcome="verification_failed",
            detail="; ".join(check.violations),
        )
        return row, _millis(start)
    artifacts[f"rays_r{radius}_m{m}.dot"] = bundle_to_dot(bundle, w)
    artifacts[f"model_r{radius}_m{m}.dot"] = model_to_dot(model)
    artifacts[f"model_r{radius}_m{m}.json"] = model.model_dump_json()
    row = ExperimentRow(
        radius=radius, m=m, ray_found=True, built=True, verified=True, outcome="verified"
    )
    return row, _millis(start)


async def experiment_thick_side(
    cfg: ExperimentConfig, config: Config, artifacts: dict[str, str] | None = None
) -> ExperimentReport:
    """Largest verified K_m in the square of each window.

    Ray and construction failures are recorded per row. A built model that
    fails the independent check, or a largest verified m that drops as the
    radius grows, raises TheoremCheckError.
    """
    artifacts = artifacts if artifacts is not None else {}
    windows = {r: cut_window(cfg.family, r, config.window_vertex_budget) for r in cfg.radii}
    for r, w in windows.items():
        artifacts[f"window_r{r}.dot"] = graph_to_dot(w.graph, name=f"window_{r}")
    limiter = anyio.CapacityLimiter(config.workers)
    results: dict[tuple[int, int], tuple[ExperimentRow, int]] = {}
    broken: dict[tuple[int, int], AssertionError] = {}

    async def run_row(w: Window, m: int) -> None:
        try:
            results[(w.radius, m)] = await anyio.to_thread.run_sync(
                _thick_row, w, m, config.check_stages, artifacts, limiter=limiter
            )
        except AssertionError as exc:
            broken[(w.radius, m)] = exc

    async with anyio.create_task_group() as tg:
        for r in cfg.radii:
            for m in cfg.m_range:
                tg.start_soon(run_row, windows[r], m)
    if broken:
        radius, m = min(broken)
        raise InternalCheckError(
            f"internal invariant failed at radius {radius}, m={m}: {broken[(radius, m)]}"
        ) from broken[(radius, m)]

    report = ExperimentReport(name=cfg.name, experiment=ExperimentKind.THICK, family=cfg.family)
    for key in sorted(results):
        row, millis = results[key]
        report.rows.append(row)
        report.timings.append(RowTiming(radius=row.radius, m=row.m, millis=millis))

    failed = [row for row in report.rows if row.outcome == "verification_failed"]
    if failed:
        raise TheoremCheckError(
            f"K{failed[0].m} model at radius {failed[0].radius} failed verification: "
            f"{failed[0].detail}"
        )
    for r in cfg.radii:
        verified = [row.m for row in report.rows if row.radius == r and row.verified]
        report.thick.append(ThickSummary(radius=r, largest_verified_m=max(verified, default=0)))
        logger.info(f"{cfg.family.name} radius {r}: largest verified m = {max(verified, default=0)}")
    for before, after in zip(report.thick, report.thick[1:]):
        if after.largest_verified_m < before.largest_verified_m:
            raise TheoremCheckError(
                f"largest verified m drops from {before.largest_verified_m} at radius "
                f"{before.radius} to {after.largest_verified_m} at radius {after.radius}"
            )
    return report


def _tree_radius(
    cfg: ExperimentConfig, config: Config, radius: int, artifacts: dict[str, str]
) -> tuple[TreeSummary, ExperimentRow, list[str], list[CliqueBound], int]:
    start = time.perf_counter()
    cert, source, target = shipped_certificate(cfg.family, radius, config.window_vertex_budget)
    if not is_tree_family(cert.target):
        raise ConfigError(f"{cfg.family.name} is not certified quasi-isometric to a tree")
    qi = verify_qi(cert, source, target)
    inputs = {
        variant: BoundInputs(
            d_g=max_degree(cfg.family),
            d_t=max_degree(cert.target),
            gamma=cert.gamma,
            c=cert.c,
            variant=variant,
        )
        for variant in BoundVariant
    }
    fibers = {variant: fiber_check(cert, source, inputs[variant]) for variant in BoundVariant}
    bounds = {variant: clique_bound(inputs[variant]) for variant in BoundVariant}
    hadwiger = hadwiger_number(source.graph, cfg.budget)
    artifacts[f"window_r{radius}.dot"] = graph_to_dot(source.graph, name=f"window_{radius}")

    safe, literal = BoundVariant.SAFE, BoundVariant.PAPER_LITERAL
    warnings = []
    if not qi.ok:
        raise TheoremCheckError(
            f"certificate {cert.source.name} -> {cert.target.name} fails the {qi.side} "
            f"inequality at {qi.pair} (radius {radius})"
        )
    if not fibers[safe].ok:
        raise TheoremCheckError(
            f"fiber of size {fibers[safe].max_fiber} exceeds safe M_G = {fibers[safe].bound} "
            f"at radius {radius}"
        )
    if not fibers[literal].ok:
        warnings.append(
            f"radius {radius}: fiber of size {fibers[literal].max_fiber} exceeds "
            f"paper_literal M_G = {fibers[literal].bound}"
        )
    if hadwiger.exact:
        if hadwiger.value > bounds[safe].n_max:
            raise TheoremCheckError(
                f"Hadwiger number {hadwiger.value} exceeds the safe bound "
                f"{bounds[safe].n_max} at radius {radius}"
            )
        if hadwiger.value > bounds[literal].n_max:
            warnings.append(
                f"radius {radius}: Hadwiger number {hadwiger.value} exceeds the "
                f"paper_literal bound {bounds[literal].n_max}"
            )
    else:
        warnings.append(
            f"radius {radius}: oracle budget exhausted, Hadwiger number >= "
            f"{hadwiger.value}; bound assertion skipped"
        )
    summary = TreeSummary(
        radius=radius,
        qi_ok=qi.ok,
        fiber_safe=fibers[safe].ok,
        fiber_paper_literal=fibers[literal].ok,
        max_fiber=fibers[safe].max_fiber,
        hadwiger=hadwiger.value,
        hadwiger_exact=hadwiger.exact,
        bound_safe=bounds[safe].n_max,
        bound_paper_literal=bounds[literal].n_max,
    )
    row = ExperimentRow(
        radius=radius,
        m=hadwiger.value,
        verified=hadwiger.exact,
        oracle_nodes=hadwiger.nodes,
        outcome="hadwiger" if hadwiger.exact else "lower_bound",
    )
    ordered = [bounds[cfg.bound_variant]] + [
        b for v, b in bounds.items() if v is not cfg.bound_variant
    ]
    return summary, row, warnings, ordered, _millis(start)


async def experiment_tree_side(
    cfg: ExperimentConfig, config: Config, artifacts: dict[str, str] | None = None
) -> ExperimentReport:
    """QI, fiber and Hadwiger checks against the clique bound for each radius.

    An exhausted oracle makes the report inconclusive and skips the bound
    assertion with a warning; it is never read as "no minor".
    """
    artifacts = artifacts if artifacts is not None else {}
    limiter = anyio.CapacityLimiter(config.workers)
    results: dict[int, tuple] = {}
    errors: dict[int, SquareMinorsError | AssertionError] = {}

    async def run_radius(radius: int) -> None:
        try:
            results[radius] = await anyio.to_thread.run_sync(
                _tree_radius, cfg, config, radius, artifacts, limiter=limiter
            )
        except (SquareMinorsError, AssertionError) as exc:
            errors[radius] = exc

    async with anyio.create_task_group() as tg:
        for r in cfg.radii:
            tg.start_soon(run_radius, r)
    if errors:
        first = errors[min(errors)]
        if isinstance(first, QiInputError):
            raise ConfigError(str(first)) from first
        if isinstance(first, AssertionError):
            raise InternalCheckError(
                f"internal invariant failed at radius {min(errors)}: {first}"
            ) from first
        raise first

    report = ExperimentReport(name=cfg.name, experiment=ExperimentKind.TREE, family=cfg.family)
    for r in cfg.radii:
        summary, row, warnings, bounds, millis = results[r]
        report.tree.append(summary)
        report.rows.append(row)
        report.warnings.extend(warnings)
        report.timings.append(RowTiming(radius=r, m=row.m, millis=millis))
        report.bounds = bounds
    report.inconclusive = any(not s.hadwiger_exact for s in report.tree)

    tail = [s.hadwiger for s in report.tree[-3:]]
    if len(set(tail)) > 1:
        report.warnings.append(
            f"Hadwiger numbers {tail} vary over the largest radii; windows may be too small"
        )
    for warning in report.warnings:
        logger.warning(warning)
    return report


def rows_csv(report: ExperimentReport) -> str:
    """One line per row; timings stay in timings.json so the file is reproducible."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        writer.writerow(
            (
                row.radius,
                row.m,
                int(row.ray_found),
                int(row.built),
                int(row.verified),
                row.oracle_nodes,
                row.outcome,
            )
        )
    return buffer.getvalue()


def report_text(report: ExperimentReport) -> str:
    """Human-readable table beside the JSON report."""
    lines = [f"{report.name}: {report.experiment.value} side on {report.family.name}", ""]
    if report.experiment is ExperimentKind.THICK:
        lines.append(f"{'radius':>6} {'m':>3} {'rays':>5} {'built':>6} {'verified':>9}  outcome")
        for row in report.rows:
            lines.append(
                f"{row.radius:>6} {row.m:>3} {'yes' if row.ray_found else 'no':>5} "
                f"{'yes' if row.built else 'no':>6} {'yes' if row.verified else 'no':>9}  "
                f"{row.outcome}"
            )
        lines.append("")
        for s in report.thick:
            lines.append(f"radius {s.radius}: largest verified m = {s.largest_verified_m}")
    else:
        lines.append(
            f"{'radius':>6} {'qi':>4} {'fiber':>6} {'hadwiger':>9} {'safe':>6} {'literal':>8}"
        )
        for s in report.tree:
            hadwiger = f"{s.hadwiger}" if s.hadwiger_exact else f">={s.hadwiger}"
            lines.append(
                f"{s.radius:>6} {'ok' if s.qi_ok else 'FAIL':>4} {s.max_fiber:>6} "
                f"{hadwiger:>9} {s.bound_safe:>6} {s.bound_paper_literal:>8}"
            )
        lines.append("")
        for b in report.bounds:
            flag = " (degenerate)" if b.degenerate else ""
            lines.append(
                f"{b.variant.value}: M_T={b.m_t} M_G={b.m_g} n_max={b.n_max}{flag}"
            )
    if report.warnings:
        lines.append("")
        lines.extend(f"warning: {w}" for w in report.warnings)
    return "\n".join(lines) + "\n"


def write_report(
    report: ExperimentReport, out_dir: Path, artifacts: dict[str, str]
) -> Path:
    """Writes every document of a run under out_dir.

    An output directory that cannot be created or written is a ConfigError.
    """
    documents = {
        "report.json": report.model_dump_json(indent=2) + "\n",
        "report.txt": report_text(report),
        "rows.csv": rows_csv(report),
        "timings.json": json.dumps([t.model_dump() for t in report.timings], indent=2) + "\n",
        **artifacts,
    }
    try:
        for name in sorted(documents):
            write_text(out_dir / name, documents[name])
    except OSError as exc:
        raise ConfigError(f"output_dir {out_dir}: {exc.strerror or exc}") from None
    logger.info(f"wrote {len(documents)} files to {out_dir}")
    return out_dir


async def run_experiment(cfg: ExperimentConfig, config: Config) -> ExperimentReport:
    """Runs the configured experiment and writes its artifacts."""
    out_dir = Path(cfg.output_dir or config.output_dir) / cfg.name
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output_dir {out_dir}: {exc.strerror or exc}") from None
    artifacts: dict[str, str] = {}
    if cfg.experiment is ExperimentKind.THICK:
        report = await experiment_thick_side(cfg, config, artifacts)
    else:
        report = await experiment_tree_side(cfg, config, artifacts)
    write_report(report, out_dir, artifacts)
    return report


def _merge(data: dict, layer: dict) -> None:
    for key, value in layer.items():
        if value is None:
            continue
        if isinstance(value, dict):
            if not isinstance(data.get(key), dict):
                data[key] = {}
            _merge(data[key], value)
        else:
            data[key] = value


def load_experiment_config(
    path: Path | None, overrides: dict, defaults: dict | None = None
) -> ExperimentConfig:
    """Defaults, then the flat JSON config file, then flag overrides.

    Validation errors become ConfigError with the failing field's location.
    """
    data: dict = {}
    _merge(data, defaults or {})
    if path is not None:
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(document, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        _merge(data, document)
    _merge(data, overrides)
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(p) for p in first["loc"]) or "config"
        raise ConfigError(f"{location}: {first['msg']}") from None
