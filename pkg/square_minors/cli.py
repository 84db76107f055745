"""
Command-line entry point for the square-minors toolkit.

Subcommands:
- gen: cut a family window and print its graph document
- square: square a graph document
- rays: find disjoint end-coherent rays in a window
- build-minor: build a K_m model in the square of a window
- oracle: decide whether a pattern is a minor of a host
- bound: print M_T, M_G and n_max for both bound variants
- experiment (alias run): thick-side or tree-side experiment from a JSON
  config and/or flags

Exit status: 0 success, 1 theorem-level check failed (or a negative answer
for rays/oracle), 2 resource or budget exhaustion, 3 configuration or input
error, 4 internal invariant failure.
"""

import argparse
import logging
import sys
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path

import anyio
from pydantic import ValidationError

from .builder import build_km_minor
from .config import Config, configure_logging
from .errors import (
    BoundInputError,
    ConfigError,
    ConstructionError,
    GraphFormatError,
    GraphInputError,
    InternalCheckError,
    QiInputError,
    RayInputError,
    ResourceError,
    TheoremCheckError,
)
from .experiments import load_experiment_config, report_text, run_experiment
from .families import cut_window, max_degree
from .graphs import decode, encode, square
from .models import (
    BoundInputs,
    BoundVariant,
    FamilySpec,
    FiniteGraph,
    MinorOutcome,
    SearchBudget,
)
from .oracle import has_minor
from .qi import clique_bound, shipped_certificate
from .rays import disjoint_rays, ray_overlay
from .utils import bundle_to_dot, graph_to_dot, model_to_dot, write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_RESOURCE = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4


def _family(text: str) -> FamilySpec:
    try:
        return FamilySpec.parse(text)
    except ValidationError as exc:
        raise ConfigError(f"family {text!r}: {exc.errors()[0]['msg']}") from None


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        write_text(out, text if text.endswith("\n") else text + "\n")
        logger.info(f"wrote {out}")


def _read_graph(path: Path) -> FiniteGraph:
    try:
        return decode(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None


def cmd_gen(args: argparse.Namespace, config: Config) -> int:
    window = cut_window(_family(args.family), args.radius, config.window_vertex_budget)
    _emit(encode(window.graph), args.out)
    if args.dot:
        write_text(args.dot, graph_to_dot(window.graph, name=f"window_{args.radius}"))
    return EXIT_OK


def cmd_square(args: argparse.Namespace, config: Config) -> int:
    _emit(encode(square(_read_graph(args.graph))), args.out)
    return EXIT_OK


def cmd_rays(args: argparse.Namespace, config: Config) -> int:
    window = cut_window(_family(args.family), args.radius, config.window_vertex_budget)
    r_star = args.r_star if args.r_star is not None else max(1, args.radius // 2)
    bundle = disjoint_rays(window, args.m, r_star)
    if bundle is None:
        sys.stdout.write(f"not found: fewer than {args.m} coherent disjoint rays\n")
        return EXIT_CHECK_FAILED
    _emit(ray_overlay(bundle, window).model_dump_json(), args.out)
    if args.dot:
        write_text(args.dot, bundle_to_dot(bundle, window))
    return EXIT_OK


def cmd_build_minor(args: argparse.Namespace, config: Config) -> int:
    window = cut_window(_family(args.family), args.radius, config.window_vertex_budget)
    r_star = args.r_star if args.r_star is not None else max(1, args.radius // 2)
    bundle = disjoint_rays(window, args.m, r_star)
    if bundle is None:
        raise ConstructionError(
            f"no {args.m} coherent disjoint rays at radius {args.radius}; try a larger radius"
        )
    model = build_km_minor(bundle, window, args.m, check_stages=config.check_stages)
    _emit(model.model_dump_json(), args.out)
    if args.dot:
        write_text(args.dot, model_to_dot(model))
    return EXIT_OK


def _pattern(text: str) -> FiniteGraph:
    if text[:1] in ("K", "k") and text[1:].isdigit():
        return FiniteGraph.complete(int(text[1:]))
    return _read_graph(Path(text))


def cmd_oracle(args: argparse.Namespace, config: Config) -> int:
    budget = SearchBudget(
        max_nodes=args.max_nodes or config.oracle_max_nodes,
        time_cap=args.time_cap or config.oracle_time_cap,
    )
    result = has_minor(_read_graph(args.host), _pattern(args.pattern), budget)
    sys.stdout.write(f"{result.outcome.value} ({result.nodes} nodes)\n")
    if result.outcome is MinorOutcome.YES:
        _emit(result.model.model_dump_json(), args.out)
        return EXIT_OK
    if result.outcome is MinorOutcome.NO:
        return EXIT_CHECK_FAILED
    return EXIT_RESOURCE


def cmd_bound(args: argparse.Namespace, config: Config) -> int:
    if args.family:
        spec = _family(args.family)
        cert, _, _ = shipped_certificate(spec, 2, config.window_vertex_budget)
        d_g, d_t = max_degree(spec), max_degree(cert.target)
        gamma, c = cert.gamma, cert.c
    else:
        if args.d_g is None or args.d_t is None:
            raise ConfigError("bound needs --family or both --d-g and --d-t")
        d_g, d_t = args.d_g, args.d_t
        try:
            gamma, c = Fraction(args.gamma), Fraction(args.c)
        except ValueError as exc:
            raise ConfigError(f"gamma and c must be rationals: {exc}") from None
    for variant in BoundVariant:
        bound = clique_bound(
            BoundInputs(d_g=d_g, d_t=d_t, gamma=gamma, c=c, variant=variant)
        )
        flag = " (degenerate)" if bound.degenerate else ""
        sys.stdout.write(
            f"{variant.value}: M_T={bound.m_t} M_G={bound.m_g} n_max={bound.n_max}{flag}\n"
        )
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace, config: Config) -> int:
    overrides = {
        "name": args.name,
        "experiment": args.experiment,
        "family": args.family,
        "radii": args.radii,
        "m_range": args.m,
        "bound_variant": args.variant,
        "output_dir": args.output_dir,
        "budget": {"max_nodes": args.max_nodes, "time_cap": args.time_cap},
    }
    defaults = {
        "output_dir": config.output_dir,
        "budget": {
            "max_nodes": config.oracle_max_nodes,
            "time_cap": config.oracle_time_cap,
        },
    }
    cfg = load_experiment_config(args.config, overrides, defaults)

    report = anyio.run(run_experiment, cfg, config)
    sys.stdout.write(report_text(report))
    if report.inconclusive:
        logger.warning("experiment inconclusive: an oracle search ran out of budget")
        return EXIT_RESOURCE
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="square-minors",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="cut a family window")
    gen.add_argument("--family", required=True, help="e.g. grid_z2, regular_tree(3)")
    gen.add_argument("--radius", type=int, required=True)
    gen.add_argument("--out", type=Path)
    gen.add_argument("--dot", type=Path)
    gen.set_defaults(handler=cmd_gen)

    sq = commands.add_parser("square", help="square a graph document")
    sq.add_argument("graph", type=Path)
    sq.add_argument("--out", type=Path)
    sq.set_defaults(handler=cmd_square)

    for name, handler, text in (
        ("rays", cmd_rays, "find m disjoint coherent rays"),
        ("build-minor", cmd_build_minor, "build a K_m model in the square of a window"),
    ):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("--family", required=True)
        sub.add_argument("--radius", type=int, required=True)
        sub.add_argument("--m", type=int, required=True)
        sub.add_argument("--r-star", type=int, dest="r_star")
        sub.add_argument("--out", type=Path)
        sub.add_argument("--dot", type=Path)
        sub.set_defaults(handler=handler)

    oracle = commands.add_parser("oracle", help="minor containment test")
    oracle.add_argument("host", type=Path)
    oracle.add_argument("--pattern", required=True, help="K_n as 'K5' or a document path")
    oracle.add_argument("--max-nodes", type=int, dest="max_nodes")
    oracle.add_argument("--time-cap", type=float, dest="time_cap")
    oracle.add_argument("--out", type=Path)
    oracle.set_defaults(handler=cmd_oracle)

    bound = commands.add_parser("bound", help="clique-minor bounds")
    bound.add_argument("--family", help="take D_G, D_T, gamma, c from the shipped certificate")
    bound.add_argument("--d-g", type=int, dest="d_g")
    bound.add_argument("--d-t", type=int, dest="d_t")
    bound.add_argument("--gamma", default="1")
    bound.add_argument("--c", default="0")
    bound.set_defaults(handler=cmd_bound)

    experiment = commands.add_parser("experiment", aliases=["run"], help="run an experiment")
    experiment.add_argument("--config", type=Path, help="flat JSON experiment config")
    experiment.add_argument("--name")
    experiment.add_argument("--experiment", choices=["thick", "tree"])
    experiment.add_argument("--family")
    experiment.add_argument("--radii", help="e.g. 6,8,10")
    experiment.add_argument("--m", help="e.g. 2..5")
    experiment.add_argument("--variant", choices=[v.value for v in BoundVariant])
    experiment.add_argument("--max-nodes", type=int, dest="max_nodes")
    experiment.add_argument("--time-cap", type=float, dest="time_cap")
    experiment.add_argument("--output-dir", dest="output_dir")
    experiment.set_defaults(handler=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = Config.load()
    except ValidationError as exc:
        first = exc.errors()[0]
        sys.stderr.write(f"configuration error: {first['loc']}: {first['msg']}\n")
        return EXIT_CONFIG
    configure_logging(config)

    handler: Callable[[argparse.Namespace, Config], int] = args.handler
    try:
        return handler(args, config)
    except TheoremCheckError as exc:
        logger.error(f"theorem-level check failed: {exc}")
        return EXIT_CHECK_FAILED
    except (ResourceError, ConstructionError) as exc:
        logger.error(str(exc))
        return EXIT_RESOURCE
    except (
        ConfigError,
        GraphFormatError,
        GraphInputError,
        RayInputError,
        QiInputError,
        BoundInputError,
    ) as exc:
        logger.error(f"invalid input: {exc}")
        return EXIT_CONFIG
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(p) for p in first["loc"]) or "input"
        logger.error(f"invalid input: {location}: {first['msg']}")
        return EXIT_CONFIG
    except OSError as exc:
        logger.error(f"invalid input: {exc.filename}: {exc.strerror}")
        return EXIT_CONFIG
    except (InternalCheckError, AssertionError) as exc:
        logger.error(f"internal invariant failed: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
