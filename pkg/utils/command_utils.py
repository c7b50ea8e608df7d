"""
Shared helpers for the CLI subcommands: graph loading, run configs and output paths.
"""
import functools
import logging
import os
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from config import load_config
from modules.errors import InconsistentGraphError, ParameterError
from modules.generators import FileOracle, GeneratorSpec, make_oracle, parse_spec
from modules.graph_core import FiniteGraph, GraphOracle, Truncation, complete_truncation, materialize
from storage import RunConfig, read_graph, read_graph_header

config = load_config()
TRUNCATION_SETTINGS = config["TRUNCATION_SETTINGS"]


@dataclass
class LoadedGraph:
    g: FiniteGraph
    t: Truncation
    oracle: GraphOracle
    spec: str
    family: Optional[GeneratorSpec] = None  # generating family, when known


def command_handler(name: str):
    """
    A decorator for subcommand handlers: logs the run and the files it wrote.

    The wrapped handler takes the parsed arguments and returns the list of paths written.

    Example usage:
        @command_handler("growth")
        def growth(self, args):
            ...
            return [csv_path, report_path]
    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(self, args, *rest, **kwargs):
            logging.info(f"Running {name}")
            written = func(self, args, *rest, **kwargs) or []
            for path in written:
                logging.info(f"{name}: wrote {path}")
            return written
        return wrapper
    return decorator


def add_graph_arguments(parser, radius_help: str = "truncation radius R_t"):
    """--family / --graph (mutually exclusive, one required) and --radius"""
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--family", "-f", metavar="SPEC", help="generator spec, e.g. tree:3, grid:2, lamplighter, comb")
    source.add_argument("--graph", metavar="PATH", help="edge-list file")
    parser.add_argument("--radius", type=int, help=radius_help)


def add_output_argument(parser):
    parser.add_argument("--out", required=True, metavar="PATH", help="output file; the text summary goes to PATH.txt")


def add_jobs_argument(parser):
    parser.add_argument("--jobs", type=int, default=1, help="worker threads for module-level parallelism")


def load_graph(args) -> LoadedGraph:
    """
    Materialize the graph named by --family or --graph

    A family needs --radius unless it is finite, in which case the whole graph is
    materialized. An edge-list file is rooted at the vertex recorded by gen, or at
    its lowest encoding. A file written by gen for a family keeps the truncation it
    was generated with; any other file is the whole graph. With --radius the ball of
    that radius around the root is used instead.
    """
    if args.family:
        spec = parse_spec(args.family)
        oracle = make_oracle(spec)
        radius = args.radius
        if radius is None:
            if not oracle.finite:
                raise ParameterError(f"--radius is required for the infinite family '{spec}'")
            # A connected graph on N vertices has diameter below N
            radius = TRUNCATION_SETTINGS["MAX_VERTICES"]
        g, t = materialize(oracle, oracle.root(), radius)
        return LoadedGraph(g, t, oracle, str(spec), spec)

    g = read_graph(args.graph)
    if g.n == 0:
        raise ParameterError(f"{args.graph} holds an empty graph")
    header = read_graph_header(args.graph)
    root = header.param("root") if header is not None else None
    if root is None or root not in g.encoding_index:
        root = g.encodings[0]
    family = generated_family(header)
    family_oracle = make_oracle(family) if family is not None else None
    oracle = FileOracle(g, degree=family_oracle.degree if family_oracle else None)
    t = file_truncation(g, g.index_of_encoding(root), header, family_oracle, args.graph)

    if args.radius is not None:
        if t.complete or args.radius < t.radius:
            g, t = materialize(oracle, root, args.radius)
        else:
            logging.warning(f"{args.graph} was generated with R_t = {t.radius}; "
                            f"--radius {args.radius} cannot widen it")
    return LoadedGraph(g, t, oracle, f"file:{args.graph}", family)


def generated_family(header: Optional[RunConfig]) -> Optional[GeneratorSpec]:
    """Family recorded in the header of an edge list written by gen, if any"""
    if header is None or header.command != "gen" or not header.spec or header.radius is None:
        return None
    try:
        spec = parse_spec(header.spec)
    except ParameterError:
        return None
    return None if spec.family == "file" else spec


def file_truncation(g: FiniteGraph, root_index: int, header: Optional[RunConfig],
                    family_oracle: Optional[GraphOracle], path: str) -> Truncation:
    """
    Truncation of an edge-list graph. Without a generating family the file is the
    whole graph. Otherwise it is B(root, radius) of the family: vertices at the
    recorded radius that miss family neighbors make it incomplete.

    Raises InconsistentGraphError when the file does not fit the recorded radius.
    """
    whole = complete_truncation(g, root_index)
    if family_oracle is None:
        return whole
    radius = header.radius
    if (whole.dist < 0).any() or whole.radius > radius:
        raise InconsistentGraphError(
            f"{path} is not the ball of radius {radius} around {g.encodings[root_index]} recorded in its header"
        )
    frontier = [int(i) for i in np.flatnonzero(whole.dist == radius)]
    complete = all(
        len(family_oracle.neighbors(family_oracle.decode(g.encodings[i]))) == len(g.adjacency[i])
        for i in frontier
    )
    logging.info(f"{path}: truncation of {header.spec} at R_t = {radius}"
                 f"{' (complete)' if complete else f', {len(frontier)} frontier vertices'}")
    return Truncation(root=whole.root, root_index=root_index, radius=radius, dist=whole.dist, complete=complete)


def build_run_config(args, command: str, spec: str = "", **params: Any) -> RunConfig:
    """RunConfig for a run; params are recorded in keyword order, None values skipped"""
    out = getattr(args, "out", "") or ""
    return RunConfig(
        command=command,
        spec=spec,
        radius=getattr(args, "radius", None),
        params=tuple((key, str(value)) for key, value in params.items() if value is not None),
        output_dir=os.path.dirname(out),
        seed=getattr(args, "seed", None),
        budget=getattr(args, "budget", None),
    )


def summary_path(out: str) -> str:
    return out + ".txt"


def require_positive(value: Optional[int], flag: str) -> int:
    if value is None:
        raise ParameterError(f"{flag} is required")
    if value < 1:
        raise ParameterError(f"{flag} must be >= 1, got {value}")
    return value
