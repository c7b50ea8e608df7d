import logging
import os

from modules.generators import comb_attached_tree, lamplighter_box, make_oracle
from modules.graph_core import bfs_distances
from modules.search import SearchConfig, interior_region, search_profile
from storage import TextReport, write_csv, write_vertex_set
from utils.command_utils import (
    add_graph_arguments, add_jobs_argument, add_output_argument, build_run_config,
    command_handler, load_graph, require_positive, summary_path,
)

PROFILE_COLUMNS = ("n", "min_boundary", "method", "witness")


def search_region(g, t, n_max):
    """
    Safe-interior vertices within distance n_max - 1 of the root. Every connected set
    of size n_max through the root lies inside, so on a vertex-transitive graph the
    region contains a translate of every connected extremal set.
    """
    reach = bfs_distances(g, [t.root_index], max_radius=n_max - 1)
    return tuple(i for i in interior_region(g, t) if reach[i] >= 0)


def named_constructions(family: str, n_max: int):
    """Known low-boundary sets of a family with at most n_max vertices, as oracle vertices"""
    if family == "lamplighter":
        k = 0
        while (k + 1) * 2 ** (k + 1) <= n_max:
            yield lamplighter_box(k)
            k += 1
    elif family == "comb":
        k = 1
        while 2 ** (k + 1) - 1 <= n_max:
            yield comb_attached_tree(k)
            k += 1


def construction_candidates(loaded, region, n_max):
    """
    Index sets of the named constructions of the loaded family that lie inside region.
    Graphs without a known family have none.
    """
    if loaded.family is None:
        return []
    oracle = make_oracle(loaded.family)
    region_set = set(region)
    candidates = []
    for vertices in named_constructions(loaded.family.family, n_max):
        indices = [loaded.g.encoding_index.get(oracle.encode(v)) for v in vertices]
        if None in indices or not region_set.issuperset(indices):
            logging.debug(f"Named set of size {len(vertices)} does not fit the search region")
            continue
        candidates.append(indices)
    return candidates


def witness_path(out: str, n: int) -> str:
    return f"{os.path.splitext(out)[0]}.n{n}.set"


class SearchCommands:
    """profile: minimum boundary over sets of each size"""

    @command_handler("profile")
    def profile(self, args):
        n_max = require_positive(args.nmax, "--nmax")
        loaded = load_graph(args)
        region = search_region(loaded.g, loaded.t, n_max)
        search = SearchConfig(region=region, n_max=n_max, mode=args.mode, seed=args.seed)
        candidates = construction_candidates(loaded, region, n_max) if args.mode == "heuristic" else []
        profile = search_profile(loaded.g, loaded.t, search, budget=args.budget,
                                 candidates=candidates, jobs=args.jobs)

        run_config = build_run_config(args, "profile", loaded.spec, nmax=n_max, mode=args.mode)
        write_csv(args.out, PROFILE_COLUMNS, profile.csv_rows(loaded.g), run_config)

        written = [args.out]
        for n, entry in sorted(profile.entries.items()):
            path = witness_path(args.out, n)
            write_vertex_set(path, loaded.g.encode_set(entry.witness))
            written.append(path)

        text = TextReport("profile", run_config)
        text.add_section("search", [("mode", args.mode), ("region_size", len(region)), ("n_max", n_max),
                                     ("named_candidates", len(candidates))])
        text.add_section("profile", [(f"n={n}", value) for n, value in profile.values().items()])
        text.write(summary_path(args.out))
        written.append(summary_path(args.out))
        return written


def setup(subparsers):
    commands = SearchCommands()
    parser = subparsers.add_parser("profile", help="isoperimetric profile: min |dA| for |A| = 1..nmax")
    add_graph_arguments(parser)
    parser.add_argument("--nmax", type=int, required=True)
    parser.add_argument("--mode", choices=("all", "connected", "heuristic"), default="connected")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, help="maximum number of sets visited by the exact modes")
    add_output_argument(parser)
    add_jobs_argument(parser)
    parser.set_defaults(handler=commands.profile)
