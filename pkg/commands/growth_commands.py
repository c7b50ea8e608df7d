import logging

from modules.errors import ParameterError
from modules.growth import (
    GROWTH_COLUMNS, check_profile, growth_profile, phi_table,
    pinch_fit, pinch_verify, read_profile_csv, stratified_sample,
)
from modules.isoperimetry import finite_applicability
from storage import TextReport, read_graph_header, write_csv
from utils.command_utils import (
    add_graph_arguments, add_jobs_argument, add_output_argument, build_run_config,
    command_handler, load_graph, require_positive, summary_path,
)

PINCH_COLUMNS = ("vertex", "r", "ball_size", "lower", "upper", "status")
PHI_COLUMNS = ("n", "phi")


class GrowthCommands:
    """growth, pinch and phi"""

    @command_handler("growth")
    def growth(self, args):
        r_max = require_positive(args.rmax, "--rmax")
        loaded = load_graph(args)
        sample = stratified_sample(loaded.g, loaded.t, r_max)
        profile = growth_profile(loaded.g, loaded.t, sample, r_max, jobs=args.jobs)
        if not profile.vertices:
            raise ParameterError(f"No sample vertex has exact balls up to r={r_max}; increase --radius")

        run_config = build_run_config(args, "growth", loaded.spec, rmax=r_max)
        write_csv(args.out, GROWTH_COLUMNS, profile.csv_rows(), run_config)

        report = TextReport("growth", run_config)
        report.add_section("sample", [
            ("vertices", len(profile.vertices)),
            ("dropped", list(profile.dropped)),
            ("r_max", r_max),
        ])
        report.add_section("ball_sizes", [(v, list(row)) for v, row in zip(profile.vertices, profile.sizes)])
        report.write(summary_path(args.out))
        return [args.out, summary_path(args.out)]

    @command_handler("pinch")
    def pinch(self, args):
        r_max = require_positive(args.rmax, "--rmax")

        # A growth CSV can stand in for the graph
        header = read_graph_header(args.graph) if args.graph else None
        if header is not None and header.command == "growth":
            profile = read_profile_csv(args.graph)
            if profile.r_max < r_max:
                raise ParameterError(f"{args.graph} only reaches r={profile.r_max}, --rmax is {r_max}")
            profile = profile.truncated(r_max)
            spec = header.spec
            estimate = pinch_fit(profile)
            violations, _ = check_profile(profile, estimate.a, estimate.c, r_max)
        else:
            loaded = load_graph(args)
            spec = loaded.spec
            sample = stratified_sample(loaded.g, loaded.t, r_max)
            profile = growth_profile(loaded.g, loaded.t, sample, r_max, jobs=args.jobs)
            estimate = pinch_fit(profile)
            kept = [loaded.g.vertices[loaded.g.index_of_encoding(e)] for e in profile.vertices]
            violations = pinch_verify(loaded.g, loaded.t, estimate.a, estimate.c, r_max, kept)

        failed = {(v.vertex, v.radius) for v in violations}
        equal = {(e.vertex, e.radius) for e in estimate.equalities}
        rows = []
        for vertex, sizes in zip(profile.vertices, profile.sizes):
            for r in range(1, r_max + 1):
                status = "violation" if (vertex, r) in failed else "equality" if (vertex, r) in equal else "ok"
                rows.append((vertex, r, sizes[r], estimate.a ** r / estimate.c, estimate.c * estimate.a ** r, status))

        run_config = build_run_config(args, "pinch", spec, rmax=r_max)
        write_csv(args.out, PINCH_COLUMNS, rows, run_config)

        report = TextReport("pinch", run_config)
        report.add_section("estimate", estimate.report_items() + [
            ("R", r_max),
            ("verified", not violations),
            ("finite_regime_max_size", finite_applicability(estimate.a, estimate.c, r_max)),
        ])
        report.add_section("violations", [
            (f"{v.vertex} r={v.radius}", f"|B|={v.observed} {v.bound} {v.limit!r}") for v in violations
        ])
        report.add_section("equality_cases", [
            (f"{e.vertex} r={e.radius}", e.bound) for e in estimate.equalities
        ])
        report.write(summary_path(args.out))
        if violations:
            logging.warning(f"pinch: {len(violations)} violations of the fitted constants")
        return [args.out, summary_path(args.out)]

    @command_handler("phi")
    def phi(self, args):
        n_max = require_positive(args.nmax, "--nmax")
        loaded = load_graph(args)
        table = phi_table(loaded.g, loaded.t, loaded.t.root, range(1, n_max + 1))

        run_config = build_run_config(args, "phi", loaded.spec, nmax=n_max)
        write_csv(args.out, PHI_COLUMNS, table.rows(), run_config)

        report = TextReport("phi", run_config)
        report.add_section("phi", [("anchor", table.anchor), ("n_max", n_max),
                                   ("phi_n_max", table.values[n_max])])
        report.write(summary_path(args.out))
        return [args.out, summary_path(args.out)]


def setup(subparsers):
    commands = GrowthCommands()

    parser = subparsers.add_parser("growth", help="ball-size profile |B(v, r)|, r = 0..rmax")
    add_graph_arguments(parser)
    parser.add_argument("--rmax", type=int, required=True)
    add_output_argument(parser)
    add_jobs_argument(parser)
    parser.set_defaults(handler=commands.growth)

    parser = subparsers.add_parser("pinch", help="fit and verify pinched exponential growth")
    add_graph_arguments(parser)
    parser.add_argument("--rmax", type=int, required=True)
    add_output_argument(parser)
    add_jobs_argument(parser)
    parser.set_defaults(handler=commands.pinch)

    parser = subparsers.add_parser("phi", help="inverse growth phi(n) at the truncation root")
    add_graph_arguments(parser)
    parser.add_argument("--nmax", type=int, required=True)
    add_output_argument(parser)
    parser.set_defaults(handler=commands.phi)

