import os
import logging

from modules.errors import ParameterError
from modules.growth import growth_profile, pinch_fit, stratified_sample
from modules.isoperimetry import (
    BOUND_REPORT_COLUMNS, bound_report, branch_point_check,
    certificate_bounds_check, warmup_check, z_certificate,
)
from storage import TextReport, read_vertex_set, write_csv
from utils.command_utils import (
    add_graph_arguments, add_jobs_argument, add_output_argument, build_run_config,
    command_handler, load_graph, require_positive, summary_path,
)

CERTIFICATE_COLUMNS = ("boundary_vertex", "Z_u", "Z_u_direct", "histogram")
WARMUP_COLUMNS = (
    "v_star", "r", "size", "boundary_size", "ball_covered", "set_covered",
    "boundary_sq_c3_over_size", "growth_ok", "volume_ok",
)
BRANCH_COLUMNS = (
    "k", "holds", "branch_points", "interior_size", "branch_point_density",
    "longest_residual_path", "witness",
)


def fit_constants(loaded, r_max, jobs=None):
    """Pinch constants (a, c) fitted on a stratified sample of the loaded graph"""
    sample = stratified_sample(loaded.g, loaded.t, r_max)
    profile = growth_profile(loaded.g, loaded.t, sample, r_max, jobs=jobs)
    return pinch_fit(profile)


def set_id_of(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


class BoundCommands:
    """check, certificate, warmup and branchcheck"""

    @command_handler("check")
    def check(self, args):
        loaded = load_graph(args)
        estimate = None
        if args.rmax is not None:
            estimate = fit_constants(loaded, require_positive(args.rmax, "--rmax"), args.jobs)

        reports = []
        for path in args.set:
            A = read_vertex_set(path, loaded.g)
            if not A:
                raise ParameterError(f"{path} lists no vertices")
            reports.append(bound_report(
                loaded.g, loaded.t, A, set_id=set_id_of(path), m=loaded.oracle.degree,
                pinch=(estimate.a, estimate.c) if estimate else None, jobs=args.jobs,
            ))

        run_config = build_run_config(args, "check", loaded.spec, set=" ".join(args.set), rmax=args.rmax)
        write_csv(args.out, BOUND_REPORT_COLUMNS, [report.csv_row() for report in reports], run_config)

        text = TextReport("check", run_config)
        if estimate is not None:
            text.add_section("pinch", estimate.report_items())
        for report in reports:
            name = report.set_id
            text.add_section(name, [
                ("size", report.analysis.size),
                ("boundary_size", report.analysis.boundary_size),
                ("eii_ratio", report.analysis.eii_ratio),
                ("cs_bound", report.cs),
                ("bs_bound", report.bs),
                ("checks_passed", report.checks_passed),
            ])
            if report.certificate is not None:
                text.add_section(f"{name}.certificate", report.certificate.report_items())
            if report.warmup is not None:
                text.add_section(f"{name}.warmup", report.warmup.report_items())
            if report.notes:
                text.add_section(f"{name}.notes", [(f"note{j}", note) for j, note in enumerate(report.notes, start=1)])
        text.write(summary_path(args.out))
        return [args.out, summary_path(args.out)]

    @command_handler("certificate")
    def certificate(self, args):
        r_max = require_positive(args.rmax, "--rmax")
        loaded = load_graph(args)
        A = read_vertex_set(args.set, loaded.g)
        estimate = fit_constants(loaded, r_max, args.jobs)
        cert = z_certificate(loaded.g, loaded.t, A, estimate.a, estimate.c, jobs=args.jobs)
        bounds = certificate_bounds_check(cert, A)

        rows = [
            (u, z, z_direct, " ".join(f"{r}:{m}" for r, m in sorted(hist.items())))
            for u, z, z_direct, hist in zip(cert.boundary, cert.z_u, cert.z_u_direct, cert.histograms)
        ]
        run_config = build_run_config(args, "certificate", loaded.spec, set=args.set, rmax=r_max)
        write_csv(args.out, CERTIFICATE_COLUMNS, rows, run_config)

        text = TextReport("certificate", run_config)
        text.add_section("pinch", estimate.report_items())
        text.add_section("certificate", cert.report_items())
        text.add_section("bounds", [
            ("lower_ok", bounds.lower_ok),
            ("upper_ok", bounds.upper_ok),
            ("lower_slack", bounds.lower_slack),
            ("upper_slack", bounds.upper_slack),
            ("ratio_bound", bounds.ratio_bound),
            ("implied_boundary_bound", bounds.implied_bound),
            ("boundary_ok", bounds.boundary_ok),
        ])
        text.write(summary_path(args.out))
        if not (cert.identity_ok and bounds.ok):
            logging.warning(f"certificate: identity_ok={cert.identity_ok}, bounds_ok={bounds.ok}")
        return [args.out, summary_path(args.out)]

    @command_handler("warmup")
    def warmup(self, args):
        r_max = require_positive(args.rmax, "--rmax")
        loaded = load_graph(args)
        A = read_vertex_set(args.set, loaded.g)
        estimate = fit_constants(loaded, r_max, args.jobs)
        result = warmup_check(loaded.g, loaded.t, A, estimate.a, estimate.c)

        run_config = build_run_config(args, "warmup", loaded.spec, set=args.set, rmax=r_max)
        write_csv(args.out, WARMUP_COLUMNS, [tuple(value for _, value in result.report_items())], run_config)

        text = TextReport("warmup", run_config)
        text.add_section("pinch", estimate.report_items())
        text.add_section("warmup", result.report_items() + [("ok", result.ok)])
        text.write(summary_path(args.out))
        return [args.out, summary_path(args.out)]

    @command_handler("branchcheck")
    def branchcheck(self, args):
        k = require_positive(args.nmax, "--nmax")
        loaded = load_graph(args)
        result = branch_point_check(loaded.g, loaded.t, k)

        run_config = build_run_config(args, "branchcheck", loaded.spec, k=k)
        write_csv(args.out, BRANCH_COLUMNS, [tuple(value for _, value in result.report_items())], run_config)

        text = TextReport("branchcheck", run_config)
        text.add_section("branch_points", result.report_items())
        text.write(summary_path(args.out))
        return [args.out, summary_path(args.out)]


def setup(subparsers):
    commands = BoundCommands()

    parser = subparsers.add_parser("check", help="every applicable bound for one vertex set")
    add_graph_arguments(parser)
    parser.add_argument("--set", required=True, action="append", metavar="PATH", help="vertex-set file, repeatable")
    parser.add_argument("--rmax", type=int, help="fit pinch constants up to this radius and add the certificate")
    add_output_argument(parser)
    add_jobs_argument(parser)
    parser.set_defaults(handler=commands.check)

    for name, handler, help_text in (
        ("certificate", commands.certificate, "Z-certificate with fitted pinch constants"),
        ("warmup", commands.warmup, "two-dimensional coverage check"),
    ):
        parser = subparsers.add_parser(name, help=help_text)
        add_graph_arguments(parser)
        parser.add_argument("--set", required=True, metavar="PATH")
        parser.add_argument("--rmax", type=int, required=True)
        add_output_argument(parser)
        add_jobs_argument(parser)
        parser.set_defaults(handler=handler)

    parser = subparsers.add_parser("branchcheck", help="branch points on paths of k vertices (trees)")
    add_graph_arguments(parser)
    parser.add_argument("--nmax", type=int, required=True, help="path length k")
    add_output_argument(parser)
    parser.set_defaults(handler=commands.branchcheck)
