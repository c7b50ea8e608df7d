import logging

from modules.errors import ParameterError
from modules.generators import make_oracle, parse_spec
from modules.graph_core import materialize
from storage import TextReport, write_graph
from utils.command_utils import add_output_argument, build_run_config, command_handler, summary_path


class GraphCommands:
    """gen: materialize a family ball and export it as an edge list"""

    @command_handler("gen")
    def gen(self, args):
        if args.radius is None or args.radius < 0:
            raise ParameterError("gen needs --radius >= 0")
        spec = parse_spec(args.family)
        oracle = make_oracle(spec)
        root = oracle.root()
        g, t = materialize(oracle, root, args.radius)

        run_config = build_run_config(args, "gen", str(spec), root=oracle.encode(root))
        comment = "\n".join(line[2:] for line in run_config.to_lines())
        write_graph(g, args.out, comment=comment)

        report = TextReport("gen", run_config)
        report.add_section("graph", [
            ("family", str(spec)),
            ("root", oracle.encode(root)),
            ("radius", args.radius),
            ("vertices", g.n),
            ("edges", g.edge_count()),
            ("complete", t.complete),
            ("frontier_size", len(t.frontier())),
            ("max_degree", g.max_degree),
        ])
        report.write(summary_path(args.out))
        logging.info(f"gen {spec}: {g.n} vertices within radius {args.radius}")
        return [args.out, summary_path(args.out)]


def setup(subparsers):
    commands = GraphCommands()
    parser = subparsers.add_parser("gen", help="materialize B(o, R_t) of a family as an edge list")
    parser.add_argument("--family", "-f", required=True, metavar="SPEC")
    parser.add_argument("--radius", type=int, required=True)
    add_output_argument(parser)
    parser.set_defaults(handler=commands.gen)
