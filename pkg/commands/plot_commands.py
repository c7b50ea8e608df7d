from utils.command_utils import command_handler
from utils.plot_renderer import PLOT_SCHEMAS, emit_plot


class PlotCommands:
    """plot: gnuplot script plus SVG from a report CSV"""

    @command_handler("plot")
    def plot(self, args):
        return emit_plot(args.graph, args.mode, args.out, svg=not args.no_svg)


def setup(subparsers):
    commands = PlotCommands()
    parser = subparsers.add_parser("plot", help="plot a growth, profile or ratio CSV")
    parser.add_argument("--graph", required=True, metavar="CSV", help="report CSV written by this tool")
    parser.add_argument("--mode", required=True, choices=sorted(PLOT_SCHEMAS))
    parser.add_argument("--out", required=True, metavar="PATH", help="gnuplot script; the SVG goes next to it")
    parser.add_argument("--no-svg", action="store_true", help="only write the gnuplot script")
    parser.set_defaults(handler=commands.plot)
