"""
Edge-list and vertex-set files.

Edge list: one "u v" pair per line using canonical vertex encodings, '#' starts a
comment, a line holding a single encoding declares an isolated vertex. Vertex
set: one encoding per line.
"""
import logging
from typing import Iterable, List, Optional

import networkx as nx

from modules.errors import GraphFormatError, InconsistentGraphError, ParameterError
from modules.graph_core import FiniteGraph, VertexSet, make_vertex_set
from storage.reports import RunConfig, atomic_write_text


def write_graph(g: FiniteGraph, path: str, comment: str = None):
    """
    Export a FiniteGraph as an edge list

    Edges are written once each (lower index first) in index order, followed by
    isolated vertices, so write(read(f)) reproduces f apart from comment lines.
    """
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"# vertices={g.n} edges={g.edge_count()} family={g.family}")
    labelled = nx.relabel_nodes(g.nx_graph, dict(enumerate(g.encodings)))
    lines.extend(nx.generate_edgelist(labelled, data=False))
    lines.extend(g.encodings[i] for i in sorted(nx.isolates(g.nx_graph)))
    atomic_write_text(path, "\n".join(lines) + "\n")
    logging.info(f"Wrote graph with {g.n} vertices and {g.edge_count()} edges to {path}")


def read_graph(path: str, decode=None) -> FiniteGraph:
    """
    Import an edge list

    An edge may be listed once or in both directions. Once any pair appears in both
    directions the file is read as a directed listing, and every edge must then
    appear in both directions.

    Raises GraphFormatError (with line number) for malformed lines and
    InconsistentGraphError for asymmetric directed listings.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw_lines = f.read().splitlines()
    except OSError as e:
        raise GraphFormatError(f"Cannot read {path}: {e}", path=path)

    isolated = []
    edge_lines = []
    for line_number, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) == 1:
            isolated.append(tokens[0])
            continue
        if len(tokens) != 2:
            raise GraphFormatError(f"Expected 'u v', got {len(tokens)} fields", path=path, line_number=line_number)
        if tokens[0] == tokens[1]:
            raise GraphFormatError(f"Self-loop at vertex '{tokens[0]}'", path=path, line_number=line_number)
        edge_lines.append(line)

    arcs = nx.parse_edgelist(edge_lines, nodetype=str, data=False, create_using=nx.DiGraph)
    reciprocity = nx.overall_reciprocity(arcs) if arcs.number_of_edges() else 0.0
    if 0 < reciprocity < 1:
        missing = sorted((u, v) for u, v in arcs.edges if not arcs.has_edge(v, u))
        u, v = missing[0]
        raise InconsistentGraphError(
            f"Edge {u} -> {v} has no reverse entry in a file that lists edges in both directions "
            f"({len(missing)} such edges)"
        )

    graph = arcs.to_undirected()
    graph.add_nodes_from(isolated)
    g = FiniteGraph.from_nx(graph, family="file", decode=decode)
    logging.info(f"Read graph with {g.n} vertices and {g.edge_count()} edges from {path}")
    return g


def write_vertex_set(path: str, encodings: Iterable[str]):
    """One encoded vertex per line"""
    lines = list(encodings)
    atomic_write_text(path, "".join(f"{e}\n" for e in lines))
    logging.debug(f"Wrote vertex set of size {len(lines)} to {path}")


def read_vertex_encodings(path: str) -> List[str]:
    """Encodings listed in a vertex-set file, in file order, duplicates removed"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw_lines = f.read().splitlines()
    except OSError as e:
        raise GraphFormatError(f"Cannot read {path}: {e}", path=path)

    seen = set()
    result = []
    for line_number, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if len(line.split()) != 1:
            raise GraphFormatError("Expected one vertex per line", path=path, line_number=line_number)
        if line not in seen:
            seen.add(line)
            result.append(line)
    return result


def read_vertex_set(path: str, g: FiniteGraph) -> VertexSet:
    """Read a vertex-set file against a FiniteGraph; unknown vertices are format errors"""
    indices = []
    for encoding in read_vertex_encodings(path):
        if encoding not in g.encoding_index:
            raise GraphFormatError(f"Vertex '{encoding}' is not in the graph", path=path)
        indices.append(g.encoding_index[encoding])
    return make_vertex_set(g, indices)


def read_graph_header(path: str) -> Optional[RunConfig]:
    """RunConfig stored in the leading comment lines of an edge list, if any"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            comments = []
            for line in f:
                if not line.startswith("#"):
                    break
                comments.append(line)
    except OSError as e:
        raise GraphFormatError(f"Cannot read {path}: {e}", path=path)
    try:
        return RunConfig.from_lines(comments)
    except (ParameterError, ValueError):
        return None
