"""
Storage package for isogrowth.
Graph and vertex-set files plus the CSV and text reports every command writes.
"""
from .graph_files import (
    write_graph,
    read_graph,
    write_vertex_set,
    read_vertex_set,
    read_vertex_encodings,
    read_graph_header,
)

from .reports import (
    RunConfig,
    TextReport,
    atomic_write_text,
    format_value,
    write_csv,
    read_csv,
)

__all__ = [
    'write_graph',
    'read_graph',
    'write_vertex_set',
    'read_vertex_set',
    'read_vertex_encodings',
    'read_graph_header',
    'RunConfig',
    'TextReport',
    'atomic_write_text',
    'format_value',
    'write_csv',
    'read_csv',
]
