"""
Neighbor oracles for every graph family the analysis runs on, plus the short
string form of a generator spec used on the command line ("tree:3", "lamplighter",
"comb", "grid:2", "subdiv:4", "file:PATH", ...).
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Any, List, Optional, Tuple

from modules.errors import ParameterError
from modules.graph_core import FiniteGraph, GraphOracle
from storage.graph_files import read_graph, write_graph  # noqa: F401  re-exported


# ======= Infinite families =======

class RegularTreeOracle(GraphOracle):
    """
    d-regular tree. Vertices are reduced words: the root is (), the first letter
    has d choices and every later letter d-1 choices.
    """
    family = "regular_tree"

    def __init__(self, d: int):
        if d < 3:
            raise ParameterError(f"regular_tree needs d >= 3, got {d}")
        self.d = d
        self.degree = d

    def _neighbors(self, v):
        result = []
        if v:
            result.append(v[:-1])
        branching = self.d if not v else self.d - 1
        for j in range(branching):
            result.append(v + (j,))
        return result

    def encode(self, v) -> str:
        return "r" + "".join(f".{x}" for x in v)

    def decode(self, text: str):
        return _decode_word(text)

    def root(self):
        return ()


class LatticeOracle(GraphOracle):
    """Z^d with the 2d standard unit generators"""
    family = "lattice"

    def __init__(self, d: int):
        if d < 1:
            raise ParameterError(f"lattice needs d >= 1, got {d}")
        self.d = d
        self.degree = 2 * d

    def _neighbors(self, v):
        result = []
        for axis in range(self.d):
            for step in (-1, 1):
                w = list(v)
                w[axis] += step
                result.append(tuple(w))
        return result

    def encode(self, v) -> str:
        return ",".join(str(x) for x in v)

    def decode(self, text: str):
        try:
            v = tuple(int(x) for x in text.split(","))
        except ValueError:
            raise ParameterError(f"Bad lattice vertex '{text}'")
        if len(v) != self.d:
            raise ParameterError(f"Lattice vertex '{text}' does not have {self.d} coordinates")
        return v

    def root(self):
        return (0,) * self.d


class LamplighterOracle(GraphOracle):
    """
    Lamplighter group over Z with generators {flip lamp at current position,
    step right, step left}. A vertex is (position, sorted tuple of lit lamps).
    """
    family = "lamplighter"
    degree = 3

    def flip(self, v):
        position, lamps = v
        lit = set(lamps)
        lit ^= {position}
        return (position, tuple(sorted(lit)))

    def _neighbors(self, v):
        position, lamps = v
        return [self.flip(v), (position + 1, lamps), (position - 1, lamps)]

    def encode(self, v) -> str:
        position, lamps = v
        return f"{position}|" + ",".join(str(x) for x in lamps)

    def decode(self, text: str):
        try:
            position, _, lamps = text.partition("|")
            lit = tuple(sorted(int(x) for x in lamps.split(",") if x != ""))
            return (int(position), lit)
        except ValueError:
            raise ParameterError(f"Bad lamplighter vertex '{text}'")

    def root(self):
        return (0, ())


class CombTreeOracle(GraphOracle):
    """
    One-sided path 1, 2, 3, ... where spine vertex n carries the root of a full
    binary tree of depth n. Spine vertex n is (n, -1, 0); the tree node at depth
    d and position i of the tree hanging from n is (n, d, i).
    """
    family = "comb_tree"

    def _neighbors(self, v):
        n, d, i = v
        if d < 0:
            result = [(n + 1, -1, 0), (n, 0, 0)]
            if n > 1:
                result.append((n - 1, -1, 0))
            return result
        result = [(n, -1, 0) if d == 0 else (n, d - 1, i // 2)]
        if d < n:
            result.extend([(n, d + 1, 2 * i), (n, d + 1, 2 * i + 1)])
        return result

    def encode(self, v) -> str:
        n, d, i = v
        if d < 0:
            return f"s{n}"
        return f"t{n}.{d}.{i}"

    def decode(self, text: str):
        try:
            if text.startswith("s"):
                return (int(text[1:]), -1, 0)
            if text.startswith("t"):
                n, d, i = (int(x) for x in text[1:].split("."))
                return (n, d, i)
        except ValueError:
            pass
        raise ParameterError(f"Bad comb tree vertex '{text}'")

    def root(self):
        return (1, -1, 0)

    def sphere_sizes(self, v, r_max: int) -> List[int]:
        """
        Sphere sizes counted per attached tree: a full binary subtree of height h has
        2^j vertices at distance j <= h below its root.
        """
        if r_max < 0:
            raise ParameterError(f"r_max must be >= 0, got {r_max}")
        layers = [0] * (r_max + 1)

        def subtree(start, height):
            for j in range(max(0, min(height, r_max - start) + 1)):
                layers[start + j] += 2 ** j

        n, d, _ = v
        if d < 0:
            spine_distance = 0
        else:
            subtree(0, n - d)
            for u in range(1, min(d, r_max) + 1):
                layers[u] += 1
                # the other child of the ancestor u levels up
                subtree(u + 1, n - d + u - 1)
            spine_distance = d + 1

        reach = r_max - spine_distance
        for m in range(max(1, n - reach), n + reach + 1):
            distance = spine_distance + abs(m - n)
            layers[distance] += 1
            if m != n or d < 0:
                subtree(distance + 1, m)
        return layers


class SubdividedTreeOracle(GraphOracle):
    """
    3-regular tree whose every edge is subdivided into k edges, i.e. k-1 degree-2
    vertices per original edge. Original vertices are (word, 0); the subdivision
    vertices on the edge from word[:-1] to word are (word, 1..k-1), counted from
    the end nearer the root.
    """
    family = "subdivided_binary_tree"

    def __init__(self, k: int):
        if k < 1:
            raise ParameterError(f"subdivided_binary_tree needs k >= 1, got {k}")
        self.k = k
        self.base = RegularTreeOracle(3)

    def _neighbors(self, v):
        word, i = v
        k = self.k
        if i == 0:
            result = []
            if word:
                result.append((word, k - 1) if k > 1 else (word[:-1], 0))
            for child in self.base._neighbors(word):
                if len(child) > len(word):
                    result.append((child, 1) if k > 1 else (child, 0))
            return result
        toward_root = (word, i - 1) if i > 1 else (word[:-1], 0)
        away = (word, i + 1) if i + 1 < k else (word, 0)
        return [toward_root, away]

    def encode(self, v) -> str:
        word, i = v
        base = self.base.encode(word)
        return base if i == 0 else f"{base}~{i}"

    def decode(self, text: str):
        base, _, i = text.partition("~")
        try:
            position = int(i) if i else 0
        except ValueError:
            raise ParameterError(f"Bad subdivided tree vertex '{text}'")
        if not 0 <= position < self.k:
            raise ParameterError(f"Subdivision position out of range in '{text}'")
        return (_decode_word(base), position)

    def root(self):
        return ((), 0)


# ======= Finite families =======

class BinaryTreeOracle(GraphOracle):
    """Full binary tree of the given depth: 2^(depth+1) - 1 vertices (d, i)"""
    family = "binary_tree"
    finite = True

    def __init__(self, depth: int):
        if depth < 0:
            raise ParameterError(f"binary_tree needs depth >= 0, got {depth}")
        self.depth = depth

    def _neighbors(self, v):
        d, i = v
        result = []
        if d > 0:
            result.append((d - 1, i // 2))
        if d < self.depth:
            result.extend([(d + 1, 2 * i), (d + 1, 2 * i + 1)])
        return result

    def encode(self, v) -> str:
        d, i = v
        return f"b{d}.{i}"

    def decode(self, text: str):
        try:
            d, i = (int(x) for x in text[1:].split("."))
            return (d, i)
        except ValueError:
            raise ParameterError(f"Bad binary tree vertex '{text}'")

    def root(self):
        return (0, 0)


class _IntegerOracle(GraphOracle):
    """Finite families on vertices 0..n-1"""
    finite = True

    def encode(self, v) -> str:
        return str(v)

    def decode(self, text: str):
        try:
            v = int(text)
        except ValueError:
            raise ParameterError(f"Bad {self.family} vertex '{text}'")
        if not 0 <= v < self.n:
            raise ParameterError(f"Vertex {v} outside {self.family} of size {self.n}")
        return v

    def root(self):
        return 0


class CycleOracle(_IntegerOracle):
    family = "cycle"
    degree = 2

    def __init__(self, n: int):
        if n < 3:
            raise ParameterError(f"cycle needs n >= 3, got {n}")
        self.n = n

    def _neighbors(self, v):
        return [(v - 1) % self.n, (v + 1) % self.n]


class PathOracle(_IntegerOracle):
    family = "path"

    def __init__(self, n: int):
        if n < 1:
            raise ParameterError(f"path needs n >= 1, got {n}")
        self.n = n

    def _neighbors(self, v):
        return [w for w in (v - 1, v + 1) if 0 <= w < self.n]


class CompleteOracle(_IntegerOracle):
    family = "complete"

    def __init__(self, n: int):
        if n < 1:
            raise ParameterError(f"complete needs n >= 1, got {n}")
        self.n = n
        self.degree = n - 1

    def _neighbors(self, v):
        return [w for w in range(self.n) if w != v]


class TorusOracle(GraphOracle):
    """n x n discrete torus, 4-regular for n >= 3"""
    family = "torus"
    finite = True
    degree = 4

    def __init__(self, n: int):
        if n < 3:
            raise ParameterError(f"torus needs n >= 3, got {n}")
        self.n = n

    def _neighbors(self, v):
        x, y = v
        n = self.n
        return [((x + 1) % n, y), ((x - 1) % n, y), (x, (y + 1) % n), (x, (y - 1) % n)]

    def encode(self, v) -> str:
        return f"{v[0]},{v[1]}"

    def decode(self, text: str):
        try:
            x, y = (int(part) for part in text.split(","))
        except ValueError:
            raise ParameterError(f"Bad torus vertex '{text}'")
        return (x % self.n, y % self.n)

    def root(self):
        return (0, 0)


class FileOracle(GraphOracle):
    """Oracle view of an explicit FiniteGraph; vertices are their encodings"""
    family = "file"
    finite = True

    def __init__(self, g: FiniteGraph, degree: Optional[int] = None):
        self.graph = g
        self.degree = degree if degree is not None else g.uniform_degree

    def _neighbors(self, v):
        i = self.graph.index_of_encoding(v)
        return [self.graph.encodings[j] for j in self.graph.adjacency[i]]

    def encode(self, v) -> str:
        return v

    def decode(self, text: str):
        self.graph.index_of_encoding(text)
        return text

    def root(self):
        if self.graph.n == 0:
            raise ParameterError("The graph is empty")
        return self.graph.encodings[0]


def _decode_word(text: str):
    if not text.startswith("r"):
        raise ParameterError(f"Bad tree vertex '{text}'")
    try:
        return tuple(int(x) for x in text[1:].split(".") if x != "")
    except ValueError:
        raise ParameterError(f"Bad tree vertex '{text}'")


# ======= Generator specs =======

# tag -> (number of integer parameters, lower bound)
FAMILY_PARAMETERS = {
    "tree": (1, 3),
    "grid": (1, 1),
    "lamplighter": (0, None),
    "comb": (0, None),
    "bintree": (1, 0),
    "subdiv": (1, 1),
    "cycle": (1, 3),
    "path": (1, 1),
    "complete": (1, 1),
    "torus": (1, 3),
}


@dataclass(frozen=True)
class GeneratorSpec:
    """Family tag plus integer parameters, or a file path for tag 'file'"""
    family: str
    params: Tuple[int, ...] = ()
    path: str = None

    def __str__(self):
        if self.family == "file":
            return f"file:{self.path}"
        if not self.params:
            return self.family
        return f"{self.family}:" + ",".join(str(p) for p in self.params)


def parse_spec(text: str) -> GeneratorSpec:
    """Parse the short CLI form, e.g. 'tree:3' or 'file:graph.edges'"""
    text = text.strip()
    tag, _, rest = text.partition(":")
    tag = tag.lower()
    if tag == "file":
        if not rest:
            raise ParameterError("file spec needs a path, e.g. file:graph.edges")
        return GeneratorSpec("file", (), rest)
    if tag not in FAMILY_PARAMETERS:
        raise ParameterError(f"Unknown graph family '{tag}'. Known: {', '.join(sorted(FAMILY_PARAMETERS))}, file")
    count, lower = FAMILY_PARAMETERS[tag]
    try:
        params = tuple(int(x) for x in rest.split(",")) if rest else ()
    except ValueError:
        raise ParameterError(f"Parameters of '{text}' must be integers")
    if len(params) != count:
        raise ParameterError(f"Family '{tag}' takes {count} parameter(s), got {len(params)}")
    if params and params[0] < lower:
        raise ParameterError(f"Family '{tag}' needs parameter >= {lower}, got {params[0]}")
    return GeneratorSpec(tag, params)


def make_oracle(spec) -> GraphOracle:
    """
    Build the oracle for a GeneratorSpec (or its string form)
    """
    if isinstance(spec, str):
        spec = parse_spec(spec)

    family = spec.family
    if family == "file":
        return FileOracle(read_graph(spec.path))
    if family == "tree":
        return RegularTreeOracle(spec.params[0])
    if family == "grid":
        return LatticeOracle(spec.params[0])
    if family == "lamplighter":
        return LamplighterOracle()
    if family == "comb":
        return CombTreeOracle()
    if family == "bintree":
        return BinaryTreeOracle(spec.params[0])
    if family == "subdiv":
        return SubdividedTreeOracle(spec.params[0])
    if family == "cycle":
        return CycleOracle(spec.params[0])
    if family == "path":
        return PathOracle(spec.params[0])
    if family == "complete":
        return CompleteOracle(spec.params[0])
    if family == "torus":
        return TorusOracle(spec.params[0])
    raise ParameterError(f"Unknown graph family '{family}'")


# ======= Named sets and vertices =======

def lamplighter_box(n: int) -> List[Any]:
    """
    Lamplighter states with position in [0, n] and every lit lamp in [0, n]:
    (n+1) 2^(n+1) vertices, whose boundary has 2^(n+2) vertices.
    """
    if n < 0:
        raise ParameterError(f"box size must be >= 0, got {n}")
    positions = range(n + 1)
    vertices = []
    for bits in product((0, 1), repeat=n + 1):
        lamps = tuple(x for x, bit in zip(range(n + 1), bits) if bit)
        for position in positions:
            vertices.append((position, lamps))
    logging.debug(f"Built lamplighter box A_{n} with {len(vertices)} states")
    return vertices


def comb_spine(n: int):
    if n < 1:
        raise ParameterError(f"comb spine starts at 1, got {n}")
    return (n, -1, 0)


def comb_attached_tree(k: int) -> List[Any]:
    """All 2^(k+1) - 1 vertices of the binary tree hanging from spine vertex k"""
    if k < 1:
        raise ParameterError(f"comb spine starts at 1, got {k}")
    return [(k, d, i) for d in range(k + 1) for i in range(2 ** d)]


def comb_deep_leaf(k: int):
    """Leftmost leaf at the bottom of the tree hanging from spine vertex k"""
    return (k, k, 0)
