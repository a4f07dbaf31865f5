"""Regular rooted metric trees described by their generating sequences.

A regular tree is fixed by the branching numbers ``b_n`` of generation-n
vertices and the radii ``t_n = |v|`` of those vertices. Everything here is a
pure function of an immutable :class:`GeneratingSequences`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

__all__ = [
    "TreeError",
    "TailRule",
    "GeneratingSequences",
    "Vertex",
    "Edge",
    "TreeTruncation",
    "GeometrySummary",
    "new_tree",
    "branching_function",
    "height",
    "reduced_height",
    "total_length",
    "subtree",
    "truncate",
    "describe",
]

_REL = 1e-12


class TreeError(ValueError):
    """Invalid generating sequences or an out-of-range geometric query."""


@dataclass(frozen=True)
class TailRule:
    """Constant branching ``b_star`` with arithmetic or geometric edge lengths.

    The edge of generation ``n`` (from ``t_n`` to ``t_{n+1}``) has length ``d``
    (arithmetic) or ``d * q**n`` (geometric). ``n`` is the global generation
    index, so the rule is anchored at the root and not at the splice point.
    """

    b_star: int
    rule: str
    d: float
    q: float = 1.0

    def __post_init__(self):
        if self.rule not in ("arithmetic", "geometric"):
            raise TreeError(f"tail rule must be 'arithmetic' or 'geometric', got {self.rule!r}")
        if int(self.b_star) != self.b_star or self.b_star < 2:
            raise TreeError("tail b_star must be an integer >= 2")
        if not self.d > 0:
            raise TreeError("tail d must be > 0")
        if not self.q > 0:
            raise TreeError("tail q must be > 0")

    def increment(self, n: int) -> float:
        if self.rule == "arithmetic":
            return float(self.d)
        return float(self.d) * float(self.q) ** n

    def shifted(self, k: int) -> "TailRule":
        """Same rule re-anchored at generation ``k``."""
        if self.rule == "arithmetic":
            return self
        return TailRule(self.b_star, self.rule, self.d * self.q**k, self.q)

    @property
    def unbounded_edges(self) -> bool:
        return self.rule == "geometric" and self.q > 1


@dataclass(frozen=True)
class GeneratingSequences:
    """Branching numbers ``b`` and vertex radii ``t`` of a regular tree.

    Without a tail the tree is a finite prefix: edges exist for generations
    ``0 .. len(t) - 2``. With a tail both sequences extend indefinitely.
    """

    b: tuple
    t: tuple
    tail: Optional[TailRule] = None

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        object.__setattr__(self, "t", tuple(float(x) for x in self.t))
        errors = _validation_errors(self.b, self.t, self.tail)
        if errors:
            raise TreeError("; ".join(errors))

    @property
    def prefix_only(self) -> bool:
        return self.tail is None

    @property
    def max_generation(self) -> Optional[int]:
        """Number of edge generations available, ``None`` if unbounded."""
        return None if self.tail is not None else len(self.t) - 1

    def branching(self, n: int) -> int:
        if n < 0:
            raise TreeError(f"negative generation {n}")
        if n < len(self.b):
            return self.b[n]
        if self.tail is None:
            raise TreeError(f"branching number b_{n} not available (prefix has {len(self.b)})")
        return int(self.tail.b_star)

    def edge_length(self, n: int) -> float:
        """Length ``t_{n+1} - t_n`` of the generation-``n`` edges."""
        if n < 0:
            raise TreeError(f"negative generation {n}")
        if n + 1 < len(self.t):
            return self.t[n + 1] - self.t[n]
        if self.tail is None:
            raise TreeError(f"edge generation {n} beyond the explicit prefix")
        return self.tail.increment(n)

    def radius(self, n: int) -> float:
        if n < 0:
            raise TreeError(f"negative generation {n}")
        if n < len(self.t):
            return self.t[n]
        if self.tail is None:
            raise TreeError(f"radius t_{n} not available (prefix has {len(self.t)})")
        r = self.t[-1]
        for j in range(len(self.t) - 1, n):
            r += self.tail.increment(j)
        return r

    def radii(self, n: int) -> list:
        """``[t_0, ..., t_n]``."""
        return [self.radius(j) for j in range(n + 1)]

    def product(self, n: int) -> int:
        """``b_0 * ... * b_n``; equals ``g(t)`` on ``(t_n, t_{n+1}]``."""
        p = 1
        for j in range(n + 1):
            p *= self.branching(j)
        return p

    def check_depth(self, depth: int) -> None:
        if depth < 0:
            raise TreeError(f"depth must be >= 0, got {depth}")
        top = self.max_generation
        if top is not None and depth > top:
            raise TreeError(f"depth {depth} exceeds the explicit prefix ({top} generations) and no tail is given")


def _validation_errors(b: Sequence[int], t: Sequence[float], tail: Optional[TailRule]) -> list:
    errors = []
    if not b or not t:
        return ["b and t must be non-empty"]
    if b[0] != 1:
        errors.append(f"b[0] must be 1, got {b[0]}")
    for n, bn in enumerate(b[1:], start=1):
        if bn < 2:
            errors.append(f"b[{n}] must be >= 2, got {bn}")
    if t[0] != 0:
        errors.append(f"t[0] must be 0, got {t[0]}")
    for n in range(len(t) - 1):
        if not t[n + 1] > t[n]:
            errors.append(f"t must be strictly increasing (t[{n + 1}]={t[n + 1]} <= t[{n}]={t[n]})")
            break
    if len(t) not in (len(b), len(b) + 1):
        errors.append(f"len(t) must equal len(b) or len(b)+1, got {len(t)} and {len(b)}")
    if tail is not None and not errors:
        if len(b) > 1 and b[-1] != tail.b_star:
            errors.append(f"tail b_star={tail.b_star} does not continue b[-1]={b[-1]}")
        if len(t) > 1:
            n = len(t) - 2
            last = t[-1] - t[-2]
            want = tail.increment(n)
            if not math.isclose(last, want, rel_tol=1e-9):
                errors.append(f"tail edge length {want} at generation {n} does not match explicit t[-1]-t[-2]={last}")
    return errors


def new_tree(b: Sequence[int], t: Sequence[float], tail: Optional[TailRule] = None) -> GeneratingSequences:
    """Validated constructor; raises :class:`TreeError` listing every violation."""
    return GeneratingSequences(tuple(b), tuple(t), tail)


def height(tree: GeneratingSequences) -> float:
    """``h = lim t_n``; the last radius for prefix-only trees (see ``tree.prefix_only``)."""
    if tree.tail is None:
        return tree.t[-1]
    if tree.tail.rule == "arithmetic" or tree.tail.q >= 1:
        return math.inf
    m = len(tree.t) - 1
    return tree.t[-1] + tree.tail.d * tree.tail.q**m / (1.0 - tree.tail.q)


def branching_function(tree: GeneratingSequences, s: float) -> int:
    """Number of points at distance ``s`` from the root.

    Uses the half-open convention ``g(s) = b_0...b_n`` for ``t_n < s <= t_{n+1}``
    and ``g(0) = 1``.
    """
    if s < 0 or s >= height(tree):
        raise TreeError(f"s={s} outside [0, h)")
    if s == 0:
        return 1
    n = 0
    while tree.radius(n + 1) < s:
        n += 1
    return tree.product(n)


def _splice_index(tree: GeneratingSequences) -> int:
    # first generation from which both b_n and the edge length follow the tail
    return max(len(tree.b), len(tree.t) - 1)


def _reduced_height_term(tree: GeneratingSequences, n: int) -> float:
    return tree.edge_length(n) / tree.product(n)


def reduced_height(tree: GeneratingSequences, tol: float = 1e-12, method: str = "closed") -> float:
    """``L = sum_n (t_{n+1} - t_n) / (b_0...b_n)``; ``math.inf`` when divergent.

    ``method="closed"`` sums the explicit prefix and adds the tail in closed
    form. ``method="series"`` adds terms until the analytic remainder bound
    drops below ``tol``.
    """
    if tol <= 0:
        raise TreeError("tol must be > 0")
    if tree.tail is None:
        return math.fsum(_reduced_height_term(tree, n) for n in range(len(tree.t) - 1))

    s = _splice_index(tree)
    b_star = tree.tail.b_star
    ratio = 1.0 / b_star if tree.tail.rule == "arithmetic" else tree.tail.q / b_star
    if ratio >= 1:
        return math.inf

    head = [_reduced_height_term(tree, n) for n in range(s)]
    if method == "closed":
        p = tree.product(s - 1) if s > 0 else 1
        if tree.tail.rule == "arithmetic":
            rest = tree.tail.d / (p * (b_star - 1))
        else:
            rest = tree.tail.d * tree.tail.q**s / (p * (b_star - tree.tail.q))
        return math.fsum(head) + rest
    if method != "series":
        raise TreeError(f"unknown method {method!r}")

    terms = head
    n = s
    while True:
        term = _reduced_height_term(tree, n)
        terms.append(term)
        # terms decay geometrically with `ratio` past the splice
        if term * ratio / (1.0 - ratio) < tol:
            break
        n += 1
    return math.fsum(terms)


def reduced_height_diverges(tree: GeneratingSequences) -> bool:
    if tree.tail is None:
        return False
    ratio = 1.0 / tree.tail.b_star if tree.tail.rule == "arithmetic" else tree.tail.q / tree.tail.b_star
    return ratio >= 1


def total_length(tree: GeneratingSequences, up_to_generation: int) -> float:
    """Total edge length of the truncation at depth ``N``: ``sum_{n<N} |e_n| b_0...b_n``."""
    tree.check_depth(up_to_generation)
    return math.fsum(tree.edge_length(n) * tree.product(n) for n in range(up_to_generation))


def subtree(tree: GeneratingSequences, k: int) -> GeneratingSequences:
    """The tree ``Gamma_k`` identified with every ``T_e``, ``gen(e) = k``."""
    if k < 0:
        raise TreeError(f"k must be >= 0, got {k}")
    if k == 0:
        return tree
    if tree.tail is None:
        if k >= len(tree.t) - 1:
            raise TreeError(f"k={k} leaves no edges in the explicit prefix")
        tk = tree.t[k]
        t = [x - tk for x in tree.t[k:]]
        b = [1] + list(tree.b[k + 1:])
        return GeneratingSequences(tuple(b), tuple(t))
    m = max(len(tree.t) - k, 2)
    tk = tree.radius(k)
    t = [0.0] + [tree.radius(k + n) - tk for n in range(1, m)]
    b = [1] + [tree.branching(k + n) for n in range(1, m)]
    return GeneratingSequences(tuple(b), tuple(t), tree.tail.shifted(k))


@dataclass(frozen=True)
class Vertex:
    id: int
    generation: int
    parent: Optional[int]  # None marks the root


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    length: float
    generation: int


@dataclass(frozen=True)
class TreeTruncation:
    """Explicit finite tree up to generation ``depth``, breadth-first ordered.

    Edge ``i`` always ends at vertex ``i + 1``; siblings appear in sibling order.
    """

    vertices: tuple
    edges: tuple
    depth: int
    children: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        kids: dict = {v.id: [] for v in self.vertices}
        for e in self.edges:
            kids[e.tail].append(e.id)
        object.__setattr__(self, "children", kids)

    @property
    def root(self) -> int:
        return 0

    def incoming(self, vertex: int) -> Optional[int]:
        return None if vertex == 0 else vertex - 1

    def is_leaf(self, vertex: int) -> bool:
        return not self.children[vertex]

    def interior_vertices(self) -> list:
        """Vertices other than the root and the leaves."""
        return [v.id for v in self.vertices if v.id != 0 and self.children[v.id]]

    def generation_counts(self) -> list:
        counts = [0] * (self.depth + 1)
        for v in self.vertices:
            counts[v.generation] += 1
        return counts


def truncate(tree: GeneratingSequences, N: int) -> TreeTruncation:
    """Realize generations ``0..N`` as an explicit tree."""
    if N < 1:
        raise TreeError(f"truncation depth must be >= 1, got {N}")
    tree.check_depth(N)
    vertices = [Vertex(0, 0, None)]
    edges = []
    frontier = [0]
    for n in range(N):
        length = tree.edge_length(n)
        nxt = []
        for parent in frontier:
            for _ in range(tree.branching(n)):
                vid = len(vertices)
                vertices.append(Vertex(vid, n + 1, parent))
                edges.append(Edge(vid - 1, parent, vid, length, n))
                nxt.append(vid)
        frontier = nxt
    return TreeTruncation(tuple(vertices), tuple(edges), N)


@dataclass(frozen=True)
class GeometrySummary:
    height: float
    reduced_height: float
    total_length: Optional[float]
    depth: Optional[int]
    height_diverges: bool
    reduced_height_diverges: bool
    prefix_only: bool

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "reduced_height": self.reduced_height,
            "total_length": self.total_length,
            "depth": self.depth,
            "height_diverges": self.height_diverges,
            "reduced_height_diverges": self.reduced_height_diverges,
            "prefix_only": self.prefix_only,
        }


def describe(tree: GeneratingSequences, depth: Optional[int] = None, tol: float = 1e-12) -> GeometrySummary:
    h = height(tree)
    L = reduced_height(tree, tol)
    return GeometrySummary(
        height=h,
        reduced_height=L,
        total_length=None if depth is None else total_length(tree, depth),
        depth=depth,
        height_diverges=math.isinf(h),
        reduced_height_diverges=math.isinf(L),
        prefix_only=tree.prefix_only,
    )
