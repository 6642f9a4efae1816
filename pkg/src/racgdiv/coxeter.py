"""Right-angled Coxeter groups: presentations, word problem, special subgroups.

Group elements are stored as ShortLex normal forms, i.e. tuples of generator
indices. Generator order is the declaration order of the presentation graph,
so the index order *is* the ShortLex order.

The word problem is solved letter by letter: right multiplication of a
normal form ``w`` by a generator ``s`` either cancels the last occurrence of
``s`` (when every letter after it commutes with ``s``) or inserts ``s`` at the
earliest position where it is both movable (everything to its right commutes
with it) and smaller than the letter it would precede.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

Word = tuple[int, ...]
NormalForm = tuple[int, ...]
WordLike = Union[str, Sequence[Union[str, int]]]

IDENTITY: NormalForm = ()


class InvalidWord(ValueError):
    pass


class InvalidParameter(ValueError):
    pass


class GraphFormatError(ValueError):
    """Raised for malformed or non-simplicial presentation graph files."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass(frozen=True)
class PresentationGraph:
    """A finite simplicial graph defining a right-angled Coxeter group.

    Vertices are the generators (each an involution); an edge ``{s, t}`` means
    ``st = ts``. ``generators`` fixes the ShortLex order.
    """

    generators: tuple[str, ...]
    edges: frozenset[frozenset[str]]
    name: str = "custom"
    commute_masks: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise InvalidParameter("duplicate generator identifiers")
        index = {g: i for i, g in enumerate(gens)}
        masks = [0] * len(gens)
        for e in self.edges:
            pair = tuple(e)
            if len(pair) != 2:
                raise InvalidParameter(f"edge {sorted(e)} is a self-loop or malformed")
            a, b = pair
            if a not in index or b not in index:
                raise InvalidParameter(f"edge {sorted(e)} uses an undeclared generator")
            masks[index[a]] |= 1 << index[b]
            masks[index[b]] |= 1 << index[a]
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))
        object.__setattr__(self, "commute_masks", tuple(masks))
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_edges(cls, generators: Iterable[str], edges: Iterable[Iterable[str]], name="custom"):
        return cls(tuple(generators), frozenset(frozenset(e) for e in edges), name)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def commute(self, s: int, t: int) -> bool:
        return bool((self.commute_masks[s] >> t) & 1)

    def index(self, name: Union[str, int]) -> int:
        if isinstance(name, int):
            if 0 <= name < self.rank:
                return name
            raise InvalidWord(f"generator index {name} out of range")
        i = self._index.get(name)
        if i is None:
            # built-ins are named a0, b1, ...; accept the a_0 spelling too
            i = self._index.get(name.replace("_", ""))
        if i is None:
            raise InvalidWord(f"unknown generator {name!r}")
        return i

    def word(self, w: WordLike) -> Word:
        """Parse a word given as a whitespace separated string or a sequence."""
        if isinstance(w, str):
            tokens = w.replace(",", " ").split()
        else:
            tokens = list(w)
        return tuple(self.index(t) for t in tokens)

    def subset(self, names: Iterable[Union[str, int]]) -> frozenset[int]:
        try:
            return frozenset(self.index(n) for n in names)
        except InvalidWord as exc:
            raise InvalidParameter(str(exc)) from None

    def format(self, w: Sequence[int], empty: str = "") -> str:
        if not w:
            return empty
        return " ".join(self.generators[i] for i in w)

    def to_dict(self) -> dict:
        edges = sorted(sorted(e, key=self._index.get) for e in self.edges)
        edges.sort(key=lambda e: (self._index[e[0]], self._index[e[1]]))
        return {"generators": list(self.generators), "edges": edges}


# -- word problem -------------------------------------------------------------

def rmul(w: NormalForm, s: int, masks: Sequence[int]) -> NormalForm:
    """Normal form of ``w * s`` for a normal form ``w`` and generator ``s``."""
    m = masks[s]
    i = len(w)
    while i > 0:
        x = w[i - 1]
        if x == s:
            return w[: i - 1] + w[i:]
        if not (m >> x) & 1:
            break
        i -= 1
    n = len(w)
    while i < n and w[i] < s:
        i += 1
    return w[:i] + (s,) + w[i:]


def _validate(w: WordLike, G: PresentationGraph) -> Word:
    if isinstance(w, tuple) and all(isinstance(x, int) for x in w):
        for x in w:
            if not 0 <= x < G.rank:
                raise InvalidWord(f"generator index {x} out of range")
        return w
    return G.word(w)


def normal_form(w: WordLike, G: PresentationGraph) -> NormalForm:
    """ShortLex normal form of the element represented by ``w``."""
    masks = G.commute_masks
    g: NormalForm = ()
    for s in _validate(w, G):
        g = rmul(g, s, masks)
    return g


def multiply(g: NormalForm, h: WordLike, G: PresentationGraph) -> NormalForm:
    masks = G.commute_masks
    for s in _validate(h, G):
        g = rmul(g, s, masks)
    return g


def inverse(g: NormalForm, G: PresentationGraph) -> NormalForm:
    return normal_form(tuple(reversed(g)), G)


def word_length(g: WordLike, G: PresentationGraph) -> int:
    return len(normal_form(g, G))


def distance(u: NormalForm, v: NormalForm, G: PresentationGraph) -> int:
    """Word metric ``|u^-1 v|``; exact and independent of any truncation."""
    return len(multiply(inverse(u, G), v, G))


def is_reduced(w: WordLike, G: PresentationGraph) -> bool:
    w = _validate(w, G)
    return len(normal_form(w, G)) == len(w)


# -- special subgroups and cosets --------------------------------------------

def _check_subset(T: Iterable, G: PresentationGraph) -> frozenset[int]:
    return G.subset(T)


def subgroup_membership(g: NormalForm, T: Iterable, G: PresentationGraph) -> bool:
    """True iff ``g`` lies in the special subgroup generated by ``T``."""
    T = _check_subset(T, G)
    return all(x in T for x in g)


def _last_letters(g: NormalForm, G: PresentationGraph) -> set[int]:
    # generators s with |g s| < |g|
    out = set()
    masks = G.commute_masks
    for i in range(len(g) - 1, -1, -1):
        s = g[i]
        if all((masks[s] >> x) & 1 for x in g[i + 1:]):
            out.add(s)
    return out


def coset_min_rep(g: NormalForm, T: Iterable, G: PresentationGraph) -> NormalForm:
    """Shortest element of the left coset ``g H_T`` (greedy right descent)."""
    T = _check_subset(T, G)
    masks = G.commute_masks
    while True:
        for t in sorted(_last_letters(g, G) & T):
            g = rmul(g, t, masks)
            break
        else:
            return g


def distance_to_coset(x: NormalForm, g: NormalForm, T: Iterable, G: PresentationGraph) -> int:
    """``d_S(x, g H_T)``: length of the minimal representative of ``x^-1 g H_T``."""
    return len(coset_min_rep(multiply(inverse(x, G), g, G), T, G))


# -- built-in families --------------------------------------------------------

def build_family(kind: str, d: int) -> PresentationGraph:
    """The graphs Gamma_d (``kind="gamma"``) and Omega_d (``kind="omega"``).

    Gamma_d has vertices a0..ad, b0..bd; a0 and b0 are both joined to every
    a_i (i >= 1) and to b1; the chain b1 - b2 - ... - bd is a path; and each
    a_i is joined to b_{i+1}. Omega_d adds the path b1 - c1 - c2 - ad.
    """
    if kind not in ("gamma", "omega"):
        raise InvalidParameter(f"unknown family kind {kind!r}")
    if not isinstance(d, int) or d < 1:
        raise InvalidParameter(f"d must be a positive integer, got {d!r}")
    a = [f"a{i}" for i in range(d + 1)]
    b = [f"b{i}" for i in range(d + 1)]
    gens = a + b
    edges = []
    for i in range(1, d + 1):
        edges += [(a[0], a[i]), (b[0], a[i])]
    edges += [(a[0], b[1]), (b[0], b[1])]
    for i in range(1, d):
        edges += [(b[i], b[i + 1]), (a[i], b[i + 1])]
    if kind == "omega":
        gens += ["c1", "c2"]
        edges += [(b[1], "c1"), ("c1", "c2"), ("c2", a[d])]
    return PresentationGraph.from_edges(gens, edges, name=f"{kind}:{d}")


def gamma(d: int) -> PresentationGraph:
    return build_family("gamma", d)


def omega(d: int) -> PresentationGraph:
    return build_family("omega", d)


def dihedral_line() -> PresentationGraph:
    """Two non-commuting involutions: the infinite dihedral group, a line."""
    return PresentationGraph.from_edges(["s", "t"], [], name="dinf")


def parse_family(text: str) -> PresentationGraph:
    kind, _, d = text.partition(":")
    try:
        return build_family(kind.strip(), int(d))
    except ValueError as exc:
        raise InvalidParameter(f"bad family spec {text!r}: {exc}") from None


def peripheral_generators(G: PresentationGraph) -> frozenset[int]:
    """Generators of the Gamma_d subgraph inside an Omega_d graph."""
    return frozenset(i for i, g in enumerate(G.generators) if g[0] in "ab")


# -- graph file ingestion -----------------------------------------------------

def graph_from_dict(data, name: str = "custom") -> PresentationGraph:
    if not isinstance(data, dict):
        raise GraphFormatError("$", "expected a JSON object")
    gens = data.get("generators")
    if not isinstance(gens, list) or not gens:
        raise GraphFormatError("generators", "expected a non-empty list of strings")
    seen = set()
    for i, g in enumerate(gens):
        if not isinstance(g, str) or not g:
            raise GraphFormatError(f"generators[{i}]", f"invalid identifier {g!r}")
        if g in seen:
            raise GraphFormatError(f"generators[{i}]", f"duplicate generator {g!r}")
        seen.add(g)
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        raise GraphFormatError("edges", "expected a list of pairs")
    pairs = set()
    for i, e in enumerate(edges):
        where = f"edges[{i}]"
        if not isinstance(e, list) or len(e) != 2:
            raise GraphFormatError(where, f"expected a pair, got {e!r}")
        a, b = e
        for x in (a, b):
            if x not in seen:
                raise GraphFormatError(where, f"edge {e!r} uses undeclared generator {x!r}")
        if a == b:
            raise GraphFormatError(where, f"edge {e!r} is a self-loop")
        key = frozenset((a, b))
        if key in pairs:
            raise GraphFormatError(where, f"edge {e!r} is a duplicate")
        pairs.add(key)
    return PresentationGraph(tuple(gens), frozenset(pairs), name)


def load_graph(path: Union[str, Path]) -> PresentationGraph:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"line {exc.lineno}", exc.msg) from None
    return graph_from_dict(data, name=path.stem)
