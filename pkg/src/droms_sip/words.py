"""Words and normal forms in the RAAG of a Droms graph.

Internally an element is its canonical letter tuple ``Elt``: central letters
first (in vertex order), then the syllables of the free-product child, each
rendered recursively the same way.  Because a factor's canonical letters are
also canonical in the whole group, factor-level and ambient-level code can
share one representation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .graph_core import (
    CentralExtensionNode,
    DromsTree,
    SimpleGraph,
    TrivialNode,
    decomposition_tree,
)

Letter = tuple[str, int]
Elt = tuple[Letter, ...]

IDENTITY: Elt = ()


class WordError(ValueError):
    pass


class UnknownGenerator(WordError):
    pass


class MalformedExponent(WordError):
    pass


class TreeMismatch(WordError):
    pass


class AmbientMismatch(WordError):
    pass


# -- compiled tree nodes -----------------------------------------------------

class Node:
    """Compiled DromsTree node with lookup tables and a normal-form cache."""

    TRIVIAL, CENTRAL, FREE = "trivial", "central", "free"

    def __init__(self, tree: DromsTree, depth: int = 0):
        self.tree = tree
        self.depth = depth
        self.cache: dict[tuple, Elt] = {}
        self.central: tuple[str, ...] = ()
        self.child: Optional[Node] = None
        self.children: tuple[Node, ...] = ()
        self.factor_of: dict[str, int] = {}
        if isinstance(tree, TrivialNode):
            self.kind = Node.TRIVIAL
            self.vertices: tuple[str, ...] = ()
        elif isinstance(tree, CentralExtensionNode):
            self.kind = Node.CENTRAL
            self.central = tuple(tree.central_vertices)
            self.child = Node(tree.child, depth + 1)
            self.vertices = tuple(sorted(self.central + self.child.vertices))
            self.central_index = {v: i for i, v in enumerate(self.central)}
        else:
            self.kind = Node.FREE
            self.children = tuple(Node(c, depth + 1) for c in tree.children)
            for i, c in enumerate(self.children):
                for v in c.vertices:
                    self.factor_of[v] = i
            self.vertices = tuple(sorted(self.factor_of))
        self.vertex_set = frozenset(self.vertices)

    @property
    def m(self) -> int:
        return len(self.central)

    def height(self) -> int:
        if self.kind == Node.TRIVIAL:
            return 0
        if self.kind == Node.CENTRAL:
            return 1 + self.child.height()
        return 1 + max(c.height() for c in self.children)

    def __repr__(self):
        return f"Node({self.kind}, {list(self.vertices)})"


def canon(node: Node, letters: Iterable[Letter]) -> Elt:
    """Canonical letter tuple of the element spelled by ``letters``."""
    key = letters if isinstance(letters, tuple) else tuple(letters)
    hit = node.cache.get(key)
    if hit is not None:
        return hit
    if node.kind == Node.TRIVIAL:
        if key:
            raise TreeMismatch(f"letter {key[0][0]!r} not in this factor")
        out: Elt = ()
    elif node.kind == Node.CENTRAL:
        vec = [0] * len(node.central)
        rest = []
        idx = node.central_index
        for v, e in key:
            i = idx.get(v)
            if i is not None:
                vec[i] += e
            elif v in node.child.vertex_set:
                rest.append((v, e))
            else:
                raise TreeMismatch(f"letter {v!r} not in this factor")
        out = tuple((c, e) for c, e in zip(node.central, vec) if e) + canon(node.child, tuple(rest))
    else:
        out = _canon_free(node, key)
    if len(node.cache) > 500_000:
        node.cache.clear()
    node.cache[key] = out
    return out


def _canon_free(node: Node, key: Elt) -> Elt:
    blocks: list[tuple[int, list]] = []
    for v, e in key:
        i = node.factor_of.get(v)
        if i is None:
            raise TreeMismatch(f"letter {v!r} not in this factor")
        if blocks and blocks[-1][0] == i:
            blocks[-1][1].append((v, e))
        else:
            blocks.append((i, [(v, e)]))
    stack: list[tuple[int, Elt]] = []
    for i, lets in blocks:
        cur = canon(node.children[i], tuple(lets))
        if stack and stack[-1][0] == i:
            cur = canon(node.children[i], stack.pop()[1] + cur)
        if cur:
            stack.append((i, cur))
    out: list[Letter] = []
    for _, s in stack:
        out.extend(s)
    return tuple(out)


def inv(elt: Elt) -> tuple:
    """Formal inverse (not canonical; feed through canon/mul)."""
    return tuple((v, -e) for v, e in reversed(elt))


def mul(node: Node, *elts) -> Elt:
    if len(elts) == 1:
        return canon(node, elts[0])
    out: list[Letter] = []
    for x in elts:
        out.extend(x)
    return canon(node, tuple(out))


def inverse(node: Node, elt: Elt) -> Elt:
    return canon(node, inv(elt))


def power(node: Node, elt: Elt, k: int) -> Elt:
    if k < 0:
        elt, k = inverse(node, elt), -k
    result: Elt = ()
    base = elt
    while k:
        if k & 1:
            result = mul(node, result, base)
        k >>= 1
        if k:
            base = mul(node, base, base)
    return result


def conj(node: Node, x: Elt, g: Elt) -> Elt:
    """g^-1 x g."""
    return mul(node, inv(g), x, g)


def commutator(node: Node, x: Elt, y: Elt) -> Elt:
    """[x, y] = x^-1 y^-1 x y."""
    return mul(node, inv(x), inv(y), x, y)


def syllables(node: Node, elt: Elt) -> list[tuple[int, Elt]]:
    """Free-factor syllables of a canonical element at a FREE node."""
    out: list[tuple[int, list]] = []
    for v, e in elt:
        i = node.factor_of[v]
        if out and out[-1][0] == i:
            out[-1][1].append((v, e))
        else:
            out.append((i, [(v, e)]))
    return [(i, tuple(s)) for i, s in out]


def split_central(node: Node, elt: Elt) -> tuple[tuple[int, ...], Elt]:
    """For canonical elt at a CENTRAL node: (central vector, child part)."""
    vec = [0] * len(node.central)
    k = 0
    while k < len(elt) and elt[k][0] in node.central_index:
        vec[node.central_index[elt[k][0]]] = elt[k][1]
        k += 1
    return tuple(vec), elt[k:]


def with_central(node: Node, vec: Iterable[int], child_part: Elt) -> Elt:
    return tuple((c, e) for c, e in zip(node.central, vec) if e) + child_part


def abelian_vector(elt: Iterable[Letter], vertices: tuple[str, ...]) -> tuple[int, ...]:
    pos = {v: i for i, v in enumerate(vertices)}
    vec = [0] * len(vertices)
    for v, e in elt:
        vec[pos[v]] += e
    return tuple(vec)


# -- recursive normal form ---------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    central: tuple[int, ...]
    syllables: tuple[tuple[int, "NormalForm"], ...]

    def is_identity(self) -> bool:
        return not any(self.central) and not self.syllables


def _nf_of_canonical(node: Node, elt: Elt) -> NormalForm:
    if node.kind == Node.TRIVIAL:
        return NormalForm((), ())
    if node.kind == Node.CENTRAL:
        vec, rest = split_central(node, elt)
        return NormalForm(vec, _nf_of_canonical(node.child, rest).syllables)
    return NormalForm((), tuple((i, _nf_of_canonical(node.children[i], s))
                                for i, s in syllables(node, elt)))


def _render_nf(node: Node, nf: NormalForm) -> Elt:
    if node.kind == Node.TRIVIAL:
        return ()
    if node.kind == Node.CENTRAL:
        child = _render_nf(node.child, NormalForm((), nf.syllables))
        return with_central(node, nf.central, child)
    out: list[Letter] = []
    for i, sub in nf.syllables:
        out.extend(_render_nf(node.children[i], sub))
    return tuple(out)


# -- public word API over graphs --------------------------------------------

class Ambient:
    """A Droms graph together with its compiled decomposition tree."""

    def __init__(self, graph: SimpleGraph, tree: Optional[DromsTree] = None):
        self.graph = graph
        self.tree = tree if tree is not None else decomposition_tree(graph)
        self.root = Node(self.tree)
        if self.root.vertex_set != frozenset(graph.vertices):
            raise TreeMismatch("tree does not decompose this graph")

    def canon(self, letters) -> Elt:
        return canon(self.root, letters)


@lru_cache(maxsize=256)
def ambient_for(graph: SimpleGraph) -> Ambient:
    return Ambient(graph)


@lru_cache(maxsize=256)
def _ambient_for_tree(graph: SimpleGraph, tree: DromsTree) -> Ambient:
    if tree == ambient_for(graph).tree:
        return ambient_for(graph)
    return Ambient(graph, tree)


@dataclass(frozen=True)
class GroupWord:
    ambient: SimpleGraph
    letters: tuple[Letter, ...]

    def __str__(self):
        return format_word(self.letters)


_TOKEN = re.compile(r"^([^\s^]+)(?:\^(.*))?$")


def parse_letters(vertices: Iterable[str], text: str) -> tuple[Letter, ...]:
    known = set(vertices)
    out: list[Letter] = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise MalformedExponent(f"cannot parse token {tok!r}")
        name, exp = m.group(1), m.group(2)
        if name == "1" and "1" not in known and exp is None:
            continue
        if name not in known:
            raise UnknownGenerator(f"unknown generator {name!r}")
        if exp is None:
            k = 1
        else:
            if not re.fullmatch(r"-?\d+", exp):
                raise MalformedExponent(f"bad exponent in {tok!r}")
            k = int(exp)
        if k:
            out.append((name, k))
    return tuple(out)


def parse_word(ambient: SimpleGraph, text: str) -> GroupWord:
    return GroupWord(ambient, parse_letters(ambient.vertices, text))


def format_word(letters: Iterable[Letter]) -> str:
    toks = [v if e == 1 else f"{v}^{e}" for v, e in letters]
    return " ".join(toks) if toks else "1"


def _check_tree(w: GroupWord, tree: DromsTree) -> Ambient:
    try:
        return _ambient_for_tree(w.ambient, tree)
    except TreeMismatch:
        raise
    except Exception as exc:  # graph is not Droms, etc.
        raise TreeMismatch(str(exc)) from exc


def normal_form(w: GroupWord, tree: DromsTree) -> NormalForm:
    amb = _check_tree(w, tree)
    return _nf_of_canonical(amb.root, amb.canon(w.letters))


def render(nf: NormalForm, tree: DromsTree) -> tuple[Letter, ...]:
    return _render_nf(Node(tree), nf)


def canonical_word(w: GroupWord) -> GroupWord:
    return GroupWord(w.ambient, ambient_for(w.ambient).canon(w.letters))


def multiply(u: GroupWord, v: GroupWord) -> GroupWord:
    if u.ambient != v.ambient:
        raise AmbientMismatch("words live in different ambient groups")
    return GroupWord(u.ambient, u.letters + v.letters)


def invert(u: GroupWord) -> GroupWord:
    return GroupWord(u.ambient, inv(u.letters))


def words_equal(u: GroupWord, v: GroupWord) -> bool:
    if u.ambient != v.ambient:
        raise AmbientMismatch("words live in different ambient groups")
    amb = ambient_for(u.ambient)
    return amb.canon(u.letters) == amb.canon(v.letters)


def project_central(w: GroupWord, tree: DromsTree) -> tuple[tuple[int, ...], GroupWord]:
    amb = _check_tree(w, tree)
    root = amb.root
    if root.kind == Node.TRIVIAL:
        return (), GroupWord(w.ambient, ())
    if root.kind != Node.CENTRAL:
        raise TreeMismatch("root of the tree has no central vertices")
    vec, rest = split_central(root, amb.canon(w.letters))
    return vec, GroupWord(w.ambient, rest)


def abelianize(w: GroupWord) -> tuple[int, ...]:
    return abelian_vector(w.letters, w.ambient.vertices)
