"""Freely reduced words over abstract symbols 0..n-1.

An ``Expr`` is a tuple of (symbol, exponent) pairs with nonzero exponents
and no two adjacent pairs on the same symbol.  These record how an element
was built from a generating list, so every basis element and every automaton
label can be traced back to the original generators.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .words import Elt, Node, mul, power

Expr = tuple[tuple[int, int], ...]

EMPTY: Expr = ()


def reduce_expr(pairs: Iterable[tuple[int, int]]) -> Expr:
    out: list[list[int]] = []
    for s, e in pairs:
        if not e:
            continue
        if out and out[-1][0] == s:
            out[-1][1] += e
            if not out[-1][1]:
                out.pop()
        else:
            out.append([s, e])
    return tuple((s, e) for s, e in out)


def sym(i: int, e: int = 1) -> Expr:
    return ((i, e),) if e else ()


def e_mul(*exprs: Expr) -> Expr:
    return reduce_expr(p for x in exprs for p in x)


def e_inv(x: Expr) -> Expr:
    return tuple((s, -e) for s, e in reversed(x))


def e_pow(x: Expr, k: int) -> Expr:
    if k < 0:
        x, k = e_inv(x), -k
    return reduce_expr(p for _ in range(k) for p in x)


def e_conj(x: Expr, g: Expr) -> Expr:
    """g^-1 x g."""
    return e_mul(e_inv(g), x, g)


def substitute(x: Expr, images: Sequence[Expr]) -> Expr:
    out: list[tuple[int, int]] = []
    for s, e in x:
        img = images[s]
        if e < 0:
            img, e = e_inv(img), -e
        for _ in range(e):
            out.extend(img)
    return reduce_expr(out)


def shift(x: Expr, offset: int) -> Expr:
    return tuple((s + offset, e) for s, e in x)


def relabel(x: Expr, table: Sequence[int]) -> Expr:
    return reduce_expr((table[s], e) for s, e in x)


def evaluate(node: Node, x: Expr, values: Sequence[Elt]) -> Elt:
    acc: Elt = ()
    for s, e in x:
        acc = mul(node, acc, power(node, values[s], e))
    return acc


def abelianize_expr(x: Expr, n: int) -> list[int]:
    vec = [0] * n
    for s, e in x:
        vec[s] += e
    return vec


def format_expr(x: Expr, names: Sequence[str]) -> str:
    toks = [names[s] if e == 1 else f"{names[s]}^{e}" for s, e in x]
    return " ".join(toks) if toks else "1"
