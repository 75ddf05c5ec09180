"""Command-line front end.

Input is a query file (text or JSON) holding the graph and the named
subgroups, optionally followed by a query line::

    vertices: a b t
    edges: a-t b-t
    subgroup H = a ; b
    subgroup K = t a ; b
    query intersect H K

Words inside a query are separated by ``;``.  Positional arguments after the
subcommand override the query line.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .graph_core import (GraphError, SimpleGraph, decomposition_tree, droms_witness, is_droms,
                         parse_graph, primary_decomposition, tree_to_json)
from .junction import build_junction, junction_dot, STRICT_FG
from .oracle import check_against_solver
from .solver import (FreeData, esip, make_subgroup, membership, solver_for, subgroup_basis,
                     subgroup_data)
from .expressions import format_expr
from .wedge import to_dot
from .words import (GroupWord, WordError, ambient_for, format_word, normal_form,
                    parse_word)

COMMANDS = ("check-droms", "decompose", "normal-form", "member", "basis", "intersect",
            "coset-intersect", "kurosh")


ARG_COMMANDS = ("normal-form", "member", "basis", "intersect", "coset-intersect", "kurosh")


class CliError(ValueError):
    pass


class Query:
    def __init__(self, graph: SimpleGraph, subgroups: dict, op: Optional[str], args: list):
        self.graph = graph
        self.subgroups = subgroups
        self.op = op
        self.args = args


def _split_words(text: str) -> list[str]:
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    return [w.strip() for w in text.split(";")] if text.strip() else []


def parse_query_text(text: str) -> Query:
    stripped = text.strip()
    if stripped.startswith("{"):
        return parse_query_json(json.loads(stripped))
    graph_lines, subgroups, op, args = [], {}, None, []
    for raw in stripped.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith(("vertices:", "edges:")):
            graph_lines.append(line)
        elif line.startswith("subgroup "):
            head, _, body = line[len("subgroup "):].partition("=")
            name = head.strip()
            if not name or not _:
                raise CliError(f"malformed subgroup line {raw!r}")
            subgroups[name] = [w for w in _split_words(body) if w]
        elif line.startswith("query "):
            toks = line[len("query "):].split(None, 1)
            op = toks[0]
            rest = toks[1] if len(toks) > 1 else ""
            args = _query_args(op, rest)
        else:
            raise CliError(f"unrecognised line {raw!r}")
    if not graph_lines:
        raise CliError("no graph given")
    return Query(parse_graph("\n".join(graph_lines)), subgroups, op, args)


def _query_args(op: str, rest: str) -> list[str]:
    names = {"member": 1, "basis": 1, "kurosh": 1, "intersect": 2, "coset-intersect": 2}
    k = names.get(op, 0)
    toks = rest.split(None, k) if k else []
    head = toks[:k]
    tail = toks[k] if len(toks) > k else ("" if k else rest)
    return head + _split_words(tail)


def parse_query_json(data: dict) -> Query:
    graph = parse_graph(json.dumps(data.get("graph", {"vertices": [], "edges": []})))
    q = data.get("query") or {}
    return Query(graph, {k: list(v) for k, v in data.get("subgroups", {}).items()},
                 q.get("op"), list(q.get("args", [])))


def query_to_json(q: Query) -> dict:
    return {"graph": q.graph.to_json(), "subgroups": q.subgroups,
            "query": {"op": q.op, "args": q.args} if q.op else None}


# -- command implementations ---------------------------------------------------

def _subgroup(q: Query, name: str):
    if name not in q.subgroups:
        raise CliError(f"undefined subgroup {name!r}")
    return make_subgroup(q.graph, [parse_word(q.graph, w) for w in q.subgroups[name]])


def _need(args: list, k: int, op: str) -> None:
    if len(args) < k:
        raise CliError(f"{op} needs {k} argument(s)")


def cmd_check_droms(q: Query, opts) -> dict:
    wit = droms_witness(q.graph)
    return {"droms": is_droms(q.graph), "witness": list(wit) if wit else None}


def cmd_decompose(q: Query, opts) -> dict:
    pd = primary_decomposition(q.graph)
    return {"center": list(pd.center), "rest": pd.rest.to_json(),
            "tree": tree_to_json(decomposition_tree(q.graph))}


def cmd_normal_form(q: Query, opts) -> dict:
    _need(q.args, 1, "normal-form")
    w = parse_word(q.graph, q.args[0])
    amb = ambient_for(q.graph)
    nf = normal_form(w, amb.tree)
    return {"normal_form": format_word(amb.canon(w.letters)), "central": list(nf.central),
            "syllables": len(nf.syllables)}


def cmd_member(q: Query, opts) -> dict:
    _need(q.args, 2, "member")
    H = _subgroup(q, q.args[0])
    x = membership(H, parse_word(q.graph, q.args[1]))
    names = [f"h{i}" for i in range(len(H.generators))]
    return {"member": x is not None, "expression": None if x is None else format_expr(x, names)}


def cmd_basis(q: Query, opts) -> dict:
    _need(q.args, 1, "basis")
    H = _subgroup(q, q.args[0])
    out = subgroup_basis(H).to_json()
    _maybe_dot_subgroup(H, opts)
    return out


def cmd_kurosh(q: Query, opts) -> dict:
    _need(q.args, 1, "kurosh")
    H = _subgroup(q, q.args[0])
    d = subgroup_data(H)
    if not isinstance(d, FreeData):
        raise CliError("kurosh needs a free-product ambient (disconnected graph)")
    K = d.kurosh
    _maybe_dot_subgroup(H, opts)
    return {
        "free_part": [format_word(x) for _, x, _ in K.free_part],
        "vertex_groups": [{"conjugator": format_word(z), "factor": nu,
                           "label": [format_word(g) for g in gens]}
                          for _, z, nu, gens in K.vertex_groups],
        "basis": [format_word(b) for b in K.basis],
    }


def _coset_words(q: Query, args: list):
    if len(args) < 3:
        return None, None
    w = parse_word(q.graph, args[2])
    w2 = parse_word(q.graph, args[3]) if len(args) > 3 else GroupWord(q.graph, ())
    return w, w2


def cmd_intersect(q: Query, opts, coset: bool = False) -> dict:
    _need(q.args, 4 if coset else 2, "coset-intersect" if coset else "intersect")
    H, K = _subgroup(q, q.args[0]), _subgroup(q, q.args[1])
    w, w2 = _coset_words(q, q.args)
    out = esip(H, K, w, w2)
    res = out.to_json()
    if opts.depth is not None:
        rep = check_against_solver(H, K, out, opts.depth, w=w, w2=w2)
        res["oracle"] = {"ok": rep.ok, "violations": rep.violations,
                         "checked_elements": rep.checked_elements}
    if opts.dot:
        dH, dK = subgroup_data(H), subgroup_data(K)
        if isinstance(dH, FreeData):
            J = build_junction(dH.automaton, dK.automaton, solver_for(q.graph), STRICT_FG)
            _write(opts.dot, junction_dot(J))
        else:
            _write(opts.dot, "digraph junction {\n}\n")
    return res


def _maybe_dot_subgroup(H, opts) -> None:
    if not opts.dot:
        return
    d = subgroup_data(H)
    _write(opts.dot, to_dot(d.automaton) if isinstance(d, FreeData) else "digraph wedge {\n}\n")


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


HANDLERS = {
    "check-droms": cmd_check_droms,
    "decompose": cmd_decompose,
    "normal-form": cmd_normal_form,
    "member": cmd_member,
    "basis": cmd_basis,
    "intersect": cmd_intersect,
    "coset-intersect": lambda q, o: cmd_intersect(q, o, coset=True),
    "kurosh": cmd_kurosh,
}


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v if isinstance(v, str) else json.dumps(v)}")
    return lines


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="droms-sip",
                                description="Subgroup intersections in Droms RAAGs")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("args", nargs="*", help="query arguments (override the query line)")
    p.add_argument("--input", help="query file (default: stdin)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--dot", help="write the relevant automaton as DOT to this path")
    p.add_argument("--depth", type=int, help="cross-check against the ball oracle at this depth")
    p.add_argument("--seed", type=int, default=0, help="reserved; output is deterministic")
    return p


def run(argv, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
    except _ArgError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    try:
        if opts.input:
            with open(opts.input) as fh:
                text = fh.read()
        else:
            text = stdin.read()
        q = parse_query_text(text)
        if opts.args:
            q.args = list(opts.args)
        elif q.op is not None and q.op != opts.command and opts.command in ARG_COMMANDS:
            raise CliError(f"query line asks for {q.op!r} but the command is {opts.command!r}")
        q.op = opts.command
        result = HANDLERS[opts.command](q, opts)
    except (GraphError, WordError, CliError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except Exception as exc:  # anything else is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    if opts.format == "json":
        print(json.dumps(result, sort_keys=True), file=stdout)
    else:
        print("\n".join(_text(result)), file=stdout)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
