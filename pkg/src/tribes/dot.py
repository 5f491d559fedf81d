"""Graphviz DOT rendering of groupoids and functors."""

from __future__ import annotations

import json

from .groupoid import Functor, Groupoid


def _label(x) -> str:
    if isinstance(x, tuple):
        return "(" + ", ".join(_label(y) for y in x) + ")"
    return str(x)


def _q(text: str) -> str:
    return json.dumps(text)


def _body(G: Groupoid, prefix: str = "", indent: str = "  ") -> list[str]:
    lines = [f"{indent}{_q(prefix + _label(x))} [label={_q(_label(x))}];" for x in G.objects]
    for a, (s, t) in G.arrows.items():
        edge = f"{indent}{_q(prefix + _label(s))} -> {_q(prefix + _label(t))}"
        if G.is_identity(a):
            lines.append(f"{edge} [style=dotted];")
        else:
            lines.append(f"{edge} [label={_q(_label(a))}];")
    return lines


def groupoid_to_dot(G: Groupoid) -> str:
    """One node per object, one edge per arrow; identities are dotted self-loops."""
    lines = [f"digraph {_q(G.name or 'G')} {{", *_body(G), "}"]
    return "\n".join(lines) + "\n"


def functor_to_dot(F: Functor) -> str:
    """Domain and codomain side by side, with dashed edges for the object assignment."""
    lines = [f"digraph {_q(F.name or 'F')} {{", "  compound=true;"]
    for tag, G in (("dom", F.dom), ("cod", F.cod)):
        lines.append(f"  subgraph {_q('cluster_' + tag)} {{")
        lines.append(f"    label={_q(G.name or tag)};")
        lines.extend(_body(G, prefix=f"{tag}:", indent="    "))
        lines.append("  }")
    for x, y in F.on_objects.items():
        lines.append(f"  {_q('dom:' + _label(x))} -> {_q('cod:' + _label(y))} [style=dashed, color=gray];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dot(value) -> str:
    if isinstance(value, Groupoid):
        return groupoid_to_dot(value)
    if isinstance(value, Functor):
        return functor_to_dot(value)
    raise TypeError(f"cannot render {type(value).__name__} as DOT")
