"""Expression trees for symbolic regression: generation, evaluation, variation.

Trees are immutable. All randomness flows through an explicit
``numpy.random.Generator`` so that runs are reproducible from a seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Function set: name -> arity. AQ is the analytic quotient a / sqrt(1 + b^2),
# total on the reals, so evaluation never divides by zero.
FUNCTIONS = {
    "add": 2,
    "sub": 2,
    "mul": 2,
    "AQ": 2,
    "sin": 1,
    "cos": 1,
    "neg": 1,
}

ERC_VALUES = (-1.0, 0.0, 1.0)

# Sentinel substituted for any prediction whose computation went non-finite.
# Keeps per-case errors finite and totally ordered for the selectors.
BAD_VALUE = 1e30


@dataclass(frozen=True)
class PrimitiveSet:
    """The terminal and function vocabulary trees are built from."""

    num_features: int
    functions: tuple = tuple(FUNCTIONS)
    erc_values: tuple = ERC_VALUES

    def __post_init__(self):
        if self.num_features < 1:
            raise ValueError("need at least one input feature")


@dataclass(frozen=True)
class Expr:
    """A node in an expression tree.

    ``op`` is a function name from FUNCTIONS, or "x" (feature terminal,
    ``value`` is the feature index) or "const" (``value`` is the constant).
    """

    op: str
    children: tuple = ()
    value: float = 0.0

    def is_terminal(self) -> bool:
        return self.op in ("x", "const")


def feature(index: int) -> Expr:
    return Expr("x", value=index)


def const(value: float) -> Expr:
    return Expr("const", value=float(value))


def func(op: str, *children: Expr) -> Expr:
    if FUNCTIONS[op] != len(children):
        raise ValueError(f"{op} expects {FUNCTIONS[op]} children, got {len(children)}")
    return Expr(op, children=tuple(children))


def tree_depth(expr: Expr) -> int:
    if expr.is_terminal():
        return 0
    return 1 + max(tree_depth(c) for c in expr.children)


def tree_size(expr: Expr) -> int:
    return 1 + sum(tree_size(c) for c in expr.children)


def tree_metrics(expr: Expr) -> dict:
    return {"depth": tree_depth(expr), "size": tree_size(expr)}


def _random_terminal(pset: PrimitiveSet, rng: np.random.Generator) -> Expr:
    # Uniform over features plus one ERC slot; the ERC value is drawn once
    # here and fixed for the life of the node.
    i = int(rng.integers(pset.num_features + 1))
    if i < pset.num_features:
        return feature(i)
    return const(pset.erc_values[int(rng.integers(len(pset.erc_values)))])


def generate_tree(pset: PrimitiveSet, method: str, max_depth: int,
                  rng: np.random.Generator) -> Expr:
    """Generate a random tree with the full or grow method.

    full: every leaf sits at exactly ``max_depth``. grow: each node below
    ``max_depth`` is a function or terminal with equal chance per symbol.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if method not in ("full", "grow"):
        raise ValueError(f"unknown method {method!r}")

    def build(depth: int) -> Expr:
        if depth == max_depth:
            return _random_terminal(pset, rng)
        if method == "grow":
            # uniform over all symbols: functions, features, and the ERC slot
            n_choices = len(pset.functions) + pset.num_features + 1
            if int(rng.integers(n_choices)) >= len(pset.functions):
                return _random_terminal(pset, rng)
        op = pset.functions[int(rng.integers(len(pset.functions)))]
        return Expr(op, children=tuple(build(depth + 1) for _ in range(FUNCTIONS[op])))

    return build(0)


def ramped_half_and_half(pset: PrimitiveSet, pop_size: int, depth_min: int,
                         depth_max: int, rng: np.random.Generator) -> list:
    """Initialize a population ramping depths over [depth_min, depth_max],
    half full and half grow; an odd remainder is assigned by one rng draw."""
    if pop_size < 1:
        raise ValueError("pop_size must be >= 1")
    if not 0 <= depth_min <= depth_max:
        raise ValueError("need 0 <= depth_min <= depth_max")

    methods = ["full"] * (pop_size // 2) + ["grow"] * (pop_size // 2)
    if pop_size % 2:
        methods.append("full" if rng.random() < 0.5 else "grow")
    depths = [depth_min + i % (depth_max - depth_min + 1) for i in range(pop_size)]
    return [generate_tree(pset, m, d, rng) for m, d in zip(methods, depths)]


def evaluate(expr: Expr, cases: np.ndarray) -> np.ndarray:
    """Evaluate a tree on a (rows x features) case matrix.

    Returns one prediction per row. Any row whose computation produced a
    non-finite intermediate anywhere in the tree gets BAD_VALUE instead.
    """
    cases = np.asarray(cases, dtype=float)
    bad = np.zeros(cases.shape[0], dtype=bool)

    def ev(node: Expr) -> np.ndarray:
        if node.op == "x":
            return cases[:, int(node.value)]
        if node.op == "const":
            return np.full(cases.shape[0], node.value)
        with np.errstate(all="ignore"):
            if node.op == "add":
                out = ev(node.children[0]) + ev(node.children[1])
            elif node.op == "sub":
                out = ev(node.children[0]) - ev(node.children[1])
            elif node.op == "mul":
                out = ev(node.children[0]) * ev(node.children[1])
            elif node.op == "AQ":
                a, b = ev(node.children[0]), ev(node.children[1])
                out = a / np.sqrt(1.0 + b * b)
            elif node.op == "sin":
                out = np.sin(ev(node.children[0]))
            elif node.op == "cos":
                out = np.cos(ev(node.children[0]))
            elif node.op == "neg":
                out = -ev(node.children[0])
            else:
                raise ValueError(f"unknown op {node.op!r}")
        finite = np.isfinite(out)
        if not finite.all():
            bad[~finite] = True
            out = np.where(finite, out, 0.0)
        return out

    result = ev(expr)
    result = np.where(bad, BAD_VALUE, result)
    return result


def _all_nodes(expr: Expr) -> list:
    """All (node, path) pairs in preorder; path is a tuple of child indices."""
    out = []

    def walk(node, path):
        out.append((node, path))
        for i, c in enumerate(node.children):
            walk(c, path + (i,))

    walk(expr, ())
    return out


def _replace_at(expr: Expr, path: tuple, replacement: Expr) -> Expr:
    if not path:
        return replacement
    i = path[0]
    children = list(expr.children)
    children[i] = _replace_at(children[i], path[1:], replacement)
    return Expr(expr.op, children=tuple(children), value=expr.value)


def subtree_crossover(a: Expr, b: Expr, max_depth: int,
                      rng: np.random.Generator) -> Expr:
    """Replace a uniformly chosen node of ``a`` with a uniformly chosen
    subtree of ``b``. If the child would exceed ``max_depth``, return ``a``."""
    nodes_a = _all_nodes(a)
    nodes_b = _all_nodes(b)
    _, path = nodes_a[int(rng.integers(len(nodes_a)))]
    donor, _ = nodes_b[int(rng.integers(len(nodes_b)))]
    child = _replace_at(a, path, donor)
    if tree_depth(child) > max_depth:
        return a
    return child


def subtree_mutation(a: Expr, pset: PrimitiveSet, max_depth: int,
                     rng: np.random.Generator) -> Expr:
    """Replace a uniformly chosen node of ``a`` with a fresh grow tree of
    depth <= 2; same depth-limit guard as crossover."""
    nodes = _all_nodes(a)
    _, path = nodes[int(rng.integers(len(nodes)))]
    sub = generate_tree(pset, "grow", 2, rng)
    child = _replace_at(a, path, sub)
    if tree_depth(child) > max_depth:
        return a
    return child


def to_sexpr(expr: Expr) -> str:
    """Prefix s-expression, e.g. ``(AQ (add x0 1) (sin x1))``."""
    if expr.op == "x":
        return f"x{int(expr.value)}"
    if expr.op == "const":
        v = expr.value
        return str(int(v)) if v == int(v) else repr(v)
    inner = " ".join(to_sexpr(c) for c in expr.children)
    return f"({expr.op} {inner})"


def from_sexpr(text: str) -> Expr:
    """Parse the serialization produced by :func:`to_sexpr`."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse() -> Expr:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            op = tokens[pos]
            pos += 1
            children = []
            while tokens[pos] != ")":
                children.append(parse())
            pos += 1
            return func(op, *children)
        if tok.startswith("x") and tok[1:].isdigit():
            return feature(int(tok[1:]))
        return const(float(tok))

    node = parse()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in {text!r}")
    return node
