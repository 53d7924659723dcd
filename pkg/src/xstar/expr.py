"""A small arithmetic expression language for boundary data and custom integrands.

Grammar: numbers, variables, ``+ - * / ^``, parentheses and the functions
``sin cos sqrt abs``.  Expressions compile to numpy-vectorized callables.
"""
import ast

import numpy as np

from .errors import ConfigError

_FUNCS = {"sin": np.sin, "cos": np.cos, "sqrt": np.sqrt, "abs": np.abs}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def _build(node, variables):
    if isinstance(node, ast.Expression):
        return _build(node.body, variables)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        c = float(node.value)
        return lambda env: c
    if isinstance(node, ast.Name):
        if node.id not in variables:
            raise ConfigError(f"unknown variable {node.id!r} (allowed: {', '.join(variables)})")
        name = node.id
        return lambda env: env[name]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _build(node.operand, variables)
        if isinstance(node.op, ast.USub):
            return lambda env: -inner(env)
        return inner
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left = _build(node.left, variables)
        right = _build(node.right, variables)
        return lambda env: op(left(env), right(env))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
        fn = _FUNCS[node.func.id]
        arg = _build(node.args[0], variables)
        return lambda env: fn(arg(env))
    raise ConfigError(f"unsupported syntax in expression: {ast.dump(node)[:60]}")


class Expression:
    """Compiled expression over a fixed tuple of variable names.

    >>> float(Expression("x^2 - y^2")(2.0, 1.0))
    3.0
    """

    def __init__(self, source, variables=("x", "y")):
        self.source = source
        self.variables = tuple(variables)
        if "**" in source:
            raise ConfigError("use '^' for powers")
        try:
            tree = ast.parse(source.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse expression {source!r}: {exc.msg}") from None
        self._fn = _build(tree, self.variables)

    def __call__(self, *args):
        if len(args) != len(self.variables):
            raise TypeError(f"expected {len(self.variables)} arguments")
        env = dict(zip(self.variables, (np.asarray(a, dtype=float) for a in args)))
        out = self._fn(env)
        shape = np.broadcast(*env.values()).shape
        return np.broadcast_to(np.asarray(out, dtype=float), shape) * 1.0

    def __repr__(self):
        return f"Expression({self.source!r})"
