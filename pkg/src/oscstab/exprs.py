"""Small safe expression language for config files and inline systems.

Expressions are parsed with :mod:`ast` and evaluated against a whitelist:
arithmetic, the generic trig/root helpers from :mod:`oscstab.jets`, the
constant ``pi``, and declared variable names (``x1..xn``, ``t``).  Because
the helpers are scalar-generic, compiled vector fields evaluate on jets
exactly like the built-in ones.

Angle-style shorthands such as ``3pi/2`` are accepted: a bare number
directly before ``pi`` means multiplication.
"""

from __future__ import annotations

import ast
import math
import re

from .errors import ConfigError
from .jets import cbrt, cos, sec, sin, sqrt, tan

_FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sec": sec,
    "sqrt": sqrt,
    "cbrt": cbrt,
    "abs": abs,
    "exp": lambda v: math.exp(v) if not hasattr(v, "value") else _jet_exp(v),
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_IMPLICIT_PI = re.compile(r"(\d)\s*(pi\b)")


def _jet_exp(a):
    ev = _FUNCTIONS["exp"](a.value)
    from .jets import Jet2

    return Jet2(ev, ev * a.d1, ev * a.d1 * a.d1 + ev * a.d2)


def _normalize(text: str) -> str:
    return _IMPLICIT_PI.sub(r"\1*\2", text.strip())


def _compile(node, variables):
    if isinstance(node, ast.Expression):
        return _compile(node.body, variables)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)):
            value = float(node.value)
            return lambda env: value
        raise ConfigError(f"unsupported literal {node.value!r}")
    if isinstance(node, ast.Name):
        name = node.id
        if name in _CONSTANTS:
            value = _CONSTANTS[name]
            return lambda env: value
        if name in variables:
            return lambda env: env[name]
        raise ConfigError(f"unknown name {name!r} in expression")
    if isinstance(node, ast.BinOp):
        left = _compile(node.left, variables)
        right = _compile(node.right, variables)
        op = type(node.op)
        if op is ast.Add:
            return lambda env: left(env) + right(env)
        if op is ast.Sub:
            return lambda env: left(env) - right(env)
        if op is ast.Mult:
            return lambda env: left(env) * right(env)
        if op is ast.Div:
            return lambda env: left(env) / right(env)
        if op is ast.Pow:
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ConfigError("only integer exponents are supported")
            exponent = node.right.value
            return lambda env: left(env) ** exponent
        raise ConfigError(f"unsupported operator {op.__name__}")
    if isinstance(node, ast.UnaryOp):
        operand = _compile(node.operand, variables)
        if isinstance(node.op, ast.USub):
            return lambda env: -operand(env)
        if isinstance(node.op, ast.UAdd):
            return operand
        raise ConfigError(f"unsupported unary operator {type(node.op).__name__}")
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ConfigError("only sin/cos/tan/sec/sqrt/cbrt/abs/exp calls are allowed")
        if node.keywords or len(node.args) != 1:
            raise ConfigError(f"{node.func.id} takes exactly one positional argument")
        fn = _FUNCTIONS[node.func.id]
        arg = _compile(node.args[0], variables)
        return lambda env: fn(arg(env))
    raise ConfigError(f"unsupported syntax: {ast.dump(node, annotate_fields=False)}")


def compile_expression(text: str, variables=()):
    """Compile to a callable taking an env dict of the declared variables."""
    try:
        tree = ast.parse(_normalize(text), mode="eval")
    except SyntaxError as err:
        raise ConfigError(f"cannot parse expression {text!r}: {err.msg}") from None
    return _compile(tree, frozenset(variables))


def parse_number(value) -> float:
    """A config scalar: plain number, or an expression string like '3pi/2'."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got boolean {value}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        fn = compile_expression(value)
        return float(fn({}))
    raise ConfigError(f"expected a number or expression string, got {value!r}")


def parse_vector(values, length=None) -> list:
    if not isinstance(values, (list, tuple)):
        raise ConfigError(f"expected a list, got {values!r}")
    out = [parse_number(v) for v in values]
    if length is not None and len(out) != length:
        raise ConfigError(f"expected {length} entries, got {len(out)}")
    return out


def compile_field(exprs, n: int):
    """Compile n component expressions in x1..xn into a field function."""
    names = [f"x{i + 1}" for i in range(n)]
    comps = [compile_expression(e, names) for e in exprs]

    def func(x):
        env = {name: x[i] for i, name in enumerate(names)}
        return [c(env) for c in comps]

    return func


def compile_time_signal(exprs):
    comps = [compile_expression(e, ("t",)) for e in exprs]
    return lambda t: [c({"t": t}) for c in comps]


def compile_state_map(exprs, n: int):
    names = ["t"] + [f"x{i + 1}" for i in range(n)]
    comps = [compile_expression(e, names) for e in exprs]

    def func(t, x):
        env = {"t": t}
        for i in range(n):
            env[f"x{i + 1}"] = x[i]
        return [c(env) for c in comps]

    return func


def compile_noise(expr, n: int):
    names = ["t"] + [f"x{i + 1}" for i in range(n)]
    comp = compile_expression(expr, names)

    def func(t, x):
        env = {"t": t}
        for i in range(n):
            env[f"x{i + 1}"] = x[i]
        return comp(env)

    return func
