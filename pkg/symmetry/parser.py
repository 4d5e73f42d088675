"""Tokenizer and precedence-climbing parser for the expression grammar.

Grammar: integers, identifiers ``[A-Za-z][A-Za-z0-9]*(_[A-Za-z0-9]+)?``, the
binary operators ``+ - * / ^``, unary minus, parentheses, and calls
``exp(..)``, ``log(..)``, ``Dx(..)``/``Dt(..)`` (total derivatives, need a
context hook) and ``F(a,b)`` (arbitrary function of the listed symbols).
"""
import re
from collections import namedtuple
from fractions import Fraction

from symmetry import expr as ex
from symmetry.errors import DependencyError, ParseError, UndeclaredSymbolError

# groups of increasing binding power
OPERATORS = [
    [("+", "left"), ("-", "left")],
    [("*", "left"), ("/", "left")],
    [("^", "right")],
]
OPERATOR_PREC = {name: idx for idx, group in enumerate(OPERATORS) for name, _ in group}
OPERATOR_ASSOC = {name: assoc for group in OPERATORS for name, assoc in group}
POW_PREC = OPERATOR_PREC["^"]

BUILTINS = ("exp", "log")

TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)?)|(.))", re.DOTALL)

Token = namedtuple("Token", ["kind", "value", "line", "column"])


def tokenize(source, line=1, column=1):
    """Split source into number, name and operator tokens with positions."""
    if not source.isascii():
        raise ParseError("only ASCII characters are supported", line, column)
    tokens = []
    pos = 0
    while pos < len(source):
        match = TOKEN_RE.match(source, pos)
        if match.end() == pos or match.group(0).strip() == "":
            break
        number, name, other = match.groups()
        col = column + match.start(match.lastindex)
        if number is not None:
            tokens.append(Token("num", int(number), line, col))
        elif name is not None:
            tokens.append(Token("name", name, line, col))
        elif other in OPERATOR_PREC or other in "(),":
            tokens.append(Token("op", other, line, col))
        else:
            raise ParseError(f"unexpected character {other!r}", line, col)
        pos = match.end()
    tokens.append(Token("end", None, line, column + len(source)))
    return tokens


class _Stream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.index = 0

    def peek(self):
        return self.tokens[self.index]

    def next(self):
        token = self.tokens[self.index]
        if token.kind != "end":
            self.index += 1
        return token

    def expect(self, value, what):
        token = self.next()
        if token.value != value:
            raise ParseError(f"expected {what}", token.line, token.column)
        return token


def _parse(stream, min_prec):
    lhs = _atom(stream)
    while True:
        token = stream.peek()
        if token.kind != "op" or token.value not in OPERATOR_PREC:
            return lhs
        prec = OPERATOR_PREC[token.value]
        if prec < min_prec:
            return lhs
        stream.next()
        next_prec = prec + 1 if OPERATOR_ASSOC[token.value] == "left" else prec
        rhs = _parse(stream, next_prec)
        lhs = (token.value, lhs, rhs)


def _atom(stream):
    token = stream.next()
    if token.kind == "end":
        raise ParseError("unexpected end of input", token.line, token.column)
    if token.kind == "num":
        return ("num", token.value)
    if token.value == "-":
        return ("neg", _parse(stream, POW_PREC))
    if token.value == "(":
        inner = _parse(stream, 0)
        stream.expect(")", "closing parenthesis")
        return inner
    if token.kind == "name":
        if stream.peek().value == "(":
            open_token = stream.next()
            args = [_parse(stream, 0)]
            while stream.peek().value == ",":
                stream.next()
                args.append(_parse(stream, 0))
            if stream.peek().value != ")":
                raise ParseError("expected closing parenthesis in call", open_token.line, open_token.column)
            stream.next()
            return ("call", token.value, tuple(args), token.line, token.column)
        return ("name", token.value, token.line, token.column)
    raise ParseError(f"unexpected {token.value!r}", token.line, token.column)


def parse_tree(text, line=1, column=1):
    """Raw syntax tree of text as nested tuples, no simplification."""
    stream = _Stream(tokenize(text, line, column))
    tree = _parse(stream, 0)
    token = stream.peek()
    if token.kind != "end":
        raise ParseError(f"unexpected {token.value!r}", token.line, token.column)
    return tree


def evaluate_tree(tree, point):
    """Evaluate a raw tree at an exact point (dict name -> Fraction).

    Only rational operations are supported; exp, log and irrational powers raise ValueError.
    """
    kind = tree[0]
    if kind == "num":
        return Fraction(tree[1])
    if kind == "name":
        return Fraction(point[tree[1]])
    if kind == "neg":
        return -evaluate_tree(tree[1], point)
    if kind == "call":
        raise ValueError(f"cannot evaluate {tree[1]}(...) exactly")
    a = evaluate_tree(tree[1], point)
    b = evaluate_tree(tree[2], point)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if kind == "/":
        return a / b
    if b.denominator != 1:
        raise ValueError(f"{a}^{b} is not rational")
    return a ** int(b)


def tree_names(tree):
    if tree[0] == "name":
        return {tree[1]}
    if tree[0] == "num":
        return set()
    if tree[0] == "call":
        names = set()
        for arg in tree[2]:
            names |= tree_names(arg)
        return names
    names = set()
    for child in tree[1:]:
        names |= tree_names(child)
    return names


def split_index(suffix, names):
    """Split a derivative suffix into a sequence of names, longest match first."""
    ordered = sorted(names, key=len, reverse=True)
    out = []
    pos = 0
    while pos < len(suffix):
        for name in ordered:
            if suffix.startswith(name, pos):
                out.append(name)
                pos += len(name)
                break
        else:
            return None
    return out


class ParseContext:
    """Declared names and the node each identifier resolves to.

    symbols:    plain symbols (independents, dependents, parameters)
    functions:  name -> argument names, resolved to function atoms
    variables:  name -> argument names, differential variables kept as symbols
                (E_u is a symbol); derivatives along other names in `base` are zero
    jet:        (dependents, independents) for jet coordinates u_t, u_tx, ...
    total:      hook f(expr, wrt) used for Dx(...)/Dt(...)
    lenient:    illegal derivatives of functions become 0 and are noted
    """

    def __init__(self, symbols=(), functions=None, variables=None, base=(), jet=None,
                 order=2, total=None, lenient=False, open_names=False):
        self.symbols = set(symbols)
        self.functions = dict(functions or {})
        self.variables = dict(variables or {})
        self.base = tuple(base)
        self.jet = jet
        self.order = order
        self.total = total
        self.lenient = lenient
        self.open_names = open_names
        self.notes = []

    @classmethod
    def open(cls):
        return cls(open_names=True)

    def resolve(self, name, line, column):
        head, _, suffix = name.partition("_")
        if self.jet and head in self.jet[0]:
            return self._jet_coordinate(head, suffix, line, column)
        if name in self.symbols:
            return ex.symbol(name)
        if head in self.variables:
            return self._variable(head, suffix, line, column)
        if head in self.functions:
            return self._function(head, self.functions[head], suffix, line, column)
        if self.open_names:
            return ex.symbol(name)
        raise UndeclaredSymbolError(f"undeclared symbol {name}", line, column)

    def _jet_coordinate(self, head, suffix, line, column):
        if not suffix:
            return ex.symbol(head)
        independents = self.jet[1]
        index = split_index(suffix, independents)
        if index is None:
            raise ParseError(f"{head}_{suffix} is not a jet coordinate", line, column)
        if len(index) > self.order:
            raise ParseError(f"{head}_{suffix} exceeds order {self.order}", line, column)
        index.sort(key=independents.index)
        return ex.symbol(f"{head}_{''.join(index)}")

    def _variable(self, head, suffix, line, column):
        if not suffix:
            return ex.symbol(head)
        args = self.variables[head]
        index = split_index(suffix, tuple(args) + self.base)
        if index is None:
            raise ParseError(f"cannot split derivative {head}_{suffix}", line, column)
        if any(sym not in args for sym in index):
            return ex.ZERO
        index.sort(key=args.index)
        return ex.symbol(f"{head}_{''.join(index)}")

    def _function(self, head, args, suffix, line, column):
        if not suffix:
            return ex.func(head, args)
        index = split_index(suffix, tuple(args) + self.base)
        if index is None:
            raise ParseError(f"cannot split derivative {head}_{suffix}", line, column)
        try:
            return ex.func(head, args, index)
        except DependencyError as err:
            if not self.lenient:
                raise ParseError(str(err), line, column) from None
            self.notes.append(f"line {line}, column {column}: {head}_{suffix} read as 0 ({err})")
            return ex.ZERO

    def call(self, name, args, line, column):
        if name == "exp":
            return ex.exp(args[0])
        if name == "log":
            return ex.log(args[0])
        if name.startswith("D") and len(name) > 1 and len(args) == 1:
            if self.total is None:
                raise ParseError(f"{name}(...) needs a jet context", line, column)
            return self.total(args[0], name[1:])
        head, _, suffix = name.partition("_")
        names = []
        for arg in args:
            if not isinstance(arg, ex.Symbol):
                raise ParseError(f"arguments of {head} must be symbols", line, column)
            names.append(arg.name)
        index = split_index(suffix, names) if suffix else []
        if index is None:
            raise ParseError(f"cannot split derivative {name}", line, column)
        try:
            return ex.func(head, names, index)
        except DependencyError as err:
            raise ParseError(str(err), line, column) from None


def build(tree, context):
    kind = tree[0]
    if kind == "num":
        return ex.const(tree[1])
    if kind == "name":
        return context.resolve(tree[1], tree[2], tree[3])
    if kind == "neg":
        return ex.neg(build(tree[1], context))
    if kind == "call":
        _, name, args, line, column = tree
        if name in BUILTINS and len(args) != 1:
            raise ParseError(f"{name} takes one argument", line, column)
        return context.call(name, [build(a, context) for a in args], line, column)
    a = build(tree[1], context)
    b = build(tree[2], context)
    if kind == "+":
        return ex.add(a, b)
    if kind == "-":
        return ex.sub(a, b)
    if kind == "*":
        return ex.mul(a, b)
    if kind == "/":
        if b.is_zero:
            raise ParseError("division by zero", *_position(tree[2]))
        return ex.div(a, b)
    if isinstance(b, ex.Const):
        if a.is_zero and b.value < 0:
            raise ParseError("zero raised to a negative power", *_position(tree[1]))
        return ex.power(a, b.value)
    return ex.exp(ex.mul(b, ex.log(a)))


def _position(tree):
    if tree[0] in ("name",):
        return tree[2], tree[3]
    if tree[0] == "call":
        return tree[3], tree[4]
    return None, None


def parse(text, context=None, line=1, column=1):
    """Parse text into a canonical expression.

    Args:
        text: expression in the grammar above
        context: ParseContext; None accepts every identifier as a symbol
        line, column: position of text inside a larger file
    Returns:
        canonical Expr
    """
    if context is None:
        context = ParseContext.open()
    return build(parse_tree(text, line, column), context)
