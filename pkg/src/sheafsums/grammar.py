"""Text grammar for sheaf expressions.

    expr     := product ( '|>' 'push' '(' var {',' var} ')' )*
    product  := atom { ('(*)' | '(x)') atom }      # tensor / external product
    atom     := 'AS' '(' psi ',' ratexpr ')'
              | 'K' '(' chi ',' ratexpr ')' | 'Kummer' (...)
              | 'Const' [ '(' int ')' ]
              | 'FT' '(' expr [',' psi] ')'
              | 'Dual' '(' expr ')' | 'Conj' '(' expr ')'
              | 'Shift' '(' expr ',' int ')'
              | 'Twist' '(' expr ',' rational ')'
              | '(' expr ')'
    psi      := 'psi' [ '[' int ']' ]              # twist a, default 1
    chi      := 'chi' [ '[' int ']' ]              # exponent e, default 1
    ratexpr  := usual +,-,*,/,^ arithmetic over integers and x, x1, x2, ...

Tensor factors are widened to a common ambient (the largest variable index in
the product); `x` is a synonym for `x1`. Errors carry character spans and a
caret diagnostic.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .expr import AS, Conj, Const, Dual, ExternalProduct, Fourier, Kummer, PushCompact, Shift, Tensor, Twist
from .rational import MPoly, RationalMap

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<mul3>\(\*\))|(?P<ext3>\(x\))|(?P<pipe>\|>)|(?P<num>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),\[\]]))"
)


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            tail = source[pos:].lstrip()
            if not tail:
                break
            raise ParseError(f"unexpected character {tail[0]!r}", source, (pos, pos + 1))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind), m.end(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(source), len(source)))
    return tokens


class _Parser:
    def __init__(self, source, p):
        self.source = source
        self.p = p
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, s, e = self.peek()
        if text != value:
            raise ParseError(f"expected {value!r}", self.source, (s, max(e, s + 1)))
        return self.next()

    def fail(self, msg):
        _, _, s, e = self.peek()
        raise ParseError(msg, self.source, (s, max(e, s + 1)))

    # grammar ---------------------------------------------------------------

    def parse(self):
        node = self.parse_expr()
        kind, text, s, e = self.peek()
        if kind != "eof":
            raise ParseError(f"trailing input {text!r}", self.source, (s, e))
        return node

    def parse_expr(self):
        node = self.parse_product()
        while self.peek()[0] == "pipe":
            self.next()
            name = self.next()
            if name[1] != "push":
                raise ParseError("only 'push' may follow '|>'", self.source, (name[2], name[3]))
            self.expect("(")
            coords = [self.parse_var_index()]
            while self.peek()[1] == ",":
                self.next()
                coords.append(self.parse_var_index())
            self.expect(")")
            for c in coords:
                if c >= node.ambient:
                    self.fail(f"push coordinate x{c + 1} outside ambient A^{node.ambient}")
            node = PushCompact(node, tuple(coords))
        return node

    def parse_product(self):
        factors = [(self.parse_atom(), None)]
        while self.peek()[0] in ("mul3", "ext3"):
            op = self.next()[0]
            factors.append((self.parse_atom(), op))
        node = factors[0][0]
        tensor_group = [node]
        result = None

        def close_group(group):
            width = max(a.ambient for a in group)
            group = [_widen(a, width) for a in group]
            out = group[0]
            for nxt in group[1:]:
                out = Tensor(out, nxt)
            return out

        for atom, op in factors[1:]:
            if op == "mul3":
                tensor_group.append(atom)
            else:
                left = close_group(tensor_group) if result is None else ExternalProduct(result, close_group(tensor_group))
                result = left
                tensor_group = [atom]
        if result is None:
            return close_group(tensor_group)
        return ExternalProduct(result, close_group(tensor_group))

    def parse_atom(self):
        kind, text, s, e = self.peek()
        if text == "(":
            self.next()
            node = self.parse_expr()
            self.expect(")")
            return node
        if kind != "name":
            self.fail("expected an expression")
        self.next()
        if text == "AS":
            self.expect("(")
            a = self.parse_char_ref("psi")
            self.expect(",")
            f = self.parse_ratexpr()
            self.expect(")")
            return AS(a, f)
        if text in ("K", "Kummer"):
            self.expect("(")
            ee = self.parse_char_ref("chi")
            self.expect(",")
            g = self.parse_ratexpr()
            self.expect(")")
            return Kummer(ee, g)
        if text == "Const":
            n = 1
            if self.peek()[1] == "(":
                self.next()
                n = self.parse_int()
                self.expect(")")
            return Const(self.p, n)
        if text == "FT":
            self.expect("(")
            child = self.parse_expr()
            a = 1
            if self.peek()[1] == ",":
                self.next()
                a = self.parse_char_ref("psi")
            self.expect(")")
            return Fourier(child, a)
        if text == "Dual":
            self.expect("(")
            child = self.parse_expr()
            self.expect(")")
            return Dual(child)
        if text == "Conj":
            self.expect("(")
            child = self.parse_expr()
            self.expect(")")
            return Conj(child)
        if text == "Shift":
            self.expect("(")
            child = self.parse_expr()
            self.expect(",")
            h = self.parse_int(signed=True)
            self.expect(")")
            return Shift(child, h)
        if text == "Twist":
            self.expect("(")
            child = self.parse_expr()
            self.expect(",")
            w = self.parse_fraction()
            self.expect(")")
            return Twist(child, w)
        raise ParseError(f"unknown constructor {text!r}", self.source, (s, e))

    def parse_char_ref(self, expected_name):
        kind, text, s, e = self.peek()
        if kind != "name" or text != expected_name:
            raise ParseError(f"expected {expected_name}", self.source, (s, max(e, s + 1)))
        self.next()
        val = 1
        if self.peek()[1] == "[":
            self.next()
            val = self.parse_int(signed=True)
            self.expect("]")
        return val

    def parse_var_index(self):
        kind, text, s, e = self.peek()
        m = re.fullmatch(r"x(\d*)", text) if kind == "name" else None
        if not m:
            raise ParseError("expected a variable like x or x2", self.source, (s, max(e, s + 1)))
        self.next()
        return (int(m.group(1)) - 1) if m.group(1) else 0

    def parse_int(self, signed=False):
        sign = 1
        if signed and self.peek()[1] == "-":
            self.next()
            sign = -1
        kind, text, s, e = self.peek()
        if kind != "num":
            raise ParseError("expected an integer", self.source, (s, max(e, s + 1)))
        self.next()
        return sign * int(text)

    def parse_fraction(self):
        num = self.parse_int(signed=True)
        if self.peek()[1] == "/":
            self.next()
            den = self.parse_int()
            return Fraction(num, den)
        return Fraction(num)

    # rational-map sub-grammar ------------------------------------------------

    def parse_ratexpr(self):
        return self.parse_rat_sum(set())

    def parse_rat_sum(self, seen):
        left = self.parse_rat_term(seen)
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            right = self.parse_rat_term(seen)
            left, right = _match_arity(left, right)
            left = left + right if op == "+" else left - right
        return left

    def parse_rat_term(self, seen):
        left = self.parse_rat_factor(seen)
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            right = self.parse_rat_factor(seen)
            left, right = _match_arity(left, right)
            left = left * right if op == "*" else left / right
        return left

    def parse_rat_factor(self, seen):
        if self.peek()[1] == "-":
            self.next()
            return -self.parse_rat_factor(seen)
        base = self.parse_rat_base(seen)
        if self.peek()[1] == "^":
            self.next()
            e = self.parse_int()
            return base ** e
        return base

    def parse_rat_base(self, seen):
        kind, text, s, e = self.peek()
        if text == "(":
            self.next()
            inner = self.parse_rat_sum(seen)
            self.expect(")")
            return inner
        if kind == "num":
            self.next()
            return RationalMap(MPoly.const(self.p, 1, int(text)))
        if kind == "name":
            m = re.fullmatch(r"x(\d*)", text)
            if m:
                self.next()
                idx = (int(m.group(1)) - 1) if m.group(1) else 0
                nv = idx + 1
                return RationalMap(MPoly.var(self.p, nv, idx))
        raise ParseError("expected a polynomial term", self.source, (s, max(e, s + 1)))


def _match_arity(a, b):
    nv = max(a.nvars, b.nvars)
    return a.widen(nv), b.widen(nv)


def _widen(node, nvars):
    if node.ambient == nvars:
        return node
    if isinstance(node, AS):
        return AS(node.a, node.f.widen(nvars))
    if isinstance(node, Kummer):
        return Kummer(node.e, node.g.widen(nvars))
    if isinstance(node, Const):
        return Const(node.p, nvars)
    if isinstance(node, Tensor):
        return Tensor(_widen(node.left, nvars), _widen(node.right, nvars))
    if isinstance(node, Dual):
        return Dual(_widen(node.child, nvars))
    if isinstance(node, Conj):
        return Conj(_widen(node.child, nvars))
    if isinstance(node, Shift):
        return Shift(_widen(node.child, nvars), node.h)
    if isinstance(node, Twist):
        return Twist(_widen(node.child, nvars), node.w)
    raise ParseError(
        f"cannot widen {type(node).__name__} from A^{node.ambient} to A^{nvars}; "
        "give its maps the full variable set explicitly",
        node.canonical(),
        (0, 1),
    )


def parse_expr(source: str, p: int):
    """Parse an expression over F_p. Raises ParseError with a source span."""
    return _Parser(source, p).parse()
