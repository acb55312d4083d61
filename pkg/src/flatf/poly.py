"""Sparse multivariate polynomials over the rationals.

A :class:`Poly` is a map from exponent tuples to nonzero :class:`Fraction`
coefficients.  Zero coefficients are never stored, so two polynomials are
equal exactly when their term maps are equal.  Nothing here depends on the
coefficient field being Q except the use of ``Fraction``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, Optional, Sequence, Tuple

Monomial = Tuple[int, ...]


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """Return True if ``a`` divides ``b``."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


class MonomialOrder:
    """A term order given by a sort key on exponent tuples.

    ``precedence`` lists variable indices from most to least significant;
    the default is the input variable order (x_1 > x_2 > ... > x_n).
    Keys are flat integer tuples; larger keys mean larger monomials.
    """

    KINDS = ("degrevlex", "deglex", "wdegrevlex")

    def __init__(self, kind: str = "degrevlex", precedence: Optional[Sequence[int]] = None,
                 weights: Optional[Sequence[int]] = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown monomial order {kind!r}")
        if kind == "wdegrevlex":
            if weights is None or any(w <= 0 for w in weights):
                raise ValueError("wdegrevlex needs positive integer weights")
        self.kind = kind
        self.precedence = None if precedence is None else tuple(precedence)
        self.weights = None if weights is None else tuple(weights)
        if self.precedence is not None and sorted(self.precedence) != list(range(len(self.precedence))):
            raise ValueError("precedence must be a permutation of variable indices")
        self.key = lru_cache(maxsize=None)(self._make_key())

    def _make_key(self):
        perm = self.precedence
        weights = self.weights
        if self.kind == "deglex":
            def key(e):
                p = e if perm is None else tuple(e[i] for i in perm)
                return (sum(e),) + p
        else:
            def key(e):
                p = e if perm is None else tuple(e[i] for i in perm)
                deg = sum(e) if weights is None else sum(w * x for w, x in zip(weights, e))
                return (deg,) + tuple(-x for x in reversed(p))
        return key

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.precedence is not None:
            d["precedence"] = list(self.precedence)
        if self.weights is not None:
            d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MonomialOrder":
        return cls(d.get("kind", "degrevlex"), d.get("precedence"), d.get("weights"))

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self.kind, self.precedence, self.weights))

    def __repr__(self):
        return f"MonomialOrder({self.kind!r}, precedence={self.precedence}, weights={self.weights})"


DEFAULT_ORDER = MonomialOrder()


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient {c!r}")


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, terms: Optional[Dict[Monomial, Fraction]] = None, nvars: int = 0, *,
                 _trusted: bool = False):
        self.nvars = nvars
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            for m, c in (terms or {}).items():
                m = tuple(m)
                if len(m) != nvars:
                    raise ValueError(f"monomial {m} has wrong length for {nvars} variables")
                if any(x < 0 for x in m):
                    raise ValueError(f"negative exponent in {m}")
                c = _coerce(c)
                if c:
                    clean[m] = clean.get(m, 0) + c
            self.terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls({}, nvars, _trusted=True)

    @classmethod
    def const(cls, c, nvars: int) -> "Poly":
        c = _coerce(c)
        return cls({(0,) * nvars: c} if c else {}, nvars, _trusted=True)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): Fraction(1)}, nvars, _trusted=True)

    @classmethod
    def monomial(cls, exps: Monomial, c=1) -> "Poly":
        return cls({tuple(exps): _coerce(c)}, len(exps))

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.terms.items())

    def coeff(self, m: Monomial) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def sorted_terms(self, order: MonomialOrder = DEFAULT_ORDER):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_monomial(self, order: MonomialOrder = DEFAULT_ORDER) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=order.key)

    def leading_coeff(self, order: MonomialOrder = DEFAULT_ORDER) -> Fraction:
        return self.terms[self.leading_monomial(order)]

    # arithmetic
    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(other, self.nvars)

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for m, c in b.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(out, self.nvars, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, self.nvars, _trusted=True)

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def scale(self, c) -> "Poly":
        c = _coerce(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly({m: c * v for m, v in self.terms.items()}, self.nvars, _trusted=True)

    def mul_term(self, mono: Monomial, c) -> "Poly":
        """Multiply by the single term ``c * x^mono``."""
        c = _coerce(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly({mono_mul(m, mono): c * v for m, v in self.terms.items()},
                    self.nvars, _trusted=True)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly({m: c for m, c in out.items() if c}, self.nvars, _trusted=True)

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def partial(self, i: int) -> "Poly":
        """Formal partial derivative with respect to variable ``i``."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        out = {}
        for m, c in self.terms.items():
            k = m[i]
            if k:
                e = list(m)
                e[i] = k - 1
                out[tuple(e)] = c * k
        return Poly(out, self.nvars, _trusted=True)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(other, self.nvars).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def poly_partial(p: Poly, i: int) -> Poly:
    return p.partial(i)


# ---------------------------------------------------------------- printing

def format_fraction(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _default_names(n: int):
    return [f"x{i + 1}" for i in range(n)]


def format_poly(p: Poly, names: Optional[Sequence[str]] = None,
                order: MonomialOrder = DEFAULT_ORDER) -> str:
    """Canonical text form, terms in descending ``order``."""
    if not p.terms:
        return "0"
    names = list(names) if names is not None else _default_names(p.nvars)
    pieces = []
    for m, c in p.sorted_terms(order):
        factors = []
        for name, k in zip(names, m):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not factors:
            body = format_fraction(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = format_fraction(a) + "*" + "*".join(factors)
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# ----------------------------------------------------------------- parsing

class PolyParseError(ValueError):
    """Raised for malformed expressions; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text) and not text[pos:].isspace():
        m = _TOKEN_RE.match(text, pos)
        if m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*^/()[],":
                raise PolyParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser; ``algebra`` supplies the constructors.

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ['^' INT]
    atom   := NUMBER ['/' NUMBER] | NAME | '(' expr ')' | '-' factor
    """

    def __init__(self, text, algebra):
        self.tokens = _tokenize(text)
        self.i = 0
        self.alg = algebra

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            raise PolyParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise PolyParseError(f"unexpected token {tok[1]!r}", tok[2])
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = self.alg.add(value, rhs) if op == "+" else self.alg.add(value, self.alg.neg(rhs))
        return value

    def term(self):
        value = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            value = self.alg.mul(value, self.factor())
        return value

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return self.alg.neg(self.factor())
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise PolyParseError("exponent must be a non-negative integer literal", tok[2])
            base = self.alg.pow(base, int(tok[1]))
        nxt = self.peek()
        if nxt[0] in ("num", "name") or (nxt[0] == "op" and nxt[1] == "("):
            raise PolyParseError("implicit multiplication is not allowed", nxt[2])
        return base

    def atom(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            num = int(value)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                den_tok = self.take()
                if den_tok[0] != "num":
                    raise PolyParseError("denominator must be an integer literal", den_tok[2])
                den = int(den_tok[1])
                if den == 0:
                    raise PolyParseError("zero denominator", den_tok[2])
                return self.alg.const(Fraction(num, den))
            return self.alg.const(Fraction(num))
        if kind == "name":
            if self.alg.wants_basis_symbol(value) and self.peek()[1] == "[":
                return self.basis_symbol(pos)
            return self.alg.var(value, pos)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise PolyParseError(f"unexpected {value or 'end of input'!r}", pos)

    def basis_symbol(self, pos):
        self.expect("[")
        idx = []
        if self.peek()[1] != "]":
            while True:
                tok = self.take()
                if tok[0] != "num":
                    raise PolyParseError("expected an index", tok[2])
                idx.append(int(tok[1]))
                if self.peek()[1] == ",":
                    self.take()
                    continue
                break
        self.expect("]")
        return self.alg.basis_symbol(idx, pos)


class _PolyAlgebra:
    def __init__(self, names):
        self.names = list(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.n = len(self.names)
        if len(self.index) != self.n:
            raise ValueError("duplicate variable names")

    def const(self, c):
        return Poly.const(c, self.n)

    def var(self, name, pos):
        if name not in self.index:
            raise PolyParseError(f"unknown variable {name!r}", pos)
        return Poly.var(self.index[name], self.n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, k):
        return a ** k

    def wants_basis_symbol(self, name):
        return False


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    """Parse ``text`` as a polynomial in the variables ``names``."""
    return _Parser(text, _PolyAlgebra(names)).parse()

