"""Polyvector fields Q[x_1..x_n][eta_1..eta_n] and the dGBV operators.

An element is stored as a map from strictly increasing index tuples ``J``
(0-based variable indices) to nonzero :class:`Poly` coefficients; the key
``J`` stands for eta_{j_1} ... eta_{j_k}.  The cohomological degree of such a
component is ``-len(J)``.

Conventions fixed here:

* the odd derivative is a left derivative,
  d/d eta_i (eta_J) = (-1)^(pos-1) eta_{J minus i}, pos = 1-based position of i;
* delta_S = sum_i (dS/dx_i) d/d eta_i and Delta = sum_i d/dx_i d/d eta_i.

With these, delta_S(eta_i) = dS/dx_i and Delta(sum q_i eta_i) = sum dq_i/dx_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Optional, Sequence, Tuple

from .poly import (DEFAULT_ORDER, MonomialOrder, Poly, PolyParseError, _Parser,
                   _PolyAlgebra, format_poly)

Key = Tuple[int, ...]


def merge_sign(j: Key, k: Key) -> int:
    """Sign of eta_J * eta_K = sign * eta_{J u K}; 0 when J and K meet."""
    inversions = 0
    ks = set(k)
    for a in j:
        if a in ks:
            return 0
        inversions += sum(1 for b in k if b < a)
    return -1 if inversions & 1 else 1


class PolyVector:
    """Immutable element of the polyvector algebra in ``nvars`` variables."""

    __slots__ = ("nvars", "comps", "_hash")

    def __init__(self, comps: Optional[Dict[Key, Poly]] = None, nvars: int = 0, *,
                 _trusted: bool = False):
        self.nvars = nvars
        if _trusted:
            self.comps = comps
        else:
            out: Dict[Key, Poly] = {}
            for key, p in (comps or {}).items():
                key = tuple(key)
                if list(key) != sorted(set(key)):
                    raise ValueError(f"eta index set {key} must be strictly increasing")
                if key and not (0 <= key[0] and key[-1] < nvars):
                    raise ValueError(f"eta index out of range in {key}")
                if p.nvars != nvars:
                    raise ValueError("coefficient has wrong variable count")
                if p:
                    out[key] = out[key] + p if key in out else p
            self.comps = {k: v for k, v in out.items() if v}
        self._hash = None

    @classmethod
    def zero(cls, nvars: int) -> "PolyVector":
        return cls({}, nvars, _trusted=True)

    @classmethod
    def from_poly(cls, p: Poly) -> "PolyVector":
        return cls({(): p} if p else {}, p.nvars, _trusted=True)

    @classmethod
    def eta(cls, indices: Sequence[int], nvars: int, coeff: Optional[Poly] = None) -> "PolyVector":
        """The element ``coeff * eta_{i_1} ... eta_{i_k}`` in the given order."""
        coeff = Poly.const(1, nvars) if coeff is None else coeff
        out = cls.from_poly(coeff)
        for i in indices:
            out = out * cls({(i,): Poly.const(1, nvars)}, nvars)
        return out

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self):
        return bool(self.comps)

    def __iter__(self) -> Iterator[Tuple[Key, Poly]]:
        return iter(self.comps.items())

    def component(self, key: Key) -> Poly:
        return self.comps.get(tuple(key), Poly.zero(self.nvars))

    def degrees(self):
        return {-len(k) for k in self.comps}

    def degree(self) -> int:
        """Cohomological degree; raises for non-homogeneous elements."""
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError(f"element is not degree-homogeneous (degrees {sorted(degs)})")
        return degs.pop() if degs else 0

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def poly_part(self) -> Poly:
        return self.component(())

    # arithmetic
    def _lift(self, other) -> "PolyVector":
        if isinstance(other, PolyVector):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, Poly):
            return PolyVector.from_poly(other)
        return PolyVector.from_poly(Poly.const(other, self.nvars))

    def __add__(self, other) -> "PolyVector":
        other = self._lift(other)
        out = dict(self.comps)
        for k, p in other.comps.items():
            s = out[k] + p if k in out else p
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return PolyVector(out, self.nvars, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "PolyVector":
        return PolyVector({k: -p for k, p in self.comps.items()}, self.nvars, _trusted=True)

    def __sub__(self, other) -> "PolyVector":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "PolyVector":
        return self._lift(other) - self

    def scale(self, c) -> "PolyVector":
        if isinstance(c, Poly):
            if not c:
                return PolyVector.zero(self.nvars)
            comps = {k: p * c for k, p in self.comps.items()}
            return PolyVector({k: p for k, p in comps.items() if p}, self.nvars, _trusted=True)
        c = Fraction(c)
        if not c:
            return PolyVector.zero(self.nvars)
        return PolyVector({k: p.scale(c) for k, p in self.comps.items()}, self.nvars, _trusted=True)

    def __mul__(self, other) -> "PolyVector":
        if not isinstance(other, (PolyVector, Poly)):
            return self.scale(other)
        other = self._lift(other)
        out: Dict[Key, Poly] = {}
        for j, p in self.comps.items():
            for k, q in other.comps.items():
                sign = merge_sign(j, k)
                if not sign:
                    continue
                key = tuple(sorted(j + k))
                term = p * q if sign > 0 else -(p * q)
                out[key] = out[key] + term if key in out else term
        return PolyVector({k: v for k, v in out.items() if v}, self.nvars, _trusted=True)

    def __rmul__(self, other) -> "PolyVector":
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, PolyVector):
            return self.nvars == other.nvars and self.comps == other.comps
        if isinstance(other, Poly):
            return self == PolyVector.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.comps.items())))
        return self._hash

    def __repr__(self):
        return f"PolyVector({format_polyvector(self)!r})"


def pv_mul(a: PolyVector, b: PolyVector) -> PolyVector:
    return a * b


def odd_partial(a: PolyVector, i: int) -> PolyVector:
    """Left derivative with respect to eta_i."""
    if not 0 <= i < a.nvars:
        raise IndexError(f"variable index {i} out of range")
    out = {}
    for key, p in a.comps.items():
        if i in key:
            pos = key.index(i)
            out[key[:pos] + key[pos + 1:]] = -p if pos & 1 else p
    return PolyVector(out, a.nvars, _trusted=True)


def apply_delta_S(S: Poly, a: PolyVector, partials: Optional[Sequence[Poly]] = None) -> PolyVector:
    """delta_S(a) = sum_i (dS/dx_i) d/d eta_i a."""
    if partials is None:
        partials = [S.partial(i) for i in range(S.nvars)]
    out = PolyVector.zero(a.nvars)
    for i, dS in enumerate(partials):
        if dS:
            out = out + odd_partial(a, i).scale(dS)
    return out


def apply_Delta(a: PolyVector) -> PolyVector:
    """Divergence operator sum_i d/dx_i d/d eta_i."""
    out = PolyVector.zero(a.nvars)
    for i in range(a.nvars):
        d = odd_partial(a, i)
        if d:
            out = out + PolyVector({k: p.partial(i) for k, p in d.comps.items()}, a.nvars)
    return out


def bv_bracket(a: PolyVector, b: PolyVector) -> PolyVector:
    """l_2(a, b) = Delta(ab) - Delta(a) b - (-1)^|a| a Delta(b) for homogeneous a, b."""
    if not a.is_homogeneous() or not b.is_homogeneous():
        raise ValueError("bv_bracket needs degree-homogeneous arguments")
    sign = -1 if a.degree() & 1 else 1
    return apply_Delta(a * b) - apply_Delta(a) * b - (a * apply_Delta(b)).scale(sign)


# ------------------------------------------------------------------ charges

@dataclass(frozen=True)
class ChargeSpec:
    """Integer charge per variable; eta_i carries minus the charge of x_i."""

    charges: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "charges", tuple(int(c) for c in self.charges))
        if any(c == 0 for c in self.charges):
            raise ValueError("charges must be nonzero integers")

    def monomial_charge(self, exps) -> int:
        return sum(c * e for c, e in zip(self.charges, exps))

    def term_charge(self, exps, key: Key = ()) -> int:
        return self.monomial_charge(exps) - sum(self.charges[j] for j in key)


class ChargeError(ValueError):
    def __init__(self, message, terms=()):
        super().__init__(message)
        self.terms = list(terms)


def charge_check(a, spec: ChargeSpec) -> int:
    """Common charge of every term of ``a`` (a Poly or PolyVector).

    The zero element has charge 0 by convention.
    """
    if isinstance(a, Poly):
        a = PolyVector.from_poly(a)
    if len(spec.charges) != a.nvars:
        raise ValueError("charge spec length does not match variable count")
    seen: Dict[int, Tuple[Key, tuple]] = {}
    for key, p in a.comps.items():
        for m, _ in p:
            seen.setdefault(spec.term_charge(m, key), (key, m))
    if len(seen) > 1:
        raise ChargeError(f"not charge-homogeneous: charges {sorted(seen)}",
                          [(ch, t) for ch, t in sorted(seen.items())])
    return next(iter(seen)) if seen else 0


# ------------------------------------------------------------- text format

def format_polyvector(a: PolyVector, names: Optional[Sequence[str]] = None,
                      order: MonomialOrder = DEFAULT_ORDER) -> str:
    """``<poly> * e[i,j,...]`` terms with 1-based indices; ``e[]`` omitted."""
    if not a.comps:
        return "0"
    pieces = []
    for key in sorted(a.comps, key=lambda k: (len(k), k)):
        body = format_poly(a.comps[key], names, order)
        if not key:
            pieces.append(body)
            continue
        eta = "e[" + ",".join(str(j + 1) for j in key) + "]"
        if body == "1":
            pieces.append(eta)
        elif body == "-1":
            pieces.append("-" + eta)
        elif len(a.comps[key]) == 1 and " " not in body:
            pieces.append(f"{body}*{eta}")
        else:
            pieces.append(f"({body})*{eta}")
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


class _PolyVectorAlgebra(_PolyAlgebra):
    def const(self, c):
        return PolyVector.from_poly(Poly.const(c, self.n))

    def var(self, name, pos):
        return PolyVector.from_poly(super().var(name, pos))

    def pow(self, a, k):
        out = PolyVector.from_poly(Poly.const(1, self.n))
        for _ in range(k):
            out = out * a
        return out

    def wants_basis_symbol(self, name):
        return name == "e"

    def basis_symbol(self, idx, pos):
        if list(idx) != sorted(set(idx)) or any(not 1 <= i <= self.n for i in idx):
            raise PolyParseError("eta indices must be strictly increasing and in 1..n", pos)
        return PolyVector({tuple(i - 1 for i in idx): Poly.const(1, self.n)}, self.n)


def parse_polyvector(text: str, names: Sequence[str]) -> PolyVector:
    return _Parser(text, _PolyVectorAlgebra(names)).parse()
