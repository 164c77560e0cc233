"""Exact multivariate Laurent polynomials with integer coefficients.

Terms are kept in a normalized dict keyed by monomials; a monomial is a
sorted tuple of (variable, exponent) pairs with nonzero exponents.  No
floating point anywhere: state sums and normalizations stay bit-exact.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Tuple

Monomial = Tuple[Tuple[str, int], ...]


def _mono(vars_: Mapping[str, int] | Iterable[Tuple[str, int]]) -> Monomial:
    pairs = vars_.items() if isinstance(vars_, Mapping) else vars_
    return tuple(sorted((v, e) for v, e in pairs if e != 0))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    acc: Dict[str, int] = dict(a)
    for v, e in b:
        n = acc.get(v, 0) + e
        if n == 0:
            acc.pop(v, None)
        else:
            acc[v] = n
    return tuple(sorted(acc.items()))


class Laurent:
    """Immutable Laurent polynomial in any number of named variables."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        clean = {m: c for m, c in (terms or {}).items() if c != 0}
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "Laurent":
        return cls()

    @classmethod
    def const(cls, n: int) -> "Laurent":
        return cls({(): n})

    @classmethod
    def var(cls, name: str, exp: int = 1, coeff: int = 1) -> "Laurent":
        return cls({_mono({name: exp}): coeff})

    @classmethod
    def term(cls, coeff: int, vars_: Mapping[str, int]) -> "Laurent":
        return cls({_mono(vars_): coeff})

    # ---- queries ------------------------------------------------------

    def terms(self) -> Dict[Monomial, int]:
        return dict(self._terms)

    def variables(self) -> Tuple[str, ...]:
        seen = set()
        for m in self._terms:
            for v, _ in m:
                seen.add(v)
        return tuple(sorted(seen))

    def coeff(self, vars_: Mapping[str, int]) -> int:
        return self._terms.get(_mono(vars_), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def exponents_of(self, name: str) -> Tuple[int, ...]:
        out = []
        for m in self._terms:
            out.append(dict(m).get(name, 0))
        return tuple(sorted(set(out)))

    # ---- arithmetic ---------------------------------------------------

    def __add__(self, other: "Laurent") -> "Laurent":
        if not isinstance(other, Laurent):
            return NotImplemented
        acc = dict(self._terms)
        for m, c in other._terms.items():
            n = acc.get(m, 0) + c
            if n == 0:
                acc.pop(m, None)
            else:
                acc[m] = n
        return Laurent(acc)

    def __neg__(self) -> "Laurent":
        return Laurent({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other: "Laurent") -> "Laurent":
        if isinstance(other, int):
            return Laurent({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, Laurent):
            return NotImplemented
        acc: Dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                n = acc.get(m, 0) + c1 * c2
                if n == 0:
                    acc.pop(m, None)
                else:
                    acc[m] = n
        return Laurent(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Laurent":
        if n < 0:
            raise ValueError("negative powers only via explicit inverse variables")
        out = Laurent.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Laurent) and self._terms == other._terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(tuple(sorted(self._terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self._terms)

    # ---- substitutions ------------------------------------------------

    def invert_var(self, name: str) -> "Laurent":
        """Substitute name -> name^-1 (mirror symmetry of brackets)."""
        acc: Dict[Monomial, int] = {}
        for m, c in self._terms.items():
            d = dict(m)
            if name in d:
                d[name] = -d[name]
            acc[_mono(d)] = acc.get(_mono(d), 0) + c
        return Laurent(acc)

    def map_var_exponent(self, name: str, new_name: str, divisor: int) -> "Laurent":
        """Substitute name^(k*divisor) -> new_name^k.

        Every exponent of `name` must be divisible by `divisor`; raises
        ValueError otherwise.  Used for the t = A^-4 style rewriting.
        """
        acc: Dict[Monomial, int] = {}
        for m, c in self._terms.items():
            d = dict(m)
            e = d.pop(name, 0)
            if e % divisor != 0:
                raise ValueError(f"exponent {e} of {name} not divisible by {divisor}")
            k = e // divisor
            if k != 0:
                d[new_name] = d.get(new_name, 0) + k
            mm = _mono(d)
            acc[mm] = acc.get(mm, 0) + c
        return Laurent(acc)

    # ---- text form ----------------------------------------------------

    def text(self) -> str:
        """Canonical text form, e.g. '1*t^1 + 1*t^3 - 1*t^4'."""
        if not self._terms:
            return "0"
        allvars = self.variables()

        def key(item):
            m, _ = item
            d = dict(m)
            return tuple(d.get(v, 0) for v in allvars)

        parts = []
        for i, (m, c) in enumerate(sorted(self._terms.items(), key=key)):
            if m:
                body = "*".join(f"{v}^{e}" for v, e in m)
                core = f"{abs(c)}*{body}"
            else:
                core = f"{abs(c)}"
            if i == 0:
                parts.append(core if c > 0 else f"-{core}")
            else:
                parts.append(("+ " if c > 0 else "- ") + core)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Laurent({self.text()})"


A = Laurent.var("A")
A_INV = Laurent.var("A", -1)

#: Value of a null-homotopic loop in every bracket state sum.
DELTA = Laurent.term(-1, {"A": 2}) + Laurent.term(-1, {"A": -2})

#: -A^3 and -A^-3, the curl factors.
MINUS_A3 = Laurent.term(-1, {"A": 3})
MINUS_A_INV3 = Laurent.term(-1, {"A": -3})


def zvar(p: int, q: int | None = None) -> str:
    """Variable name of an essential loop: z for annular, z[p,q] for toroidal."""
    if q is None:
        return "z"
    return f"z[{p},{q}]"
