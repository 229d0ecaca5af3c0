"""
Semifields, the adjoined element o, and natural-number scaling.

A semifield here is an operation table (add, mul, inv, one) on some set of
python values.  Three are built in:

    RATIONAL   positive rationals, exact ``Fraction`` arithmetic
    TROPICAL   integers with add = min, mul = +
    ONE        the one-element semifield {1}

Elements of K^! are represented as ``Val(sf, x)`` or the singleton ``CIRC``.
Bulk code (semivectors, operators) works on the raw values directly and
uses ``None``-free sparse dicts in which o is simply an absent key.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable


class DomainMismatch(ValueError):
    pass


class Semifield:
    """Operation table of a semifield.  Subclasses fill in the arithmetic."""

    tag = "generic"
    name = "generic"

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    @property
    def one(self):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = self.one
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def nat_scale(self, c: int, a):
        """c-fold sum a + ... + a of an element of K (c >= 1)."""
        if c < 1:
            raise ValueError("nat_scale on K needs c >= 1; c = 0 gives o")
        result = None
        base = a
        while c:
            if c & 1:
                result = base if result is None else self.add(result, base)
            base = self.add(base, base)
            c >>= 1
        return result

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, x) -> str:
        return str(x)

    def random_element(self, rng: random.Random):
        raise NotImplementedError

    def to_json(self, x):
        return self.format(x)

    def from_json(self, obj):
        return self.parse(str(obj))

    def __repr__(self):
        return f"<Semifield {self.name}>"


class PosRational(Semifield):
    tag = "PosRational"
    name = "rational"

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a

    @property
    def one(self):
        return Fraction(1)

    def contains(self, x):
        return isinstance(x, Fraction) and x > 0

    def pow(self, a, n):
        return a**n

    def nat_scale(self, c, a):
        if c < 1:
            raise ValueError("nat_scale on K needs c >= 1")
        return c * a

    def parse(self, text):
        x = Fraction(text.strip())
        if x <= 0:
            raise ValueError(f"not a positive rational: {text!r}")
        return x

    def format(self, x):
        return str(x)

    def random_element(self, rng):
        return Fraction(rng.randint(1, 9), rng.randint(1, 9))


class TropicalInt(Semifield):
    """(Z, min, +)."""

    tag = "TropicalInt"
    name = "tropical"

    def add(self, a, b):
        return a if a <= b else b

    def mul(self, a, b):
        return a + b

    def inv(self, a):
        return -a

    @property
    def one(self):
        return 0

    def contains(self, x):
        return isinstance(x, int) and not isinstance(x, bool)

    def pow(self, a, n):
        return a * n

    def nat_scale(self, c, a):
        if c < 1:
            raise ValueError("nat_scale on K needs c >= 1")
        return a

    def parse(self, text):
        return int(text.strip())

    def random_element(self, rng):
        return rng.randint(-6, 6)

    def to_json(self, x):
        return x

    def from_json(self, obj):
        if isinstance(obj, bool) or not isinstance(obj, (int, str)):
            raise ValueError(f"bad tropical element {obj!r}")
        return int(obj)


class OneElement(Semifield):
    tag = "OneElement"
    name = "one"

    def add(self, a, b):
        return 1

    def mul(self, a, b):
        return 1

    def inv(self, a):
        return 1

    @property
    def one(self):
        return 1

    def contains(self, x):
        return x == 1 and not isinstance(x, bool)

    def pow(self, a, n):
        return 1

    def nat_scale(self, c, a):
        if c < 1:
            raise ValueError("nat_scale on K needs c >= 1")
        return 1

    def parse(self, text):
        if text.strip() != "1":
            raise ValueError(f"the one-element semifield only has 1, got {text!r}")
        return 1

    def random_element(self, rng):
        return 1

    def to_json(self, x):
        return 1

    def from_json(self, obj):
        if obj not in (1, "1"):
            raise ValueError(f"bad element {obj!r} for the one-element semifield")
        return 1


RATIONAL = PosRational()
TROPICAL = TropicalInt()
ONE = OneElement()

SEMIFIELDS = {sf.name: sf for sf in (RATIONAL, TROPICAL, ONE)}


def get_semifield(name) -> Semifield:
    if isinstance(name, Semifield):
        return name
    key = str(name).lower()
    aliases = {"posrational": "rational", "q": "rational", "tropicalint": "tropical",
               "z": "tropical", "oneelement": "one", "1": "one"}
    key = aliases.get(key, key)
    try:
        return SEMIFIELDS[key]
    except KeyError:
        raise ValueError(f"unknown semifield {name!r}; choose from {sorted(SEMIFIELDS)}")


# ---------------------------------------------------------------------------
# K^! = K + {o}

class _Circ:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "o"

    def __reduce__(self):
        return (_Circ, ())


CIRC = _Circ()
CIRC_TEXT = "o"


@dataclass(frozen=True)
class Val:
    sf: Semifield
    value: Any

    def __post_init__(self):
        if not self.sf.contains(self.value):
            raise ValueError(f"{self.value!r} is not an element of {self.sf.name}")

    def __repr__(self):
        return f"Val({self.sf.format(self.value)})"


def _check_same(a, b):
    if isinstance(a, Val) and isinstance(b, Val) and a.sf is not b.sf:
        raise DomainMismatch(f"operands live in {a.sf.name} and {b.sf.name}")


def ext_add(a, b):
    _check_same(a, b)
    if a is CIRC:
        return b
    if b is CIRC:
        return a
    return Val(a.sf, a.sf.add(a.value, b.value))


def ext_mul(a, b):
    _check_same(a, b)
    if a is CIRC or b is CIRC:
        return CIRC
    return Val(a.sf, a.sf.mul(a.value, b.value))


def nat_scale(c: int, k):
    if c < 0:
        raise ValueError("scaling coefficient must be a natural number")
    if c == 0 or k is CIRC:
        return CIRC
    return Val(k.sf, k.sf.nat_scale(c, k.value))


def parse_ext(sf: Semifield, text: str):
    if text.strip() == CIRC_TEXT:
        return CIRC
    return Val(sf, sf.parse(text))


def format_ext(k) -> str:
    if k is CIRC:
        return CIRC_TEXT
    return k.sf.format(k.value)


# ---------------------------------------------------------------------------
# homomorphisms

@dataclass(frozen=True)
class SemifieldHom:
    source: Semifield
    target: Semifield
    fn: Callable[[Any], Any]
    name: str = "hom"

    def __call__(self, x):
        return self.fn(x)

    def compose(self, first: "SemifieldHom") -> "SemifieldHom":
        """self after first."""
        if first.target is not self.source:
            raise DomainMismatch("cannot compose: target/source differ")
        f, g = first.fn, self.fn
        return SemifieldHom(first.source, self.target, lambda x: g(f(x)),
                            f"{self.name}.{first.name}")


def identity_hom(sf: Semifield) -> SemifieldHom:
    return SemifieldHom(sf, sf, lambda x: x, "id")


def to_one_hom(sf: Semifield) -> SemifieldHom:
    """The unique homomorphism K -> {1}."""
    return SemifieldHom(sf, ONE, lambda x: 1, "collapse")


def tropical_scaling_hom(n: int) -> SemifieldHom:
    """x -> n*x on (Z, min, +); a homomorphism for n >= 1."""
    if n < 1:
        raise ValueError("scaling hom needs n >= 1")
    return SemifieldHom(TROPICAL, TROPICAL, lambda x: n * x, f"scale{n}")


def hom_apply(h: SemifieldHom, k):
    if k is CIRC:
        return CIRC
    if k.sf is not h.source:
        raise DomainMismatch(f"hom source is {h.source.name}, element in {k.sf.name}")
    return Val(h.target, h.fn(k.value))
