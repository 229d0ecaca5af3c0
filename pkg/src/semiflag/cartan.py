"""Cartan data for the supported simply-laced finite types, and dominant weights."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product


class CatalogError(ValueError):
    pass


_MATRICES = {
    "A1": ((2,),),
    "A1xA1": ((2, 0), (0, 2)),
    "A2": ((2, -1), (-1, 2)),
    "A3": ((2, -1, 0), (-1, 2, -1), (0, -1, 2)),
}


@dataclass(frozen=True)
class CartanDatum:
    label: str
    matrix: tuple

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def index_set(self) -> tuple:
        return tuple(range(1, self.rank + 1))

    def a(self, i: int, j: int) -> int:
        return self.matrix[i - 1][j - 1]

    def simple_root(self, j: int) -> tuple:
        """alpha_j in fundamental-weight coordinates (column j of the matrix)."""
        return tuple(self.matrix[i][j - 1] for i in range(self.rank))

    def fundamental(self, i: int) -> tuple:
        return tuple(int(k == i) for k in self.index_set)

    def zero(self) -> tuple:
        return (0,) * self.rank

    def dominant_weights(self, max_height: int, support=None) -> list:
        """All dominant weights of height <= max_height with supp inside ``support``."""
        support = set(self.index_set if support is None else support)
        out = []
        for coeffs in product(range(max_height + 1), repeat=self.rank):
            if sum(coeffs) > max_height:
                continue
            if any(c and (k + 1) not in support for k, c in enumerate(coeffs)):
                continue
            out.append(tuple(coeffs))
        out.sort(key=lambda w: (sum(w), tuple(-c for c in w)))
        return out

    def __str__(self):
        return self.label


@lru_cache(maxsize=None)
def cartan(label: str) -> CartanDatum:
    key = str(label).strip()
    norm = {"a1": "A1", "a1xa1": "A1xA1", "a1*a1": "A1xA1", "a2": "A2", "a3": "A3"}
    key = norm.get(key.lower(), key)
    if key not in _MATRICES:
        raise CatalogError(f"unsupported Cartan type {label!r}; supported: {sorted(_MATRICES)}")
    c = CartanDatum(key, _MATRICES[key])
    _validate(c)
    return c


def _validate(c: CartanDatum):
    n = c.rank
    for i in range(n):
        if c.matrix[i][i] != 2:
            raise CatalogError("diagonal entries must be 2")
        for j in range(n):
            if c.matrix[i][j] != c.matrix[j][i]:
                raise CatalogError("Cartan matrix must be symmetric")
            if i != j and c.matrix[i][j] not in (0, -1):
                raise CatalogError("off-diagonal entries must be 0 or -1")


def weight(c: CartanDatum, coeffs) -> tuple:
    if isinstance(coeffs, str):
        coeffs = [int(x) for x in coeffs.replace(" ", "").split(",") if x != ""]
    w = tuple(int(x) for x in coeffs)
    if len(w) != c.rank:
        raise ValueError(f"weight {w} has wrong length for {c.label}")
    if any(x < 0 for x in w):
        raise ValueError(f"weight {w} is not dominant")
    return w


def height(lam) -> int:
    return sum(lam)


def support(lam) -> frozenset:
    return frozenset(i + 1 for i, n in enumerate(lam) if n)


def in_XJ(lam, c: CartanDatum, J) -> bool:
    """supp(lam) = I - J."""
    return support(lam) == frozenset(c.index_set) - frozenset(J)


def in_XJbar(lam, c: CartanDatum, J) -> bool:
    """supp(lam) contained in I - J."""
    return support(lam) <= frozenset(c.index_set) - frozenset(J)


def add_weights(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def sub_weights(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def weight_key(lam) -> str:
    return ",".join(str(x) for x in lam)


def parse_weight_key(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x != "")
