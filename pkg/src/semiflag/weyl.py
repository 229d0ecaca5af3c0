"""
Weyl groups of the supported types and their Bruhat order.

Independent of the flag machinery on purpose: elements are integer matrices
acting on weights in fundamental-weight coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .cartan import CartanDatum, cartan


def _matmul(A, B):
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _act(A, mu):
    return tuple(sum(A[i][k] * mu[k] for k in range(len(mu))) for i in range(len(mu)))


def simple_reflection(c: CartanDatum, i: int):
    """Matrix of s_i: mu -> mu - mu_i alpha_i (fundamental-weight coordinates)."""
    n = c.rank
    alpha = c.simple_root(i)
    rows = []
    for r in range(n):
        rows.append(tuple(int(r == k) - (alpha[r] if k == i - 1 else 0) for k in range(n)))
    return tuple(rows)


@dataclass
class WeylGroup:
    cartan: CartanDatum
    elements: list                 # matrices, sorted by (length, word)
    word: dict                     # element -> reduced word (tuple of indices)
    length: dict
    bruhat: set = field(repr=False)  # pairs (a, a') with a <= a'

    @property
    def identity(self):
        return self.elements[0]

    def __len__(self):
        return len(self.elements)

    def leq(self, a, b) -> bool:
        return (a, b) in self.bruhat

    def bruhat_pairs(self) -> int:
        return len(self.bruhat)

    def longest(self):
        return max(self.elements, key=self.length.__getitem__)

    def act(self, w, mu):
        return _act(w, mu)

    def name(self, w) -> str:
        wd = self.word[w]
        return "e" if not wd else "s" + "".join(str(i) for i in wd)


def _subword_set(c, word):
    refl = {i: simple_reflection(c, i) for i in c.index_set}
    n = c.rank
    ident = tuple(tuple(int(r == k) for k in range(n)) for r in range(n))
    out = set()
    for mask in product((0, 1), repeat=len(word)):
        m = ident
        for keep, i in zip(mask, word):
            if keep:
                m = _matmul(m, refl[i])
        out.add(m)
    return out


def build_weyl(c) -> WeylGroup:
    c = cartan(c) if isinstance(c, str) else c
    n = c.rank
    ident = tuple(tuple(int(r == k) for k in range(n)) for r in range(n))
    refl = {i: simple_reflection(c, i) for i in c.index_set}
    word = {ident: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for i in c.index_set:
                u = _matmul(w, refl[i])
                if u not in word:
                    word[u] = word[w] + (i,)
                    nxt.append(u)
        frontier = nxt
    length = {w: len(wd) for w, wd in word.items()}
    elements = sorted(word, key=lambda w: (length[w], word[w]))
    bruhat = set()
    for b in elements:
        below = _subword_set(c, word[b])
        for a in below:
            bruhat.add((a, b))
    W = WeylGroup(c, elements, word, length, bruhat)
    if bruhat != bruhat_by_covers(W):
        raise AssertionError("subword and reflection-cover Bruhat orders disagree")
    return W


def bruhat_by_covers(W: WeylGroup) -> set:
    """Bruhat order as the transitive closure of a < a t, l(a t) = l(a) + 1."""
    c = W.cartan
    refl = {simple_reflection(c, i) for i in c.index_set}
    inv = {w: next(u for u in W.elements if _matmul(w, u) == W.identity) for w in W.elements}
    reflections = {_matmul(_matmul(w, s), inv[w]) for w in W.elements for s in refl}
    covers = {a: [] for a in W.elements}
    for a in W.elements:
        for t in reflections:
            b = _matmul(a, t)
            if W.length[b] == W.length[a] + 1:
                covers[a].append(b)
    order = set()
    for a in W.elements:
        seen = {a}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in covers[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        order.update((a, b) for b in seen)
    return order
