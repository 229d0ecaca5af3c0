"""
Words in the generators i^k, (-i)^k, i_^k of the monoid G(K) and their
action on V(K) and on tensor objects.

A word ``[g1, g2, ..., gn]`` is the monoid product g1 g2 ... gn, so it acts
on a vector as g1(g2(...gn(v))): the rightmost generator is applied first.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from .based import BasedModule, BasisMismatch, E_K, SemiVector, TensorBasis, apply_nat_matrix, vk_add
from .semifield import Semifield

POS, NEG, TORUS = "pos", "neg", "torus"


@dataclass(frozen=True)
class Gen:
    kind: str
    i: int
    k: object  # raw element of K, never o

    def __post_init__(self):
        if self.kind not in (POS, NEG, TORUS):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.k is None:
            raise ValueError("generator parameter must lie in K (not o)")

    def token(self, sf: Semifield) -> str:
        prefix = {POS: "+", NEG: "-", TORUS: "t"}[self.kind]
        return f"{prefix}{self.i}:{sf.format(self.k)}"

    def mapped(self, h) -> "Gen":
        return Gen(self.kind, self.i, h(self.k))


class MonoidWord(tuple):
    """A finite sequence of generators (free word; no relations imposed)."""

    def __new__(cls, gens=()):
        return super().__new__(cls, tuple(gens))

    def __mul__(self, other):
        return MonoidWord(tuple(self) + tuple(other))

    def format(self, sf) -> str:
        return " ".join(g.token(sf) for g in self)

    def mapped(self, h) -> "MonoidWord":
        return MonoidWord(g.mapped(h) for g in self)


_TOKEN = re.compile(r"^(?P<kind>[+\-]|t,?)(?P<i>\d+):(?P<k>\S+)$")


def parse_word(text: str, sf: Semifield, index_set=None) -> MonoidWord:
    """Parse ``+1:2/3 -2:5 t1:1/2`` (``t,1:1/2`` is also accepted)."""
    gens = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad generator token {tok!r}")
        kind = {"+": POS, "-": NEG}.get(m["kind"], TORUS)
        i = int(m["i"])
        if index_set is not None and i not in index_set:
            raise ValueError(f"index {i} not in I = {tuple(index_set)}")
        gens.append(Gen(kind, i, sf.parse(m["k"])))
    return MonoidWord(gens)


def gen_apply(g: Gen, m: BasedModule, v: SemiVector) -> SemiVector:
    if v.basis.key != m.key:
        raise BasisMismatch("vector does not live in this module")
    sf = v.sf
    if g.i not in m.cartan.index_set:
        raise ValueError(f"index {g.i} not in I")
    if g.kind == TORUS:
        l = m.weights[g.i]
        mul, pw = sf.mul, sf.pow
        return SemiVector(v.basis, sf, {b: mul(pw(g.k, l[b]), x) for b, x in v.coeffs.items()},
                          check=False)
    ops = m.E[g.i] if g.kind == POS else m.F[g.i]
    out = v
    for n, M in ops.items():
        term = apply_nat_matrix(M, v)
        if term.coeffs:
            kn = sf.pow(g.k, n)
            mul = sf.mul
            term = SemiVector(v.basis, sf, {b: mul(kn, x) for b, x in term.coeffs.items()},
                              check=False)
            out = vk_add(out, term)
    return out


def word_apply(w, m: BasedModule, v: SemiVector) -> SemiVector:
    for g in reversed(tuple(w)):
        v = gen_apply(g, m, v)
    return v


def tensor_gen_apply(g: Gen, tb: TensorBasis, x: SemiVector) -> SemiVector:
    """b (x) b' -> E(K)(g b, g b'), extended over K^!."""
    if x.basis.key != tb.key:
        raise BasisMismatch("vector is not over this tensor basis")
    sf = x.sf
    left_img = {}
    right_img = {}
    out = SemiVector.zero(tb, sf)
    for (b, b2), k in x.coeffs.items():
        if b not in left_img:
            left_img[b] = gen_apply(g, tb.left, SemiVector(tb.left, sf, {b: sf.one}, check=False))
        if b2 not in right_img:
            right_img[b2] = gen_apply(g, tb.right, SemiVector(tb.right, sf, {b2: sf.one}, check=False))
        img = E_K(left_img[b], right_img[b2], tb)
        mul = sf.mul
        out = vk_add(out, SemiVector(tb, sf, {s: mul(k, y) for s, y in img.coeffs.items()},
                                     check=False))
    return out


def tensor_word_apply(w, tb: TensorBasis, x: SemiVector) -> SemiVector:
    for g in reversed(tuple(w)):
        x = tensor_gen_apply(g, tb, x)
    return x


# ---------------------------------------------------------------------------
# random data and the relation suite

def random_vector(basis, sf: Semifield, rng: random.Random, density=0.6) -> SemiVector:
    coeffs = {b: sf.random_element(rng) for b in basis.labels if rng.random() < density}
    return SemiVector(basis, sf, coeffs, check=False)


def random_word(index_set, sf: Semifield, rng: random.Random, length=None, kinds=(POS, NEG, TORUS)):
    length = rng.randint(0, 5) if length is None else length
    return MonoidWord(Gen(rng.choice(kinds), rng.choice(index_set), sf.random_element(rng))
                      for _ in range(length))


RELATIONS = ("R1", "R2", "R3", "R4", "R5", "R6")


def relation_sides(rel, c, sf, i, j, k, k2):
    """The two words of relation ``rel`` for indices i, j and parameters k, k2.

    Returns None when the relation does not apply to (i, j).
    """
    add, mul, pw = sf.add, sf.mul, sf.pow
    W = MonoidWord
    if rel == "R1":
        return [W([Gen(POS, i, k), Gen(POS, i, k2)]), W([Gen(POS, i, add(k, k2))])]
    if rel == "R2":
        return [W([Gen(NEG, i, k), Gen(NEG, i, k2)]), W([Gen(NEG, i, add(k, k2))])]
    if rel == "R3":
        return [W([Gen(TORUS, i, k), Gen(TORUS, i, k2)]), W([Gen(TORUS, i, mul(k, k2))])]
    if rel == "R4":
        a = c.a(i, j)
        return [W([Gen(TORUS, i, k), Gen(POS, j, k2)]),
                W([Gen(POS, j, mul(k2, pw(k, a))), Gen(TORUS, i, k)]),
                W([Gen(TORUS, i, k), Gen(NEG, j, k2)]),
                W([Gen(NEG, j, mul(k2, pw(k, -a))), Gen(TORUS, i, k)])]
    if rel == "R5":
        if i == j or c.a(i, j) != 0:
            return None
        return [W([Gen(POS, i, k), Gen(POS, j, k2)]), W([Gen(POS, j, k2), Gen(POS, i, k)]),
                W([Gen(NEG, i, k), Gen(NEG, j, k2)]), W([Gen(NEG, j, k2), Gen(NEG, i, k)])]
    if rel == "R6":
        if i == j:
            return None
        return [W([Gen(POS, i, k), Gen(NEG, j, k2)]), W([Gen(NEG, j, k2), Gen(POS, i, k)])]
    raise ValueError(f"unknown relation {rel!r}")


@dataclass
class RelationReport:
    relation: str
    trials: int
    passed: int
    skipped: int
    failures: list

    @property
    def ok(self):
        return self.passed == self.trials and not self.failures

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        return f"{self.relation}: {status} {self.passed}/{self.trials} (skipped draws: {self.skipped})"


def relation_check(rel, trials, seed, modules, semifields, max_skips=10000) -> RelationReport:
    """Evaluate both sides of ``rel`` on random (module, vector, parameters)."""
    rng = random.Random(f"{rel}:{seed}")
    modules = list(modules)
    semifields = list(semifields)
    passed, skipped, failures = 0, 0, []
    done = 0
    while done < trials:
        m = rng.choice(modules)
        sf = semifields[done % len(semifields)]
        I = m.cartan.index_set
        i, j = rng.choice(I), rng.choice(I)
        sides = relation_sides(rel, m.cartan, sf, i, j, sf.random_element(rng), sf.random_element(rng))
        if sides is None:
            skipped += 1
            if skipped > max_skips:
                break
            continue
        v = random_vector(m, sf, rng)
        ok = True
        for lhs, rhs in zip(sides[::2], sides[1::2]):
            if word_apply(lhs, m, v) != word_apply(rhs, m, v):
                ok = False
                failures.append((m.key, sf.name, i, j, lhs.format(sf), rhs.format(sf), repr(v)))
        passed += ok
        done += 1
    return RelationReport(rel, trials, passed, skipped, failures)
