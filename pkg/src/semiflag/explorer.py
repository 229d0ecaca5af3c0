"""
Exhaustive enumeration of P^J({1}), the Bruhat-pair comparison, and
tropical fiber sampling over the collapse map K -> {1}.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations, product

from .based import SemiVector
from .cartan import cartan
from .datagen import get_store
from .flags import DEFAULT_DEPTH, ExpandedCollection, FlagPoint, act, check_consistency, map_semifield, normalize
from .monoid import NEG, POS, Gen, MonoidWord
from .semifield import ONE, TROPICAL, to_one_hom
from .weyl import build_weyl

log = logging.getLogger(__name__)

DEPTH_CAVEAT = ("consistency verified only for weights of height <= {d}; "
                "membership in C(K) for all weights is not proved")


def _nonempty_subsets(labels):
    for r in range(1, len(labels) + 1):
        for S in combinations(labels, r):
            yield S


def _point_sort_key(p: FlagPoint):
    out = []
    for i in sorted(p.components):
        v = p.components[i]
        out.append((i, tuple(sorted(v.basis.index[b] for b in v.coeffs))))
    return tuple(out)


def enumerate_one(c, J=(), d=DEFAULT_DEPTH, shuffle_seed=None, data_dir=None) -> list:
    """All points of P^J({1}) whose defining equations hold up to height d.

    Over {1} a semivector is a subset of the basis and H({1}) is trivial.
    Candidates are built index by index; after fixing the components for a
    set S of indices, the sub-collection supported on S must already be
    consistent (these are exactly the equations involving only S), which
    prunes the search without changing its result.
    """
    c = cartan(c) if isinstance(c, str) else c
    store = get_store(c, data_dir)
    idx = [i for i in c.index_set if i not in set(J)]
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    cands = {}
    for i in idx:
        m = store.fundamental(i)
        lst = [SemiVector(m, ONE, {b: 1 for b in S}, check=False) for S in _nonempty_subsets(m.labels)]
        if rng:
            rng.shuffle(lst)
        cands[i] = lst
    found = []

    def search(k, chosen):
        if k == len(idx):
            found.append(FlagPoint(c, frozenset(J), ONE, dict(chosen), True, d, data_dir))
            return
        i = idx[k]
        for v in cands[i]:
            chosen[i] = v
            Jpart = frozenset(c.index_set) - set(chosen)
            col = ExpandedCollection(c, Jpart, ONE, chosen, data_dir)
            if check_consistency(col, d):
                search(k + 1, chosen)
            del chosen[i]

    search(0, {})
    found.sort(key=_point_sort_key)
    return found


@dataclass
class ConjectureReport:
    cartan: str
    depth: int
    enumerated: int
    bruhat_pairs: int
    weyl_order: int
    counts_by_depth: dict
    collections: int
    points: list = field(repr=False)

    @property
    def match(self):
        return self.enumerated == self.bruhat_pairs

    @property
    def caveat(self):
        return DEPTH_CAVEAT.format(d=self.depth)

    def lines(self):
        verdict = "agree" if self.match else "DISAGREE"
        out = [
            f"type {self.cartan}: |P^0({{1}})| at depth {self.depth} = {self.enumerated}",
            f"Bruhat pairs (a <= a') in W (|W| = {self.weyl_order}): {self.bruhat_pairs}",
            f"counts {verdict}",
            f"distinct collections (x_lam) up to height {self.depth}: {self.collections}",
            "enumerated count by depth: " + ", ".join(f"d={k}: {v}" for k, v in sorted(self.counts_by_depth.items())),
            "note: " + self.caveat,
        ]
        return out

    def to_dict(self):
        return {
            "type": self.cartan,
            "depth": self.depth,
            "enumerated": self.enumerated,
            "bruhat_pairs": self.bruhat_pairs,
            "weyl_order": self.weyl_order,
            "match": self.match,
            "counts_by_depth": {str(k): v for k, v in sorted(self.counts_by_depth.items())},
            "collections": self.collections,
            "caveat": self.caveat,
            "points": [{str(i): sorted(v.coeffs, key=v.basis.index.__getitem__)
                        for i, v in sorted(p.components.items())} for p in self.points],
        }


def conjecture_check(c, d=DEFAULT_DEPTH, data_dir=None, by_depth=True) -> ConjectureReport:
    c = cartan(c) if isinstance(c, str) else c
    W = build_weyl(c)
    points = enumerate_one(c, (), d, data_dir=data_dir)
    counts = {d: len(points)}
    if by_depth:
        for k in range(1, d):
            counts[k] = len(enumerate_one(c, (), k, data_dir=data_dir))
    collections = sum(ExpandedCollection.of(p).resolve(d, count=True) for p in points)
    rep = ConjectureReport(c.label, d, len(points), W.bruhat_pairs(), len(W), counts, collections, points)
    log.info("conjecture check %s depth %d: %d vs %d", c.label, d, rep.enumerated, rep.bruhat_pairs)
    return rep


# ---------------------------------------------------------------------------
# fibers

def torus_fixed_points(c, sf=TROPICAL, data_dir=None) -> list:
    """Points whose components are the extremal vectors of weight w(omega_i), w in W."""
    c = cartan(c) if isinstance(c, str) else c
    W = build_weyl(c)
    store = get_store(c, data_dir)
    out = []
    seen = set()
    for w in W.elements:
        comps = {}
        for i in c.index_set:
            m = store.fundamental(i)
            mu = W.act(w, c.fundamental(i))
            (b,) = [b for b in m.labels if m.weight_of(b) == mu]
            comps[i] = SemiVector(m, sf, {b: sf.one}, check=False)
        p = FlagPoint(c, frozenset(), sf, comps, True, 0, data_dir)
        k = p.key()
        if k not in seen:
            seen.add(k)
            out.append(p)
    return out


def point_from_supports(c, supports: dict, sf=ONE, data_dir=None) -> FlagPoint:
    """{i: [labels]} -> a point over {1} (or all-one coefficients over sf)."""
    c = cartan(c) if isinstance(c, str) else c
    store = get_store(c, data_dir)
    comps = {i: SemiVector(store.fundamental(i), sf, {b: sf.one for b in labels})
             for i, labels in supports.items()}
    return normalize(FlagPoint(c, frozenset(), sf, comps, False, 0, data_dir))


@dataclass
class FiberReport:
    target: FlagPoint
    points: list
    sampled: int

    @property
    def count(self):
        return len(self.points)


def word_grid(index_set, params, length=1, kinds=(NEG, POS)) -> list:
    gens = [Gen(kind, i, k) for kind in kinds for i in index_set for k in params]
    words = [MonoidWord()]
    for n in range(1, length + 1):
        words.extend(MonoidWord(t) for t in product(gens, repeat=n))
    return words


def fiber_sample(c, target: FlagPoint, params=range(-5, 6), length=1, data_dir=None,
                 verify_depth=0) -> FiberReport:
    """Tropical points over ``target`` reached from torus-fixed points by a grid of words."""
    c = cartan(c) if isinstance(c, str) else c
    if target.J:
        raise ValueError("fibers are sampled for J = empty set only")
    target = normalize(target)
    collapse = to_one_hom(TROPICAL)
    seeds = torus_fixed_points(c, TROPICAL, data_dir)
    words = word_grid(c.index_set, list(params), length)
    hits = {}
    sampled = 0
    for seed in seeds:
        for w in words:
            p = act(w, seed, recheck=False)
            sampled += 1
            q = map_semifield(p, collapse)
            if all(q.components[i] == target.components[i] for i in q.components):
                k = p.key()
                if k not in hits:
                    hits[k] = p
    pts = sorted(hits.values(), key=lambda p: repr(p))
    if verify_depth:
        for p in pts:
            res = check_consistency(p, verify_depth)
            if not res:
                raise AssertionError(f"sampled fiber point fails consistency: {res.witness}")
    return FiberReport(target, pts, sampled)
