"""
The semiring M(K) = sum over lam in X^+_{Jbar} of V(lam)(K), with product
mu(b1, b1') = sum_b e_{b,b1,b1'} b (the transpose of Gamma), and its
characters M'(K) -> K^!, which correspond to collections in C(K).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .based import SemiVector, vk_add, vk_scale
from .cartan import CartanDatum, add_weights, cartan, height, in_XJbar, parse_weight_key, weight_key
from .datagen import get_store
from .flags import DepthError, ExpandedCollection, FlagPoint, normalize
from .semifield import CIRC, DomainMismatch, Semifield, Val, get_semifield


class HeightBoundError(ValueError):
    pass


class NotAPoint(ValueError):
    pass


DEFAULT_MAX_HEIGHT = 8


@dataclass(eq=False)
class MElem:
    cartan: CartanDatum
    J: frozenset
    sf: Semifield
    components: dict  # lam -> nonzero SemiVector over V(lam)
    data_dir: str = field(default=None, repr=False)

    def __post_init__(self):
        self.J = frozenset(self.J)
        bound = self.max_height
        clean = {}
        for lam, v in self.components.items():
            lam = tuple(lam)
            if not in_XJbar(lam, self.cartan, self.J):
                raise ValueError(f"component {lam} has support outside I - J")
            if height(lam) > bound or not self.store.supports(lam):
                raise HeightBoundError(f"component {lam} is beyond the loaded height bound {bound}")
            if v.basis.key != self.store.module(lam).key:
                raise DomainMismatch(f"component at {lam} is not over V{lam}")
            if v.sf is not self.sf:
                raise DomainMismatch("component over a different semifield")
            if not v.is_zero():
                clean[lam] = v
        self.components = clean

    @property
    def store(self):
        return get_store(self.cartan, self.data_dir)

    @property
    def max_height(self):
        return self.store.max_height or DEFAULT_MAX_HEIGHT

    def _like(self, components):
        return MElem(self.cartan, self.J, self.sf, components, self.data_dir)

    def _check(self, other):
        if (self.cartan, self.J) != (other.cartan, other.J) or self.sf is not other.sf:
            raise DomainMismatch("elements of different semirings")

    def __eq__(self, other):
        if not isinstance(other, MElem):
            return NotImplemented
        return ((self.cartan, self.J) == (other.cartan, other.J) and self.sf is other.sf
                and self.components == other.components)

    def __repr__(self):
        body = ", ".join(f"{lam}: {v!r}" for lam, v in sorted(self.components.items()))
        return f"MElem({body})"

    def height(self):
        return max((height(lam) for lam in self.components), default=0)

    def to_dict(self):
        return {
            "cartan": self.cartan.label,
            "J": sorted(self.J),
            "semifield": self.sf.name,
            "components": {weight_key(lam): v.to_json() for lam, v in sorted(self.components.items())},
        }

    @classmethod
    def from_dict(cls, d, data_dir=None):
        c = cartan(d["cartan"])
        sf = get_semifield(d["semifield"])
        store = get_store(c, data_dir)
        comps = {}
        for key, obj in d["components"].items():
            lam = parse_weight_key(key)
            comps[lam] = SemiVector.from_json(store.module(lam), sf, obj)
        return cls(c, frozenset(d.get("J", ())), sf, comps, data_dir)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=1) + "\n"


def m_zero(c, J, sf, data_dir=None) -> MElem:
    c = cartan(c) if isinstance(c, str) else c
    return MElem(c, J, get_semifield(sf), {}, data_dir)


def m_one(c, J, sf, data_dir=None) -> MElem:
    c = cartan(c) if isinstance(c, str) else c
    sf = get_semifield(sf)
    triv = get_store(c, data_dir).module(c.zero())
    return MElem(c, J, sf, {c.zero(): SemiVector(triv, sf, {triv.highest: sf.one}, check=False)},
                 data_dir)


def m_basis(c, J, sf, lam, b, k=None, data_dir=None) -> MElem:
    c = cartan(c) if isinstance(c, str) else c
    sf = get_semifield(sf)
    store = get_store(c, data_dir)
    if not store.supports(lam):
        raise HeightBoundError(f"{tuple(lam)} is beyond the loaded height bound")
    m = store.module(lam)
    return MElem(c, J, sf, {tuple(lam): SemiVector.basis_vector(m, sf, b, k)}, data_dir)


def m_add(m: MElem, m2: MElem) -> MElem:
    m._check(m2)
    comps = dict(m.components)
    for lam, v in m2.components.items():
        comps[lam] = vk_add(comps[lam], v) if lam in comps else v
    return m._like(comps)


def m_scale(k, m: MElem) -> MElem:
    return m._like({lam: vk_scale(k, v) for lam, v in m.components.items()})


def m_mul(m: MElem, m2: MElem) -> MElem:
    m._check(m2)
    sf = m.sf
    store = m.store
    add, mul, scale = sf.add, sf.mul, sf.nat_scale
    acc = {}
    for lam, x in m.components.items():
        for lam2, y in m2.components.items():
            total = add_weights(lam, lam2)
            if height(total) > m.max_height or not store.supports(total):
                raise HeightBoundError(f"product lands in {total}, beyond the loaded bound")
            t = store.gamma(lam, lam2)
            tr = _transpose(t)
            out = acc.setdefault(total, {})
            for b1, xv in x.coeffs.items():
                for b2, yv in y.coeffs.items():
                    prod = mul(xv, yv)
                    for b, e in tr.get((b1, b2), ()):
                        z = prod if e == 1 else scale(e, prod)
                        out[b] = z if b not in out else add(out[b], z)
    comps = {lam: SemiVector(store.module(lam), sf, c, check=False) for lam, c in acc.items() if c}
    return m._like(comps)


_TRANSPOSES = {}


def _transpose(t):
    key = id(t)
    hit = _TRANSPOSES.get(key)
    if hit is None or hit[0] is not t:
        hit = (t, t.transpose_rows())
        _TRANSPOSES[key] = hit
    return hit[1]


# ---------------------------------------------------------------------------
# characters

class Character:
    """A map M(K) -> K^! given by a collection (x_lam), evaluated on demand.

    ``components`` are the fundamental values x_{omega_i}; higher x_lam come
    from the defining equations.  Evaluation is only allowed up to ``depth``,
    the height to which the collection has been verified.
    """

    def __init__(self, c, J, sf, components, depth, data_dir=None):
        self.cartan = cartan(c) if isinstance(c, str) else c
        self.J = frozenset(J)
        self.sf = get_semifield(sf)
        self.depth = depth
        self.data_dir = data_dir
        self.collection = ExpandedCollection(self.cartan, self.J, self.sf, components, data_dir)
        self.components = dict(components)

    def __call__(self, m: MElem):
        if (m.cartan, m.J) != (self.cartan, self.J) or m.sf is not self.sf:
            raise DomainMismatch("element from a different semiring")
        sf = self.sf
        total = None
        for lam, v in m.components.items():
            if height(lam) > self.depth:
                raise DepthError(f"component {lam} is beyond the verified depth {self.depth}")
            x = self.collection[lam]
            for b, a in v.coeffs.items():
                xb = x.coeffs.get(b)
                if xb is None:
                    continue
                term = sf.mul(a, xb)
                total = term if total is None else sf.add(total, term)
        return CIRC if total is None else Val(sf, total)

    def on_basis(self, lam, b):
        x = self.collection[tuple(lam)].coeffs.get(b)
        return CIRC if x is None else Val(self.sf, x)


def char_from_point(p: FlagPoint, d=None) -> Character:
    d = p.verified_depth if d is None else d
    if d > p.verified_depth:
        raise DepthError(f"point verified only to depth {p.verified_depth}, asked for {d}")
    return Character(p.cartan, p.J, p.sf, p.components, d, p.data_dir)


def point_from_char(chi: Character) -> FlagPoint:
    store = get_store(chi.cartan, chi.data_dir)
    comps = {}
    for i in chi.cartan.index_set:
        if i in chi.J:
            continue
        m = store.fundamental(i)
        coeffs = {}
        for b in m.labels:
            v = chi.on_basis(m.lam, b)
            if v is not CIRC:
                coeffs[b] = v.value
        if not coeffs:
            raise NotAPoint(f"character vanishes on V(omega_{i}); it lies in C(K) but not C*(K)")
        comps[i] = SemiVector(m, chi.sf, coeffs, check=False)
    p = FlagPoint(chi.cartan, chi.J, chi.sf, comps, False, chi.depth, chi.data_dir)
    return normalize(p)


def random_melem(c, J, sf, rng, max_height=2, terms=None, data_dir=None) -> MElem:
    """A random element with a few components of height <= max_height."""
    from .monoid import random_vector

    c = cartan(c) if isinstance(c, str) else c
    sf = get_semifield(sf)
    store = get_store(c, data_dir)
    comp = tuple(i for i in c.index_set if i not in set(J))
    lams = [lam for lam in c.dominant_weights(max_height, comp) if store.supports(lam)]
    terms = rng.randint(0, 3) if terms is None else terms
    comps = {}
    for lam in rng.sample(lams, min(terms, len(lams))):
        comps[lam] = random_vector(store.module(lam), sf, rng, density=0.5)
    return MElem(c, J, sf, comps, data_dir)
