"""
Points of P^J(K): H(K)-orbits of collections (x_lam) with
Gamma(K)(x_{lam+lam'}) = E(K)(x_lam, x_lam').

A point is stored by its fundamental components x_{omega_i}, i in I - J.
Every other x_lam is derived by solving Gamma(K)(x_lam) = E(K)(x_mu, x_nu)
for all splittings lam = mu + nu together.  ``verified_depth`` records the
height up to which the defining equations have actually been checked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations, product

from .based import BasisMismatch, E_K, Gamma_K, SemiVector, vk_scale
from .cartan import CartanDatum, add_weights, cartan, height, in_XJbar, sub_weights
from .datagen import get_store
from .linalg import NotInSpan, solve_exact
from .monoid import word_apply
from .semifield import ONE, RATIONAL, TROPICAL, DomainMismatch, Semifield, get_semifield

DEFAULT_DEPTH = 4


class NoSolution(ValueError):
    """The collection has no x_lam solving the defining equation."""


class AmbiguousSolution(ValueError):
    """Two distinct K^!-solutions exist: Gamma(K) is not injective here."""


class InvariantError(AssertionError):
    pass


class DepthError(ValueError):
    pass


# ---------------------------------------------------------------------------
# solving Gamma(K) x = t

def _rows_by_source(table):
    return {b: [s for s, _ in row] for b, row in table.rows.items()}


def solve_boolean(table, target: SemiVector) -> SemiVector:
    """Over {1}: x is a set of basis labels, Gamma(x) the union of row supports.

    Every solution lies inside xhat = {b : supp(b) in T}, and solutions are
    closed under union, so a solution exists iff xhat covers T and it is
    unique iff no element of xhat is redundant.
    """
    T = set(target.coeffs)
    rows = _rows_by_source(table)
    xhat = [b for b, supp in rows.items() if supp and set(supp) <= T]
    covered = set()
    for b in xhat:
        covered.update(rows[b])
    if covered != T:
        raise NoSolution("target is not a union of Gamma rows")
    count = {}
    for b in xhat:
        for s in rows[b]:
            count[s] = count.get(s, 0) + 1
    for b in xhat:
        if all(count[s] > 1 for s in rows[b]):
            raise AmbiguousSolution(f"{b} can be dropped from the solution")
    return SemiVector(table.module, ONE, {b: 1 for b in xhat}, check=False)


def solve_boolean_exhaustive(table, target: SemiVector) -> list:
    """All solutions over {1} by brute force over subsets (small modules only)."""
    labels = list(table.module.labels)
    out = []
    for r in range(len(labels) + 1):
        for S in combinations(labels, r):
            x = SemiVector(table.module, ONE, {b: 1 for b in S}, check=False)
            if Gamma_K(table, x) == target:
                out.append(x)
    return out


def solve_tropical(table, target: SemiVector) -> SemiVector:
    """Over (Z, min, +): Gamma(x)_s = min of x_b over rows b containing s.

    The residuated candidate is xhat_b = max of t_s over supp(b) (o when some
    t_s is o).  It solves the system iff any solution does; it is the only
    solution iff each finite xhat_b is the sole minimiser at some s.
    """
    t = target.coeffs
    rows = _rows_by_source(table)
    xhat = {}
    for b, supp in rows.items():
        if supp and all(s in t for s in supp):
            xhat[b] = max(t[s] for s in supp)
    x = SemiVector(table.module, TROPICAL, xhat, check=False)
    if Gamma_K(table, x) != target:
        raise NoSolution("residuated candidate does not reproduce the target")
    attain = {}
    for b, val in xhat.items():
        for s in rows[b]:
            if t[s] == val:
                attain[s] = attain.get(s, 0) + 1
    for b, val in xhat.items():
        if not any(t[s] == val and attain[s] == 1 for s in rows[b]):
            raise AmbiguousSolution(f"coefficient at {b} can be raised freely")
    return x


def solve_rational(table, target: SemiVector) -> SemiVector:
    """Over positive rationals: exact linear solve with zero = o, then positivity."""
    t = target.coeffs
    rows = _rows_by_source(table)
    cols = [b for b, supp in rows.items() if all(s in t for s in supp)]
    if not cols:
        if t:
            raise NoSolution("no admissible support")
        return SemiVector(table.module, RATIONAL, {}, check=False)
    row_index = {}
    for b in cols:
        for s in rows[b]:
            row_index.setdefault(s, len(row_index))
    if set(t) - set(row_index):
        raise NoSolution("target has support outside the image")
    consts = {b: dict(table.rows[b]) for b in cols}
    A = [[consts[b].get(s, 0) for b in cols] for s in row_index]
    rhs = [t[s] for s in row_index]
    try:
        x = solve_exact(A, rhs)
    except NotInSpan:
        raise NoSolution("linear system is inconsistent")
    except ValueError:
        raise AmbiguousSolution("Gamma restricted to the admissible support is not injective")
    if any(v < 0 for v in x):
        raise NoSolution("solution has a negative coordinate")
    sol = SemiVector(table.module, RATIONAL, {b: Fraction(v) for b, v in zip(cols, x) if v},
                     check=False)
    if Gamma_K(table, sol) != target:
        raise NoSolution("solution does not verify")
    return sol


SOLVERS = {ONE.name: solve_boolean, TROPICAL.name: solve_tropical, RATIONAL.name: solve_rational}


def solve_gamma(table, target: SemiVector) -> SemiVector:
    try:
        solver = SOLVERS[target.sf.name]
    except KeyError:
        raise NotImplementedError(f"no Gamma(K) solver for semifield {target.sf.name}")
    if target.sf is not get_semifield(target.sf.name):
        raise NotImplementedError("user-defined semifields have no solver")
    return solver(table, target)


# Several equations for the same unknown: x_lam must solve
# Gamma(x_lam) = E(x_mu, x_nu) for every splitting lam = mu + nu at once.

MAX_OPTIONAL = 16


def boolean_solutions(eqs) -> list:
    """Every common solution over {1}, largest first.

    Solutions are closed under union, so they all lie in the intersection
    xhat of the per-equation residuations.  Elements of xhat that are the
    only cover of some target label are forced; the rest are optional and
    every subset of them is tried.
    """
    module = eqs[0][0].module
    xhat = None
    for table, target in eqs:
        T = set(target.coeffs)
        ok = {b for b, supp in _rows_by_source(table).items() if supp and set(supp) <= T}
        xhat = ok if xhat is None else xhat & ok
    forced = set()
    covers = []
    for table, target in eqs:
        rows = _rows_by_source(table)
        cover = {}
        for b in xhat:
            for s in rows[b]:
                cover.setdefault(s, []).append(b)
        if set(cover) != set(target.coeffs):
            exc = NoSolution("target is not a union of Gamma rows")
            exc.equation = len(covers)
            raise exc
        forced.update(bs[0] for bs in cover.values() if len(bs) == 1)
        covers.append(cover)
    optional = sorted(xhat - forced, key=module.index.__getitem__)
    if len(optional) > MAX_OPTIONAL:
        raise AmbiguousSolution(f"{len(optional)} optional basis elements; too many to branch on")
    out = []
    for r in range(len(optional), -1, -1):
        for drop in combinations(optional, len(optional) - r):
            keep = xhat - set(drop)
            if all(all(any(b in keep for b in bs) for bs in cover.values()) for cover in covers):
                out.append(SemiVector(module, ONE, {b: 1 for b in keep}, check=False))
    return out


def _joint_tropical(eqs) -> SemiVector:
    module = eqs[0][0].module
    xhat = {b: None for b in module.labels}
    for table, target in eqs:
        t = target.coeffs
        for b, supp in _rows_by_source(table).items():
            if xhat.get(b, 0) is CIRC_MARK:
                continue
            if not supp or any(s not in t for s in supp):
                xhat[b] = CIRC_MARK
                continue
            m = max(t[s] for s in supp)
            xhat[b] = m if xhat[b] is None else max(xhat[b], m)
    x = SemiVector(module, TROPICAL, {b: v for b, v in xhat.items() if v is not CIRC_MARK and v is not None},
                   check=False)
    for table, target in eqs:
        if Gamma_K(table, x) != target:
            raise NoSolution("residuated candidate does not reproduce the target")
    pinned = set()
    for table, target in eqs:
        t = target.coeffs
        attain = {}
        for b, supp in _rows_by_source(table).items():
            if b in x.coeffs:
                for s in supp:
                    if t[s] == x.coeffs[b]:
                        attain.setdefault(s, []).append(b)
        pinned.update(bs[0] for bs in attain.values() if len(bs) == 1)
    free = [b for b in x.coeffs if b not in pinned]
    if free:
        raise AmbiguousSolution(f"coefficient at {free[0]} can be raised freely")
    return x


CIRC_MARK = object()


def _joint_rational(eqs) -> SemiVector:
    module = eqs[0][0].module
    admissible = set(module.labels)
    for table, target in eqs:
        t = target.coeffs
        admissible &= {b for b, supp in _rows_by_source(table).items() if all(s in t for s in supp)}
    cols = [b for b in module.labels if b in admissible]
    A, rhs = [], []
    for table, target in eqs:
        t = target.coeffs
        consts = {b: dict(table.rows[b]) for b in cols}
        reached = set()
        for b in cols:
            reached.update(consts[b])
        if set(t) - reached:
            raise NoSolution("target has support outside the image")
        for s in sorted(reached, key=str):
            A.append([consts[b].get(s, 0) for b in cols])
            rhs.append(t[s])
    if not cols:
        return SemiVector(module, RATIONAL, {}, check=False)
    try:
        x = solve_exact(A, rhs)
    except NotInSpan:
        raise NoSolution("linear system is inconsistent")
    except ValueError:
        raise AmbiguousSolution("Gamma restricted to the admissible support is not injective")
    if any(v < 0 for v in x):
        raise NoSolution("solution has a negative coordinate")
    sol = SemiVector(module, RATIONAL, {b: Fraction(v) for b, v in zip(cols, x) if v}, check=False)
    for table, target in eqs:
        if Gamma_K(table, sol) != target:
            raise NoSolution("solution does not verify")
    return sol


def solve_joint(eqs) -> SemiVector:
    """The unique common solution of several Gamma(K) x = t, or an error."""
    sf = eqs[0][1].sf
    if sf is ONE:
        sols = boolean_solutions(eqs)
        if not sols:
            raise NoSolution("no common solution")
        if len(sols) > 1:
            raise AmbiguousSolution(f"{len(sols)} common solutions")
        return sols[0]
    if sf is TROPICAL:
        return _joint_tropical(eqs)
    if sf is RATIONAL:
        return _joint_rational(eqs)
    raise NotImplementedError(f"no Gamma(K) solver for semifield {sf.name}")


# ---------------------------------------------------------------------------
# points

@dataclass(frozen=True, eq=False)
class FlagPoint:
    cartan: CartanDatum
    J: frozenset
    sf: Semifield
    components: dict  # i -> SemiVector over V(omega_i)
    normalized: bool = False
    verified_depth: int = 0
    data_dir: str = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "J", frozenset(self.J))
        want = set(self.cartan.index_set) - self.J
        if set(self.components) != want:
            raise ValueError(f"components must be indexed by I - J = {sorted(want)}")
        store = self.store
        for i, v in self.components.items():
            if v.basis.key != store.fundamental(i).key:
                raise BasisMismatch(f"component {i} is not over V(omega_{i})")
            if v.sf is not self.sf:
                raise DomainMismatch("component over a different semifield")
            if v.is_zero():
                raise ValueError(f"component {i} is zero; not a point of C*(K)")

    @property
    def store(self):
        return get_store(self.cartan, self.data_dir)

    @property
    def complement(self):
        return tuple(i for i in self.cartan.index_set if i not in self.J)

    def weights(self, d):
        return [lam for lam in self.cartan.dominant_weights(d, self.complement) if any(lam)]

    def __repr__(self):
        comps = ", ".join(f"{i}: {v!r}" for i, v in sorted(self.components.items()))
        return (f"FlagPoint({self.cartan.label}, J={sorted(self.J)}, {self.sf.name}, {{{comps}}}, "
                f"depth={self.verified_depth})")

    def key(self):
        q = normalize(self)
        return tuple((i, frozenset(q.components[i].coeffs.items())) for i in sorted(q.components))

    # serialization
    def to_dict(self):
        return {
            "cartan": self.cartan.label,
            "J": sorted(self.J),
            "semifield": self.sf.name,
            "components": {str(i): self.components[i].to_json() for i in sorted(self.components)},
            "verified_depth": self.verified_depth,
            "normalized": self.normalized,
        }

    @classmethod
    def from_dict(cls, d, data_dir=None):
        c = cartan(d["cartan"])
        sf = get_semifield(d["semifield"])
        store = get_store(c, data_dir)
        comps = {int(i): SemiVector.from_json(store.fundamental(int(i)), sf, obj)
                 for i, obj in d["components"].items()}
        return cls(c, frozenset(d.get("J", ())), sf, comps, bool(d.get("normalized", False)),
                   int(d.get("verified_depth", 0)), data_dir)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=1) + "\n"


def load_point(path, data_dir=None) -> FlagPoint:
    with open(path) as f:
        return FlagPoint.from_dict(json.load(f), data_dir)


def basepoint(c, J=(), sf=RATIONAL, data_dir=None, verify_depth=0) -> FlagPoint:
    c = cartan(c) if isinstance(c, str) else c
    sf = get_semifield(sf)
    store = get_store(c, data_dir)
    comps = {}
    for i in c.index_set:
        if i in J:
            continue
        m = store.fundamental(i)
        comps[i] = SemiVector(m, sf, {m.highest: sf.one}, check=False)
    p = FlagPoint(c, frozenset(J), sf, comps, True, 0, data_dir)
    if verify_depth:
        p = verify(p, verify_depth)
    return p


def normalize(p: FlagPoint) -> FlagPoint:
    if p.normalized:
        return p
    sf = p.sf
    comps = {}
    for i, v in p.components.items():
        lead = v.leading()
        if lead is None:
            raise ValueError(f"component {i} is zero")
        comps[i] = vk_scale(sf.inv(v.coeffs[lead]), v)
    return replace(p, components=comps, normalized=True)


def points_equal(p: FlagPoint, q: FlagPoint) -> bool:
    if (p.cartan, p.J) != (q.cartan, q.J) or p.sf is not q.sf:
        raise DomainMismatch("points of different flag manifolds")
    a, b = normalize(p), normalize(q)
    return all(a.components[i] == b.components[i] for i in a.components)


# ---------------------------------------------------------------------------
# expansion and consistency

class ExpandedCollection:
    """x_lam for a collection given by its fundamental components.

    Each x_lam solves the equations for all splittings lam = mu + nu
    simultaneously.  Over the tropical and rational semifields the common
    solution is unique or an error is raised.  Over {1} it need not be unique
    at a given height even though deeper equations may pin it down, so
    ``resolve(d)`` backtracks over the choices for all weights up to height d
    and keeps the first collection (largest choices first) that works.

    Works for any collection in C(K); ``FlagPoint`` adds the C*(K) condition.
    """

    def __init__(self, c: CartanDatum, J, sf, components, data_dir=None):
        self.cartan = c
        self.J = frozenset(J)
        self.sf = sf
        self.store = get_store(c, data_dir)
        self.cache = {}
        self.resolved = 0
        for i, v in components.items():
            self.cache[c.fundamental(i)] = v
        zero = c.zero()
        triv = self.store.module(zero)
        self.cache[zero] = SemiVector(triv, sf, {triv.highest: sf.one}, check=False)
        self._fixed = set(self.cache)
        self.failure = None  # (mu, nu) whose equation had no solution, deepest first

    @classmethod
    def of(cls, p: FlagPoint):
        return cls(p.cartan, p.J, p.sf, p.components, p.data_dir)

    @property
    def complement(self):
        return tuple(i for i in self.cartan.index_set if i not in self.J)

    def splittings(self, lam):
        """Unordered pairs (mu, nu), both nonzero, with mu + nu = lam."""
        out = []
        for mu in product(*(range(k + 1) for k in lam)):
            nu = sub_weights(lam, mu)
            if any(mu) and any(nu) and mu <= nu:
                out.append((mu, nu))
        return out

    def equations(self, lam):
        eqs = []
        for mu, nu in self.splittings(lam):
            t = self.store.gamma(mu, nu)
            eqs.append((t, E_K(self[mu], self[nu], t.tensor)))
        return eqs

    def _record(self, lam, exc):
        pairs = self.splittings(lam)
        idx = getattr(exc, "equation", 0)
        self.failure = pairs[idx] if idx < len(pairs) else (lam,)

    def __getitem__(self, lam):
        lam = tuple(lam)
        if lam in self.cache:
            return self.cache[lam]
        if not in_XJbar(lam, self.cartan, self.J):
            raise ValueError(f"{lam} has support outside I - J")
        if self.sf is ONE:
            self.resolve(height(lam))
            return self.cache[lam]
        try:
            x = solve_joint(self.equations(lam))
        except NoSolution as exc:
            self._record(lam, exc)
            raise
        self.cache[lam] = x
        return x

    def _weights(self, d):
        return [lam for lam in self.cartan.dominant_weights(d, self.complement)
                if any(lam) and lam not in self._fixed]

    def resolve(self, d, count=False):
        """Fix x_lam for every weight of height <= d (only needed over {1}).

        Returns the number of consistent collections when ``count`` is set
        (the cache then holds the first one found); raises ``NoSolution`` if
        there is none.
        """
        if self.sf is not ONE:
            for lam in self._weights(d):
                self[lam]
            return 1
        if d <= self.resolved and not count:
            return 1
        lams = self._weights(d)
        for lam in lams:
            self.cache.pop(lam, None)
        found = []
        deepest = [-1]

        def dfs(k):
            if k == len(lams):
                if not found:
                    found.append({lam: self.cache[lam] for lam in lams})
                else:
                    found.append(None)
                return count
            lam = lams[k]
            try:
                sols = boolean_solutions(self.equations(lam))
            except NoSolution as exc:
                if k > deepest[0]:
                    deepest[0] = k
                    self._record(lam, exc)
                return True
            for x in sols:
                self.cache[lam] = x
                if dfs(k + 1) is False:
                    return False
            self.cache.pop(lam, None)
            return True

        dfs(0)
        if not found:
            raise NoSolution(f"no consistent choice of x_lam up to height {d}")
        self.cache.update(found[0])
        self.resolved = max(self.resolved, d)
        return len(found)

    def equation_holds(self, lam, lam2) -> bool:
        t = self.store.gamma(lam, lam2)
        return Gamma_K(t, self[add_weights(lam, lam2)]) == E_K(self[lam], self[lam2], t.tensor)


def expand(p: FlagPoint, lam, collection=None) -> SemiVector:
    col = collection or ExpandedCollection.of(p)
    return col[tuple(lam)]


@dataclass
class ConsistencyResult:
    ok: bool
    depth: int
    witness: tuple = None
    message: str = ""

    def __bool__(self):
        return self.ok


def check_consistency(p, d, collection=None) -> ConsistencyResult:
    """Verify every defining equation with lam + lam' of height <= d."""
    col = collection or (p if isinstance(p, ExpandedCollection) else ExpandedCollection.of(p))
    c = col.cartan
    lams = [lam for lam in c.dominant_weights(d, col.complement) if any(lam)]
    try:
        col.resolve(d)
    except (NoSolution, AmbiguousSolution) as exc:
        return ConsistencyResult(False, d, col.failure or (), f"{type(exc).__name__}: {exc}")
    for lam in lams:
        for lam2 in lams:
            if height(lam) + height(lam2) > d:
                continue
            if not col.equation_holds(lam, lam2):
                return ConsistencyResult(False, d, (lam, lam2), "Gamma(x_{l+l'}) != E(x_l, x_l')")
    return ConsistencyResult(True, d)


def verify(p: FlagPoint, d=DEFAULT_DEPTH) -> FlagPoint:
    """Return p with verified_depth = d, or raise ``NoSolution``."""
    res = check_consistency(p, d)
    if not res:
        raise NoSolution(f"point fails at depth {d}: {res.witness} ({res.message})")
    return replace(p, verified_depth=max(d, p.verified_depth))


def act(w, p: FlagPoint, recheck=True) -> FlagPoint:
    """Componentwise action of a monoid word, followed by normalization."""
    store = p.store
    comps = {}
    for i, v in p.components.items():
        x = word_apply(w, store.fundamental(i), v)
        if x.is_zero():
            raise InvariantError("a component became zero under the monoid action")
        comps[i] = x
    q = normalize(replace(p, components=comps, normalized=False))
    if recheck and p.verified_depth:
        res = check_consistency(q, p.verified_depth)
        if not res:
            raise InvariantError(f"action broke consistency at {res.witness}: {res.message}")
    return q


def map_semifield(p: FlagPoint, h, recheck=False) -> FlagPoint:
    if h.source is not p.sf:
        raise DomainMismatch(f"hom source {h.source.name} differs from the point's {p.sf.name}")
    comps = {i: SemiVector(v.basis, h.target, {b: h.fn(x) for b, x in v.coeffs.items()}, check=False)
             for i, v in p.components.items()}
    q = normalize(replace(p, sf=h.target, components=comps, normalized=False))
    if recheck and p.verified_depth:
        q = verify(q, p.verified_depth)
    return q


# ---------------------------------------------------------------------------
# K = positive rationals, read over Q

def to_classical(p: FlagPoint, d=DEFAULT_DEPTH) -> dict:
    """Expanded components as dense rational vectors, checked over Q.

    Returns {lam: {label: Fraction}} for every lam of height <= d, with o read
    as 0.  Gamma(x_{lam+lam'}) = x_lam (x) x_lam' is verified with plain
    rational arithmetic on the integer structure constants.
    """
    if p.sf is not RATIONAL:
        raise DomainMismatch("to_classical needs the positive rationals")
    col = ExpandedCollection.of(p)
    store = p.store
    lams = p.weights(d)
    vecs = {}
    for lam in lams:
        m = store.module(lam)
        x = col[lam]
        vecs[lam] = {b: Fraction(x.coeffs.get(b, 0)) for b in m.labels}
    for lam in lams:
        for lam2 in lams:
            if height(lam) + height(lam2) > d:
                continue
            t = store.gamma(lam, lam2)
            big = vecs[add_weights(lam, lam2)]
            lhs = {}
            for b, row in t.rows.items():
                for s, e in row:
                    lhs[s] = lhs.get(s, 0) + e * big[b]
            for (b1, b2) in t.tensor.labels:
                if lhs.get((b1, b2), 0) != vecs[lam][b1] * vecs[lam2][b2]:
                    raise InvariantError(f"classical check fails for {lam}, {lam2} at {(b1, b2)}")
    return vecs
