"""
Classical module data over Q: canonical bases, divided-power operators with
natural-number entries, and the structure constants of Gamma.

Models
------
* A1: the divided-power basis f^(k) xi of V(n omega).
* A1xA1: products of A1 bases.
* minuscule V(omega_i) (all type-A fundamentals): weight basis, 0/1 entries.
* A2: images of the monomials f1^(a) f2^(b) f1^(c) and f2^(a) f1^(b) f2^(c),
  b >= a + c, in a tensor product of fundamental modules.
* A3 beyond fundamentals: bar-invariant reduction over Z[v, v^-1]
  (see ``quantum``), specialised at v = 1.

Nothing produced here is trusted: every divided-power matrix and every
Gamma coefficient is checked to be a natural number, and Chevalley
relations are checked over Q.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path

from . import quantum
from .based import BasedModule, GammaTable, NatMatrix, load_gamma, load_module, save, trivial_module
from .cartan import CartanDatum, CatalogError, add_weights, cartan, height, sub_weights
from .linalg import NotInSpan, SpanSolver, mat_mul, mat_vec, solve_exact

log = logging.getLogger(__name__)

CATALOG_VERSION = 1
# type -> maximal height served (None = unbounded in principle)
CATALOG = {"A1": None, "A1xA1": None, "A2": 6, "A3": 4}


class PositivityViolation(ValueError):
    pass


class EquivarianceError(ValueError):
    pass


class RelationError(AssertionError):
    pass


def in_catalog(c: CartanDatum, lam) -> bool:
    bound = CATALOG.get(c.label, -1)
    if bound == -1:
        return False
    return bound is None or height(lam) <= bound


def check_catalog(c, lam):
    if not in_catalog(c, lam):
        raise CatalogError(
            f"V{tuple(lam)} for {c.label} is outside the supported catalog "
            f"(version {CATALOG_VERSION}: {CATALOG})")


# ---------------------------------------------------------------------------
# minuscule factors and the classical tensor model

class Minuscule:
    """Weight-basis model of a minuscule fundamental module.

    States are weights; f_i sends mu to mu - alpha_i when <mu, alpha_i> = 1.
    """

    def __init__(self, c: CartanDatum, i0: int):
        self.cartan = c
        self.index_set = c.index_set
        self.highest = c.fundamental(i0)
        self.f = {i: {} for i in c.index_set}
        self.e = {i: {} for i in c.index_set}
        self.depth = {self.highest: 0}
        frontier = [self.highest]
        while frontier:
            nxt = []
            for mu in frontier:
                if any(abs(x) > 1 for x in mu):
                    raise CatalogError(f"omega_{i0} of {c.label} is not minuscule")
                for i in c.index_set:
                    if mu[i - 1] == 1:
                        nu = sub_weights(mu, c.simple_root(i))
                        self.f[i][mu] = nu
                        self.e[i][nu] = mu
                        if nu not in self.depth:
                            self.depth[nu] = self.depth[mu] + 1
                            nxt.append(nu)
            frontier = nxt
        self.states = sorted(self.depth, key=lambda s: (self.depth[s], tuple(-x for x in s)))
        self.order = {s: k for k, s in enumerate(self.states)}

    def l(self, i, s):
        return s[i - 1]


class TensorModel:
    """Classical (v = 1) action on a tensor product of minuscule modules."""

    def __init__(self, factors):
        self.factors = list(factors)

    def highest(self):
        return tuple(f.highest for f in self.factors)

    def _op(self, table, i, x):
        out = {}
        for pos, a in x.items():
            for j, s in enumerate(pos):
                t = table(self.factors[j], i).get(s)
                if t is None:
                    continue
                new = pos[:j] + (t,) + pos[j + 1:]
                w = out.get(new, 0) + a
                if w:
                    out[new] = w
                else:
                    out.pop(new, None)
        return out

    def f(self, i, x):
        return self._op(lambda fac, i: fac.f[i], i, x)

    def e(self, i, x):
        return self._op(lambda fac, i: fac.e[i], i, x)

    def f_divided(self, i, n, x):
        for _ in range(n):
            x = self.f(i, x)
            if not x:
                return x
        d = factorial(n)
        out = {}
        for pos, a in x.items():
            q = Fraction(a) / d
            out[pos] = int(q) if q.denominator == 1 else q
        return out

    def weight(self, pos):
        return tuple(sum(fac.l(i, s) for fac, s in zip(self.factors, pos))
                     for i in self.factors[0].index_set)

    def depth(self, pos):
        return sum(fac.depth[s] for fac, s in zip(self.factors, pos))

    def position_key(self, pos):
        return tuple(fac.order[s] for fac, s in zip(self.factors, pos))


def fundamental_factors(c: CartanDatum, lam):
    out = []
    for i, n in zip(c.index_set, lam):
        out.extend([Minuscule(c, i)] * n)
    return out


# ---------------------------------------------------------------------------
# rational modules

@dataclass(eq=False)
class RationalModule:
    """V(lambda) over Q written in its canonical basis.

    ``e[i]``/``f[i]`` are column-stored sparse matrices {col: {row: Fraction}}.
    ``vectors`` (when the module comes from a tensor model) gives each
    canonical basis element as a vector of that model.
    """

    cartan: CartanDatum
    lam: tuple
    labels: tuple
    weights: dict
    e: dict
    f: dict
    model: str
    vectors: dict = field(default=None, repr=False)
    tensor_model: object = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.labels)

    @property
    def highest(self):
        return self.labels[0]

    def weight_of(self, b):
        return tuple(self.weights[i][b] for i in self.cartan.index_set)

    def divided(self, kind, i, n):
        """e_i^(n) or f_i^(n) = (op)^n / n! over Q."""
        op = (self.e if kind == "e" else self.f)[i]
        M = {b: {b: Fraction(1)} for b in self.labels}
        for _ in range(n):
            M = mat_mul(op, M)
        d = factorial(n)
        return {c: {r: x / d for r, x in col.items()} for c, col in M.items() if col}

    def check_relations(self):
        """Chevalley and Serre relations, exactly, on every basis vector."""
        c = self.cartan
        for b in self.labels:
            v = {b: Fraction(1)}
            for i in c.index_set:
                for j in c.index_set:
                    ef = mat_vec(self.e[i], mat_vec(self.f[j], v))
                    fe = mat_vec(self.f[j], mat_vec(self.e[i], v))
                    comm = _sub(ef, fe)
                    want = {b: Fraction(self.weights[i][b])} if i == j and self.weights[i][b] else {}
                    if comm != want:
                        raise RelationError(f"[e_{i}, f_{j}] fails on {b} in {self.lam}")
                    if i == j:
                        continue
                    for ops, name in ((self.e, "e"), (self.f, "f")):
                        if c.a(i, j) == 0:
                            lhs = _sub(mat_vec(ops[i], mat_vec(ops[j], v)),
                                       mat_vec(ops[j], mat_vec(ops[i], v)))
                        else:
                            iij = mat_vec(ops[i], mat_vec(ops[i], mat_vec(ops[j], v)))
                            iji = mat_vec(ops[i], mat_vec(ops[j], mat_vec(ops[i], v)))
                            jii = mat_vec(ops[j], mat_vec(ops[i], mat_vec(ops[i], v)))
                            lhs = _sub(_add(iij, jii), {k: 2 * x for k, x in iji.items()})
                        if lhs:
                            raise RelationError(f"Serre relation for {name}_{i}, {name}_{j} fails")
        return True


def _add(x, y):
    out = dict(x)
    for k, v in y.items():
        w = out.get(k, 0) + v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def _sub(x, y):
    return _add(x, {k: -v for k, v in y.items()})


def _label_order(entries):
    """entries: (depth, weight, tiebreak, payload) -> sorted list."""
    return sorted(entries, key=lambda t: (t[0], tuple(-x for x in t[1]), t[2]))


def _trivial_rational(c):
    return RationalModule(c, c.zero(), ("b0",), {i: {"b0": 0} for i in c.index_set},
                          {i: {} for i in c.index_set}, {i: {} for i in c.index_set}, "trivial")


def _a1_module(c, n):
    labels = tuple(f"b{k}" for k in range(n + 1))
    e = {1: {labels[k]: {labels[k - 1]: Fraction(n - k + 1)} for k in range(1, n + 1)}}
    f = {1: {labels[k]: {labels[k + 1]: Fraction(k + 1)} for k in range(n)}}
    w = {1: {labels[k]: n - 2 * k for k in range(n + 1)}}
    return RationalModule(c, (n,), labels, w, e, f, "sl2-divided-powers")


def _a1xa1_module(c, lam):
    a1 = cartan("A1")
    m1, m2 = _a1_module(a1, lam[0]), _a1_module(a1, lam[1])
    pairs = _label_order(
        [(k1 + k2, (lam[0] - 2 * k1, lam[1] - 2 * k2), (k1, k2), (k1, k2))
         for k1 in range(lam[0] + 1) for k2 in range(lam[1] + 1)])
    name = {t[3]: f"b{k}" for k, t in enumerate(pairs)}
    labels = tuple(name[t[3]] for t in pairs)
    e = {1: {}, 2: {}}
    f = {1: {}, 2: {}}
    w = {1: {}, 2: {}}
    for (k1, k2), b in name.items():
        w[1][b] = lam[0] - 2 * k1
        w[2][b] = lam[1] - 2 * k2
        for src, ops, factor in ((m1.e[1], e[1], 0), (m1.f[1], f[1], 0),
                                 (m2.e[1], e[2], 1), (m2.f[1], f[2], 1)):
            k = (k1, k2)[factor]
            col = src.get(f"b{k}", {})
            for row, x in col.items():
                kk = int(row[1:])
                tgt = (kk, k2) if factor == 0 else (k1, kk)
                ops.setdefault(b, {})[name[tgt]] = x
    return RationalModule(c, tuple(lam), labels, w, e, f, "sl2xsl2-product")


def _from_vectors(c, lam, tm: TensorModel, vectors, model):
    """Assemble a RationalModule from canonical basis vectors in a tensor model."""
    entries = []
    for v in vectors:
        pos = min(v, key=tm.position_key)
        entries.append((tm.depth(pos), tm.weight(pos), tm.position_key(pos), v))
    entries = _label_order(entries)
    labels = tuple(f"b{k}" for k in range(len(entries)))
    vec = {b: t[3] for b, t in zip(labels, entries)}
    wt = {b: t[1] for b, t in zip(labels, entries)}
    by_weight = {}
    for b in labels:
        by_weight.setdefault(wt[b], []).append(b)
    solvers = {}
    for mu, bs in by_weight.items():
        s = SpanSolver([vec[b] for b in bs], order=tm.position_key)
        if s.dependent:
            raise PositivityViolation(f"canonical basis candidates at weight {mu} are dependent")
        solvers[mu] = (s, bs)

    def coords(x):
        if not x:
            return {}
        mu = tm.weight(next(iter(x)))
        if mu not in solvers:
            raise NotInSpan(f"weight {mu} not in the module")
        s, bs = solvers[mu]
        return {b: a for b, a in zip(bs, s.coords(x)) if a}

    e = {i: {} for i in c.index_set}
    f = {i: {} for i in c.index_set}
    for b in labels:
        for i in c.index_set:
            col = coords(tm.e(i, vec[b]))
            if col:
                e[i][b] = col
            col = coords(tm.f(i, vec[b]))
            if col:
                f[i][b] = col
    weights = {i: {b: wt[b][i - 1] for b in labels} for i in c.index_set}
    return RationalModule(c, tuple(lam), labels, weights, e, f, model, vec, tm)


def weyl_dimension(c: CartanDatum, lam) -> int:
    """Weyl dimension formula for the supported types."""
    if c.label == "A1":
        return lam[0] + 1
    if c.label == "A1xA1":
        return (lam[0] + 1) * (lam[1] + 1)
    r = c.rank
    num, den = 1, 1
    # type A_r: product over positive roots alpha_{i..j} of (<lam+rho, alpha>)/(<rho, alpha>)
    for i in range(r):
        for j in range(i, r):
            s = sum(lam[i:j + 1]) + (j - i + 1)
            num *= s
            den *= (j - i + 1)
    return num // den


def _a2_monomial_vectors(c, lam):
    tm = TensorModel(fundamental_factors(c, lam))
    top = {tm.highest(): 1}
    N = height(lam)
    seen = []
    keys = set()
    for first, second in ((1, 2), (2, 1)):
        for a in range(N + 1):
            for cc in range(N + 1):
                for b in range(a + cc, N + 1):
                    v = tm.f_divided(first, cc, top)
                    v = tm.f_divided(second, b, v) if v else v
                    v = tm.f_divided(first, a, v) if v else v
                    if not v:
                        continue
                    key = frozenset(v.items())
                    if key not in keys:
                        keys.add(key)
                        seen.append(v)
    for v in seen:
        for x in v.values():
            if not isinstance(x, int):
                raise PositivityViolation("A2 monomial has non-integral tensor coordinates")
    return tm, seen


def _q_engine_vectors(c, lam):
    factors = fundamental_factors(c, lam)
    qm = quantum.QTensorModel(factors)
    tm = TensorModel(factors)
    found = quantum.canonical_basis_q(qm, c.index_set, tm.depth, tm.position_key)
    vectors = []
    for _, x in found:
        v = {pos: quantum.lp_eval1(p) for pos, p in x.items()}
        vectors.append({pos: a for pos, a in v.items() if a})
    return tm, vectors


def canonical_vectors(c, lam, method=None):
    """Canonical basis of V(lam) as vectors in a tensor model of fundamentals."""
    if method is None:
        if sum(1 for n in lam if n) == 1 and height(lam) == 1:
            method = "minuscule"
        elif c.label == "A2":
            method = "monomial"
        else:
            method = "quantum"
    if method == "minuscule":
        tm = TensorModel(fundamental_factors(c, lam))
        (fac,) = tm.factors
        return tm, [{(s,): 1} for s in fac.states], "minuscule"
    if method == "monomial":
        if c.label != "A2":
            raise CatalogError("the monomial model is specific to A2")
        tm, vs = _a2_monomial_vectors(c, lam)
        return tm, vs, "a2-monomial"
    if method == "quantum":
        tm, vs = _q_engine_vectors(c, lam)
        return tm, vs, "bar-invariant-reduction"
    raise ValueError(f"unknown method {method!r}")


def build_classical_module(c, lam, method=None) -> RationalModule:
    c = cartan(c) if isinstance(c, str) else c
    lam = tuple(lam)
    check_catalog(c, lam)
    if not any(lam):
        return _trivial_rational(c)
    if c.label == "A1":
        m = _a1_module(c, lam[0])
    elif c.label == "A1xA1":
        m = _a1xa1_module(c, lam)
    else:
        tm, vs, model = canonical_vectors(c, lam, method)
        m = _from_vectors(c, lam, tm, vs, model)
    if m.dim != weyl_dimension(c, lam):
        raise PositivityViolation(
            f"{c.label} V{lam}: canonical basis has {m.dim} elements, expected {weyl_dimension(c, lam)}")
    m.check_relations()
    return m


def extract_nat_operators(m: RationalModule) -> BasedModule:
    c = m.cartan
    key = ("V", c.label, m.lam)
    E, F = {}, {}
    for i in c.index_set:
        vals = m.weights[i].values()
        bound = (max(vals) - min(vals)) // 2
        E[i], F[i] = {}, {}
        for kind, store in (("e", E[i]), ("f", F[i])):
            for n in range(1, bound + 1):
                M = m.divided(kind, i, n)
                cols = {}
                for col, entries in M.items():
                    row = []
                    for r, x in entries.items():
                        if x.denominator != 1 or x < 0:
                            raise PositivityViolation(
                                f"{kind}_{i}^({n}) has entry {x} at ({r}, {col}) in {c.label} V{m.lam}")
                        row.append((r, int(x)))
                    cols[col] = tuple(row)
                if cols:
                    store[n] = NatMatrix(key, key, cols)
            beyond = m.divided(kind, i, bound + 1)
            if beyond:
                raise PositivityViolation(f"{kind}_{i}^({bound + 1}) is not zero")
    return BasedModule(c, m.lam, m.labels, m.highest, E, F,
                       {i: dict(m.weights[i]) for i in c.index_set}).validate()


# ---------------------------------------------------------------------------
# Gamma

def _delta(ops_left, ops_right, x):
    """Classical coproduct action (op (x) 1 + 1 (x) op) on a tensor vector."""
    out = {}
    for (b1, b2), a in x.items():
        for r, c in ops_left.get(b1, ()):
            k = (r, b2)
            out[k] = out.get(k, 0) + a * c
        for r, c in ops_right.get(b2, ()):
            k = (b1, r)
            out[k] = out.get(k, 0) + a * c
    return {k: v for k, v in out.items() if v}


def _first(mod, kind, i):
    M = (mod.E if kind == "e" else mod.F)[i].get(1)
    return M.cols if M else {}


def gamma_from_modules(total: BasedModule, left: BasedModule, right: BasedModule) -> GammaTable:
    """Equivariant map V(lam+lam') -> V(lam) (x) V(lam') on canonical bases.

    Solved weight space by weight space from the top: for every f_i and every
    already-known vector above, Gamma(f_i b') = Delta(f_i) Gamma(b').  The
    system is over-determined; inconsistencies raise ``EquivarianceError``.
    """
    c = total.cartan
    if add_weights(left.lam, right.lam) != total.lam:
        raise ValueError("weights do not add up")
    depth = {total.highest: 0}
    # depth of a weight = height of (lam - mu) in simple roots; walk f_i columns
    frontier = [total.highest]
    while frontier:
        nxt = []
        for b in frontier:
            for i in c.index_set:
                for r, _ in _first(total, "f", i).get(b, ()):
                    if r not in depth:
                        depth[r] = depth[b] + 1
                        nxt.append(r)
        frontier = nxt
    if len(depth) != total.dim:
        raise EquivarianceError("module is not generated by f_i from its highest vector")
    by_weight = {}
    for b in total.labels:
        by_weight.setdefault(total.weight_of(b), []).append(b)
    weights_sorted = sorted(by_weight, key=lambda mu: depth[by_weight[mu][0]])
    gamma = {total.highest: {(left.highest, right.highest): Fraction(1)}}
    for mu in weights_sorted:
        bs = by_weight[mu]
        if total.highest in bs:
            continue
        eqs, rhs = [], []
        for i in c.index_set:
            cols = _first(total, "f", i)
            for bp in total.labels:
                if bp not in gamma:
                    continue
                col = dict(cols.get(bp, ()))
                if not any(b in col for b in bs):
                    continue
                if total.weight_of(bp) != add_weights(mu, c.simple_root(i)):
                    continue
                eqs.append([col.get(b, 0) for b in bs])
                rhs.append(_delta(_first(left, "f", i), _first(right, "f", i), gamma[bp]))
        if not eqs:
            raise EquivarianceError(f"no equations reach weight {mu}")
        coords = sorted({k for r in rhs for k in r})
        sol = {b: {} for b in bs}
        for s in coords:
            try:
                x = solve_exact(eqs, [r.get(s, 0) for r in rhs])
            except NotInSpan:
                raise EquivarianceError(f"conflicting equations at weight {mu}, tensor label {s}")
            for b, xb in zip(bs, x):
                if xb:
                    sol[b][s] = xb
        gamma.update(sol)
    # post-check with e_i as well
    for b in total.labels:
        for i in c.index_set:
            for kind in ("e", "f"):
                lhs = {}
                for r, k in _first(total, kind, i).get(b, ()):
                    for s, x in gamma[r].items():
                        lhs[s] = lhs.get(s, 0) + k * x
                lhs = {s: x for s, x in lhs.items() if x}
                if lhs != _delta(_first(left, kind, i), _first(right, kind, i), gamma[b]):
                    raise EquivarianceError(f"Gamma does not intertwine {kind}_{i} at {b}")
    rows = {}
    for b in total.labels:
        row = []
        for s, x in sorted(gamma[b].items(), key=lambda t: (left.index[t[0][0]], right.index[t[0][1]])):
            if x.denominator != 1 or x < 0:
                raise PositivityViolation(f"Gamma coefficient {x} at ({b}, {s}) for {left.lam}+{right.lam}")
            row.append((s, int(x)))
        rows[b] = row
    return GammaTable(total, left, right, rows).validate()


def compute_gamma_table(c, lam, lam2, store=None) -> GammaTable:
    c = cartan(c) if isinstance(c, str) else c
    store = store or get_store(c)
    return store.gamma(tuple(lam), tuple(lam2))


# ---------------------------------------------------------------------------
# data store

def _wkey(lam):
    return "_".join(str(x) for x in lam)


def module_filename(c, lam):
    return f"V_{c.label}_{_wkey(lam)}.json"


def gamma_filename(c, lam, lam2):
    return f"G_{c.label}_{_wkey(lam)}__{_wkey(lam2)}.json"


class DataStore:
    """Lazily generated (or loaded) module data and Gamma tables for one type."""

    def __init__(self, c: CartanDatum, data_dir=None):
        self.cartan = c
        self.data_dir = Path(data_dir) if data_dir else None
        self._rational = {}
        self._modules = {}
        self._gammas = {}

    @property
    def max_height(self):
        return CATALOG[self.cartan.label]

    def supports(self, lam) -> bool:
        return in_catalog(self.cartan, lam)

    def rational(self, lam) -> RationalModule:
        lam = tuple(lam)
        if lam not in self._rational:
            self._rational[lam] = build_classical_module(self.cartan, lam)
        return self._rational[lam]

    def module(self, lam) -> BasedModule:
        lam = tuple(lam)
        if lam in self._modules:
            return self._modules[lam]
        if not any(lam):
            m = trivial_module(self.cartan)
        else:
            path = self.data_dir / module_filename(self.cartan, lam) if self.data_dir else None
            if path is not None and path.exists():
                m = load_module(path)
            else:
                m = extract_nat_operators(self.rational(lam))
                log.debug("generated %s V%s (dim %d)", self.cartan.label, lam, m.dim)
        self._modules[lam] = m
        return m

    def fundamental(self, i) -> BasedModule:
        return self.module(self.cartan.fundamental(i))

    def gamma(self, lam, lam2) -> GammaTable:
        lam, lam2 = tuple(lam), tuple(lam2)
        key = (lam, lam2)
        if key in self._gammas:
            return self._gammas[key]
        total = add_weights(lam, lam2)
        check_catalog(self.cartan, total)
        path = self.data_dir / gamma_filename(self.cartan, lam, lam2) if self.data_dir else None
        if path is not None and path.exists():
            t = load_gamma(path, self.module)
        else:
            t = gamma_from_modules(self.module(total), self.module(lam), self.module(lam2))
        self._gammas[key] = t
        return t


_STORES = {}


def get_store(c, data_dir=None) -> DataStore:
    c = cartan(c) if isinstance(c, str) else c
    key = (c.label, str(data_dir) if data_dir else None)
    if key not in _STORES:
        _STORES[key] = DataStore(c, data_dir)
    return _STORES[key]


def export_module_data(obj, path):
    save(obj, path)
    return path


def generate(c, depth, out_dir=None, extra=(), store=None):
    """All modules of height <= depth (plus ``extra``) and Gamma tables for
    every pair of nonzero weights whose sum has height <= depth.

    Returns (modules, tables); writes JSON files when ``out_dir`` is given.
    """
    c = cartan(c) if isinstance(c, str) else c
    store = store or get_store(c)
    lams = [lam for lam in c.dominant_weights(depth) if any(lam) and store.supports(lam)]
    for lam in extra:
        lam = tuple(lam)
        if lam not in lams:
            lams.append(lam)
    modules = [store.module(lam) for lam in lams]
    tables = []
    for lam in lams:
        for lam2 in lams:
            total = add_weights(lam, lam2)
            if store.supports(total) and (height(total) <= depth or total in lams):
                tables.append(store.gamma(lam, lam2))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for m in modules:
            export_module_data(m, Path(out_dir) / module_filename(c, m.lam))
        for t in tables:
            export_module_data(t, Path(out_dir) / gamma_filename(c, t.lam, t.lam2))
    return modules, tables
