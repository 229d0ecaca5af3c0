"""
Canonical bases of V(lambda) through bar-invariant reduction.

V(lambda) is realised inside a tensor product of minuscule modules over
Z[v, v^-1], with the coproduct  Delta(F_i) = F_i (x) K_{-i} + 1 (x) F_i.
The lattice L spanned over Z[v^-1] by the tensor basis contains the
canonical basis, each element congruent to a single tensor basis vector
mod v^-1 L.  Divided-power monomials applied to the highest weight vector
are bar invariant; subtracting bar-symmetric multiples of elements already
found leaves the canonical basis.  The result is checked, not assumed:
every element found must be congruent to a distinct tensor basis vector.
"""

from __future__ import annotations

from collections import defaultdict

# Laurent polynomials: dict exponent -> int, zero coefficients dropped.


def lp_add(p, q, scale=1, shift=0):
    out = dict(p)
    for e, c in q.items():
        e += shift
        w = out.get(e, 0) + scale * c
        if w:
            out[e] = w
        else:
            out.pop(e, None)
    return out


def lp_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            w = out.get(e, 0) + c1 * c2
            if w:
                out[e] = w
            else:
                out.pop(e, None)
    return out


def lp_divexact(p, d):
    """p / d for Laurent polynomials, raising if the division is not exact."""
    p = dict(p)
    dlo, dhi = min(d), max(d)
    lead = d[dhi]
    out = {}
    steps = (max(p) - min(p)) - (dhi - dlo) + 1 if p else 0
    for _ in range(max(steps, 0)):
        if not p:
            break
        top = max(p)
        c, r = divmod(p[top], lead)
        if r:
            raise ArithmeticError("inexact Laurent division")
        out[top - dhi] = c
        p = lp_add(p, d, scale=-c, shift=top - dhi)
    if p:
        raise ArithmeticError("inexact Laurent division")
    return out


def qint(n):
    """[n] = v^(n-1) + v^(n-3) + ... + v^(1-n)."""
    return {n - 1 - 2 * k: 1 for k in range(n)}


def qfact(n):
    out = {0: 1}
    for k in range(2, n + 1):
        out = lp_mul(out, qint(k))
    return out


def lp_eval1(p):
    return sum(p.values())


def lp_bar(p):
    return {-e: c for e, c in p.items()}


# vectors: dict position -> Laurent polynomial

def vec_add(x, y, scale_poly=None):
    out = dict(x)
    for pos, p in y.items():
        if scale_poly is not None:
            p = lp_mul(scale_poly, p)
        q = lp_add(out.get(pos, {}), p)
        if q:
            out[pos] = q
        else:
            out.pop(pos, None)
    return out


class QTensorModel:
    """Tensor product of minuscule modules over Z[v, v^-1].

    Each factor is a ``Minuscule`` (see datagen); positions are tuples of
    factor states.
    """

    def __init__(self, factors):
        self.factors = list(factors)

    def highest(self):
        return tuple(f.highest for f in self.factors)

    def F(self, i, x):
        out = {}
        for pos, p in x.items():
            k = len(pos)
            tail = [0] * (k + 1)
            for j in range(k - 1, -1, -1):
                tail[j] = tail[j + 1] + self.factors[j].l(i, pos[j])
            for j in range(k):
                nxt = self.factors[j].f.get(i, {}).get(pos[j])
                if nxt is None:
                    continue
                new = pos[:j] + (nxt,) + pos[j + 1:]
                shift = -tail[j + 1]
                q = lp_add(out.get(new, {}), p, shift=shift)
                if q:
                    out[new] = q
                else:
                    out.pop(new, None)
        return out

    def F_divided(self, i, n, x):
        for _ in range(n):
            x = self.F(i, x)
            if not x:
                return x
        if n > 1:
            d = qfact(n)
            x = {pos: lp_divexact(p, d) for pos, p in x.items()}
        return x


class ReductionStuck(RuntimeError):
    pass


def _top_degree(p):
    return max(p) if p else None


def canonical_basis_q(model: QTensorModel, index_set, depth_of, position_key):
    """Canonical basis of the submodule generated by the highest tensor.

    Returns a list of (leading position, vector) with Laurent coefficients,
    ordered by depth.  ``depth_of(pos)`` gives the depth of a position and
    ``position_key`` orders positions within a weight space.
    """
    top = model.highest()
    found = [(top, {top: {0: 1}})]
    by_depth = defaultdict(list)
    by_depth[0].append(found[0])
    d = 0
    while True:
        d += 1
        candidates = []
        for d0 in range(d):
            for lead, g in by_depth[d0]:
                n = d - d0
                for i in index_set:
                    x = model.F_divided(i, n, g)
                    if x:
                        candidates.append(x)
        if not candidates:
            break
        groups = defaultdict(list)
        for x in candidates:
            pos = next(iter(x))
            groups[_weight_sig(model, pos)].append(x)
        layer = []
        for sig in sorted(groups):
            layer.extend(_reduce_weight_space(groups[sig], position_key))
        layer.sort(key=lambda t: position_key(t[0]))
        by_depth[d] = layer
        found.extend(layer)
    return found


def _weight_sig(model, pos):
    return tuple(sum(f.l(i, s) for f, s in zip(model.factors, pos))
                 for i in model.factors[0].index_set)


def _classical_rank(vectors):
    from .linalg import SpanSolver
    return SpanSolver([{p: lp_eval1(c) for p, c in x.items()} for x in vectors]).rank


def _reduce_weight_space(cands, position_key):
    dim = _classical_rank(cands)
    clean = {}  # leading position -> vector
    pending = list(cands)
    progress = True
    while len(clean) < dim and progress:
        progress = False
        rest = []
        for x in pending:
            x = _reduce(x, clean)
            if not x:
                continue
            lead = _clean_lead(x)
            if lead is None:
                rest.append(x)
                continue
            pos, sign = lead
            if sign < 0:
                x = {p: {e: -c for e, c in q.items()} for p, q in x.items()}
            clean[pos] = x
            progress = True
        pending = rest
    if len(clean) != dim:
        raise ReductionStuck(f"found {len(clean)} of {dim} canonical elements in a weight space")
    return sorted(clean.items(), key=lambda t: position_key(t[0]))


def _reduce(x, clean):
    while True:
        best = None
        for pos, p in x.items():
            if pos in clean:
                t = _top_degree(p)
                if t >= 0 and (best is None or t > best[0]):
                    best = (t, pos)
        if best is None:
            return x
        t, pos = best
        c = x[pos][t]
        mult = {0: c} if t == 0 else {t: c, -t: c}
        x = vec_add(x, clean[pos], scale_poly={e: -a for e, a in mult.items()})


def _clean_lead(x):
    """(position, +-1) if x is +-(tensor basis vector) mod v^-1 L, else None."""
    lead = None
    for pos, p in x.items():
        t = _top_degree(p)
        if t > 0:
            return None
        if t == 0:
            if lead is not None or abs(p[0]) != 1:
                return None
            lead = (pos, p[0])
    return lead
