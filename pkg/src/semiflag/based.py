"""
Based modules (V, beta) with natural-number operator data, and the
semivector spaces V(K) built from them.

A ``SemiVector`` is a sparse map from basis labels to elements of K; a label
that is absent carries o.  All arithmetic goes through the semifield's raw
operation table, so the same code serves every K.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .cartan import CartanDatum, add_weights, cartan, weight_key, parse_weight_key
from .semifield import CIRC, DomainMismatch, Semifield, Val, get_semifield

SCHEMA_VERSION = 1


class ValidationError(ValueError):
    pass


class BasisMismatch(DomainMismatch):
    pass


# ---------------------------------------------------------------------------
# sparse N-matrices

class NatMatrix:
    """Sparse matrix with positive integer entries, stored by column.

    ``cols[b]`` lists ``(b', c)`` meaning the basis vector b maps to
    ``sum c * b'``.  Zero entries are never stored.
    """

    __slots__ = ("src", "dst", "cols")

    def __init__(self, src, dst, cols):
        self.src = src
        self.dst = dst
        clean = {}
        for col, entries in cols.items():
            row = tuple((r, int(c)) for r, c in entries if c)
            for r, c in row:
                if c < 0:
                    raise ValidationError(f"negative entry {c} at ({r}, {col})")
            if row:
                clean[col] = row
        self.cols = clean

    def __eq__(self, other):
        return (isinstance(other, NatMatrix) and self.src == other.src
                and self.dst == other.dst
                and {k: sorted(v) for k, v in self.cols.items()}
                == {k: sorted(v) for k, v in other.cols.items()})

    def is_zero(self):
        return not self.cols

    def __matmul__(self, other: "NatMatrix") -> "NatMatrix":
        """Composition self after other, formed over N."""
        if other.dst != self.src:
            raise BasisMismatch("matrix product: inner bases differ")
        cols = {}
        for col, entries in other.cols.items():
            acc = {}
            for mid, c in entries:
                for row, d in self.cols.get(mid, ()):
                    acc[row] = acc.get(row, 0) + c * d
            cols[col] = tuple(acc.items())
        return NatMatrix(other.src, self.dst, cols)

    def entries(self):
        for col, rows in self.cols.items():
            for row, c in rows:
                yield row, col, c

    @classmethod
    def identity(cls, basis):
        return cls(basis.key, basis.key, {b: ((b, 1),) for b in basis.labels})


# ---------------------------------------------------------------------------
# modules

@dataclass(eq=False)
class BasedModule:
    """The canonical-basis data of one irreducible module V(lambda).

    ``E[i][n]`` and ``F[i][n]`` hold e_i^(n), f_i^(n) for 1 <= n <= the
    nilpotency bound; ``weights[i][b]`` is l_i(b).
    """

    cartan: CartanDatum
    lam: tuple
    labels: tuple
    highest: str
    E: dict
    F: dict
    weights: dict
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.lam = tuple(self.lam)
        self.labels = tuple(self.labels)
        self.index = {b: k for k, b in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValidationError("duplicate basis labels")

    @property
    def key(self):
        return ("V", self.cartan.label, self.lam)

    @property
    def dim(self):
        return len(self.labels)

    def __repr__(self):
        return f"<BasedModule {self.cartan.label} lambda={self.lam} dim={self.dim}>"

    def nilpotency_bound(self, i: int) -> int:
        vals = list(self.weights[i].values())
        return (max(vals) - min(vals)) // 2

    def e(self, i: int, n: int) -> NatMatrix:
        return self.E[i].get(n) or NatMatrix(self.key, self.key, {})

    def f(self, i: int, n: int) -> NatMatrix:
        return self.F[i].get(n) or NatMatrix(self.key, self.key, {})

    def weight_of(self, b) -> tuple:
        return tuple(self.weights[i][b] for i in self.cartan.index_set)

    def validate(self):
        c = self.cartan
        if self.highest not in self.index:
            raise ValidationError("highest label not in basis")
        for i in c.index_set:
            if set(self.weights[i]) != set(self.labels):
                raise ValidationError(f"weight table for i={i} incomplete")
            if self.weights[i][self.highest] != self.lam[i - 1]:
                raise ValidationError("l_i of the highest vector must equal lambda_i")
            if self.e(i, 1).cols.get(self.highest):
                raise ValidationError("e_i must kill the highest weight vector")
            bound = self.nilpotency_bound(i)
            for ops, sign in ((self.E[i], 1), (self.F[i], -1)):
                for n, M in ops.items():
                    if n < 1 or n > bound:
                        raise ValidationError(f"operator power {n} beyond nilpotency bound {bound}")
                    if M.src != self.key or M.dst != self.key:
                        raise ValidationError("operator basis keys inconsistent")
                    for row, col, v in M.entries():
                        if v <= 0:
                            raise ValidationError(f"non-natural entry {v}")
                        if row not in self.index or col not in self.index:
                            raise ValidationError("operator refers to unknown basis label")
                        if self.weights[i][row] - self.weights[i][col] != sign * 2 * n:
                            raise ValidationError(
                                f"operator ({i},{n}) breaks the weight shift at ({row},{col})")
        return self

    # serialization -------------------------------------------------------
    def to_dict(self):
        def mat(M):
            return {col: [[row, c] for row, c in rows] for col, rows in M.cols.items()}

        return {
            "schema": SCHEMA_VERSION,
            "kind": "module",
            "cartan": self.cartan.label,
            "lambda": list(self.lam),
            "basis": list(self.labels),
            "highest": self.highest,
            "ops": {
                str(i): {
                    "e": {str(n): mat(M) for n, M in sorted(self.E[i].items())},
                    "f": {str(n): mat(M) for n, M in sorted(self.F[i].items())},
                }
                for i in self.cartan.index_set
            },
            "weights": {str(i): [self.weights[i][b] for b in self.labels]
                        for i in self.cartan.index_set},
        }

    @classmethod
    def from_dict(cls, d):
        _check_header(d, "module")
        c = cartan(d["cartan"])
        lam = tuple(d["lambda"])
        labels = tuple(d["basis"])
        key = ("V", c.label, lam)

        def mat(obj):
            cols = {}
            for col, rows in obj.items():
                for row, v in rows:
                    _check_nat(v)
                cols[col] = tuple((row, v) for row, v in rows)
            return NatMatrix(key, key, cols)

        E, F, W = {}, {}, {}
        for i in c.index_set:
            ops = d["ops"][str(i)]
            E[i] = {int(n): mat(m) for n, m in ops["e"].items()}
            F[i] = {int(n): mat(m) for n, m in ops["f"].items()}
            vals = d["weights"][str(i)]
            if len(vals) != len(labels):
                raise ValidationError("weight list length differs from basis size")
            W[i] = dict(zip(labels, (int(v) for v in vals)))
        return cls(c, lam, labels, d["highest"], E, F, W).validate()


def trivial_module(c: CartanDatum) -> BasedModule:
    """V(0): one basis vector, every operator zero."""
    return BasedModule(c, c.zero(), ("b0",), "b0",
                       {i: {} for i in c.index_set}, {i: {} for i in c.index_set},
                       {i: {"b0": 0} for i in c.index_set})


def _check_nat(v):
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ValidationError(f"coefficient {v!r} is not a natural number")


def _check_header(d, kind):
    if d.get("schema") != SCHEMA_VERSION:
        raise ValidationError(f"unknown schema version {d.get('schema')!r}")
    if d.get("kind", kind) != kind:
        raise ValidationError(f"expected a {kind} document, got {d.get('kind')!r}")


class TensorBasis:
    """Basis S = beta x beta' of V(lambda) (x) V(lambda')."""

    def __init__(self, left: BasedModule, right: BasedModule):
        if left.cartan != right.cartan:
            raise BasisMismatch("tensor factors from different Cartan data")
        self.left = left
        self.right = right
        self.labels = tuple((b, b2) for b in left.labels for b2 in right.labels)
        self.index = {s: k for k, s in enumerate(self.labels)}

    @property
    def key(self):
        return ("T", self.left.key, self.right.key)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        return isinstance(other, TensorBasis) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def weight_of(self, s, i):
        return self.left.weights[i][s[0]] + self.right.weights[i][s[1]]


# ---------------------------------------------------------------------------
# semivectors

class SemiVector:
    """Element of V(K): a finitely supported map basis -> K^!.

    ``coeffs`` holds raw K values; o-coefficients are simply absent, so
    structural equality is semantic equality.
    """

    __slots__ = ("basis", "sf", "coeffs")

    def __init__(self, basis, sf: Semifield, coeffs=None, check=True):
        self.basis = basis
        self.sf = sf
        coeffs = dict(coeffs or {})
        if check:
            for b, x in coeffs.items():
                if b not in basis.index:
                    raise BasisMismatch(f"label {b!r} not in basis {basis.key}")
                if not sf.contains(x):
                    raise ValueError(f"{x!r} is not an element of {sf.name}")
        self.coeffs = coeffs

    @classmethod
    def zero(cls, basis, sf):
        return cls(basis, sf, {}, check=False)

    @classmethod
    def basis_vector(cls, basis, sf, b, k=None):
        return cls(basis, sf, {b: sf.one if k is None else k})

    def is_zero(self):
        return not self.coeffs

    def __getitem__(self, b):
        if b not in self.basis.index:
            raise BasisMismatch(f"label {b!r} not in basis")
        x = self.coeffs.get(b)
        return CIRC if x is None else Val(self.sf, x)

    def support(self) -> list:
        idx = self.basis.index
        return sorted(self.coeffs, key=idx.__getitem__)

    def leading(self):
        """First supported label in basis order, or None for the zero vector."""
        if not self.coeffs:
            return None
        idx = self.basis.index
        return min(self.coeffs, key=idx.__getitem__)

    def _same_space(self, other):
        if self.basis.key != other.basis.key:
            raise BasisMismatch("semivectors over different bases")
        if self.sf is not other.sf:
            raise DomainMismatch("semivectors over different semifields")

    def __eq__(self, other):
        if not isinstance(other, SemiVector):
            return NotImplemented
        return (self.basis.key == other.basis.key and self.sf is other.sf
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.basis.key, self.sf.name, frozenset(self.coeffs.items())))

    def __add__(self, other):
        return vk_add(self, other)

    def __repr__(self):
        fmt = self.sf.format
        body = ", ".join(f"{b}:{fmt(self.coeffs[b])}" for b in self.support())
        return "{" + body + "}"

    def to_json(self):
        return {str(b) if not isinstance(b, tuple) else "|".join(b): self.sf.to_json(self.coeffs[b])
                for b in self.support()}

    @classmethod
    def from_json(cls, basis, sf, obj):
        coeffs = {}
        for b, x in obj.items():
            label = tuple(b.split("|")) if isinstance(basis, TensorBasis) else b
            if x in ("o", None):
                continue
            coeffs[label] = sf.from_json(x)
        return cls(basis, sf, coeffs)


def vk_add(u: SemiVector, v: SemiVector) -> SemiVector:
    u._same_space(v)
    add = u.sf.add
    out = dict(u.coeffs)
    for b, y in v.coeffs.items():
        x = out.get(b)
        out[b] = y if x is None else add(x, y)
    return SemiVector(u.basis, u.sf, out, check=False)


def vk_scale(k, v: SemiVector) -> SemiVector:
    """k . v for k in K^! (``CIRC``, a ``Val``, or a raw K value)."""
    if k is CIRC:
        return SemiVector.zero(v.basis, v.sf)
    if isinstance(k, Val):
        if k.sf is not v.sf:
            raise DomainMismatch("scalar and vector over different semifields")
        k = k.value
    mul = v.sf.mul
    return SemiVector(v.basis, v.sf, {b: mul(k, x) for b, x in v.coeffs.items()}, check=False)


def _apply_cols(cols, sf, coeffs):
    add, scale = sf.add, sf.nat_scale
    out = {}
    for col, x in coeffs.items():
        for row, c in cols.get(col, ()):
            y = x if c == 1 else scale(c, x)
            z = out.get(row)
            out[row] = y if z is None else add(z, y)
    return out


def apply_nat_matrix(M: NatMatrix, v: SemiVector, target=None) -> SemiVector:
    """The transported morphism f(K) applied to v."""
    if M.src != v.basis.key:
        raise BasisMismatch("matrix columns do not match the vector's basis")
    if target is None:
        if M.dst != v.basis.key:
            raise BasisMismatch("target basis required for a non-endomorphism")
        target = v.basis
    elif target.key != M.dst:
        raise BasisMismatch("target basis does not match matrix rows")
    return SemiVector(target, v.sf, _apply_cols(M.cols, v.sf, v.coeffs), check=False)


def E_K(v: SemiVector, v2: SemiVector, tb: TensorBasis = None) -> SemiVector:
    """Coefficientwise product into the tensor object (bilinear, not additive)."""
    if tb is None:
        tb = TensorBasis(v.basis, v2.basis)
    if tb.left.key != v.basis.key or tb.right.key != v2.basis.key:
        raise BasisMismatch("vectors do not match the tensor factors")
    if v.sf is not v2.sf:
        raise DomainMismatch("factors over different semifields")
    mul = v.sf.mul
    out = {(b, b2): mul(x, y) for b, x in v.coeffs.items() for b2, y in v2.coeffs.items()}
    return SemiVector(tb, v.sf, out, check=False)


# ---------------------------------------------------------------------------
# Gamma tables

class GammaTable:
    """Structure constants e_{b,b1,b1'} of V(lam+lam2) -> V(lam) (x) V(lam2)."""

    def __init__(self, sum_module: BasedModule, left: BasedModule, right: BasedModule, rows):
        if add_weights(left.lam, right.lam) != sum_module.lam:
            raise ValidationError("Gamma table weights do not add up")
        self.module = sum_module
        self.left = left
        self.right = right
        self.tensor = TensorBasis(left, right)
        self.rows = {b: tuple(((b1, b2), int(e)) for (b1, b2), e in rows.get(b, ()) if e)
                     for b in sum_module.labels}
        self.matrix = NatMatrix(sum_module.key, self.tensor.key, self.rows)

    @property
    def cartan(self):
        return self.module.cartan

    @property
    def lam(self):
        return self.left.lam

    @property
    def lam2(self):
        return self.right.lam

    def __repr__(self):
        return f"<GammaTable {self.cartan.label} {self.lam}+{self.lam2}>"

    def validate(self):
        m, L, R = self.module, self.left, self.right
        top = self.rows.get(m.highest)
        if top != (((L.highest, R.highest), 1),):
            raise ValidationError("highest-weight row must be the unit tensor of highest vectors")
        for b, row in self.rows.items():
            for (b1, b2), e in row:
                if e <= 0:
                    raise ValidationError("structure constants must be positive naturals")
                if b1 not in L.index or b2 not in R.index:
                    raise ValidationError("row refers to unknown tensor label")
                for i in m.cartan.index_set:
                    if m.weights[i][b] != L.weights[i][b1] + R.weights[i][b2]:
                        raise ValidationError(f"weight mismatch in row {b}")
        return self

    def transpose_rows(self):
        """(b1, b1') -> [(b, e)]: the data of the product mu."""
        out = {}
        for b, row in self.rows.items():
            for s, e in row:
                out.setdefault(s, []).append((b, e))
        return out

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "kind": "gamma",
            "cartan": self.cartan.label,
            "lambda": list(self.lam),
            "lambda2": list(self.lam2),
            "rows": {b: [[b1, b2, e] for (b1, b2), e in row]
                     for b, row in self.rows.items() if row},
        }

    @classmethod
    def from_dict(cls, d, module_lookup):
        """``module_lookup(lam)`` must return the BasedModule for lam."""
        _check_header(d, "gamma")
        c = cartan(d["cartan"])
        lam, lam2 = tuple(d["lambda"]), tuple(d["lambda2"])
        left, right = module_lookup(lam), module_lookup(lam2)
        total = module_lookup(add_weights(lam, lam2))
        for mod in (left, right, total):
            if mod.cartan != c:
                raise ValidationError("Gamma table Cartan type differs from its modules")
        rows = {}
        for b, entries in d["rows"].items():
            for b1, b2, e in entries:
                _check_nat(e)
            rows[b] = [((b1, b2), e) for b1, b2, e in entries]
        return cls(total, left, right, rows).validate()


def Gamma_K(t: GammaTable, x: SemiVector) -> SemiVector:
    if x.basis.key != t.module.key:
        raise BasisMismatch("vector is not over the table's source module")
    return apply_nat_matrix(t.matrix, x, target=t.tensor)


# ---------------------------------------------------------------------------
# file I/O

def dumps(obj) -> str:
    return json.dumps(obj.to_dict(), indent=1) + "\n"


def save(obj, path):
    with open(path, "w") as f:
        f.write(dumps(obj))


def load_module(path) -> BasedModule:
    with open(path) as f:
        return BasedModule.from_dict(json.load(f))


def load_gamma(path, module_lookup) -> GammaTable:
    with open(path) as f:
        return GammaTable.from_dict(json.load(f), module_lookup)


__all__ = [
    "BasedModule", "GammaTable", "NatMatrix", "SemiVector", "TensorBasis",
    "ValidationError", "BasisMismatch", "vk_add", "vk_scale", "apply_nat_matrix",
    "E_K", "Gamma_K", "trivial_module", "weight_key", "parse_weight_key", "get_semifield",
]
