"""Exact sparse linear algebra over Q (vectors are dicts position -> Fraction)."""

from __future__ import annotations

from fractions import Fraction


class NotInSpan(ValueError):
    pass


def _axpy(y: dict, a, x: dict):
    """y += a*x in place, dropping zeros."""
    for k, v in x.items():
        w = y.get(k, 0) + a * v
        if w:
            y[k] = w
        else:
            y.pop(k, None)


class SpanSolver:
    """Coordinates of vectors with respect to a fixed list of vectors.

    Row-echelon reduction of the generators is done once; each reduced row
    remembers which combination of generators produced it.
    """

    def __init__(self, vectors, order=None):
        self.n = len(vectors)
        self.order = order  # position sort key, for deterministic pivots
        self.rows = []      # (pivot, row dict, combination dict)
        self.dependent = []
        for k, v in enumerate(vectors):
            row = {p: Fraction(x) for p, x in v.items() if x}
            comb = {k: Fraction(1)}
            for piv, r, c in self.rows:
                a = row.get(piv)
                if a:
                    _axpy(row, -a, r)
                    _axpy(comb, -a, c)
            if not row:
                self.dependent.append(k)
                continue
            piv = min(row, key=order) if order else min(row)
            a = row[piv]
            row = {p: x / a for p, x in row.items()}
            comb = {j: x / a for j, x in comb.items()}
            # keep rows fully reduced against the new pivot
            for idx, (p2, r2, c2) in enumerate(self.rows):
                b = r2.get(piv)
                if b:
                    _axpy(r2, -b, row)
                    _axpy(c2, -b, comb)
            self.rows.append((piv, row, comb))

    @property
    def rank(self):
        return len(self.rows)

    def coords(self, v: dict) -> list:
        rest = {p: Fraction(x) for p, x in v.items() if x}
        out = {}
        for piv, r, c in self.rows:
            a = rest.get(piv)
            if a:
                _axpy(rest, -a, r)
                _axpy(out, a, c)
        if rest:
            raise NotInSpan("vector is not in the span")
        return [out.get(k, Fraction(0)) for k in range(self.n)]


def solve_exact(A, b):
    """Solve A x = b over Q for a full-column-rank (possibly tall) A.

    A is a list of rows (lists), b a list.  Returns x, or raises
    ``NotInSpan`` when the system is inconsistent.  Raises ``ValueError`` if
    the columns are dependent.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    piv_cols = []
    r = 0
    for col in range(n):
        p = next((k for k in range(r, m) if M[k][col] != 0), None)
        if p is None:
            raise ValueError("columns are linearly dependent")
        M[r], M[p] = M[p], M[r]
        a = M[r][col]
        M[r] = [x / a for x in M[r]]
        for k in range(m):
            if k != r and M[k][col] != 0:
                f = M[k][col]
                M[k] = [x - f * y for x, y in zip(M[k], M[r])]
        piv_cols.append(col)
        r += 1
    for k in range(r, m):
        if M[k][n] != 0:
            raise NotInSpan("inconsistent system")
    return [M[k][n] for k in range(n)]


def mat_vec(cols: dict, v: dict) -> dict:
    """Apply a column-stored sparse matrix {col: {row: x}} to a sparse vector."""
    out = {}
    for c, x in v.items():
        for r, a in cols.get(c, {}).items():
            w = out.get(r, 0) + a * x
            if w:
                out[r] = w
            else:
                out.pop(r, None)
    return out


def mat_mul(A: dict, B: dict) -> dict:
    """A after B, both column-stored."""
    return {c: col for c, col in ((c, mat_vec(A, v)) for c, v in B.items()) if col}
