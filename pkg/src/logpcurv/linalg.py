"""Matrices over k[x] and the PID linear algebra the rest of the package runs on.

Everything here is exact.  The characteristic polynomial is computed by
the Berkowitz iteration because the coefficient rings have small
characteristic, where clearing by integers is not available.
Determinants and resultants go through fraction-free (Bareiss)
elimination.  The column Hermite normal form is the canonical shape for
every module comparison downstream: pivot rows strictly increase left to
right, pivots are monic, entries in a pivot row left of the pivot are
reduced to lower degree, and zero columns are dropped.
"""

from __future__ import annotations

import itertools

from .fields import FieldElement
from .poly import DensePoly, LambdaPoly


class PolyMatrix:
    """Immutable row-major matrix of DensePoly entries over one field."""

    __slots__ = ("field", "nrows", "ncols", "data")

    def __init__(self, field, rows):
        data = []
        width = None
        for row in rows:
            r = []
            for e in row:
                if isinstance(e, DensePoly):
                    if e.field != field:
                        raise ValueError("entry over a different field")
                    r.append(e)
                elif isinstance(e, FieldElement):
                    r.append(DensePoly.constant(field, e))
                else:
                    r.append(DensePoly.from_ints(field, [e]) if isinstance(e, int)
                             else _reject(e))
            if width is None:
                width = len(r)
            elif len(r) != width:
                raise ValueError("ragged rows")
            data.append(tuple(r))
        self.field = field
        self.nrows = len(data)
        self.ncols = width if width is not None else 0
        self.data = tuple(data)

    # constructors ------------------------------------------------------

    @classmethod
    def identity(cls, field, n: int):
        one = DensePoly.one(field)
        zero = DensePoly.zero(field)
        return cls(field, [[one if i == j else zero for j in range(n)]
                           for i in range(n)])

    @classmethod
    def zeros(cls, field, m: int, n: int):
        zero = DensePoly.zero(field)
        return cls(field, [[zero] * n for _ in range(m)])

    @classmethod
    def from_int_rows(cls, field, rows):
        return cls(field, [[DensePoly.from_ints(field, [e]) for e in row]
                           for row in rows])

    @classmethod
    def col_vector(cls, field, entries):
        return cls(field, [[e] for e in entries])

    @classmethod
    def from_columns(cls, field, cols, nrows=None):
        if not cols:
            return cls.zeros(field, nrows or 0, 0)
        m = len(cols[0])
        return cls(field, [[col[i] for col in cols] for i in range(m)])

    # structure ---------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.data for e in row)

    def entry(self, i: int, j: int) -> DensePoly:
        return self.data[i][j]

    def row(self, i: int):
        return list(self.data[i])

    def column(self, j: int):
        return [self.data[i][j] for i in range(self.nrows)]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.field, [[self.data[i][j] for i in range(self.nrows)]
                                       for j in range(self.ncols)])

    def submatrix(self, row_idx, col_idx) -> "PolyMatrix":
        return PolyMatrix(self.field, [[self.data[i][j] for j in col_idx]
                                       for i in row_idx])

    def hstack(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row counts differ")
        return PolyMatrix(self.field, [list(self.data[i]) + list(other.data[i])
                                       for i in range(self.nrows)])

    def vstack(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column counts differ")
        return PolyMatrix(self.field, [list(r) for r in self.data]
                          + [list(r) for r in other.data])

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.field, [[fn(e) for e in row] for row in self.data])

    def eval_raw(self, x_raw):
        """Entrywise evaluation, returning a list of lists of field raws."""
        return [[e.eval_raw(x_raw) for e in row] for row in self.data]

    def eval_elem(self, point) -> "PolyMatrix":
        """Entrywise evaluation as a constant matrix."""
        F = self.field
        raw = point.raw if isinstance(point, FieldElement) else F.of_int_raw(point)
        return PolyMatrix(F, [[DensePoly(F, (e.eval_raw(raw),)) for e in row]
                              for row in self.data])

    def trace(self) -> DensePoly:
        if not self.is_square:
            raise ValueError("trace of a non-square matrix")
        acc = DensePoly.zero(self.field)
        for i in range(self.nrows):
            acc = acc + self.data[i][i]
        return acc

    # arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(self.field, [
            [self.data[i][j] + other.data[i][j] for j in range(self.ncols)]
            for i in range(self.nrows)])

    def __sub__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(self.field, [
            [self.data[i][j] - other.data[i][j] for j in range(self.ncols)]
            for i in range(self.nrows)])

    def __neg__(self):
        return PolyMatrix(self.field, [[-e for e in row] for row in self.data])

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement, DensePoly)):
            return PolyMatrix(self.field,
                              [[e * other for e in row] for row in self.data])
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError(
                f"cannot multiply {self.shape} by {other.shape}")
        F = self.field
        zero = DensePoly.zero(F)
        out = []
        bt = other.transpose().data
        for i in range(self.nrows):
            arow = self.data[i]
            out.append([_dot(arow, bcol, zero) for bcol in bt])
        return PolyMatrix(F, out)

    def power(self, e: int) -> "PolyMatrix":
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        out = PolyMatrix.identity(self.field, self.nrows)
        base = self
        while e:
            if e & 1:
                out = out @ base
            e >>= 1
            if e:
                base = base @ base
        return out

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and self.data == other.data)

    def __hash__(self):
        return hash((self.field, self.data))

    def __str__(self):
        rows = ["[" + ", ".join(str(e) for e in row) + "]" for row in self.data]
        return "[" + "; ".join(rows) + "]"

    __repr__ = __str__


def _reject(e):
    raise TypeError(f"bad matrix entry {e!r}")


def _dot(xs, ys, zero):
    acc = zero
    for x, y in zip(xs, ys):
        if x.coeffs and y.coeffs:
            acc = acc + x * y
    return acc


# characteristic polynomial, determinant, resultant -------------------------


def charpoly_division_free(M: PolyMatrix) -> LambdaPoly:
    """det(lam*I - M), monic, by the Berkowitz iteration (no divisions)."""
    if not M.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    F = M.field
    n = M.nrows
    one = DensePoly.one(F)
    zero = DensePoly.zero(F)
    if n == 0:
        return LambdaPoly(F, (one,))
    a = M.data
    v = [one, -a[0][0]]
    for r in range(1, n):
        # Toeplitz coefficients t_0..t_{r+1} from the bordering row and column
        R = a[r][:r]
        C = [a[i][r] for i in range(r)]
        t = [one, -a[r][r]]
        w = list(C)
        for k in range(2, r + 2):
            t.append(-_dot(R, w, zero))
            if k < r + 1:
                w = [_dot(a[i][:r], w, zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            lo = max(0, i - (len(t) - 1))
            for j in range(lo, min(i, len(v) - 1) + 1):
                acc = acc + t[i - j] * v[j]
            new.append(acc)
        v = new
    return LambdaPoly(F, list(reversed(v)))


def det_fraction_free(M: PolyMatrix) -> DensePoly:
    """Exact determinant by Bareiss elimination with row pivoting."""
    if not M.is_square:
        raise ValueError("determinant of a non-square matrix")
    F = M.field
    n = M.nrows
    if n == 0:
        return DensePoly.one(F)
    a = [list(row) for row in M.data]
    sign = 1
    prev = DensePoly.one(F)
    for k in range(n - 1):
        if a[k][k].is_zero:
            for i in range(k + 1, n):
                if not a[i][k].is_zero:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return DensePoly.zero(F)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev)
            a[i][k] = DensePoly.zero(F)
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def resultant(f: LambdaPoly, g: LambdaPoly) -> DensePoly:
    """Res(f, g) with respect to lam, as a polynomial in the base variable."""
    if f.field != g.field:
        raise ValueError("resultants need a common field")
    F = f.field
    m, n = f.degree, g.degree
    if m < 0 or n < 0:
        return DensePoly.zero(F)
    if m == 0:
        return f.coeffs[0] ** n
    if n == 0:
        return g.coeffs[0] ** m
    zero = DensePoly.zero(F)
    rows = []
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        rows.append([zero] * i + fc + [zero] * (n - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gc + [zero] * (m - 1 - i))
    return det_fraction_free(PolyMatrix(F, rows))


def discriminant_lambda(f: LambdaPoly) -> DensePoly:
    """Res(f, df/dlam); zero exactly when f has a repeated factor."""
    return resultant(f, f.deriv_lam())


def lambda_eval_matrix(f: LambdaPoly, M: PolyMatrix) -> PolyMatrix:
    """Evaluate a lam-polynomial at a square matrix."""
    if not M.is_square:
        raise ValueError("need a square matrix")
    F = M.field
    n = M.nrows
    acc = PolyMatrix.zeros(F, n, n)
    ident = PolyMatrix.identity(F, n)
    for c in reversed(f.coeffs):
        acc = acc @ M + ident * c
    return acc


# column Hermite normal form ------------------------------------------------


def kronecker(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    """Kronecker product: the block matrix with blocks A[i][j] * B."""
    if A.field != B.field:
        raise ValueError("matrices over different fields")
    rows = []
    for i1 in range(A.nrows):
        for i2 in range(B.nrows):
            row = []
            for j1 in range(A.ncols):
                a = A.data[i1][j1]
                for j2 in range(B.ncols):
                    row.append(a * B.data[i2][j2])
            rows.append(row)
    return PolyMatrix(A.field, rows)


def _col_sub(cols, dst: int, src: int, q: DensePoly):
    cd, cs = cols[dst], cols[src]
    for i in range(len(cd)):
        cd[i] = cd[i] - q * cs[i]


def _col_scale(col, c: FieldElement):
    for i in range(len(col)):
        col[i] = col[i] * c


def _hermite_engine(M: PolyMatrix):
    """Shared elimination core: returns (columns, transform columns, pivots)."""
    F = M.field
    m, n = M.nrows, M.ncols
    cols = [[M.data[i][j] for i in range(m)] for j in range(n)]
    one = DensePoly.one(F)
    zero = DensePoly.zero(F)
    ucols = [[one if i == j else zero for i in range(n)] for j in range(n)]
    pivots = []
    s = 0
    for i in range(m):
        if s == n:
            break
        while True:
            cand = [j for j in range(s, n) if cols[j][i].coeffs]
            if len(cand) <= 1:
                break
            j0 = min(cand, key=lambda j: cols[j][i].degree)
            for j in cand:
                if j == j0:
                    continue
                q = cols[j][i] // cols[j0][i]
                _col_sub(cols, j, j0, q)
                _col_sub(ucols, j, j0, q)
        if cand:
            j0 = cand[0]
            cols[s], cols[j0] = cols[j0], cols[s]
            ucols[s], ucols[j0] = ucols[j0], ucols[s]
            inv = cols[s][i].lead ** -1
            _col_scale(cols[s], inv)
            _col_scale(ucols[s], inv)
            pivots.append((i, s))
            s += 1
    # reduce entries left of each pivot in its row
    for (i, c) in pivots:
        piv = cols[c][i]
        for k in range(c):
            q = cols[k][i] // piv
            if q.coeffs:
                _col_sub(cols, k, c, q)
                _col_sub(ucols, k, c, q)
    return cols, ucols, pivots


def hermite_normal_form(M: PolyMatrix) -> PolyMatrix:
    """Canonical column Hermite form; zero columns are dropped."""
    cols, _, pivots = _hermite_engine(M)
    r = len(pivots)
    return PolyMatrix.from_columns(M.field, cols[:r], nrows=M.nrows)


def hermite_with_transform(M: PolyMatrix):
    """(H, U, pivots) with M @ U = [H | 0] and U unimodular."""
    cols, ucols, pivots = _hermite_engine(M)
    r = len(pivots)
    H = PolyMatrix.from_columns(M.field, cols[:r], nrows=M.nrows)
    U = PolyMatrix.from_columns(M.field, ucols, nrows=M.ncols)
    return H, U, pivots


def hermite_kernel(M: PolyMatrix) -> PolyMatrix:
    """A canonical k[y]-basis of ker(M), as the columns of the result."""
    cols, ucols, pivots = _hermite_engine(M)
    r = len(pivots)
    ker = PolyMatrix.from_columns(M.field, ucols[r:], nrows=M.ncols)
    if ker.ncols == 0:
        return ker
    return hermite_normal_form(ker)


def rank_over_fractions(M: PolyMatrix) -> int:
    return len(_hermite_engine(M)[2])


def intersect_columns(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    """Generators of (column span of A) ∩ (column span of B), in Hermite form."""
    if A.nrows != B.nrows:
        raise ValueError("ambient ranks differ")
    stacked = A.hstack(-B)
    ker = hermite_kernel(stacked)
    if ker.ncols == 0:
        return PolyMatrix.zeros(A.field, A.nrows, 0)
    top = ker.submatrix(range(A.ncols), range(ker.ncols))
    return hermite_normal_form(A @ top)


class BasisSolver:
    """Repeated exact solves B @ z = target against one fixed basis B."""

    def __init__(self, B: PolyMatrix):
        self.B = B
        self.field = B.field
        H, U, pivots = hermite_with_transform(B)
        if len(pivots) != B.ncols:
            raise ValueError("columns are dependent, not a basis")
        self.H = H
        self.U = U
        self.pivots = pivots

    def solve(self, target) -> list:
        F = self.field
        B = self.B
        if isinstance(target, PolyMatrix):
            if target.ncols != 1:
                raise ValueError("target must be a single column")
            b = target.column(0)
        else:
            b = list(target)
        if len(b) != B.nrows:
            raise ValueError("target length mismatch")
        resid = list(b)
        w = [DensePoly.zero(F)] * B.ncols
        for (i, c) in self.pivots:
            q, r = divmod(resid[i], self.H.data[i][c])
            if r.coeffs:
                raise ValueError("target is not in the module")
            if q.coeffs:
                w[c] = q
                col = self.H.column(c)
                for k in range(len(resid)):
                    resid[k] = resid[k] - q * col[k]
        if any(e.coeffs for e in resid):
            raise ValueError("target is not in the module")
        z = [DensePoly.zero(F)] * B.ncols
        for i in range(B.ncols):
            acc = DensePoly.zero(F)
            for j in range(B.ncols):
                acc = acc + self.U.data[i][j] * w[j]
            z[i] = acc
        return z


def solve_in_basis(B: PolyMatrix, target) -> list:
    """Coordinates z with B @ z = target, or ValueError if none exist."""
    return BasisSolver(B).solve(target)


def solve_matrix_in_basis(B: PolyMatrix, T: PolyMatrix) -> PolyMatrix:
    """Z with B @ Z = T, column by column."""
    solver = BasisSolver(B)
    cols = [solver.solve(T.column(j)) for j in range(T.ncols)]
    return PolyMatrix.from_columns(B.field, cols, nrows=B.ncols)


def matrix_inverse(M: PolyMatrix) -> PolyMatrix:
    """Inverse of a matrix whose determinant is a nonzero constant."""
    d = det_fraction_free(M)
    if d.degree != 0:
        raise ValueError("matrix is not unimodular over the polynomial ring")
    return solve_matrix_in_basis(M, PolyMatrix.identity(M.field, M.nrows))


# Smith normal form ----------------------------------------------------------


class SmithResult:
    """U @ M @ V = D diagonal with the divisibility chain, all transforms unimodular."""

    __slots__ = ("D", "U", "V", "Uinv", "Vinv")

    def __init__(self, D, U, V, Uinv, Vinv):
        self.D = D
        self.U = U
        self.V = V
        self.Uinv = Uinv
        self.Vinv = Vinv

    @property
    def elementary_divisors(self):
        out = []
        for t in range(min(self.D.nrows, self.D.ncols)):
            e = self.D.data[t][t]
            if e.is_zero:
                break
            out.append(e)
        return out


def smith_normal_form(M: PolyMatrix) -> SmithResult:
    F = M.field
    m, n = M.nrows, M.ncols
    a = [[M.data[i][j] for j in range(n)] for i in range(m)]
    zero = DensePoly.zero(F)
    one = DensePoly.one(F)
    U = [[one if i == j else zero for j in range(m)] for i in range(m)]
    Uinv = [[one if i == j else zero for j in range(m)] for i in range(m)]
    V = [[one if i == j else zero for j in range(n)] for i in range(n)]
    Vinv = [[one if i == j else zero for j in range(n)] for i in range(n)]

    def row_sub(i, j, q):
        # row_i -= q * row_j ; U gets the same op, Uinv the inverse column op
        for k in range(n):
            a[i][k] = a[i][k] - q * a[j][k]
        for k in range(m):
            U[i][k] = U[i][k] - q * U[j][k]
        for k in range(m):
            Uinv[k][j] = Uinv[k][j] + q * Uinv[k][i]

    def col_sub(j, i, q):
        for k in range(m):
            a[k][j] = a[k][j] - q * a[k][i]
        for k in range(n):
            V[k][j] = V[k][j] - q * V[k][i]
        for k in range(n):
            Vinv[i][k] = Vinv[i][k] + q * Vinv[j][k]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for k in range(m):
            Uinv[k][i], Uinv[k][j] = Uinv[k][j], Uinv[k][i]

    def col_swap(i, j):
        for k in range(m):
            a[k][i], a[k][j] = a[k][j], a[k][i]
        for k in range(n):
            V[k][i], V[k][j] = V[k][j], V[k][i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def row_scale(i, c):
        for k in range(n):
            a[i][k] = a[i][k] * c
        for k in range(m):
            U[i][k] = U[i][k] * c
        cinv = c ** -1
        for k in range(m):
            Uinv[k][i] = Uinv[k][i] * cinv

    t = 0
    while True:
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j].coeffs and (best is None
                                       or a[i][j].degree < a[best[0]][best[1]].degree):
                    best = (i, j)
        if best is None:
            break
        if best != (t, t):
            if best[0] != t:
                row_swap(t, best[0])
            if best[1] != t:
                col_swap(t, best[1])
        while True:
            # clear column t below the pivot
            dirty = False
            for i in range(t + 1, m):
                if a[i][t].coeffs:
                    q, r = divmod(a[i][t], a[t][t])
                    row_sub(i, t, q)
                    if r.coeffs:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j].coeffs:
                    q, r = divmod(a[t][j], a[t][t])
                    col_sub(j, t, q)
                    if r.coeffs:
                        col_swap(t, j)
                        dirty = True
            if not dirty:
                assert not any(a[i][t].coeffs for i in range(t + 1, m))
                assert not any(a[t][j].coeffs for j in range(t + 1, n))
                break
        # enforce the divisibility chain
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j].coeffs and divmod(a[i][j], a[t][t])[1].coeffs:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            # fold the offending row into row t and redo this pivot
            row_sub(t, offender, -DensePoly.one(F))
            continue
        row_scale(t, a[t][t].lead ** -1)
        t += 1

    D = PolyMatrix(F, a)
    return SmithResult(D, PolyMatrix(F, U), PolyMatrix(F, V),
                       PolyMatrix(F, Uinv), PolyMatrix(F, Vinv))


# dense Gaussian elimination over a raw field --------------------------------


def raw_rref(K, rows, ncols: int):
    """Reduced row echelon form over any raw field; returns (rows, pivot cols)."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if not K.is_zero_raw(mat[i][c]):
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = K.inv_raw(mat[r][c])
        mat[r] = [K.mul_raw(inv, e) for e in mat[r]]
        for i in range(len(mat)):
            if i != r and not K.is_zero_raw(mat[i][c]):
                f = mat[i][c]
                mat[i] = [K.sub_raw(e, K.mul_raw(f, g))
                          for e, g in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def raw_rank(K, rows, ncols: int) -> int:
    return len(raw_rref(K, rows, ncols)[1])


def raw_kernel(K, rows, ncols: int):
    """Basis of the right kernel over a raw field, as raw tuples."""
    red, pivots = raw_rref(K, rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [K.zero_raw] * ncols
        v[fc] = K.one_raw
        for r, pc in enumerate(pivots):
            v[pc] = K.neg_raw(red[r][fc])
        basis.append(tuple(v))
    return basis


def minors(M: PolyMatrix, k: int):
    """All k x k minors of M as (row tuple, col tuple, determinant)."""
    for ri in itertools.combinations(range(M.nrows), k):
        for ci in itertools.combinations(range(M.ncols), k):
            yield ri, ci, det_fraction_free(M.submatrix(ri, ci))
