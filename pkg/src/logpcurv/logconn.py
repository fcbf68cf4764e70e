"""Logarithmic connections on the affine line with marked points.

The chart is X = A^1 over F_q with a reduced divisor D = {d_1, ..., d_n};
log vector fields are generated by theta = q(x) d/dx with q = prod(x - d_i),
and a connection of rank r is the operator nabla(s) = theta(s) + A s on
column vectors over k[x].  This module computes residues, the p-curvature
(by expanding the p-th operator power), the solutions functor landing in
parabolic modules over k[y] with y = x^p, the Frobenius pullback going the
other way, and the Cartier descent test tying the two directions together.

The empty divisor is allowed as a degenerate mode: theta = d/dx and the
same code paths reproduce the classical (non-logarithmic) statements.
"""

from collections import namedtuple

from .fields import FieldSpec
from .linalg import (
    BasisSolver,
    PolyMatrix,
    charpoly_division_free,
    det_fraction_free,
    hermite_kernel,
    hermite_normal_form,
    intersect_columns,
    kronecker,
    solve_matrix_in_basis,
)
from .parabolic import ParabolicModule
from .poly import DensePoly, LambdaPoly


class LogDivisor:
    """Reduced set of marked points on the x-line, with theta = q(x) d/dx."""

    __slots__ = ("field", "points", "q_poly")

    def __init__(self, field, points=()):
        if not isinstance(field, FieldSpec):
            raise ValueError("field must be a FieldSpec")
        pts = []
        for d in points:
            if isinstance(d, int):
                d = field.of_int(d)
            if d.field != field:
                raise ValueError("divisor point from a different field")
            pts.append(d)
        if len(set(pts)) != len(pts):
            raise ValueError("divisor points must be pairwise distinct")
        self.field = field
        self.points = tuple(pts)
        self.q_poly = DensePoly.monic_from_roots(field, pts)

    @property
    def size(self) -> int:
        return len(self.points)

    def theta(self, f: DensePoly) -> DensePoly:
        """Apply the log vector field: q(x) * f'."""
        return self.q_poly * f.deriv()

    def eta(self, i: int) -> DensePoly:
        """y - d_i^p, the image of (x - d_i)^p downstairs."""
        d = self.points[i]
        return DensePoly(self.field, [-(d ** self.field.p), self.field.one])

    def __eq__(self, other):
        if not isinstance(other, LogDivisor):
            return NotImplemented
        return self.field == other.field and self.points == other.points

    def __hash__(self):
        return hash((self.field, self.points))

    def __repr__(self):
        return f"LogDivisor({[str(d) for d in self.points]})"


class LogConnection:
    """Rank-r connection nabla(s) = theta(s) + A s in the standard frame.

    Flatness is automatic on a one-dimensional chart and is not a
    constraint here.
    """

    __slots__ = ("field", "divisor", "matrix")

    def __init__(self, divisor: LogDivisor, matrix: PolyMatrix):
        if not isinstance(divisor, LogDivisor):
            raise ValueError("divisor must be a LogDivisor")
        if matrix.field != divisor.field:
            raise ValueError("connection matrix over a different field")
        if not matrix.is_square or matrix.nrows == 0:
            raise ValueError("connection matrix must be square of rank >= 1")
        self.field = divisor.field
        self.divisor = divisor
        self.matrix = matrix

    @property
    def rank(self) -> int:
        return self.matrix.nrows

    def __eq__(self, other):
        if not isinstance(other, LogConnection):
            return NotImplemented
        return self.divisor == other.divisor and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.divisor, self.matrix))

    def __repr__(self):
        return f"LogConnection(rank {self.rank}, divisor {self.divisor!r})"


PCurvatureMatrix = namedtuple("PCurvatureMatrix", "psi")

CartierReport = namedtuple("CartierReport",
                           "psi_zero counit_iso parabolic_witness")


def validate_connection(c: LogConnection) -> bool:
    """Re-run the construction checks; True when everything is consistent."""
    LogDivisor(c.field, c.divisor.points)
    LogConnection(c.divisor, c.matrix)
    return True


def rank_one_connection(field, a: int) -> LogConnection:
    """The connection d - a dx/x on the origin chart: theta = x d/dx, A = [-a]."""
    div = LogDivisor(field, [0])
    return LogConnection(div, PolyMatrix.from_int_rows(field, [[-a]]))


def trivial_connection(divisor: LogDivisor, rank: int = 1) -> LogConnection:
    return LogConnection(divisor,
                         PolyMatrix.zeros(divisor.field, rank, rank))


def apply_nabla(c: LogConnection, section):
    """nabla(s) = theta applied entrywise plus A s, for s a list of polys."""
    s = list(section)
    if len(s) != c.rank:
        raise ValueError(f"section length {len(s)} does not match rank {c.rank}")
    out = []
    for i in range(c.rank):
        acc = c.divisor.theta(s[i])
        for j in range(c.rank):
            acc = acc + c.matrix.data[i][j] * s[j]
        out.append(acc)
    return out


def residue_at(c: LogConnection, i: int) -> PolyMatrix:
    """A(d_i) / q'(d_i): the residue normalized so dx/(x - d_i) has residue 1."""
    d = c.divisor.points[i]
    scale = c.divisor.q_poly.deriv()(d)
    # nonzero because the divisor is reduced
    inv = scale ** -1
    return c.matrix.eval_elem(d) * inv


def residue_charpoly_at(c: LogConnection, i: int) -> LambdaPoly:
    return charpoly_division_free(residue_at(c, i))


def p_power_vector_field(d: LogDivisor) -> DensePoly:
    """The coefficient c with theta^{[p]} = c * theta.

    Log derivations are closed under p-th powers, so theta^p(x) must be
    divisible by q; the exact division doubles as the check.
    """
    p = d.field.p
    f = DensePoly.x(d.field)
    for _ in range(p):
        f = d.theta(f)
    if f.is_zero:
        return DensePoly.zero(d.field)
    return f.exact_div(d.q_poly)


def p_curvature(c: LogConnection) -> PCurvatureMatrix:
    """The matrix of (theta + A)^p - c(x) (theta + A) acting on sections.

    The p-th operator power is expanded with coefficients [C_0, ..., C_p]
    in powers of theta, using theta f = f theta + q f'.  Iterated
    commutators of theta and A all collapse to order zero, so the
    expansion must come out as theta^p + C_0 exactly; the vanishing of
    the middle coefficients is asserted.  On sections theta^p acts as
    c theta, which cancels against the subtracted operator and leaves
    the matrix C_0 - c A.
    """
    field = c.field
    p = field.p
    q = c.divisor.q_poly
    ident = PolyMatrix.identity(field, c.rank)
    coeffs = [c.matrix, ident]
    for _ in range(p - 1):
        new = []
        for j in range(len(coeffs) + 1):
            term = PolyMatrix.zeros(field, c.rank, c.rank)
            if j < len(coeffs):
                term = coeffs[j].map(lambda e: q * e.deriv()) \
                    + c.matrix @ coeffs[j]
            if j > 0:
                term = term + coeffs[j - 1]
            new.append(term)
        coeffs = new
    if coeffs[p] != ident:
        raise AssertionError("operator power lost its leading term")
    for j in range(1, p):
        if not coeffs[j].is_zero:
            raise AssertionError(
                "p-curvature expansion left a derivative term of order "
                f"{j}; the operator is not O-linear")
    scale = p_power_vector_field(c.divisor)
    return PCurvatureMatrix(coeffs[0] - c.matrix * scale)


def laszlo_pauly_check(c: LogConnection):
    """Characteristic polynomial of psi and whether all its coefficients
    lie in k[x^p]."""
    cp = charpoly_division_free(p_curvature(c).psi)
    p = c.field.p
    ok = True
    for k in range(cp.degree + 1):
        poly = cp.coeff(k)
        for e in range(poly.degree + 1):
            if e % p and poly.coeff(e) != 0:
                ok = False
    return (cp, ok)


def p_curvature_nilpotent_check(c: LogConnection) -> bool:
    psi = p_curvature(c).psi
    return psi.power(c.rank).is_zero


def tensor_connection(c1: LogConnection, c2: LogConnection) -> LogConnection:
    """A1 (x) I + I (x) A2 on the Kronecker product frame."""
    if c1.divisor != c2.divisor:
        raise ValueError("divisor mismatch")
    i1 = PolyMatrix.identity(c1.field, c1.rank)
    i2 = PolyMatrix.identity(c2.field, c2.rank)
    A = kronecker(c1.matrix, i2) + kronecker(i1, c2.matrix)
    return LogConnection(c1.divisor, A)


# the solutions functor ------------------------------------------------------


def _to_y_coordinates(field, polys, p):
    """Coordinates of (s_0(x), ..., s_{r-1}(x)) in the k[y]-basis
    {x^j e_k : 0 <= j < p}, ordered with k major."""
    coords = []
    for s in polys:
        parts = s.decimate(p)
        coords.extend(parts)
    return coords


def _from_y_coordinates(field, coords, p, r):
    polys = []
    for k in range(r):
        parts = coords[k * p:(k + 1) * p]
        polys.append(DensePoly.undecimate(field, parts, p))
    return polys


def pushforward_matrix(c: LogConnection) -> PolyMatrix:
    """F_* nabla as a pr x pr matrix over k[y]."""
    field = c.field
    p = field.p
    r = c.rank
    cols = []
    for k in range(r):
        for j in range(p):
            basis_vec = [DensePoly.zero(field)] * r
            basis_vec[k] = DensePoly.one(field).times_x_power(j)
            image = apply_nabla(c, basis_vec)
            cols.append(_to_y_coordinates(field, image, p))
    return PolyMatrix.from_columns(field, cols, nrows=p * r)


def _power_lattice(field, d, j, p, r) -> PolyMatrix:
    """(x - d)^j k[x]^r as a k[y]-submodule of k[y]^{pr}."""
    g = DensePoly.monic_from_roots(field, [d] * j)
    cols = []
    for k in range(r):
        for jj in range(p):
            vec = [DensePoly.zero(field)] * r
            vec[k] = g.times_x_power(jj)
            cols.append(_to_y_coordinates(field, vec, p))
    return PolyMatrix.from_columns(field, cols, nrows=p * r)


def solution_kernel(c: LogConnection) -> PolyMatrix:
    """k[y]-basis of the flat sections, in the pr coordinates."""
    return hermite_kernel(pushforward_matrix(c))


def solution_sections(c: LogConnection) -> PolyMatrix:
    """The flat sections as an r x m matrix of polynomials in x."""
    ker = solution_kernel(c)
    field = c.field
    p = field.p
    cols = []
    for j in range(ker.ncols):
        polys = _from_y_coordinates(field, ker.column(j), p, c.rank)
        cols.append(polys)
    return PolyMatrix.from_columns(field, cols, nrows=c.rank)


def solutions(c: LogConnection) -> ParabolicModule:
    """Flat sections with their order-of-vanishing filtration at each point.

    The kernel of F_* nabla is a free k[y]-module; at each marked point
    the step F^j collects the solutions divisible by (x - d_i)^j.  Steps
    are re-expressed in the kernel basis, so the result is an abstract
    parabolic module of rank m = dim ker.
    """
    field = c.field
    p = field.p
    ker = solution_kernel(c)
    m = ker.ncols
    if m == 0:
        chains = [[PolyMatrix.zeros(field, 0, 0)] * (p + 1)
                  for _ in c.divisor.points]
        return ParabolicModule(field, c.divisor.points, 0, chains)
    chains = []
    solver = BasisSolver(ker)
    for i, d in enumerate(c.divisor.points):
        chain = [PolyMatrix.identity(field, m)]
        for j in range(1, p + 1):
            lattice = _power_lattice(field, d, j, p, c.rank)
            met = intersect_columns(ker, lattice)
            cols = [solver.solve(met.column(t)) for t in range(met.ncols)]
            Z = PolyMatrix.from_columns(field, cols, nrows=m)
            chain.append(hermite_normal_form(Z))
        chains.append(chain)
    return ParabolicModule(field, c.divisor.points, m, chains)


# Frobenius pullback ---------------------------------------------------------


def _substitute_y(M: PolyMatrix, p: int) -> PolyMatrix:
    """Reinterpret a matrix over k[y] as a matrix over k[x] via y = x^p.

    Coefficients are untouched; only the exponents stretch by p."""
    return M.map(lambda e: DensePoly.undecimate(M.field, [e], p))


def frobenius_pullback(v: ParabolicModule) -> LogConnection:
    """The log connection on the lattice spanned by the twisted filtration.

    Realizes E = sum over points and 0 <= j < p of (x - d_i)^{-j} F_i^j
    inside k(x)^m (sections of v are flat), picks the Hermite basis P of
    the lattice after clearing denominators by Q = prod (x - d_i)^{p-1},
    and returns the matrix of theta in that basis.  Exactness of every
    division is asserted along the way.
    """
    if v.rank == 0:
        raise ValueError("cannot form a connection of rank 0")
    field = v.field
    p = field.p
    div = LogDivisor(field, v.points)
    if not v.points:
        return trivial_connection(div, v.rank)

    factors = [DensePoly.monic_from_roots(field, [d]) for d in v.points]
    Q = DensePoly.one(field)
    for f in factors:
        Q = Q * f ** (p - 1)

    cols = None
    for i in range(len(v.points)):
        for j in range(p):
            scale = Q.exact_div(factors[i] ** j)
            block = _substitute_y(v.step(i, j), p) * scale
            cols = block if cols is None else cols.hstack(block)
    P_hat = hermite_normal_form(cols)
    theta_P = P_hat.map(lambda e: div.theta(e))
    A = solve_matrix_in_basis(P_hat, theta_P)
    # subtract theta(Q)/Q, the correction from the cleared denominator
    drift = DensePoly.zero(field)
    for i in range(len(v.points)):
        drift = drift + div.q_poly.exact_div(factors[i])
    drift = drift * field.of_int(p - 1)
    A = A - PolyMatrix.identity(field, v.rank) * drift
    return LogConnection(div, A)


def cartier_descent_check(c: LogConnection) -> CartierReport:
    """Zero p-curvature against the counit being an isomorphism.

    The counit evaluates the pulled-back solutions lattice inside
    k[x]^r; it is an isomorphism when the solutions have full rank and
    the evaluated lattice is all of k[x]^r (unit determinant after the
    exact Q-division).  The two booleans agreeing is the content of the
    descent theorem; the report returns both plus the parabolic witness
    when the counit side succeeds.
    """
    psi_zero = p_curvature(c).psi.is_zero
    field = c.field
    p = field.p
    ker = solution_kernel(c)
    if ker.ncols != c.rank:
        return CartierReport(psi_zero, False, None)
    sections = solution_sections(c)
    v = solutions(c)

    factors = [DensePoly.monic_from_roots(field, [d]) for d in v.points]
    Q = DensePoly.one(field)
    for f in factors:
        Q = Q * f ** (p - 1)
    cols = None
    for i in range(len(v.points)):
        for j in range(p):
            scale = Q.exact_div(factors[i] ** j)
            block = _substitute_y(v.step(i, j), p) * scale
            cols = block if cols is None else cols.hstack(block)
    P_hat = PolyMatrix.identity(field, c.rank) * Q if cols is None \
        else hermite_normal_form(cols)

    T = sections @ P_hat
    try:
        cleared = T.map(lambda e: e.exact_div(Q))
    except ValueError:
        return CartierReport(psi_zero, False, None)
    det = det_fraction_free(cleared)
    iso = det.degree == 0
    return CartierReport(psi_zero, iso, v if iso else None)
