"""Parabolic modules: free k[y]-modules with p-step filtrations at marked points.

A module of rank m is the free module k[y]^m together with, for every
marked point d of the x-line, a descending chain of full-rank submodules

    F^0 = k[y]^m  >=  F^1  >=  ...  >=  F^p = eta * k[y]^m,

where eta = y - d^p is the image of (x - d)^p under y = x^p.  Every step
is stored as a generator matrix in column Hermite form, so module
equality is literal matrix equality.  These objects are what the
solutions functor of a logarithmic connection produces and what the
Frobenius pullback consumes; tensor and isomorphism testing live here
too.
"""

import itertools

from .fields import FieldSpec
from .linalg import (
    BasisSolver,
    PolyMatrix,
    det_fraction_free,
    hermite_normal_form,
    intersect_columns,
    kronecker,
    matrix_inverse,
    rank_over_fractions,
    smith_normal_form,
)
from .poly import DensePoly, format_poly

ISO_RANK_CAP = 3


def _coerce_points(field, points):
    pts = []
    for d in points:
        if isinstance(d, int):
            d = field.of_int(d)
        if d.field != field:
            raise ValueError("marked point from a different field")
        pts.append(d)
    if len(set(pts)) != len(pts):
        raise ValueError("marked points must be pairwise distinct")
    return tuple(pts)


class ParabolicModule:
    """Free k[y]-module with a p-step chain of lattices at each marked point."""

    __slots__ = ("field", "points", "rank", "filtrations")

    def __init__(self, field, points, rank, filtrations):
        if not isinstance(field, FieldSpec):
            raise ValueError("field must be a FieldSpec")
        if rank < 0:
            raise ValueError("rank must be nonnegative")
        self.field = field
        self.points = _coerce_points(field, points)
        self.rank = rank
        p = field.p
        chains = []
        filts = tuple(filtrations)
        if len(filts) != len(self.points):
            raise ValueError("need one filtration chain per marked point")
        for chain in filts:
            steps = tuple(chain)
            if len(steps) != p + 1:
                raise ValueError(f"each chain must have {p + 1} steps F^0..F^p")
            fixed = []
            for M in steps:
                if M.field != field or M.nrows != rank:
                    raise ValueError("filtration step has the wrong shape")
                H = hermite_normal_form(M)
                if H.ncols != rank:
                    raise ValueError("filtration step is not a full-rank lattice")
                fixed.append(H)
            chains.append(tuple(fixed))
        self.filtrations = tuple(chains)

    def eta(self, i: int) -> DensePoly:
        """The degree-one scalar y - d_i^p cutting out the point downstairs."""
        d = self.points[i]
        return DensePoly(self.field, [-(d ** self.field.p), self.field.one])

    def step(self, i: int, j: int) -> PolyMatrix:
        return self.filtrations[i][j]

    def __eq__(self, other):
        if not isinstance(other, ParabolicModule):
            return NotImplemented
        return (self.field == other.field and self.points == other.points
                and self.rank == other.rank
                and self.filtrations == other.filtrations)

    def __hash__(self):
        return hash((self.field, self.points, self.rank, self.filtrations))

    def __repr__(self):
        pts = ", ".join(str(d) for d in self.points)
        return f"ParabolicModule(rank {self.rank}, points [{pts}])"


def _same_chart(v1: ParabolicModule, v2: ParabolicModule):
    if v1.field != v2.field:
        raise ValueError("field mismatch")
    if v1.points != v2.points:
        raise ValueError("divisor mismatch")


def _contains(outer: PolyMatrix, inner: PolyMatrix) -> bool:
    # both in Hermite form; span containment = stacking changes nothing
    return hermite_normal_form(outer.hstack(inner)) == outer


def validate_parabolic(v: ParabolicModule):
    """All semantic invariants, as a list of (point, step, message) violations.

    An empty list means valid.  Shape problems are already rejected at
    construction; what is checked here is F^0 = ambient, F^p = eta * F^0,
    and every inclusion F^{j+1} <= F^j (reported at index j).
    """
    problems = []
    p = v.field.p
    ident = PolyMatrix.identity(v.field, v.rank)
    for i in range(len(v.points)):
        if v.step(i, 0) != ident:
            problems.append((i, 0, "F^0 is not the full ambient module"))
        scaled = hermite_normal_form(ident * v.eta(i))
        if v.step(i, p) != scaled:
            problems.append((i, p, "F^p differs from eta * F^0"))
        for j in range(p):
            if not _contains(v.step(i, j), v.step(i, j + 1)):
                problems.append((i, j, f"F^{j + 1} is not contained in F^{j}"))
    return problems


def is_trivial_parabolic(v: ParabolicModule) -> bool:
    """True iff every chain drops all the way at the first step.

    Modules pulled back from the coarse line have F^1 = eta * F^0 at each
    point (the whole drop happens at index 0), and are exactly the ones
    whose Frobenius pullback carries the zero residue everywhere.
    """
    ident = PolyMatrix.identity(v.field, v.rank)
    for i in range(len(v.points)):
        if v.step(i, 1) != hermite_normal_form(ident * v.eta(i)):
            return False
    return True


def coarse_pushforward(v: ParabolicModule):
    """Forget the filtrations: the underlying free k[y]-module, as (field, rank)."""
    return (v.field, v.rank)


def line_module(field, points, jumps) -> ParabolicModule:
    """Rank-1 module whose chain at point i stays full through index jumps[i].

    F^j = k[y] for j <= a and eta * k[y] for j > a; a = 0 is the trivial
    structure, a may go up to p - 1.
    """
    p = field.p
    pts = _coerce_points(field, points)
    if len(jumps) != len(pts):
        raise ValueError("need one jump index per marked point")
    one = PolyMatrix.identity(field, 1)
    chains = []
    for i, a in enumerate(jumps):
        if not 0 <= a <= p - 1:
            raise ValueError(f"jump must lie in [0, {p - 1}], got {a}")
        d = pts[i]
        eta = DensePoly(field, [-(d ** p), field.one])
        chains.append([one if j <= a else one * eta for j in range(p + 1)])
    return ParabolicModule(field, pts, 1, chains)


def trivial_parabolic(field, points, rank: int = 1) -> ParabolicModule:
    """The rank-m module with the trivial chain at every point."""
    p = field.p
    pts = _coerce_points(field, points)
    ident = PolyMatrix.identity(field, rank)
    chains = []
    for d in pts:
        eta = DensePoly(field, [-(d ** p), field.one])
        chains.append([ident] + [ident * eta] * p)
    return ParabolicModule(field, pts, rank, chains)


def _block_diag(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    field = A.field
    zero = DensePoly.zero(field)
    rows = []
    for i in range(A.nrows):
        rows.append(list(A.data[i]) + [zero] * B.ncols)
    for i in range(B.nrows):
        rows.append([zero] * A.ncols + list(B.data[i]))
    return PolyMatrix(field, rows)


def parabolic_direct_sum(v1: ParabolicModule, v2: ParabolicModule) -> ParabolicModule:
    _same_chart(v1, v2)
    p = v1.field.p
    chains = []
    for i in range(len(v1.points)):
        chains.append([_block_diag(v1.step(i, j), v2.step(i, j))
                       for j in range(p + 1)])
    return ParabolicModule(v1.field, v1.points, v1.rank + v2.rank, chains)


def conjugate_parabolic(v: ParabolicModule, U: PolyMatrix) -> ParabolicModule:
    """Change basis of the ambient module by a unimodular U."""
    if U.nrows != v.rank or U.ncols != v.rank:
        raise ValueError("change of basis has the wrong shape")
    if det_fraction_free(U).degree != 0:
        raise ValueError("change of basis is not unimodular")
    chains = []
    for i in range(len(v.points)):
        chains.append([U @ v.step(i, j) for j in range(v.field.p + 1)])
    return ParabolicModule(v.field, v.points, v.rank, chains)


def random_unimodular(field, n: int, rng) -> PolyMatrix:
    """Product of random elementary column operations."""
    M = PolyMatrix.identity(field, n)
    if n <= 1:
        return M
    units = [c for c in field.elements() if c]
    for _ in range(2 * n + 2):
        kind = rng.randrange(3)
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        rows = [list(r) for r in M.data]
        if kind == 0:
            f = DensePoly(field, [field.elem(field.random_raw(rng))
                                  for _ in range(rng.randrange(3))])
            for r in rows:
                r[i] = r[i] + f * r[j]
        elif kind == 1:
            for r in rows:
                r[i], r[j] = r[j], r[i]
        else:
            c = rng.choice(units)
            for r in rows:
                r[i] = r[i] * c
        M = PolyMatrix(field, rows)
    return M


def random_parabolic_module(field, points, rank: int, rng) -> ParabolicModule:
    """A random valid module: a sum of random lines in a scrambled basis."""
    p = field.p
    pts = _coerce_points(field, points)
    if rank == 0:
        return ParabolicModule(field, pts, 0,
                               [[PolyMatrix.zeros(field, 0, 0)] * (p + 1)
                                for _ in pts])
    acc = line_module(field, pts, [rng.randrange(p) for _ in pts])
    for _ in range(rank - 1):
        nxt = line_module(field, pts, [rng.randrange(p) for _ in pts])
        acc = parabolic_direct_sum(acc, nxt)
    return conjugate_parabolic(acc, random_unimodular(field, rank, rng))


def parabolic_tensor(v1: ParabolicModule, v2: ParabolicModule) -> ParabolicModule:
    """Tensor product with the index carry normalized by eta.

    For each point the step at level j is spanned by the products
    F^{a} (x) F^{b} with a + b = j, together with eta^{-1} times the
    products with a + b = j + p (the carried part).  The ambient module
    can grow: it is the sum over the points of the carried level-0
    lattices, and all chains are re-expressed in a basis of that sum.
    """
    _same_chart(v1, v2)
    field = v1.field
    p = field.p
    m = v1.rank * v2.rank
    pts = v1.points
    npts = len(pts)
    if npts == 0 or m == 0:
        return ParabolicModule(
            field, pts, m,
            [[PolyMatrix.zeros(field, m, m)] * (p + 1) for _ in pts]
            if m == 0 else
            [[PolyMatrix.identity(field, m)] * (p + 1) for _ in pts])

    def stack(mats):
        acc = mats[0]
        for M in mats[1:]:
            acc = acc.hstack(M)
        return acc

    etas = [v1.eta(i) for i in range(npts)]
    # cleared per-point lattices: G[i][j] generates eta_i * (tensor step j)
    G = []
    for i in range(npts):
        steps = []
        for j in range(p + 1):
            cols = []
            for a in range(p + 1):
                for b in range(p + 1):
                    prod = a + b
                    if prod == j:
                        cols.append(kronecker(v1.step(i, a), v2.step(i, b))
                                    * etas[i])
                    elif prod == j + p:
                        cols.append(kronecker(v1.step(i, a), v2.step(i, b)))
            steps.append(hermite_normal_form(stack(cols)))
        G.append(steps)

    H = DensePoly.one(field)
    for e in etas:
        H = H * e
    cofactor = [H.exact_div(e) for e in etas]
    ambient = hermite_normal_form(
        stack([G[i][0] * cofactor[i] for i in range(npts)]))
    solver = BasisSolver(ambient)

    def in_new_basis(C: PolyMatrix) -> PolyMatrix:
        cols = [solver.solve(C.column(k)) for k in range(C.ncols)]
        Z = PolyMatrix.from_columns(field, cols, nrows=m)
        return hermite_normal_form(Z)

    chains = []
    for i in range(npts):
        chain = []
        for j in range(p + 1):
            pieces = [G[i][j] * cofactor[i]]
            for i2 in range(npts):
                if i2 != i:
                    pieces.append(G[i2][0] * (cofactor[i2] * etas[i]))
            chain.append(in_new_basis(stack(pieces)))
        chains.append(chain)
    return ParabolicModule(field, pts, m, chains)


def _unit_divisor_count(M: PolyMatrix) -> int:
    divisors = smith_normal_form(M).elementary_divisors
    return sum(1 for d in divisors if d.degree == 0)


def _jump_profile(v: ParabolicModule):
    """delta[jvec] = unit elementary divisors of the intersection of the
    chains at depth jvec, an isomorphism invariant of the flag system."""
    p = v.field.p
    npts = len(v.points)
    delta = {}
    for jvec in itertools.product(range(p + 1), repeat=npts):
        M = PolyMatrix.identity(v.field, v.rank)
        for i, j in enumerate(jvec):
            M = intersect_columns(M, v.step(i, j))
        delta[jvec] = _unit_divisor_count(M)
    return delta


def _line_multiplicities(delta, p, npts):
    """Mobius inversion of the profile: how many line summands sit at each
    jump vector.  A negative count means the module does not split."""
    mult = {}
    for avec in itertools.product(range(p), repeat=npts):
        total = 0
        for bump in itertools.product((0, 1), repeat=npts):
            sign = -1 if sum(bump) % 2 else 1
            total += sign * delta[tuple(a + b for a, b in zip(avec, bump))]
        if total:
            mult[avec] = total
    return mult


def _adapted_basis(v: ParabolicModule, mult):
    """Try to pick a unimodular basis with one column per line summand,
    deepest jumps first.  Returns (U, jump vector per column) or None."""
    field = v.field
    cols = []
    jumps = []
    for avec in sorted(mult, key=lambda a: (-sum(a), a)):
        want = mult[avec]
        W = PolyMatrix.identity(field, v.rank)
        for i, a in enumerate(avec):
            W = intersect_columns(W, v.step(i, a))
        res = smith_normal_form(W)
        gen = W @ res.V
        taken = 0
        for c in range(gen.ncols):
            if taken == want:
                break
            if res.D.data[c][c].degree != 0:
                continue
            cand = cols + [gen.column(c)]
            trial = PolyMatrix.from_columns(field, cand, nrows=v.rank)
            if rank_over_fractions(trial) == len(cand):
                cols.append(gen.column(c))
                jumps.append(avec)
                taken += 1
        if taken != want:
            return None
    if len(cols) != v.rank:
        return None
    U = PolyMatrix.from_columns(field, cols, nrows=v.rank)
    if det_fraction_free(U).degree != 0:
        return None
    return U, jumps


def parabolic_iso_test(v1: ParabolicModule, v2: ParabolicModule):
    """Decide isomorphism of two filtered modules of rank at most 3.

    The verdict compares the jump profiles, a complete invariant whenever
    both modules split into line summands; non-split profiles (negative
    multiplicities under inversion) raise instead of guessing.  When a
    concrete change of basis is found it is verified step by step and
    returned, otherwise the witness is None.
    """
    _same_chart(v1, v2)
    if v1.rank > ISO_RANK_CAP or v2.rank > ISO_RANK_CAP:
        raise ValueError(
            f"isomorphism testing supports rank at most {ISO_RANK_CAP}")
    if v1.rank != v2.rank:
        return (False, None)
    if v1.rank == 0:
        return (True, PolyMatrix.zeros(v1.field, 0, 0))
    if not v1.points:
        return (True, PolyMatrix.identity(v1.field, v1.rank))
    p = v1.field.p
    npts = len(v1.points)
    d1 = _jump_profile(v1)
    d2 = _jump_profile(v2)
    if d1 != d2:
        return (False, None)
    mult = _line_multiplicities(d1, p, npts)
    if any(c < 0 for c in mult.values()):
        raise ValueError(
            "inconclusive: the filtration does not split into line summands")
    got1 = _adapted_basis(v1, mult)
    got2 = _adapted_basis(v2, mult)
    if got1 is None or got2 is None:
        return (True, None)
    U1, j1 = got1
    U2, j2 = got2
    if j1 != j2:
        return (True, None)
    U = U2 @ matrix_inverse(U1)
    for i in range(npts):
        for j in range(p + 1):
            if hermite_normal_form(U @ v1.step(i, j)) != v2.step(i, j):
                return (True, None)
    return (True, U)


def serialize_parabolic(v: ParabolicModule) -> dict:
    """Report-friendly form with canonical polynomial strings in y."""
    p = v.field.p
    return {
        "rank": v.rank,
        "points": [v.field.element_str(d.raw) for d in v.points],
        "filtrations": [
            [[[format_poly(v.step(i, j).data[r][c], var="y")
               for c in range(v.rank)] for r in range(v.rank)]
             for j in range(p + 1)]
            for i in range(len(v.points))
        ],
    }
