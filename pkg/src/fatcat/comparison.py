"""Comparison maps between fat realizations and stagewise products.

This module holds the canonical projection away from the stage factor, the
barycentric subdivision chain operator, the section built from maximal
flags and last-vertex collapses, the face-compatibility failure of the
naive coordinate-sorting assignment, and the comma fibers whose vanishing
reduced homology backs the projection being an equivalence.

Stage label convention for the section: a maximal flag A_0 < ... < A_n of
subsets of {0..n} is sent to the stage tuple (|A_0|, ..., |A_n|) =
(1, ..., n+1) read verbatim as labels, so the stage bound must satisfy
N >= D + 1.  The sign of a flag is the parity of the permutation pi with
A_i = {pi(0), ..., pi(i)}; this is the unique convention under which the
boundary identity holds already for the interval.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from .errors import StructureError, Violation
from .fincat import FinCategory, ordinal, unravel
from .homology import (
    ChainMap,
    IntegerChainComplex,
    QuasiIsoReport,
    fat_chains,
    geometric_chains,
    homology,
    identity_on_homology_through,
    induced_map,
)
from .intlinalg import IntMatrix
from .simpset import (
    SimplicialMap,
    TruncatedSimplicialSet,
    nerve,
    product_with_S,
    s_semisimplicial,
)


# ---------------------------------------------------------------------------
# The canonical projection


def projection_map(c: FinCategory, N: int, D: int) -> SimplicialMap:
    """Simplicial map from the stage product onto the nerve, (x, a) -> x."""
    ner = nerve(c, D)
    s = s_semisimplicial(N, D)
    prod = product_with_S(ner, s)
    maps = [{cell: cell[0] for cell in prod.cells[k]} for k in range(D + 1)]
    return SimplicialMap(prod, ner, maps)


def projection_pi(c: FinCategory, N: int, D: int) -> ChainMap:
    """Chain-level projection on fat chains."""
    return induced_map(projection_map(c, N, D))


# ---------------------------------------------------------------------------
# Barycentric subdivision as a chain operator


def _flag_id(parts):
    return tuple(tuple(sorted(p)) for p in parts)


def flag_chain_complex(n: int) -> IntegerChainComplex:
    """Chains on the barycentric subdivision of the n-simplex.

    A k-cell is a strict chain of k+1 nonempty subsets of {0..n}; the face
    d_i deletes the i-th subset.
    """
    from .simpset import sd_flags

    basis = []
    for k in range(n + 1):
        basis.append([_flag_id(f.chain) for f in sd_flags(n, k)])
    boundary = {}
    for k in range(1, n + 1):
        idx = {cell: i for i, cell in enumerate(basis[k - 1])}
        mat = IntMatrix.zeros(len(basis[k - 1]), len(basis[k]))
        for j, cell in enumerate(basis[k]):
            sign = 1
            for i in range(k + 1):
                face = cell[:i] + cell[i + 1:]
                mat.rows[idx[face]][j] += sign
                sign = -sign
        boundary[k] = mat
    return IntegerChainComplex(n, basis, boundary)


def simplex_chain_complex(n: int) -> IntegerChainComplex:
    """Simplicial chains of the n-simplex; k-cells are (k+1)-subsets."""
    basis = [list(combinations(range(n + 1), k + 1)) for k in range(n + 1)]
    boundary = {}
    for k in range(1, n + 1):
        idx = {cell: i for i, cell in enumerate(basis[k - 1])}
        mat = IntMatrix.zeros(len(basis[k - 1]), len(basis[k]))
        for j, cell in enumerate(basis[k]):
            sign = 1
            for i in range(k + 1):
                mat.rows[idx[cell[:i] + cell[i + 1:]]][j] += sign
                sign = -sign
        boundary[k] = mat
    return IntegerChainComplex(n, basis, boundary)


def _signed_maximal_flags(vertices):
    """Maximal flags of the simplex on the given vertices, with parity signs."""
    verts = sorted(vertices)
    out = []
    for pi in permutations(range(len(verts))):
        chain = []
        acc = []
        for p in pi:
            acc.append(verts[p])
            chain.append(tuple(sorted(acc)))
        inversions = sum(
            1
            for a in range(len(pi))
            for b in range(a + 1, len(pi))
            if pi[a] > pi[b]
        )
        out.append((tuple(chain), -1 if inversions % 2 else 1))
    return out


def subdivision_chain_operator(n: int):
    """Per-degree matrices of the subdivision operator Sd on the n-simplex.

    Sd sends a k-face to the signed sum of the (k+1)! maximal flags of that
    face; the degree-k matrix maps simplex chains to flag chains.
    """
    if n < 0:
        raise StructureError("n must be >= 0")
    flags = flag_chain_complex(n)
    simp = simplex_chain_complex(n)
    mats = []
    for k in range(n + 1):
        idx = flags.index(k)
        mat = IntMatrix.zeros(flags.rank(k), simp.rank(k))
        for j, cell in enumerate(simp.basis[k]):
            for chain, sign in _signed_maximal_flags(cell):
                mat.rows[idx[chain]][j] += sign
        mats.append(mat)
    return simp, flags, mats


def subdivision_operator(n: int) -> IntMatrix:
    """Top-degree subdivision matrix: the fundamental cell to its flags."""
    _, _, mats = subdivision_chain_operator(n)
    return mats[n]


def subdivision_commutes(n: int):
    """Exact check of the boundary identity for Sd in every degree."""
    simp, flags, mats = subdivision_chain_operator(n)
    violations = []
    for k in range(1, n + 1):
        left = flags.boundary[k].mul(mats[k])
        right = mats[k - 1].mul(simp.boundary[k])
        if left != right:
            violations.append(Violation("subdivision-boundary", (n, k)))
    return violations


# ---------------------------------------------------------------------------
# The flag section into the stage product


def apply_operator(x, k_from: int, cell, u):
    """Apply a monotone map u: [k_to] -> [k_from] to a cell of degree k_from.

    Standard peeling into faces (missed values) followed by degeneracies
    (repeated values).
    """
    k_to = len(u) - 1
    image = set(u)
    for v in range(k_from + 1):
        if v not in image:
            reduced = tuple(val if val < v else val - 1 for val in u)
            return apply_operator(
                x, k_from - 1, x.face(k_from, v, cell), reduced
            )
    for i in range(k_to):
        if u[i] == u[i + 1]:
            dropped = u[: i + 1] + u[i + 2:]
            lower = apply_operator(x, k_from, cell, dropped)
            return x.degeneracy(k_to - 1, i, lower)
    return cell


def tau_chain_map(x: TruncatedSimplicialSet, N: int, D: int) -> ChainMap:
    """Section of the projection on fat chains.

    A degree-n generator maps to the signed sum, over maximal flags of
    {0..n}, of its pullback along i -> max(A_i) paired with the stage tuple
    (1, ..., n+1).
    """
    if D != x.D:
        raise StructureError("D must match the truncation of x")
    if N < D + 1:
        raise StructureError("need N >= D + 1 so stage labels 1..D+1 exist")
    s = s_semisimplicial(N, D)
    prod = product_with_S(x, s)
    src = fat_chains(x)
    tgt = fat_chains(prod)
    mats = []
    for n in range(D + 1):
        idx = tgt.index(n)
        mat = IntMatrix.zeros(tgt.rank(n), src.rank(n))
        stage = tuple(range(1, n + 2))
        for j, cell in enumerate(src.basis[n]):
            for chain, sign in _signed_maximal_flags(range(n + 1)):
                u = tuple(max(part) for part in chain)
                image = (apply_operator(x, n, cell, u), stage)
                mat.rows[idx[image]][j] += sign
        mats.append(mat)
    return ChainMap(src, tgt, mats)


def pi_tau_homology_check(c: FinCategory, N: int, D: int, d: int) -> QuasiIsoReport:
    """The collapse-after-subdivision composite must fix every homology
    class of the fat nerve in degrees <= d."""
    if d + 1 > D:
        raise StructureError("truncation too small: need d + 1 <= D")
    ner = nerve(c, D)
    tau = tau_chain_map(ner, N, D)
    s = s_semisimplicial(N, D)
    prod = product_with_S(ner, s)
    maps = [{cell: cell[0] for cell in prod.cells[k]} for k in range(D + 1)]
    pi = induced_map(SimplicialMap(prod, ner, maps))
    composite = pi.compose(tau)
    return identity_on_homology_through(composite, d)


# ---------------------------------------------------------------------------
# The coordinate-sorting assignment and its failure


@dataclass(frozen=True)
class BarycentricPoint:
    """Exact rational point of the n-simplex."""

    n: int
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.n + 1:
            raise StructureError("need n + 1 coordinates")
        total = Fraction(0)
        for t in self.coords:
            if not isinstance(t, Fraction):
                raise StructureError("coordinates must be exact rationals")
            if t < 0:
                raise StructureError("coordinates must be nonnegative")
            total += t
        if total != 1:
            raise StructureError("coordinates must sum to 1 exactly")

    @classmethod
    def barycenter(cls, n):
        return cls(n, tuple(Fraction(1, n + 1) for _ in range(n + 1)))


def rho_evaluate(n: int, j: int, t) -> Fraction:
    """Coordinate component s_{j,n} of the sorting assignment.

    (j+1) times the sum over (j+1)-subsets E of max(0, min_E t - max_{not E} t),
    with the max over an empty complement read as 0.
    """
    if not 0 <= j <= n:
        raise StructureError("need 0 <= j <= n")
    coords = t.coords if isinstance(t, BarycentricPoint) else tuple(t)
    if len(coords) != n + 1:
        raise StructureError("point has wrong dimension")
    total = Fraction(0)
    for E in combinations(range(n + 1), j + 1):
        inside = min(coords[i] for i in E)
        rest = [coords[i] for i in range(n + 1) if i not in E]
        outside = max(rest) if rest else Fraction(0)
        if inside > outside:
            total += inside - outside
    return (j + 1) * total


@dataclass(frozen=True)
class RhoWitness:
    """Concrete ill-definedness evidence for one reading of the assignment."""

    n: int
    convention: str
    kind: str
    face_index: int
    point: tuple
    face_of_image: tuple
    image_of_face: tuple
    detail: str = ""

    def to_json(self):
        from .ids import encode_id

        return {
            "n": self.n,
            "convention": self.convention,
            "kind": self.kind,
            "face_index": self.face_index,
            "point": [str(t) for t in self.point],
            "face_of_image": encode_id(self.face_of_image),
            "image_of_face": encode_id(self.image_of_face),
            "detail": self.detail,
        }


def _stage_tuple(convention, degree):
    if convention == "zero-based":
        return tuple(range(degree + 1))
    if convention == "literal":
        return tuple(range(1, degree + 1))
    raise StructureError(f"unknown convention: {convention}")


def rho_witnesses(n: int, convention: str = "zero-based"):
    """Search one reading of the assignment for ill-definedness witnesses.

    The cell component attached to a degree-q generator is the fixed stage
    tuple given by the convention.  A face mismatch arises when deleting
    entry i from the degree-n stage tuple differs from the degree-(n-1)
    stage tuple; the literal reading additionally fails on dimension
    grounds since its tuple is one entry short.
    """
    if n < 1:
        raise StructureError("witness search needs n >= 1")
    witnesses = []
    point = BarycentricPoint.barycenter(n)
    seq_n = _stage_tuple(convention, n)
    seq_lower = _stage_tuple(convention, n - 1)
    if len(seq_n) != n + 1:
        witnesses.append(
            RhoWitness(
                n,
                convention,
                "dimension-mismatch",
                -1,
                point.coords,
                ("y", seq_n),
                ("y", seq_n),
                f"a degree-{n} generator is paired with a stage cell of "
                f"degree {len(seq_n) - 1}",
            )
        )
    for i in range(len(seq_n)):
        face_of_image = (f"d{i}(y)", seq_n[:i] + seq_n[i + 1:])
        image_of_face = (f"d{i}(y)", seq_lower)
        if face_of_image != image_of_face:
            witnesses.append(
                RhoWitness(
                    n,
                    convention,
                    "face-mismatch",
                    i,
                    point.coords,
                    face_of_image,
                    image_of_face,
                    "deleting the stage entry does not reproduce the "
                    "assignment on the face",
                )
            )
    return witnesses


def rho_face_counterexample(n: int, convention: str = "zero-based") -> RhoWitness:
    """First ill-definedness witness, preferring a face mismatch."""
    witnesses = rho_witnesses(n, convention)
    if not witnesses:
        raise StructureError(
            f"no witness found for n={n} under the {convention} reading"
        )
    for w in witnesses:
        if w.kind == "face-mismatch":
            return w
    return witnesses[0]


# ---------------------------------------------------------------------------
# Comma fibers over nerve simplices


@dataclass
class CommaFiber:
    """Degreewise pullback of a nondegenerate simplex against the stage
    forgetting map, together with both projection legs."""

    category: FinCategory
    stages: int
    degree: int
    vertex_objects: tuple
    fiber: TruncatedSimplicialSet
    to_simplex: SimplicialMap
    to_unraveled: SimplicialMap


def _nondegenerate_factorization(c: FinCategory, k: int, cell):
    """Vertex objects and arrows of the nondegenerate core of a nerve cell."""
    if k == 0:
        return (cell,), ()
    arrows = tuple(f for f in cell if not c.is_identity(f))
    objects = [c.src[cell[0]]]
    for f in cell:
        if not c.is_identity(f):
            objects.append(c.tgt[f])
    return tuple(objects), arrows


def quillen_fiber(c: FinCategory, N: int, D: int, y_cell, y_degree: int) -> CommaFiber:
    """Comma fiber of a nerve simplex.

    Degenerate simplices are factored through their nondegenerate core
    first, so the fiber only depends on that core.  A degree-k fiber cell
    is a pair of weakly increasing tuples (vertices of the core simplex,
    stage labels) where equal consecutive stages force the corresponding
    core arrow to be an identity.
    """
    objects, arrows = _nondegenerate_factorization(c, y_degree, y_cell)
    m = len(objects) - 1

    composite = {}
    for i in range(m + 1):
        composite[(i, i)] = c.identity[objects[i]]
        for j in range(i + 1, m + 1):
            acc = arrows[i]
            for step in range(i + 1, j):
                acc = c.table[(acc, arrows[step])]
            composite[(i, j)] = acc

    def step_ok(a0, a1, l0, l1):
        if l0 == l1:
            return c.is_identity(composite[(a0, a1)])
        return True

    cells = []
    for k in range(D + 1):
        level = []
        stack = [((a,), (l,)) for a in range(m + 1) for l in range(N + 1)]
        for _ in range(k):
            nxt = []
            for avec, lvec in stack:
                for a in range(avec[-1], m + 1):
                    for l in range(lvec[-1], N + 1):
                        if step_ok(avec[-1], a, lvec[-1], l):
                            nxt.append((avec + (a,), lvec + (l,)))
            stack = nxt
        level = sorted(stack)
        cells.append(level)

    face = [None]
    for k in range(1, D + 1):
        tables = []
        for i in range(k + 1):
            tables.append(
                {
                    (a, l): (a[:i] + a[i + 1:], l[:i] + l[i + 1:])
                    for a, l in cells[k]
                }
            )
        face.append(tables)
    degeneracy = []
    for k in range(D):
        tables = []
        for i in range(k + 1):
            tables.append(
                {
                    (a, l): (a[: i + 1] + a[i:], l[: i + 1] + l[i:])
                    for a, l in cells[k]
                }
            )
        degeneracy.append(tables)
    fiber = TruncatedSimplicialSet(D, cells, face, degeneracy)

    simplex = nerve(ordinal(m), D)
    cN = unravel(c, N)
    target = nerve(cN, D)

    left_maps = []
    right_maps = []
    for k in range(D + 1):
        lt = {}
        rt = {}
        for avec, lvec in cells[k]:
            if k == 0:
                lt[(avec, lvec)] = avec[0]
                rt[(avec, lvec)] = (objects[avec[0]], lvec[0])
                continue
            lt[(avec, lvec)] = tuple(
                (avec[i - 1], avec[i], "le") for i in range(1, k + 1)
            )
            rt[(avec, lvec)] = tuple(
                (
                    (objects[avec[i - 1]], lvec[i - 1]),
                    (objects[avec[i]], lvec[i]),
                    composite[(avec[i - 1], avec[i])],
                )
                for i in range(1, k + 1)
            )
        left_maps.append(lt)
        right_maps.append(rt)

    return CommaFiber(
        category=c,
        stages=N,
        degree=m,
        vertex_objects=objects,
        fiber=fiber,
        to_simplex=SimplicialMap(fiber, simplex, left_maps),
        to_unraveled=SimplicialMap(fiber, target, right_maps),
    )


@dataclass
class ContractibilityReport:
    degrees: list
    violations: list

    @property
    def ok(self):
        return not self.violations


def contractibility_report(fiber: CommaFiber, d: int) -> ContractibilityReport:
    """Reduced homology of the fiber must vanish in degrees <= d."""
    if d > fiber.fiber.D:
        raise StructureError("truncation too small for the requested range")
    chains = geometric_chains(fiber.fiber)
    degrees = []
    violations = []
    for k in range(d + 1):
        h = homology(chains, k)
        degrees.append(h)
        expected = (1, ()) if k == 0 else (0, ())
        if h.group() != expected:
            violations.append(
                Violation(
                    "fiber-contractible",
                    (k,),
                    f"H_{k} = {h.group()}, expected {expected}",
                )
            )
    return ContractibilityReport(degrees, violations)


def all_fibers_contractible(c: FinCategory, N: int, D: int, d: int = None):
    """Run the fiber check over every simplex of the truncated nerve."""
    if d is None:
        d = D - 1
    ner = nerve(c, D)
    violations = []
    checked = 0
    for k in range(D + 1):
        for cell in ner.cells[k]:
            fib = quillen_fiber(c, N, D, cell, k)
            rep = contractibility_report(fib, d)
            checked += 1
            for v in rep.violations:
                violations.append(
                    Violation(v.law, (k, cell) + v.witness, v.detail)
                )
    return checked, violations
