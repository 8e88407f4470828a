"""Groupoid-valued cocycles on covered finite complexes.

An open cover is modeled by an ordered list of subcomplexes, and all
transition data is locally constant: one groupoid morphism per connected
component of each pairwise overlap, one object per component of each cover
set.  Connectivity is vertex-edge connectivity, which downward closure
makes equivalent to sharing any face.

The classifying complex of a finite groupoid is the stagewise unraveling
of its nerve; its cells carry the canonical transition assignment (compose
forward, identity on the diagonal, invert backward), and the blowup of a
covered complex maps into it by the cellwise classifying rule.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import StructureError, Violation, check_budget
from .fincat import FinGroupoid, groupoid_from_json, groupoid_to_json
from .homology import ChainMap, IntegerChainComplex, QuasiIsoReport, geometric_chains, quasi_iso_through
from .ids import decode_id, encode_id, sort_key
from .intlinalg import IntMatrix
from .simpset import TruncatedSimplicialSet, nerve, unravel_simplicial


# ---------------------------------------------------------------------------
# Covered complexes


def closure(faces):
    """Downward closure of a face list, as sorted vertex tuples."""
    out = set()
    for face in faces:
        face = tuple(sorted(face))
        if not face:
            raise StructureError("faces must be nonempty")
        for size in range(1, len(face) + 1):
            out.update(combinations(face, size))
    return frozenset(out)


def _components(faces):
    """Connected components of a face set, keyed by sorted vertex tuples."""
    faces = sorted(faces, key=sort_key)
    parent = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for face in faces:
        for v in face:
            parent.setdefault(v, v)
    for face in faces:
        root = find(face[0])
        for v in face[1:]:
            parent[find(v)] = root
    groups = {}
    for v in parent:
        groups.setdefault(find(v), set()).add(v)
    comps = [tuple(sorted(g)) for g in groups.values()]
    comps.sort(key=sort_key)
    return tuple(comps)


class CoveredComplex:
    """Finite abstract simplicial complex with an ordered subcomplex cover."""

    def __init__(self, faces, cover):
        self.faces = frozenset(tuple(sorted(f)) for f in faces)
        if not self.faces:
            raise StructureError("complex must be nonempty")
        for face in self.faces:
            if len(set(face)) != len(face):
                raise StructureError(f"face with repeated vertex: {face}")
            for size in range(1, len(face)):
                for sub in combinations(face, size):
                    if sub not in self.faces:
                        raise StructureError(f"complex is not downward closed at {face}")
        self.vertices = tuple(sorted({v for f in self.faces for v in f}))
        self.cover = tuple(frozenset(tuple(sorted(f)) for f in part) for part in cover)
        if not self.cover:
            raise StructureError("cover must be nonempty")
        covered = set()
        for i, part in enumerate(self.cover):
            for face in part:
                if face not in self.faces:
                    raise StructureError(f"cover set {i} contains a foreign face")
                for size in range(1, len(face)):
                    for sub in combinations(face, size):
                        if sub not in part:
                            raise StructureError(f"cover set {i} is not downward closed")
            covered.update(part)
        if covered != self.faces:
            raise StructureError("cover does not cover the complex")
        self._overlap_cache = {}
        self._component_cache = {}

    def dimension(self):
        return max(len(f) for f in self.faces) - 1

    def overlap(self, indices):
        key = tuple(sorted(set(indices)))
        if key not in self._overlap_cache:
            faces = set(self.cover[key[0]])
            for i in key[1:]:
                faces &= self.cover[i]
            self._overlap_cache[key] = frozenset(faces)
        return self._overlap_cache[key]

    def components_of_overlap(self, indices):
        key = tuple(sorted(set(indices)))
        if key not in self._component_cache:
            self._component_cache[key] = _components(self.overlap(key))
        return self._component_cache[key]

    def components_of_set(self, alpha):
        return self.components_of_overlap((alpha,))

    def component_containing(self, indices, face):
        """Component key of overlap(indices) whose vertex set contains the face."""
        for comp in self.components_of_overlap(indices):
            if set(face) <= set(comp):
                return comp
        raise StructureError(f"face {face} is not in the overlap of {indices}")

    def __eq__(self, other):
        return (
            isinstance(other, CoveredComplex)
            and self.faces == other.faces
            and self.cover == other.cover
        )

    __hash__ = None


# ---------------------------------------------------------------------------
# Cocycles


class GCocycle:
    """Cover with groupoid-valued transitions per overlap component.

    ``objects[(alpha, comp)]`` assigns an object to each component of each
    cover set; ``transitions[(alpha, beta, comp)]`` is the morphism from
    the alpha-side object to the beta-side object over each component of
    the pairwise overlap, for alpha != beta.
    """

    def __init__(self, base: CoveredComplex, groupoid: FinGroupoid, objects, transitions):
        self.base = base
        self.groupoid = groupoid
        self.objects = dict(objects)
        self.transitions = dict(transitions)

    def object_at(self, alpha, face):
        comp = self.base.component_containing((alpha,), face)
        return self.objects[(alpha, comp)]

    def transition(self, alpha, beta, face):
        """Transition from alpha to beta over the component containing face."""
        if alpha == beta:
            return self.groupoid.base.identity[self.object_at(alpha, face)]
        comp = self.base.component_containing((alpha, beta), face)
        return self.transitions[(alpha, beta, comp)]

    def __eq__(self, other):
        return (
            isinstance(other, GCocycle)
            and self.base == other.base
            and self.groupoid == other.groupoid
            and self.objects == other.objects
            and self.transitions == other.transitions
        )

    __hash__ = None


def check_cocycle(u: GCocycle):
    """Endpoint-coherence is structural; the composition law is reported."""
    base, cat = u.base, u.groupoid.base
    n = len(base.cover)
    expected_objects = {
        (alpha, comp)
        for alpha in range(n)
        for comp in base.components_of_set(alpha)
    }
    if set(u.objects) != expected_objects:
        raise StructureError("object assignment does not match the cover components")
    for key, obj in u.objects.items():
        if obj not in set(cat.objects):
            raise StructureError(f"object at {key} is not in the groupoid")
    expected_transitions = {
        (alpha, beta, comp)
        for alpha in range(n)
        for beta in range(n)
        if alpha != beta
        for comp in base.components_of_overlap((alpha, beta))
    }
    given = {k for k in u.transitions if k[0] != k[1]}
    if given != expected_transitions:
        raise StructureError("transitions do not match the overlap components")
    for (alpha, beta, comp), m in u.transitions.items():
        if m not in cat.src:
            raise StructureError(f"transition at {(alpha, beta, comp)} is not a morphism")
        if alpha == beta:
            continue
        src_obj = u.objects[(alpha, base.component_containing((alpha,), comp))]
        tgt_obj = u.objects[(beta, base.component_containing((beta,), comp))]
        if cat.src[m] != src_obj or cat.tgt[m] != tgt_obj:
            raise StructureError(
                f"transition endpoints at {(alpha, beta, comp)} do not match the objects"
            )

    violations = []
    for (alpha, beta, comp), m in sorted(u.transitions.items(), key=lambda kv: sort_key(kv[0])):
        if alpha == beta and not cat.is_identity(m):
            violations.append(Violation("diagonal-identity", (alpha, comp)))
    for alpha in range(n):
        for beta in range(n):
            for gamma in range(n):
                for comp in base.components_of_overlap((alpha, beta, gamma)):
                    f_ba = u.transition(alpha, beta, comp)
                    f_cb = u.transition(beta, gamma, comp)
                    f_ca = u.transition(alpha, gamma, comp)
                    if cat.table.get((f_ba, f_cb)) != f_ca:
                        violations.append(
                            Violation(
                                "cocycle-law",
                                (alpha, beta, gamma, comp),
                                "f_cb o f_ba != f_ca",
                            )
                        )
    return violations


@dataclass
class CocycleIsomorphism:
    """Componentwise comparison data between two cocycles on one complex.

    ``phi[(alpha, gamma, comp)]`` is the morphism from the source object of
    u over U_alpha to the target object of v over V_gamma, per component of
    the overlap of the two cover sets.
    """

    source: GCocycle
    target: GCocycle
    phi: dict

    def value(self, alpha, gamma, face):
        comp = _cross_component(self.source.base, self.target.base, alpha, gamma, face)
        return self.phi[(alpha, gamma, comp)]


def _cross_overlap(base_u, base_v, alpha, gamma):
    return frozenset(base_u.cover[alpha] & base_v.cover[gamma])


def _cross_component(base_u, base_v, alpha, gamma, face):
    for comp in _components(_cross_overlap(base_u, base_v, alpha, gamma)):
        if set(face) <= set(comp):
            return comp
    raise StructureError(f"face {face} is not in the cross overlap ({alpha}, {gamma})")


def union_cocycle(iso: CocycleIsomorphism) -> GCocycle:
    """Cocycle on the joint cover whose validity defines the isomorphism.

    Reverse cross transitions are the groupoid inverses of phi, which the
    composition law forces anyway.
    """
    u, v = iso.source, iso.target
    if u.base.faces != v.base.faces:
        raise StructureError("isomorphism needs cocycles on the same complex")
    if u.groupoid != v.groupoid:
        raise StructureError("isomorphism needs a common groupoid")
    g = u.groupoid
    nu = len(u.base.cover)
    joint = CoveredComplex(sorted(u.base.faces, key=sort_key), list(u.base.cover) + list(v.base.cover))
    objects = {}
    for (alpha, comp), obj in u.objects.items():
        objects[(alpha, comp)] = obj
    for (gamma, comp), obj in v.objects.items():
        objects[(nu + gamma, comp)] = obj
    transitions = {}
    for (alpha, beta, comp), m in u.transitions.items():
        transitions[(alpha, beta, comp)] = m
    for (gamma, delta, comp), m in v.transitions.items():
        transitions[(nu + gamma, nu + delta, comp)] = m
    for (alpha, gamma, comp), m in iso.phi.items():
        transitions[(alpha, nu + gamma, comp)] = m
        transitions[(nu + gamma, alpha, comp)] = g.inverse[m]
    return GCocycle(joint, g, objects, transitions)


def check_isomorphism(iso: CocycleIsomorphism):
    expected = {
        (alpha, gamma, comp)
        for alpha in range(len(iso.source.base.cover))
        for gamma in range(len(iso.target.base.cover))
        for comp in _components(
            _cross_overlap(iso.source.base, iso.target.base, alpha, gamma)
        )
    }
    if set(iso.phi) != expected:
        raise StructureError("phi does not match the cross-overlap components")
    return check_cocycle(union_cocycle(iso))


def identity_isomorphism(u: GCocycle) -> CocycleIsomorphism:
    phi = {}
    n = len(u.base.cover)
    for alpha in range(n):
        for beta in range(n):
            for comp in u.base.components_of_overlap((alpha, beta)):
                phi[(alpha, beta, comp)] = u.transition(alpha, beta, comp)
    return CocycleIsomorphism(u, u, phi)


@dataclass
class IsoComposition:
    iso: CocycleIsomorphism
    obstructions: list

    @property
    def ok(self):
        return not self.obstructions


def compose_isomorphisms(phi: CocycleIsomorphism, psi: CocycleIsomorphism) -> IsoComposition:
    """Composite comparison u -> w through v.

    The mediating value is computed on every component of every triple
    cross overlap and must be independent of the middle index; any
    disagreement is returned as an obstruction instead of being assumed
    away.
    """
    u = phi.source
    v = phi.target
    w = psi.target
    if psi.source is not v and psi.source != v:
        raise StructureError("isomorphisms are not composable")
    cat = u.groupoid.base
    rho = {}
    obstructions = []
    for alpha in range(len(u.base.cover)):
        for eps in range(len(w.base.cover)):
            cross = _cross_overlap(u.base, w.base, alpha, eps)
            for comp in _components(cross):
                candidates = {}
                for gamma in range(len(v.base.cover)):
                    triple = (
                        set(u.base.cover[alpha])
                        & set(v.base.cover[gamma])
                        & set(w.base.cover[eps])
                    )
                    for tcomp in _components(triple):
                        if not set(tcomp) <= set(comp):
                            continue
                        f1 = phi.value(alpha, gamma, tcomp)
                        f2 = psi.value(gamma, eps, tcomp)
                        candidates[(gamma, tcomp)] = cat.table[(f1, f2)]
                values = sorted(set(candidates.values()), key=sort_key)
                if not candidates:
                    raise StructureError(
                        f"middle cover misses component {comp} of ({alpha}, {eps})"
                    )
                if len(values) > 1:
                    obstructions.append(
                        Violation(
                            "mediator-disagreement",
                            (alpha, eps, comp),
                            f"values {values}",
                        )
                    )
                rho[(alpha, eps, comp)] = values[0]
    return IsoComposition(CocycleIsomorphism(u, w, rho), obstructions)


# ---------------------------------------------------------------------------
# Concatenation over a prism


def prism_complex(faces) -> frozenset:
    """Product of a complex with a three-segment interval, triangulated by
    staircase chains; vertices are pairs (x, level) with levels 0..3."""
    base_faces = frozenset(tuple(sorted(f)) for f in faces)
    out = set()
    for face in base_faces:
        for seg in range(3):
            pool = [(x, j) for x in face for j in (seg, seg + 1)]
            pool.sort(key=sort_key)

            def chains(prefix, rest):
                if prefix:
                    out.add(tuple(prefix))
                for idx, cand in enumerate(rest):
                    last = prefix[-1] if prefix else None
                    if last is None or (
                        sort_key(last[0]) <= sort_key(cand[0]) and last[1] <= cand[1]
                        and last != cand
                    ):
                        chains(prefix + [cand], rest[idx + 1:])

            chains([], pool)
    check_budget(len(out), "prism complex")
    return frozenset(out)


def _layer_levels(side):
    return (1, 2, 3) if side == "upper" else (0, 1, 2)


def concat_cocycle(u: GCocycle, v: GCocycle, iso: CocycleIsomorphism) -> GCocycle:
    """Cocycle on the prism joining u on the top band to v on the bottom,
    glued over the middle band by the isomorphism."""
    if iso.source != u or iso.target != v:
        raise StructureError("isomorphism does not join u to v")
    faces = u.base.faces
    prism_faces = prism_complex(faces)

    def lift(part, levels):
        allowed = set(levels)
        return [
            pf
            for pf in prism_faces
            if all(j in allowed for _, j in pf)
            and tuple(sorted({x for x, _ in pf})) in part
        ]

    nu = len(u.base.cover)
    nv = len(v.base.cover)
    cover = [lift(u.base.cover[a], _layer_levels("upper")) for a in range(nu)]
    cover += [lift(v.base.cover[g], _layer_levels("lower")) for g in range(nv)]
    prism = CoveredComplex(sorted(prism_faces, key=sort_key), cover)

    def project(comp):
        return tuple(sorted({x for x, _ in comp}))

    objects = {}
    for alpha in range(nu + nv):
        for comp in prism.components_of_set(alpha):
            shadow = project(comp)
            if alpha < nu:
                objects[(alpha, comp)] = u.object_at(alpha, shadow[:1])
            else:
                objects[(alpha, comp)] = v.object_at(alpha - nu, shadow[:1])
    transitions = {}
    for alpha in range(nu + nv):
        for beta in range(nu + nv):
            if alpha == beta:
                continue
            for comp in prism.components_of_overlap((alpha, beta)):
                shadow = project(comp)
                if alpha < nu and beta < nu:
                    val = u.transition(alpha, beta, shadow[:1])
                elif alpha >= nu and beta >= nu:
                    val = v.transition(alpha - nu, beta - nu, shadow[:1])
                elif alpha < nu:
                    val = iso.value(alpha, beta - nu, shadow[:1])
                else:
                    val = u.groupoid.inverse[iso.value(beta, alpha - nu, shadow[:1])]
                transitions[(alpha, beta, comp)] = val
    return GCocycle(prism, u.groupoid, objects, transitions)


def restrict_to_layer(prism_cocycle: GCocycle, level: int) -> GCocycle:
    """Slice a prism cocycle at one level, dropping cover sets that miss it."""
    base = prism_cocycle.base
    layer_faces = [f for f in base.faces if all(j == level for _, j in f)]
    if not layer_faces:
        raise StructureError(f"no faces at level {level}")

    def shadow(face):
        return tuple(sorted(x for x, _ in face))

    faces = [shadow(f) for f in layer_faces]
    kept = []
    cover = []
    for alpha, part in enumerate(base.cover):
        sliced = [shadow(f) for f in part if all(j == level for _, j in f)]
        if sliced:
            kept.append(alpha)
            cover.append(sliced)
    restricted = CoveredComplex(faces, cover)
    objects = {}
    transitions = {}
    for new_alpha, alpha in enumerate(kept):
        for comp in restricted.components_of_set(new_alpha):
            lifted = tuple((x, level) for x in comp)
            objects[(new_alpha, comp)] = prism_cocycle.object_at(alpha, lifted[:1])
    for ia, alpha in enumerate(kept):
        for ib, beta in enumerate(kept):
            if ia == ib:
                continue
            for comp in restricted.components_of_overlap((ia, ib)):
                lifted = ((comp[0], level),)
                transitions[(ia, ib, comp)] = prism_cocycle.transition(alpha, beta, lifted)
    return GCocycle(restricted, prism_cocycle.groupoid, objects, transitions)


# ---------------------------------------------------------------------------
# The classifying complex, its canonical transitions and the blowup


@dataclass
class ClassifyingComplex:
    """Stagewise unraveled nerve with its stage cover.

    ``cover[j][k]`` is the set of k-cells whose stage tuple contains j,
    the combinatorial shadow of the j-th coordinate being positive.
    """

    groupoid: FinGroupoid
    stages: int
    space: TruncatedSimplicialSet
    cover: dict


def bg_complex(g: FinGroupoid, N: int, D: int) -> ClassifyingComplex:
    space = unravel_simplicial(nerve(g.base, D), N)
    cover = {}
    for j in range(N + 1):
        cover[j] = tuple(
            frozenset(cell for cell in space.cells[k] if j in cell[0])
            for k in range(D + 1)
        )
    return ClassifyingComplex(g, N, space, cover)


def _cell_objects_and_arrows(cat, cell):
    """Vertex objects and arrows of one classifying cell (seq, z)."""
    seq, z = cell
    l = len(set(seq))
    if l == 1:
        return (z,), ()
    objects = [cat.src[z[0]]]
    for arrow in z:
        objects.append(cat.tgt[arrow])
    return tuple(objects), tuple(z)


def _gamma_for_cell(g: FinGroupoid, cell):
    """Canonical transition assignment on one cell, keyed by stage pairs."""
    cat = g.base
    seq, _ = cell
    values = sorted(set(seq))
    objects, arrows = _cell_objects_and_arrows(cat, cell)
    gamma = {}
    for a in range(len(values)):
        gamma[(values[a], values[a])] = cat.identity[objects[a]]
        for b in range(a + 1, len(values)):
            acc = arrows[a]
            for step in range(a + 1, b):
                acc = cat.table[(acc, arrows[step])]
            gamma[(values[a], values[b])] = acc
            gamma[(values[b], values[a])] = g.inverse[acc]
    return gamma


@dataclass
class UniversalCocycle:
    classifying: ClassifyingComplex
    gamma: dict
    report: list

    @property
    def ok(self):
        return not self.report


def universal_cocycle(g: FinGroupoid, N: int, D: int) -> UniversalCocycle:
    """Canonical transitions on every cell of the classifying complex,
    checked for the composition law and face compatibility."""
    bg = bg_complex(g, N, D)
    cat = g.base
    gamma = {}
    for k in range(D + 1):
        for cell in bg.space.cells[k]:
            gamma[(k, cell)] = _gamma_for_cell(g, cell)
    report = []
    for k in range(D + 1):
        for cell in bg.space.cells[k]:
            table = gamma[(k, cell)]
            values = sorted(set(cell[0]))
            for a in values:
                for b in values:
                    for cc in values:
                        left = cat.table.get((table[(a, b)], table[(b, cc)]))
                        if left != table[(a, cc)]:
                            report.append(
                                Violation("universal-cocycle-law", (k, cell, a, b, cc))
                            )
    for k in range(1, D + 1):
        for cell in bg.space.cells[k]:
            parent = gamma[(k, cell)]
            for i in range(k + 1):
                child_cell = bg.space.face(k, i, cell)
                child = gamma[(k - 1, child_cell)]
                for pair, val in child.items():
                    if parent.get(pair) != val:
                        report.append(
                            Violation("universal-face-compat", (k, i, cell, pair))
                        )
    return UniversalCocycle(bg, gamma, report)


# ---------------------------------------------------------------------------
# Partition-of-unity homotopy


@dataclass(frozen=True)
class PartitionPoint:
    """Finitely supported exact partition values t_0, ..., t_N."""

    coords: tuple

    def __post_init__(self):
        total = Fraction(0)
        for t in self.coords:
            if not isinstance(t, Fraction):
                raise StructureError("partition values must be exact rationals")
            if t < 0:
                raise StructureError("partition values must be nonnegative")
            total += t
        if total != 1:
            raise StructureError("partition values must sum to 1 exactly")


def partition_homotopy(t, s):
    """Deformation from raw coordinates to a locally finite partition.

    w_i = max(0, t_i - s * sum_{j<i} t_j) and v = w normalized; at s = 0
    this returns t itself, and at s = 1 entry i dies as soon as the mass
    before it reaches t_i.
    """
    coords = t.coords if isinstance(t, PartitionPoint) else tuple(t)
    s = Fraction(s)
    if not 0 <= s <= 1:
        raise StructureError("s must lie in [0, 1]")
    w = []
    before = Fraction(0)
    for ti in coords:
        wi = ti - s * before
        w.append(wi if wi > 0 else Fraction(0))
        before += ti
    total = sum(w)
    assert total > 0, "a valid partition point always keeps positive mass"
    v = tuple(wi / total for wi in w)
    return tuple(w), v


def partition_grid(denominator=4, length=5):
    """Deterministic grid of partition points: all length-part compositions
    of the denominator, scaled; vertices are included."""
    points = []

    def compose_rest(remaining, parts, acc):
        if parts == 1:
            points.append(tuple(acc + [Fraction(remaining, denominator)]))
            return
        for take in range(remaining + 1):
            compose_rest(remaining - take, parts - 1, acc + [Fraction(take, denominator)])

    compose_rest(denominator, length, [])
    return points


def check_partition_grid(points=None, svals=None):
    """Exact partition identities over a parameter grid.

    Checks that v sums to one, that s = 0 returns the input, and that at
    s = 1 an entry dies exactly when the mass before it reaches it.
    """
    if points is None:
        points = partition_grid()
    if svals is None:
        svals = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
    violations = []
    pairs = 0
    for t in points:
        for s in svals:
            pairs += 1
            _, v = partition_homotopy(t, s)
            if sum(v) != 1:
                violations.append(Violation("partition-sum", (t, s)))
            if s == 0 and v != tuple(t):
                violations.append(Violation("partition-start", (t,)))
            if s == 1:
                before = Fraction(0)
                for i, ti in enumerate(t):
                    if before >= ti and v[i] != 0:
                        violations.append(Violation("partition-truncation", (t, i)))
                    before += ti
    return pairs, violations


# ---------------------------------------------------------------------------
# Blowup of a covered complex


@dataclass
class BlowupComplex:
    """Total complex of the cover-versus-chains double complex.

    A generator in bidegree (p, q) is a strictly increasing (p+1)-tuple of
    cover indices with nonempty overlap, together with a q-face of that
    overlap.  The total differential is the index-deleting sum plus the
    signed face sum.
    """

    base: CoveredComplex
    bigraded: dict
    total: IntegerChainComplex
    projection: ChainMap


def base_chain_complex(cc: CoveredComplex, D=None) -> IntegerChainComplex:
    """Ordered simplicial chains of the underlying complex, padded to D."""
    dim = cc.dimension()
    D = dim if D is None else D
    basis = []
    for k in range(D + 1):
        basis.append(sorted((f for f in cc.faces if len(f) == k + 1), key=sort_key))
    boundary = {}
    for k in range(1, D + 1):
        idx = {cell: i for i, cell in enumerate(basis[k - 1])}
        mat = IntMatrix.zeros(len(basis[k - 1]), len(basis[k]))
        for j, cell in enumerate(basis[k]):
            sign = 1
            for i in range(k + 1):
                mat.rows[idx[cell[:i] + cell[i + 1:]]][j] += sign
                sign = -sign
        boundary[k] = mat
    return IntegerChainComplex(D, basis, boundary)


def blowup(base: CoveredComplex, D=None) -> BlowupComplex:
    """Build the blowup and its collapse onto the underlying complex."""
    n = len(base.cover)
    dim = base.dimension()
    tuples = []
    for p in range(n):
        for idx in combinations(range(n), p + 1):
            if base.overlap(idx):
                tuples.append(idx)
    bigraded = {}
    for idx in tuples:
        p = len(idx) - 1
        for face in sorted(base.overlap(idx), key=sort_key):
            q = len(face) - 1
            bigraded.setdefault((p, q), []).append((idx, face))
    if not bigraded:
        raise StructureError("empty blowup")
    natural = max(p + q for p, q in bigraded)
    D = natural if D is None else D
    basis = []
    for total_deg in range(D + 1):
        level = []
        for (p, q), gens in sorted(bigraded.items()):
            if p + q == total_deg:
                level.extend(gens)
        level.sort(key=sort_key)
        basis.append(level)
    check_budget(sum(len(b) for b in basis), "blowup total complex")
    boundary = {}
    for k in range(1, D + 1):
        idx_map = {cell: i for i, cell in enumerate(basis[k - 1])}
        mat = IntMatrix.zeros(len(basis[k - 1]), len(basis[k]))
        for j, (idx, face) in enumerate(basis[k]):
            p = len(idx) - 1
            if p:
                sign = 1
                for r in range(p + 1):
                    child = (idx[:r] + idx[r + 1:], face)
                    mat.rows[idx_map[child]][j] += sign
                    sign = -sign
            if len(face) > 1:
                sign = 1 if p % 2 == 0 else -1
                for r in range(len(face)):
                    child = (idx, face[:r] + face[r + 1:])
                    mat.rows[idx_map[child]][j] += sign
                    sign = -sign
        boundary[k] = mat
    total = IntegerChainComplex(D, basis, boundary)
    target = base_chain_complex(base, D)
    mats = []
    for k in range(D + 1):
        tgt_idx = target.index(k)
        mat = IntMatrix.zeros(target.rank(k), total.rank(k))
        for j, (idx, face) in enumerate(basis[k]):
            if len(idx) == 1:
                mat.rows[tgt_idx[face]][j] = 1
        mats.append(mat)
    projection = ChainMap(total, target, mats)
    return BlowupComplex(base, bigraded, total, projection)


def blowup_vs_base(base: CoveredComplex, d: int) -> QuasiIsoReport:
    """The collapse must be a homology isomorphism in degrees <= d."""
    blow = blowup(base, D=max(d + 1, base.dimension()))
    return quasi_iso_through(blow.projection, d)


# ---------------------------------------------------------------------------
# The classifying chain map


@dataclass
class ClassifyingMap:
    cocycle: GCocycle
    classifying: ClassifyingComplex
    blowup: BlowupComplex
    chain_map: ChainMap


def classifying_chain_map(u: GCocycle, N: int, D: int) -> ClassifyingMap:
    """Chain map from the blowup into the normalized classifying chains.

    A generator carried by a vertex of a (p+1)-fold overlap maps to the
    p-cell labeled by the transition chain of its component; generators
    with positive face degree collapse to zero.  Local constancy of the
    transitions is exactly what makes this commute with boundaries.
    """
    if len(u.base.cover) > N + 1:
        raise StructureError("cover does not embed into the stages: need len(cover) <= N + 1")
    bg = bg_complex(u.groupoid, N, D)
    target = geometric_chains(bg.space)
    blow = blowup(u.base, D=max(D, u.base.dimension()))
    source = blow.total
    mats = []
    for k in range(min(D, source.D) + 1):
        tgt_idx = target.index(k)
        mat = IntMatrix.zeros(target.rank(k), source.rank(k))
        for j, (idx, face) in enumerate(source.basis[k]):
            if len(face) != 1:
                continue
            seq = idx
            if len(seq) == 1:
                cell = (seq, u.object_at(seq[0], face))
            else:
                arrows = tuple(
                    u.transition(seq[r], seq[r + 1], face)
                    for r in range(len(seq) - 1)
                )
                cell = (seq, arrows)
            mat.rows[tgt_idx[cell]][j] = 1
        mats.append(mat)
    chain_map = ChainMap(source, target, mats)
    return ClassifyingMap(u, bg, blow, chain_map)


def pullback_is_restriction(u: GCocycle, N: int, D: int):
    """Pulling the canonical transitions back along the classifying rule
    must reproduce u on every component of every multiple overlap."""
    if len(u.base.cover) > N + 1:
        raise StructureError("cover does not embed into the stages: need len(cover) <= N + 1")
    g = u.groupoid
    violations = []
    n = len(u.base.cover)
    for p in range(min(n, D + 1)):
        for seq in combinations(range(n), p + 1):
            if not u.base.overlap(seq):
                continue
            for comp in u.base.components_of_overlap(seq):
                face = comp[:1]
                if len(seq) == 1:
                    cell = (seq, u.object_at(seq[0], face))
                else:
                    arrows = tuple(
                        u.transition(seq[r], seq[r + 1], face)
                        for r in range(len(seq) - 1)
                    )
                    cell = (seq, arrows)
                gamma = _gamma_for_cell(g, cell)
                for a in seq:
                    for b in seq:
                        expected = u.transition(a, b, face)
                        if gamma[(a, b)] != expected:
                            violations.append(
                                Violation(
                                    "pullback-restriction",
                                    (seq, comp, a, b),
                                    f"gamma {gamma[(a, b)]} vs {expected}",
                                )
                            )
    return violations


# ---------------------------------------------------------------------------
# JSON


def covered_complex_to_json(cc: CoveredComplex) -> dict:
    return {
        "vertices": [encode_id(v) for v in cc.vertices],
        "faces": sorted([list(f) for f in cc.faces]),
        "cover": [sorted([list(f) for f in part]) for part in cc.cover],
    }


def covered_complex_from_json(doc: dict) -> CoveredComplex:
    try:
        faces = [tuple(decode_id(f)) for f in doc["faces"]]
        cover = [[tuple(decode_id(f)) for f in part] for part in doc["cover"]]
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed covered complex document: {exc}")
    return CoveredComplex(faces, cover)


def cocycle_to_json(u: GCocycle) -> dict:
    doc = covered_complex_to_json(u.base)
    doc["groupoid"] = groupoid_to_json(u.groupoid)
    doc["objects"] = [
        {"a": alpha, "component": list(comp), "object": encode_id(obj)}
        for (alpha, comp), obj in sorted(u.objects.items(), key=lambda kv: sort_key(kv[0]))
    ]
    doc["transitions"] = [
        {
            "a": alpha,
            "b": beta,
            "component": list(comp),
            "morphism": encode_id(m),
        }
        for (alpha, beta, comp), m in sorted(
            u.transitions.items(), key=lambda kv: sort_key(kv[0])
        )
    ]
    return doc


def cocycle_from_json(doc: dict) -> GCocycle:
    base = covered_complex_from_json(doc)
    try:
        groupoid = groupoid_from_json(doc["groupoid"])
        objects = {
            (entry["a"], tuple(decode_id(entry["component"]))): decode_id(entry["object"])
            for entry in doc["objects"]
        }
        transitions = {
            (entry["a"], entry["b"], tuple(decode_id(entry["component"]))): decode_id(
                entry["morphism"]
            )
            for entry in doc["transitions"]
        }
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed cocycle document: {exc}")
    return GCocycle(base, groupoid, objects, transitions)
