"""Finite categories, groupoids, functors and natural transformations.

Composition tables are total on composable pairs.  Morphism identifiers are
canonical ``(source, target, label)`` tuples so that validation reports can
name offending pairs and triples deterministically.  Law checkers return
exhaustive violation lists; structural defects (dangling identifiers,
partial tables) raise :class:`StructureError` instead.
"""

from dataclasses import dataclass

from .errors import StructureError, Violation
from .ids import decode_id, encode_id, id_key, sort_key


class FinCategory:
    """Finite category: objects, morphisms with endpoints, identity and
    composition tables.

    ``compose[(f, g)] = h`` records h = g after f, defined exactly when
    target(f) = source(g).  Instances are immutable after construction.
    """

    def __init__(self, objects, morphisms, identity, compose):
        self.objects = tuple(sorted(objects, key=sort_key))
        if len(set(self.objects)) != len(self.objects):
            raise StructureError("duplicate object identifiers")
        morphs = sorted(morphisms, key=lambda m: sort_key(m[0]))
        self.morphisms = tuple((m, s, t) for m, s, t in morphs)
        self.src = {m: s for m, s, t in self.morphisms}
        self.tgt = {m: t for m, s, t in self.morphisms}
        if len(self.src) != len(self.morphisms):
            raise StructureError("duplicate morphism identifiers")
        self.identity = dict(identity)
        self.table = dict(compose)

    def morphism_ids(self):
        return tuple(m for m, _, _ in self.morphisms)

    def compose(self, g, f):
        """Composite g after f; requires target(f) = source(g)."""
        try:
            return self.table[(f, g)]
        except KeyError:
            raise StructureError(f"pair not in composition table: {(f, g)}")

    def is_identity(self, m):
        return self.identity.get(self.src.get(m)) == m

    def morphisms_from(self, x):
        return tuple(m for m, s, _ in self.morphisms if s == x)

    def __eq__(self, other):
        return (
            isinstance(other, FinCategory)
            and self.objects == other.objects
            and self.morphisms == other.morphisms
            and self.identity == other.identity
            and self.table == other.table
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"{type(self).__name__}({len(self.objects)} objects, "
            f"{len(self.morphisms)} morphisms)"
        )


class UnraveledCategory(FinCategory):
    """Category produced by :func:`unravel`, remembering its base and stage
    cutoff so the forgetful functor can be reconstructed."""

    def __init__(self, objects, morphisms, identity, compose, base, stages):
        super().__init__(objects, morphisms, identity, compose)
        self.base = base
        self.stages = stages


@dataclass(frozen=True)
class FinGroupoid:
    """Finite groupoid: a category plus a total inverse map on morphisms."""

    base: FinCategory
    inverse: dict

    @property
    def objects(self):
        return self.base.objects

    def morphism_ids(self):
        return self.base.morphism_ids()

    def compose(self, g, f):
        return self.base.compose(g, f)


def check_category(c: FinCategory):
    """Exhaustive law audit.  Empty report means c is a category.

    Raises StructureError on dangling identifiers or missing identity
    entries; equational failures are reported, not raised.
    """
    objset = set(c.objects)
    morset = set(c.src)
    for m, s, t in c.morphisms:
        if s not in objset or t not in objset:
            raise StructureError(f"morphism {m} has dangling endpoint")
    if set(c.identity) != objset:
        raise StructureError("identity table is not total on objects")
    for x, m in c.identity.items():
        if m not in morset:
            raise StructureError(f"identity of {x} is not a morphism: {m}")
    for (f, g), h in c.table.items():
        if f not in morset or g not in morset or h not in morset:
            raise StructureError(f"composition entry has dangling id: {(f, g, h)}")

    violations = []

    for x in c.objects:
        m = c.identity[x]
        if c.src[m] != x or c.tgt[m] != x:
            violations.append(
                Violation("identity-endpoints", (x, m), "identity is not an endomorphism")
            )

    mids = c.morphism_ids()
    composable = []
    for f in mids:
        for g in mids:
            if c.tgt[f] == c.src[g]:
                composable.append((f, g))
    comp_set = set(composable)
    for pair in composable:
        if pair not in c.table:
            violations.append(
                Violation("compose-total", pair, "composable pair missing from table")
            )
    for pair, h in sorted(c.table.items(), key=lambda kv: sort_key(kv[0])):
        f, g = pair
        if pair not in comp_set:
            violations.append(
                Violation("compose-domain", pair, "table entry on non-composable pair")
            )
        elif c.src[h] != c.src[f] or c.tgt[h] != c.tgt[g]:
            violations.append(
                Violation("compose-endpoints", (f, g, h), "composite has wrong endpoints")
            )

    def comp(f, g):
        return c.table.get((f, g))

    for f in mids:
        i_src = c.identity.get(c.src[f])
        i_tgt = c.identity.get(c.tgt[f])
        if i_src is not None and comp(i_src, f) is not None and comp(i_src, f) != f:
            violations.append(Violation("identity-law", (f, i_src), "f o id != f"))
        if i_tgt is not None and comp(f, i_tgt) is not None and comp(f, i_tgt) != f:
            violations.append(Violation("identity-law", (f, i_tgt), "id o f != f"))

    for f, g in composable:
        gf = comp(f, g)
        if gf is None:
            continue
        for h in mids:
            if c.src[h] != c.tgt[g]:
                continue
            hg = comp(g, h)
            left = comp(f, hg) if hg is not None else None
            right = comp(gf, h)
            if left is not None and right is not None and left != right:
                violations.append(
                    Violation("associativity", (f, g, h), "h(gf) != (hg)f")
                )
    return violations


def check_groupoid(g: FinGroupoid):
    """Category audit plus endpoint-swap and two-sided inverse laws."""
    violations = check_category(g.base)
    c = g.base
    morset = set(c.src)
    if set(g.inverse) != morset:
        raise StructureError("inverse map is not total on morphisms")
    for m, inv in g.inverse.items():
        if inv not in morset:
            raise StructureError(f"inverse of {m} is not a morphism: {inv}")
    for m in c.morphism_ids():
        inv = g.inverse[m]
        if c.src[inv] != c.tgt[m] or c.tgt[inv] != c.src[m]:
            violations.append(
                Violation("inverse-endpoints", (m, inv), "s(i(f)) != t(f) or t(i(f)) != s(f)")
            )
            continue
        left = c.table.get((m, inv))
        if left != c.identity.get(c.src[m]):
            violations.append(Violation("left-inverse", (m, inv), "i(f) o f != id at source"))
        right = c.table.get((inv, m))
        if right != c.identity.get(c.tgt[m]):
            violations.append(Violation("right-inverse", (m, inv), "f o i(f) != id at target"))
    return violations


def ordinal(n: int) -> FinCategory:
    """The poset {0 <= 1 <= ... <= n} as a category, one arrow per k <= l."""
    if n < 0:
        raise StructureError("ordinal requires n >= 0")
    objects = range(n + 1)
    morphisms = [((k, l, "le"), k, l) for k in objects for l in range(k, n + 1)]
    identity = {k: (k, k, "le") for k in objects}
    compose = {}
    for k in objects:
        for l in range(k, n + 1):
            for m in range(l, n + 1):
                compose[((k, l, "le"), (l, m, "le"))] = (k, m, "le")
    return FinCategory(objects, morphisms, identity, compose)


def truncated_nat(N: int) -> FinCategory:
    """The natural numbers cut off at stage N, as the poset category
    {0 <= 1 <= ... <= N}."""
    return ordinal(N)


def unravel(c: FinCategory, N: int) -> UnraveledCategory:
    """Unraveled category over stages {0..N}.

    Objects are pairs (x, i); a morphism (f, i <= j) survives exactly when
    i < j or f is an identity, and composition is inherited stagewise.
    """
    if N < 0:
        raise StructureError("unravel requires N >= 0")
    stages = range(N + 1)
    objects = [(x, i) for x in c.objects for i in stages]

    def mid(f, i, j):
        return ((c.src[f], i), (c.tgt[f], j), f)

    morphisms = []
    for x in c.objects:
        for i in stages:
            morphisms.append((mid(c.identity[x], i, i), (x, i), (x, i)))
    for f in c.morphism_ids():
        for i in stages:
            for j in range(i + 1, N + 1):
                morphisms.append((mid(f, i, j), (c.src[f], i), (c.tgt[f], j)))

    identity = {(x, i): mid(c.identity[x], i, i) for x in c.objects for i in stages}
    compose = {}
    for m1, s1, t1 in morphisms:
        for m2, s2, t2 in morphisms:
            if t1 != s2:
                continue
            f1, f2 = m1[2], m2[2]
            compose[(m1, m2)] = mid(c.table[(f1, f2)], s1[1], t2[1])
    return UnraveledCategory(objects, morphisms, identity, compose, base=c, stages=N)


@dataclass(frozen=True, eq=True)
class Functor:
    source: FinCategory
    target: FinCategory
    omap: dict
    mmap: dict

    def obj(self, x):
        return self.omap[x]

    def mor(self, m):
        return self.mmap[m]


def check_functor(F: Functor):
    src, tgt = F.source, F.target
    if set(F.omap) != set(src.objects):
        raise StructureError("object map is not total")
    if set(F.mmap) != set(src.src):
        raise StructureError("morphism map is not total")
    for x, y in F.omap.items():
        if y not in set(tgt.objects):
            raise StructureError(f"object image {y} not in target")
    violations = []
    for m in src.morphism_ids():
        fm = F.mmap[m]
        if fm not in tgt.src:
            raise StructureError(f"morphism image {fm} not in target")
        if tgt.src[fm] != F.omap[src.src[m]] or tgt.tgt[fm] != F.omap[src.tgt[m]]:
            violations.append(Violation("functor-endpoints", (m, fm)))
    for x in src.objects:
        if F.mmap[src.identity[x]] != tgt.identity[F.omap[x]]:
            violations.append(Violation("functor-identity", (x,)))
    for (f, g), h in src.table.items():
        expected = tgt.table.get((F.mmap[f], F.mmap[g]))
        if expected != F.mmap[h]:
            violations.append(Violation("functor-composition", (f, g)))
    return violations


def identity_functor(c: FinCategory) -> Functor:
    return Functor(c, c, {x: x for x in c.objects}, {m: m for m in c.morphism_ids()})


def compose_functors(G: Functor, F: Functor) -> Functor:
    """G after F."""
    if F.target != G.source:
        raise StructureError("functors are not composable")
    return Functor(
        F.source,
        G.target,
        {x: G.omap[F.omap[x]] for x in F.omap},
        {m: G.mmap[F.mmap[m]] for m in F.mmap},
    )


@dataclass(frozen=True)
class NatTransformation:
    """Natural transformation between parallel functors, one component
    morphism of the target category per source object."""

    source: Functor
    target: Functor
    component: dict

    def at(self, x):
        return self.component[x]


def check_natural(t: NatTransformation):
    F, G = t.source, t.target
    if F.source != G.source or F.target != G.target:
        raise StructureError("functors are not parallel")
    cat, tgt = F.source, F.target
    if set(t.component) != set(cat.objects):
        raise StructureError("component map is not total")
    violations = []
    for x in cat.objects:
        m = t.component[x]
        if m not in tgt.src:
            raise StructureError(f"component at {x} is not a target morphism")
        if tgt.src[m] != F.omap[x] or tgt.tgt[m] != G.omap[x]:
            violations.append(Violation("component-endpoints", (x, m)))
    for m in cat.morphism_ids():
        x, y = cat.src[m], cat.tgt[m]
        left = tgt.table.get((F.mmap[m], t.component[y]))
        right = tgt.table.get((t.component[x], G.mmap[m]))
        if left is None or right is None or left != right:
            violations.append(Violation("naturality", (m,)))
    return violations


def forgetful(cN: FinCategory) -> Functor:
    """The stage-forgetting functor of an unraveled category,
    (x, k) -> x on objects and (f, i <= j) -> f on morphisms."""
    if not isinstance(cN, UnraveledCategory):
        raise StructureError("input is not of unraveled shape")
    omap = {o: o[0] for o in cN.objects}
    mmap = {m: m[2] for m in cN.morphism_ids()}
    return Functor(cN, cN.base, omap, mmap)


def full_subcategory(c: FinCategory, keep) -> FinCategory:
    keep = set(keep)
    morphisms = [(m, s, t) for m, s, t in c.morphisms if s in keep and t in keep]
    mids = {m for m, _, _ in morphisms}
    identity = {x: m for x, m in c.identity.items() if x in keep}
    compose = {
        (f, g): h for (f, g), h in c.table.items() if f in mids and g in mids
    }
    return FinCategory(keep, morphisms, identity, compose)


@dataclass
class OrdinalEquivalenceBundle:
    """The retraction data comparing an unraveled ordinal with its base.

    pi0 forgets the stage, pi1 retracts onto the full subcategory of objects
    (k, l) with k <= l, pi2 projects that subcategory onto the ordinal, and
    phi1, phi2 are the connecting natural transformations.
    """

    pi0: Functor
    pi1: Functor
    pi2: Functor
    iota1: Functor
    iota2: Functor
    phi1: NatTransformation
    phi2: NatTransformation
    report: list


def ordinal_unravel_equivalences(n: int, N: int) -> OrdinalEquivalenceBundle:
    if N < n:
        raise StructureError("need N >= n so every (k, k) exists")
    base = ordinal(n)
    cN = unravel(base, N)
    prime_objects = [(k, l) for (k, l) in cN.objects if k <= l]
    prime = full_subcategory(cN, prime_objects)

    def arrow(cat, src, dst):
        # unique morphism src -> dst in cN or prime (both are preorders)
        if src == dst:
            return cat.identity[src]
        return (src, dst, (src[0], dst[0], "le"))

    pi0 = forgetful(cN)

    def retract(o):
        k, l = o
        return (k, max(k, l))

    pi1_m = {}
    for m in cN.morphism_ids():
        s, t = cN.src[m], cN.tgt[m]
        pi1_m[m] = arrow(prime, retract(s), retract(t))
    pi1 = Functor(cN, prime, {o: retract(o) for o in cN.objects}, pi1_m)

    iota1 = Functor(
        prime, cN, {o: o for o in prime.objects}, {m: m for m in prime.morphism_ids()}
    )

    pi2 = Functor(
        prime,
        base,
        {o: o[0] for o in prime.objects},
        {m: m[2] for m in prime.morphism_ids()},
    )
    iota2 = Functor(
        base,
        prime,
        {k: (k, k) for k in base.objects},
        {m: arrow(prime, (m[0], m[0]), (m[1], m[1])) for m in base.morphism_ids()},
    )

    phi1 = NatTransformation(
        identity_functor(cN),
        compose_functors(iota1, pi1),
        {o: arrow(cN, o, retract(o)) for o in cN.objects},
    )
    phi2 = NatTransformation(
        compose_functors(iota2, pi2),
        identity_functor(prime),
        {o: arrow(prime, (o[0], o[0]), o) for o in prime.objects},
    )

    report = []
    for name, fun in (
        ("pi0", pi0),
        ("pi1", pi1),
        ("pi2", pi2),
        ("iota1", iota1),
        ("iota2", iota2),
    ):
        for v in check_functor(fun):
            report.append(Violation(f"{name}-{v.law}", v.witness, v.detail))
    if compose_functors(pi1, iota1) != identity_functor(prime):
        report.append(Violation("pi1-iota1-identity", ()))
    if compose_functors(pi2, iota2) != identity_functor(base):
        report.append(Violation("pi2-iota2-identity", ()))
    for name, nat in (("phi1", phi1), ("phi2", phi2)):
        for v in check_natural(nat):
            report.append(Violation(f"{name}-{v.law}", v.witness, v.detail))
    if compose_functors(pi2, pi1) != pi0:
        report.append(Violation("pi0-factorization", ()))
    return OrdinalEquivalenceBundle(pi0, pi1, pi2, iota1, iota2, phi1, phi2, report)


def category_to_json(c: FinCategory) -> dict:
    doc = {
        "objects": [encode_id(x) for x in c.objects],
        "morphisms": [
            {"id": encode_id(m), "src": encode_id(s), "tgt": encode_id(t)}
            for m, s, t in c.morphisms
        ],
        "identity": {id_key(x): encode_id(m) for x, m in sorted(
            c.identity.items(), key=lambda kv: sort_key(kv[0])
        )},
        "compose": [
            [encode_id(f), encode_id(g), encode_id(h)]
            for (f, g), h in sorted(c.table.items(), key=lambda kv: sort_key(kv[0]))
        ],
    }
    return doc


def category_from_json(doc: dict) -> FinCategory:
    try:
        objects = [decode_id(x) for x in doc["objects"]]
        morphisms = [
            (decode_id(m["id"]), decode_id(m["src"]), decode_id(m["tgt"]))
            for m in doc["morphisms"]
        ]
        identity = {}
        obj_by_key = {id_key(x): x for x in objects}
        for key, m in doc["identity"].items():
            identity[obj_by_key[key]] = decode_id(m)
        compose = {
            (decode_id(f), decode_id(g)): decode_id(h) for f, g, h in doc["compose"]
        }
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed category document: {exc}")
    return FinCategory(objects, morphisms, identity, compose)


def groupoid_to_json(g: FinGroupoid) -> dict:
    doc = category_to_json(g.base)
    doc["inverse"] = {
        id_key(m): encode_id(i)
        for m, i in sorted(g.inverse.items(), key=lambda kv: sort_key(kv[0]))
    }
    return doc


def groupoid_from_json(doc: dict) -> FinGroupoid:
    base = category_from_json(doc)
    if "inverse" not in doc:
        raise StructureError("groupoid document lacks an inverse table")
    mor_by_key = {id_key(m): m for m in base.morphism_ids()}
    try:
        inverse = {mor_by_key[k]: decode_id(v) for k, v in doc["inverse"].items()}
    except KeyError as exc:
        raise StructureError(f"inverse table names unknown morphism: {exc}")
    return FinGroupoid(base, inverse)
