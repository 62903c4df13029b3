"""Finite groupoids as explicit tables, with both quotient constructions.

Arrows and objects are integer ids.  The partial multiplication is a dict
keyed by composable pairs; asking for a non-composable product raises
instead of returning a sentinel, to make test bugs loud.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from .errors import FolioidError, NotComposable, StructureError, ThetaIllDefined

Arrow = int
Obj = int


@dataclass(frozen=True)
class FiniteGroupoid:
    objects: Tuple[Obj, ...]
    arrows: Tuple[Arrow, ...]
    src: Mapping[Arrow, Obj]
    tgt: Mapping[Arrow, Obj]
    unit: Mapping[Obj, Arrow]
    inv: Mapping[Arrow, Arrow]
    mul: Mapping[Tuple[Arrow, Arrow], Arrow]

    def is_composable(self, g: Arrow, h: Arrow) -> bool:
        return self.src[g] == self.tgt[h]

    def compose(self, g: Arrow, h: Arrow) -> Arrow:
        if not self.is_composable(g, h):
            raise NotComposable(f"src({g})={self.src[g]} != tgt({h})={self.tgt[h]}")
        try:
            return self.mul[(g, h)]
        except KeyError:
            raise StructureError(f"multiplication table missing composable pair ({g}, {h})")

    def composable_pairs(self) -> Iterable[Tuple[Arrow, Arrow]]:
        for g in self.arrows:
            for h in self.arrows:
                if self.is_composable(g, h):
                    yield (g, h)

    def unit_arrows(self) -> FrozenSet[Arrow]:
        return frozenset(self.unit.values())

    def loops(self) -> Iterable[Arrow]:
        """Arrows with equal source and target (the inner subgroupoid)."""
        return (g for g in self.arrows if self.src[g] == self.tgt[g])


@dataclass(frozen=True)
class FiniteMorphism:
    source: FiniteGroupoid
    target: FiniteGroupoid
    arrow_map: Mapping[Arrow, Arrow]
    object_map: Mapping[Obj, Obj]


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness)}


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, axiom: str, witness: tuple):
        self.violations.append(Violation(axiom, tuple(witness)))

    def to_json(self) -> dict:
        return {"valid": self.valid,
                "violations": [v.to_json() for v in self.violations]}


def check_structure(g: FiniteGroupoid) -> None:
    """Raise StructureError for malformed tables (distinct from axiom failures)."""
    objects = set(g.objects)
    arrows = set(g.arrows)
    if len(objects) != len(g.objects) or len(arrows) != len(g.arrows):
        raise StructureError("duplicate ids in objects or arrows")
    for a in g.arrows:
        if a not in g.src or a not in g.tgt:
            raise StructureError(f"src/tgt not total: missing arrow {a}")
        if g.src[a] not in objects or g.tgt[a] not in objects:
            raise StructureError(f"src/tgt of arrow {a} out of range")
        if a not in g.inv:
            raise StructureError(f"inv not total: missing arrow {a}")
        if g.inv[a] not in arrows:
            raise StructureError(f"inv of arrow {a} out of range")
    for p in g.objects:
        if p not in g.unit:
            raise StructureError(f"unit not total: missing object {p}")
        if g.unit[p] not in arrows:
            raise StructureError(f"unit of object {p} out of range")
    for (a, b), c in g.mul.items():
        if a not in arrows or b not in arrows or c not in arrows:
            raise StructureError(f"mul entry ({a},{b})->{c} out of range")


def validate_groupoid(g: FiniteGroupoid) -> ValidationReport:
    """Exhaustively check the five groupoid axioms plus uniqueness corollaries.

    The report lists every violated axiom with a witness; malformed tables
    raise StructureError instead of being reported.
    """
    check_structure(g)
    report = ValidationReport()

    composable = set(g.composable_pairs())
    for pair in g.mul:
        if pair not in composable:
            report.add("mul_domain", ("defined_on_non_composable",) + pair)
    for pair in composable:
        if pair not in g.mul:
            report.add("mul_domain", ("missing_composable",) + pair)

    def mul_or_none(a, b):
        return g.mul.get((a, b))

    # (i) source/target of products
    for (a, b) in composable:
        c = mul_or_none(a, b)
        if c is None:
            continue
        if g.src[c] != g.src[b] or g.tgt[c] != g.tgt[a]:
            report.add("i_source_target", (a, b, c))

    # (ii) associativity on all composable triples
    for (a, b) in composable:
        ab = mul_or_none(a, b)
        if ab is None:
            continue
        for c in g.arrows:
            if g.src[b] != g.tgt[c]:
                continue
            bc = mul_or_none(b, c)
            left = mul_or_none(ab, c) if g.src[ab] == g.tgt[c] else None
            right = mul_or_none(a, bc) if bc is not None and g.src[a] == g.tgt[bc] else None
            if left is None or right is None or left != right:
                report.add("ii_associativity", (a, b, c))

    # (iii) units sit over their objects
    for p in g.objects:
        e = g.unit[p]
        if g.src[e] != p or g.tgt[e] != p:
            report.add("iii_unit_base", (p, e))

    # (iv) units are neutral
    for a in g.arrows:
        e_s = g.unit[g.src[a]]
        e_t = g.unit[g.tgt[a]]
        if mul_or_none(a, e_s) != a:
            report.add("iv_unit_neutral", (a, e_s, "right"))
        if mul_or_none(e_t, a) != a:
            report.add("iv_unit_neutral", (a, e_t, "left"))

    # (v) declared inverses are two-sided
    for a in g.arrows:
        b = g.inv[a]
        if g.src[b] != g.tgt[a] or g.tgt[b] != g.src[a]:
            report.add("v_inverse", (a, b, "base"))
            continue
        if mul_or_none(a, b) != g.unit[g.tgt[a]] or mul_or_none(b, a) != g.unit[g.src[a]]:
            report.add("v_inverse", (a, b, "product"))

    # cancellation and inverse-uniqueness consequences, re-derived by brute force
    for a in g.arrows:
        for h in g.arrows:
            if g.src[h] == g.tgt[a]:
                ha = mul_or_none(h, a)
                if ha == a and h != g.unit[g.tgt[a]]:
                    report.add("unicity_left_unit", (h, a))
                if ha == g.unit[g.src[a]] and h != g.inv[a]:
                    report.add("unicity_left_inverse", (h, a))
            if g.tgt[h] == g.src[a]:
                ah = mul_or_none(a, h)
                if ah == a and h != g.unit[g.src[a]]:
                    report.add("unicity_right_unit", (a, h))
                if ah == g.unit[g.tgt[a]] and h != g.inv[a]:
                    report.add("unicity_right_inverse", (a, h))

    return report


def _check_wide_subgroupoid(g: FiniteGroupoid, n: FrozenSet[Arrow]) -> None:
    """Raise ValueError naming the failing closure if N is not wide in G."""
    arrows = set(g.arrows)
    if not n <= arrows:
        raise ValueError("subgroupoid contains unknown arrow ids")
    missing_units = g.unit_arrows() - n
    if missing_units:
        raise ValueError(f"not wide: missing units {sorted(missing_units)}")
    for a in n:
        if g.inv[a] not in n:
            raise ValueError(f"not closed under inversion at arrow {a}")
    for a in n:
        for b in n:
            if g.is_composable(a, b) and g.compose(a, b) not in n:
                raise ValueError(f"not closed under multiplication at ({a}, {b})")


def is_normal_subgroupoid(g: FiniteGroupoid, n: Iterable[Arrow]):
    """Conjugation-stability of a wide subgroupoid; returns (bool, witness).

    Checks g n g^-1 in N for every loop n in N and every arrow g starting
    from the loop's base point.
    """
    n = frozenset(n)
    _check_wide_subgroupoid(g, n)
    for loop in n:
        if g.src[loop] != g.tgt[loop]:
            continue
        p = g.src[loop]
        for a in g.arrows:
            if g.src[a] != p:
                continue
            conj = g.compose(g.compose(a, loop), g.inv[a])
            if conj not in n:
                return False, (a, loop, conj)
    return True, None


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self) -> Dict:
        out: Dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return {root: sorted(members) for root, members in out.items()}


def _relabel(classes: Dict) -> Tuple[Dict, Dict]:
    """Stable relabeling: class roots sorted, mapped to 0..k-1."""
    roots = sorted(classes)
    index = {root: i for i, root in enumerate(roots)}
    member_to_class = {}
    for root, members in classes.items():
        for m in members:
            member_to_class[m] = index[root]
    return index, member_to_class


def quotient_by_normal_subgroupoid(g: FiniteGroupoid, n: Iterable[Arrow]) -> FiniteGroupoid:
    """Quotient of G by a normal subgroupoid N.

    Objects are identified when an N-arrow joins them; arrows when they
    differ by N-factors on both sides.  Well-definedness of the induced
    structure maps is re-verified by exhaustive representative swaps.
    """
    n = frozenset(n)
    ok, witness = is_normal_subgroupoid(g, n)
    if not ok:
        raise ValueError(f"not a normal subgroupoid, witness {witness}")

    uf_obj = _UnionFind(g.objects)
    for a in n:
        uf_obj.union(g.tgt[a], g.src[a])

    uf_arr = _UnionFind(g.arrows)
    for h in g.arrows:
        for n1 in n:
            if g.src[n1] != g.tgt[h]:
                continue
            n1h = g.compose(n1, h)
            for n2 in n:
                if g.tgt[n2] != g.src[h]:
                    continue
                uf_arr.union(h, g.compose(n1h, n2))

    _, obj_class = _relabel(uf_obj.classes())
    _, arr_class = _relabel(uf_arr.classes())

    # defensive well-definedness across representatives
    for a in g.arrows:
        for b in g.arrows:
            if arr_class[a] != arr_class[b]:
                continue
            if obj_class[g.src[a]] != obj_class[g.src[b]] or obj_class[g.tgt[a]] != obj_class[g.tgt[b]]:
                raise FolioidError(f"induced src/tgt ill defined on class of {a}")
    for p in g.objects:
        for q in g.objects:
            if obj_class[p] == obj_class[q] and arr_class[g.unit[p]] != arr_class[g.unit[q]]:
                raise FolioidError(f"induced unit ill defined on class of {p}")

    return _build_quotient(g, obj_class, arr_class)


def _build_quotient(g: FiniteGroupoid, obj_class: Mapping[Obj, int],
                    arr_class: Mapping[Arrow, int]) -> FiniteGroupoid:
    """Assemble the quotient groupoid given class labels; verify consistency."""
    objects = tuple(sorted(set(obj_class.values())))
    arrows = tuple(sorted(set(arr_class.values())))
    src: Dict[int, int] = {}
    tgt: Dict[int, int] = {}
    unit: Dict[int, int] = {}
    inv: Dict[int, int] = {}
    mul: Dict[Tuple[int, int], int] = {}

    for a in g.arrows:
        ca = arr_class[a]
        src.setdefault(ca, obj_class[g.src[a]])
        tgt.setdefault(ca, obj_class[g.tgt[a]])
        ci = arr_class[g.inv[a]]
        if inv.setdefault(ca, ci) != ci:
            raise FolioidError(f"induced inverse ill defined on class {ca}")
    for p in g.objects:
        cu = arr_class[g.unit[p]]
        if unit.setdefault(obj_class[p], cu) != cu:
            raise FolioidError(f"induced unit ill defined on class {obj_class[p]}")

    for (a, b), c in g.mul.items():
        key = (arr_class[a], arr_class[b])
        if mul.setdefault(key, arr_class[c]) != arr_class[c]:
            raise FolioidError(f"induced multiplication ill defined on {key}")

    quotient = FiniteGroupoid(objects, arrows, src, tgt, unit, inv, mul)
    # composable class pairs not realized directly in g.mul still need an
    # entry: scan every composable representative pair and demand agreement
    for cg in arrows:
        for ch in arrows:
            if src[cg] != tgt[ch] or (cg, ch) in mul:
                continue
            values = {
                arr_class[g.compose(a, b)]
                for a in g.arrows if arr_class[a] == cg
                for b in g.arrows if arr_class[b] == ch and g.src[a] == g.tgt[b]
            }
            if not values:
                raise FolioidError(f"no representative product for class pair ({cg},{ch})")
            if len(values) > 1:
                raise FolioidError(f"induced multiplication ill defined on ({cg},{ch})")
            mul[(cg, ch)] = values.pop()

    report = validate_groupoid(quotient)
    if not report.valid:
        raise FolioidError(f"quotient is not a groupoid: {report.violations[:3]}")
    return quotient


def validate_morphism(f: FiniteMorphism) -> ValidationReport:
    report = ValidationReport()
    g, g2 = f.source, f.target
    for a in g.arrows:
        fa = f.arrow_map[a]
        if g2.src[fa] != f.object_map[g.src[a]]:
            report.add("morphism_source", (a,))
        if g2.tgt[fa] != f.object_map[g.tgt[a]]:
            report.add("morphism_target", (a,))
    for (a, b), c in g.mul.items():
        if g2.compose(f.arrow_map[a], f.arrow_map[b]) != f.arrow_map[c]:
            report.add("morphism_multiplicative", (a, b))
    return report


def kernel_of_morphism(f: FiniteMorphism) -> FrozenSet[Arrow]:
    """Arrows mapped onto unit arrows of the target.

    The result is asserted to be a normal subgroupoid of the source.
    """
    report = validate_morphism(f)
    if not report.valid:
        raise ValueError(f"not a morphism: {report.violations[:3]}")
    units2 = f.target.unit_arrows()
    kernel = frozenset(a for a in f.source.arrows if f.arrow_map[a] in units2)
    ok, witness = is_normal_subgroupoid(f.source, kernel)
    if not ok:
        raise FolioidError(f"kernel is not normal, witness {witness}")
    return kernel


# ---------------------------------------------------------------------------
# normal subgroupoid systems

def coset(g: FiniteGroupoid, n: FrozenSet[Arrow], a: Arrow) -> FrozenSet[Arrow]:
    """gN = {g * k : k in N composable with g}."""
    out = {a}
    for k in n:
        if g.src[a] == g.tgt[k]:
            out.add(g.compose(a, k))
    return frozenset(out)


def coset_rep(g: FiniteGroupoid, n: FrozenSet[Arrow], a: Arrow) -> Arrow:
    return min(coset(g, n, a))


@dataclass(frozen=True)
class NormalSubgroupoidSystem:
    """A wide subgroupoid N, an object relation R, and a coset action theta.

    ``theta`` is stored on canonical coset representatives (minimal arrow
    ids); use :func:`make_nss` to build one from an arbitrary table.
    """

    n_arrows: FrozenSet[Arrow]
    relation: FrozenSet[Tuple[Obj, Obj]]
    theta: Mapping[Tuple[Tuple[Obj, Obj], Arrow], Arrow]


def make_nss(g: FiniteGroupoid, n: Iterable[Arrow],
             relation: Iterable[Tuple[Obj, Obj]],
             theta_entries: Mapping[Tuple[Tuple[Obj, Obj], Arrow], Arrow]) -> NormalSubgroupoidSystem:
    """Canonicalize a theta table onto minimal coset representatives.

    Entries keyed by different representatives of one coset must agree;
    disagreement raises ThetaIllDefined.
    """
    n = frozenset(n)
    _check_wide_subgroupoid(g, n)
    canonical: Dict[Tuple[Tuple[Obj, Obj], Arrow], Arrow] = {}
    for ((p, q), a), b in theta_entries.items():
        key = ((p, q), coset_rep(g, n, a))
        value = coset_rep(g, n, b)
        if canonical.setdefault(key, value) != value:
            raise ThetaIllDefined(
                f"theta(({p},{q}), coset of {a}) has conflicting values")
    return NormalSubgroupoidSystem(n, frozenset(tuple(pair) for pair in relation), canonical)


def validate_nss(g: FiniteGroupoid, nss: NormalSubgroupoidSystem) -> ValidationReport:
    """Exhaustive check of the three compatibility conditions and the action axioms."""
    report = ValidationReport()
    n = nss.n_arrows
    _check_wide_subgroupoid(g, n)

    objects = set(g.objects)
    rel = nss.relation
    for (p, q) in rel:
        if p not in objects or q not in objects:
            raise StructureError(f"relation pair ({p},{q}) out of range")
    for p in objects:
        if (p, p) not in rel:
            report.add("r_equivalence", ("reflexive", p))
    for (p, q) in rel:
        if (q, p) not in rel:
            report.add("r_equivalence", ("symmetric", p, q))
    for (p, q) in rel:
        for (q2, r) in rel:
            if q == q2 and (p, r) not in rel:
                report.add("r_equivalence", ("transitive", p, q, r))

    reps = sorted({coset_rep(g, n, a) for a in g.arrows})
    for key in nss.theta:
        (p, q), a = key
        if (p, q) not in rel:
            report.add("theta_domain", ("pair_not_in_relation", p, q))
        if a not in reps or g.tgt[a] != q:
            raise ThetaIllDefined(f"theta key {key} is not a canonical coset over {q}")

    def theta(pair, a):
        return nss.theta.get((pair, coset_rep(g, n, a)))

    # totality on the declared domain
    for (p, q) in rel:
        for a in reps:
            if g.tgt[a] == q and ((p, q), a) not in nss.theta:
                report.add("theta_total", (p, q, a))

    # action axioms: unit, moment map, compatibility
    for a in reps:
        q = g.tgt[a]
        if (q, q) in rel and theta((q, q), a) != a:
            report.add("theta_unit", (q, a))
    for ((p, q), a), b in nss.theta.items():
        if g.tgt[b] != p:
            report.add("theta_moment", (p, q, a, b))
    for (p, q) in rel:
        for (q2, r) in rel:
            if q2 != q:
                continue
            for a in reps:
                if g.tgt[a] != r:
                    continue
                inner = theta((q, r), a)
                if inner is None:
                    continue
                two_step = theta((p, q), inner)
                one_step = theta((p, r), a)
                if two_step != one_step:
                    report.add("theta_compat", (p, q, r, a))

    # condition 1: sources of theta-related cosets are R-related
    for ((p, q), a), b in nss.theta.items():
        for ga in coset(g, n, a):
            for hb in coset(g, n, b):
                if (g.src[hb], g.src[ga]) not in rel:
                    report.add("nss_condition_1", (p, q, ga, hb))

    # condition 2: units transport to units
    for (p, q) in rel:
        value = theta((p, q), g.unit[q])
        if value != coset_rep(g, n, g.unit[p]):
            report.add("nss_condition_2", (p, q, value))

    # condition 3: compatibility with multiplication
    for (p, q) in rel:
        for a in g.arrows:
            if g.tgt[a] != q:
                continue
            a_img = theta((p, q), a)
            if a_img is None:
                continue
            for b in g.arrows:
                if g.tgt[b] != g.src[a]:
                    continue
                for a2 in coset(g, n, a_img):
                    pair2 = (g.src[a2], g.src[a])
                    if pair2 not in rel:
                        continue
                    b_img = theta(pair2, b)
                    if b_img is None:
                        continue
                    b2 = None
                    for cand in coset(g, n, b_img):
                        if g.tgt[cand] == g.src[a2]:
                            b2 = cand
                            break
                    if b2 is None:
                        report.add("nss_condition_3", ("no_composable_rep", p, q, a, b))
                        continue
                    lhs = theta((p, q), g.compose(a, b))
                    rhs = coset_rep(g, n, g.compose(a2, b2))
                    if lhs != rhs:
                        report.add("nss_condition_3", (p, q, a, b, lhs, rhs))
    return report


def quotient_by_nss(g: FiniteGroupoid, nss: NormalSubgroupoidSystem
                    ) -> Tuple[FiniteGroupoid, FiniteMorphism]:
    """Quotient arrows by theta-orbits of cosets and objects by R.

    Returns the quotient groupoid together with the projection morphism,
    which is verified to satisfy the morphism equations exactly.
    """
    report = validate_nss(g, nss)
    if not report.valid:
        raise ValueError(f"invalid normal subgroupoid system: {report.violations[:3]}")
    n = nss.n_arrows

    uf_obj = _UnionFind(g.objects)
    for (p, q) in nss.relation:
        uf_obj.union(p, q)
    _, obj_class = _relabel(uf_obj.classes())

    uf_arr = _UnionFind(g.arrows)
    for a in g.arrows:
        for b in coset(g, n, a):
            uf_arr.union(a, b)
    for ((p, q), a), b in nss.theta.items():
        uf_arr.union(a, b)
    _, arr_class = _relabel(uf_arr.classes())

    quotient = _build_quotient(g, obj_class, arr_class)
    projection = FiniteMorphism(g, quotient, dict(arr_class), dict(obj_class))
    morphism_report = validate_morphism(projection)
    if not morphism_report.valid:
        raise FolioidError(f"projection is not a morphism: {morphism_report.violations[:3]}")
    return quotient, projection


# ---------------------------------------------------------------------------
# isomorphism search (exact backtracking; intended for <= 64 arrows)

def _object_signature(g: FiniteGroupoid, p: Obj):
    outs = sorted(g.tgt[a] for a in g.arrows if g.src[a] == p)
    ins = sorted(g.src[a] for a in g.arrows if g.tgt[a] == p)
    return (len(outs), len(ins),
            sum(1 for a in g.arrows if g.src[a] == p and g.tgt[a] == p))


def find_isomorphism(g1: FiniteGroupoid, g2: FiniteGroupoid
                     ) -> Optional[Tuple[Dict[Obj, Obj], Dict[Arrow, Arrow]]]:
    """Backtracking search for a groupoid isomorphism; None if there is none."""
    if len(g1.objects) != len(g2.objects) or len(g1.arrows) != len(g2.arrows):
        return None
    sig1 = {p: _object_signature(g1, p) for p in g1.objects}
    sig2 = {p: _object_signature(g2, p) for p in g2.objects}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return None

    objs1 = sorted(g1.objects)

    def extend_objects(i: int, obj_map: Dict[Obj, Obj], used: set):
        if i == len(objs1):
            arrow_map = _match_arrows(g1, g2, obj_map)
            if arrow_map is not None:
                return dict(obj_map), arrow_map
            return None
        p = objs1[i]
        for q in sorted(g2.objects):
            if q in used or sig1[p] != sig2[q]:
                continue
            obj_map[p] = q
            used.add(q)
            found = extend_objects(i + 1, obj_map, used)
            if found is not None:
                return found
            del obj_map[p]
            used.discard(q)
        return None

    return extend_objects(0, {}, set())


def _match_arrows(g1: FiniteGroupoid, g2: FiniteGroupoid,
                  obj_map: Mapping[Obj, Obj]) -> Optional[Dict[Arrow, Arrow]]:
    arrows1 = sorted(g1.arrows)
    candidates = {}
    for a in arrows1:
        cands = [b for b in g2.arrows
                 if g2.src[b] == obj_map[g1.src[a]] and g2.tgt[b] == obj_map[g1.tgt[a]]]
        if not cands:
            return None
        candidates[a] = cands
    def consistent(amap: Dict[Arrow, Arrow], a: Arrow, b: Arrow) -> bool:
        ia = g1.inv[a]
        if ia in amap and amap[ia] != g2.inv[b]:
            return False
        for c, bc in amap.items():
            if g1.is_composable(a, c):
                prod = g1.compose(a, c)
                if prod in amap and g2.compose(b, bc) != amap[prod]:
                    return False
            if g1.is_composable(c, a):
                prod = g1.compose(c, a)
                if prod in amap and g2.compose(bc, b) != amap[prod]:
                    return False
        return True

    # units are forced by the object map; seed and sanity-check them first
    amap0: Dict[Arrow, Arrow] = {}
    used0: set = set()
    for p in g1.objects:
        a, b = g1.unit[p], g2.unit[obj_map[p]]
        if b not in candidates[a] or not consistent(amap0, a, b):
            return None
        amap0[a] = b
        used0.add(b)

    order = sorted((a for a in arrows1 if a not in amap0),
                   key=lambda a: len(candidates[a]))

    def backtrack(i: int, amap: Dict[Arrow, Arrow], used: set):
        if i == len(order):
            for (a, b), c in g1.mul.items():
                if g2.compose(amap[a], amap[b]) != amap[c]:
                    return None
            return dict(amap)
        a = order[i]
        for b in candidates[a]:
            if b in used or not consistent(amap, a, b):
                continue
            amap[a] = b
            used.add(b)
            found = backtrack(i + 1, amap, used)
            if found is not None:
                return found
            del amap[a]
            used.discard(b)
        return None

    return backtrack(0, amap0, used0)


# ---------------------------------------------------------------------------
# builtin finite instances

def pair_groupoid(n_objects: int) -> FiniteGroupoid:
    """Pair groupoid on {0..n-1}: arrow (a, b) from b to a, encoded a*n + b."""
    n = n_objects
    objects = tuple(range(n))
    arrows = tuple(range(n * n))
    src = {a * n + b: b for a in range(n) for b in range(n)}
    tgt = {a * n + b: a for a in range(n) for b in range(n)}
    unit = {p: p * n + p for p in range(n)}
    inv = {a * n + b: b * n + a for a in range(n) for b in range(n)}
    mul = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                mul[(a * n + b, b * n + c)] = a * n + c
    return FiniteGroupoid(objects, arrows, src, tgt, unit, inv, mul)


def cyclic_group_groupoid(order: int) -> FiniteGroupoid:
    """Z/n as a one-object groupoid."""
    objects = (0,)
    arrows = tuple(range(order))
    src = {a: 0 for a in arrows}
    tgt = {a: 0 for a in arrows}
    unit = {0: 0}
    inv = {a: (-a) % order for a in arrows}
    mul = {(a, b): (a + b) % order for a in arrows for b in arrows}
    return FiniteGroupoid(objects, arrows, src, tgt, unit, inv, mul)


def group_bundle_groupoid(order: int, n_objects: int) -> FiniteGroupoid:
    """Disjoint union of n copies of Z/order, one group per object."""
    objects = tuple(range(n_objects))
    arrows = tuple(range(order * n_objects))

    def enc(x, m):
        return m * order + x

    src = {enc(x, m): m for x in range(order) for m in range(n_objects)}
    tgt = dict(src)
    unit = {m: enc(0, m) for m in range(n_objects)}
    inv = {enc(x, m): enc((-x) % order, m) for x in range(order) for m in range(n_objects)}
    mul = {}
    for m in range(n_objects):
        for x in range(order):
            for y in range(order):
                mul[(enc(x, m), enc(y, m))] = enc((x + y) % order, m)
    return FiniteGroupoid(objects, arrows, src, tgt, unit, inv, mul)


def pair_block_subgroupoid(n_objects: int, blocks: Iterable[Iterable[Obj]]) -> FrozenSet[Arrow]:
    """Arrows of the pair groupoid staying inside partition blocks."""
    n = n_objects
    out = set()
    for block in blocks:
        block = list(block)
        for a in block:
            for b in block:
                out.add(a * n + b)
    return frozenset(out)


def pair_block_nss(n_objects: int, blocks: Iterable[Iterable[Obj]]) -> NormalSubgroupoidSystem:
    """The system induced by a partition on the pair groupoid.

    N is the block subgroupoid, R the block relation, and theta moves the
    target of a coset {m} x B to any R-related object.
    """
    g = pair_groupoid(n_objects)
    blocks = [list(b) for b in blocks]
    n = pair_block_subgroupoid(n_objects, blocks)
    block_of = {}
    for block in blocks:
        for p in block:
            block_of[p] = tuple(sorted(block))
    relation = frozenset((p, q) for p in g.objects for q in g.objects
                         if block_of[p] == block_of[q])
    theta = {}
    for (p, q) in relation:
        for a in g.arrows:
            if g.tgt[a] != q:
                continue
            b = p * n_objects + g.src[a]
            theta[((p, q), a)] = b
    return make_nss(g, n, relation, theta)


def group_bundle_nss(order: int, n_objects: int, subgroup: Iterable[int]
                     ) -> NormalSubgroupoidSystem:
    """System on the Z/order bundle: N = W x objects, R full, theta transports cosets."""
    g = group_bundle_groupoid(order, n_objects)
    sub = sorted(set(int(x) % order for x in subgroup))
    n = frozenset(m * order + x for m in range(n_objects) for x in sub)
    relation = frozenset((p, q) for p in range(n_objects) for q in range(n_objects))
    theta = {}
    for (p, q) in relation:
        for a in g.arrows:
            if g.tgt[a] != q:
                continue
            x = a - q * order
            theta[((p, q), a)] = p * order + x
    return make_nss(g, n, relation, theta)


def trivial_nss(g: FiniteGroupoid) -> NormalSubgroupoidSystem:
    n = g.unit_arrows()
    relation = frozenset((p, p) for p in g.objects)
    theta = {((p, p), a): a for p in g.objects for a in g.arrows if g.tgt[a] == p}
    return make_nss(g, n, relation, theta)


# ---------------------------------------------------------------------------
# JSON file format

def groupoid_to_json(g: FiniteGroupoid) -> dict:
    """Arrays parallel to ``arrows`` / ``objects``; mul as [g, h, gh] triples."""
    return {
        "objects": list(g.objects),
        "arrows": list(g.arrows),
        "src": [g.src[a] for a in g.arrows],
        "tgt": [g.tgt[a] for a in g.arrows],
        "unit": [g.unit[p] for p in g.objects],
        "inv": [g.inv[a] for a in g.arrows],
        "mul": [[a, b, c] for (a, b), c in sorted(g.mul.items())],
    }


def groupoid_from_json(data: dict) -> FiniteGroupoid:
    try:
        objects = tuple(int(p) for p in data["objects"])
        arrows = tuple(int(a) for a in data["arrows"])
        src = {a: int(s) for a, s in zip(arrows, data["src"])}
        tgt = {a: int(t) for a, t in zip(arrows, data["tgt"])}
        unit = {p: int(u) for p, u in zip(objects, data["unit"])}
        inv = {a: int(i) for a, i in zip(arrows, data["inv"])}
        mul = {(int(a), int(b)): int(c) for a, b, c in data["mul"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed groupoid file: {exc}")
    if len(data["src"]) != len(arrows) or len(data["tgt"]) != len(arrows) \
            or len(data["inv"]) != len(arrows) or len(data["unit"]) != len(objects):
        raise StructureError("table lengths do not match id lists")
    g = FiniteGroupoid(objects, arrows, src, tgt, unit, inv, mul)
    check_structure(g)
    return g
