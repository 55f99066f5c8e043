"""Fusion systems of a finite group at a prime.

Everything here works with explicit hom tables: F(Q,R) is the set of
injective homomorphisms R -> Q induced by conjugation in the ambient
group.  Axiom checking, the exterior quotient, focal/hyperfocal
subgroups and the centralizer-focal functor all reduce to exhaustive
scans over these tables, which is fine at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotPGroup, NotRealizable, NotSubgroup
from .groups import (
    AbHom,
    Abelianization,
    FiniteGroup,
    GroupHom,
    Permutation,
    abelian_quotient,
    centralizer,
    conjugation_hom,
    generate_group,
    normalizer,
    prime_power,
    subgroups,
)

DEFAULT_CAP = 50_000


def _product_subgroup(P: FiniteGroup, A: FiniteGroup, B: FiniteGroup) -> FiniteGroup:
    """Subgroup A*B of P; assumes the product is closed (e.g. B normalizes A)."""
    elems = {a * b for a in A for b in B}
    return P.subgroup_from_set(elems)


@dataclass(frozen=True, eq=False)
class FusionSystem:
    """Hom tables of a fusion system on the p-group P.

    hom_table[(Q, R)] is the sorted tuple of morphisms R -> Q.  The
    provenance group G is kept when the system came from a transporter
    scan; several constructions (cf_functor, localities) require it.
    """

    P: FiniteGroup
    p: int
    objects: tuple[FiniteGroup, ...]
    hom_table: dict[tuple[FiniteGroup, FiniteGroup], tuple[GroupHom, ...]]
    G: FiniteGroup | None = None
    _aut_cache: dict = field(default_factory=dict, repr=False)
    _iso_classes: list = field(default_factory=list, repr=False)

    def hom(self, Q: FiniteGroup, R: FiniteGroup) -> tuple[GroupHom, ...]:
        return self.hom_table.get((Q, R), ())

    def isomorphisms(self, Q: FiniteGroup, R: FiniteGroup) -> tuple[GroupHom, ...]:
        if Q.order != R.order:
            return ()
        return tuple(f for f in self.hom(Q, R) if f.is_bijective())

    def aut_perm(self, Q: FiniteGroup):
        """F(Q) as a permutation group on Q.elements.

        Returns (group, perm_to_hom, inner_subgroup) where inner_subgroup
        realizes F_P(Q) = {c_u : u in N_P(Q)}.
        """
        if Q in self._aut_cache:
            return self._aut_cache[Q]
        idx = {x: i for i, x in enumerate(Q.elements)}
        n = len(Q.elements)
        perm_to_hom = {}
        for f in self.hom(Q, Q):
            perm = Permutation(tuple(idx[f(x)] for x in Q.elements))
            perm_to_hom[perm] = f
        group = FiniteGroup.from_elements(n, perm_to_hom.keys())
        inner_elems = set()
        for u in normalizer(self.P, Q):
            inner_elems.add(Permutation(tuple(idx[u * x * u.inverse()] for x in Q.elements)))
        inner = group.subgroup_from_set(inner_elems)
        self._aut_cache[Q] = (group, perm_to_hom, inner)
        return self._aut_cache[Q]

    def iso_classes(self) -> tuple[tuple[FiniteGroup, ...], ...]:
        """Partition of the objects into F-isomorphism classes."""
        if not self._iso_classes:
            seen: set[FiniteGroup] = set()
            classes = []
            for Q in self.objects:
                if Q in seen:
                    continue
                members = [R for R in self.objects if self.isomorphisms(Q, R)]
                seen.update(members)
                classes.append(tuple(sorted(members)))
            self._iso_classes.extend(classes)
        return tuple(self._iso_classes)

    def iso_class_of(self, Q: FiniteGroup) -> tuple[FiniteGroup, ...]:
        for cls in self.iso_classes():
            if Q in cls:
                return cls
        raise NotSubgroup("not an object of this fusion system")

    def fc_representative(self, Q: FiniteGroup) -> tuple[FiniteGroup, GroupHom]:
        """Fully centralized representative Q* of the F-class of Q.

        Picks the first class member (canonical subgroup order) with
        maximal |C_P|, together with a canonical F-isomorphism Q -> Q*.
        """
        members = self.iso_class_of(Q)
        best = max(len(centralizer(self.P, M)) for M in members)
        rep = min(M for M in members if len(centralizer(self.P, M)) == best)
        if rep == Q:
            from .groups import identity_hom

            return rep, identity_hom(Q)
        rho = min(self.isomorphisms(rep, Q), key=lambda f: f.sort_key())
        return rep, rho

    def fn_representative(self, Q: FiniteGroup) -> tuple[FiniteGroup, GroupHom]:
        """Fully normalized representative, same selection rule with N_P."""
        members = self.iso_class_of(Q)
        best = max(len(normalizer(self.P, M)) for M in members)
        rep = min(M for M in members if len(normalizer(self.P, M)) == best)
        if rep == Q:
            from .groups import identity_hom

            return rep, identity_hom(Q)
        rho = min(self.isomorphisms(rep, Q), key=lambda f: f.sort_key())
        return rep, rho

    def hom_counts(self) -> dict[str, int]:
        """JSON-friendly cardinality table keyed by object indices."""
        out = {}
        for i, Q in enumerate(self.objects):
            for j, R in enumerate(self.objects):
                n = len(self.hom(Q, R))
                if n:
                    out[f"{i},{j}"] = n
        return out


def fusion_from_group(G: FiniteGroup, P: FiniteGroup, cap: int = DEFAULT_CAP) -> FusionSystem:
    """Transporter-scan construction of F_{G,P}.

    F(Q,R) consists of the conjugation maps x -> gxg^{-1} with gRg^{-1} <= Q,
    deduplicated as homomorphisms.
    """
    if not P.is_subgroup_of(G):
        raise NotSubgroup("P must be a subgroup of G")
    pp = prime_power(P.order)
    if pp is None:
        raise NotPGroup(f"|P| = {P.order} is not a prime power")
    p = pp[0]
    objects = tuple(subgroups(P, cap=cap))
    by_order: dict[int, list[FiniteGroup]] = {}
    for Q in objects:
        by_order.setdefault(Q.order, []).append(Q)

    table: dict[tuple[FiniteGroup, FiniteGroup], set[tuple]] = {}
    for R in objects:
        relems = R.elements
        seen_images: set[tuple[Permutation, ...]] = set()
        for g in G:
            gi = g.inverse()
            img = tuple(g * x * gi for x in relems)
            if img in seen_images:
                continue
            seen_images.add(img)
            if any(x not in P for x in img):
                continue
            imgset = set(img)
            for n in by_order:
                if n < R.order:
                    continue
                for Q in by_order[n]:
                    if all(x in Q for x in imgset):
                        table.setdefault((Q, R), set()).add(img)

    hom_table: dict[tuple[FiniteGroup, FiniteGroup], tuple[GroupHom, ...]] = {}
    for (Q, R), imgs in table.items():
        homs = [GroupHom(R, Q, dict(zip(R.elements, img))) for img in sorted(imgs)]
        hom_table[(Q, R)] = tuple(sorted(homs, key=lambda f: f.sort_key()))
    return FusionSystem(P=P, p=p, objects=objects, hom_table=hom_table, G=G)


def trivial_fusion(P: FiniteGroup, cap: int = DEFAULT_CAP) -> FusionSystem:
    """F_P, conjugation fusion of P on itself."""
    return fusion_from_group(P, P, cap=cap)


# -- Frobenius axioms ---------------------------------------------------------


@dataclass(frozen=True)
class FrobeniusReport:
    passed: bool
    failures: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.passed


def _divisibility_witness(F: FusionSystem, Q, R, f) -> str | None:
    img = F.P.subgroup_from_set({f(x) for x in R})
    if img not in F.objects:
        return f"image of a morphism {R.order}->{Q.order} is not an object"
    iso = GroupHom(R, img, {x: f(x) for x in R.elements})
    if iso not in F.hom(img, R):
        return f"isomorphism-onto-image missing from F({img.order},{R.order})"
    return None


def check_frobenius(F: FusionSystem) -> FrobeniusReport:
    """Exhaustive verification of the three Frobenius axioms.

    Axiom 1 (fullness): whenever f: R -> Q and f': R' -> Q have
    f(R) <= f'(R'), the comparison map f'^{-1} o f lies in F(R',R).
    Axiom 2 (Sylow): F_P(P) is a Sylow p-subgroup of F(P).
    Axiom 3 (extension): for Q fully centralized, f in F(P,Q) and
    R <= N_P(f(Q)) whose conjugation action transports into F_P(Q),
    some zeta: R -> P restricts on f(Q) to f^{-1}.
    """
    failures: list[str] = []
    P = F.P

    # axiom 1, plus the divisibility property it implies
    for Q in F.objects:
        incoming = []
        for R in F.objects:
            for f in F.hom(Q, R):
                incoming.append((R, f, {f(x) for x in R}))
        for R, f, img in incoming:
            w = _divisibility_witness(F, Q, R, f)
            if w:
                failures.append(f"divisibility: {w}")
            for R2, f2, img2 in incoming:
                if not img <= img2:
                    continue
                inv = {f2(x): x for x in R2.elements}
                chi = GroupHom(R, R2, {x: inv[f(x)] for x in R.elements})
                if chi not in F.hom(R2, R):
                    failures.append(
                        f"fullness: comparison {R.order}->{R2.order} into"
                        f" Q of order {Q.order} missing"
                    )

    # axiom 2
    autP, _, innP = F.aut_perm(P)
    index = autP.order // innP.order
    if index % F.p == 0:
        failures.append(
            f"sylow: [F(P):F_P(P)] = {index} divisible by p = {F.p}"
        )

    # axiom 3
    for Q in F.objects:
        if not fully_centralized(F, Q):
            continue
        inner_keys = set()
        for u in normalizer(P, Q):
            inner_keys.add(tuple(u * x * u.inverse() for x in Q.elements))
        for f in F.hom(P, Q):
            fQ = P.subgroup_from_set({f(x) for x in Q})
            inv = {f(x): x for x in Q.elements}
            N = normalizer(P, fQ)
            for R in F.objects:
                if not (fQ.is_subgroup_of(R) and R.is_subgroup_of(N)):
                    continue
                ok = True
                for n in R:
                    ni = n.inverse()
                    key = tuple(inv[n * f(x) * ni] for x in Q.elements)
                    if key not in inner_keys:
                        ok = False
                        break
                if not ok:
                    continue
                gens = Q.generators or (Q.identity(),)
                found = False
                for zeta in F.hom(P, R):
                    if all(zeta(f(u)) == u for u in gens):
                        found = True
                        break
                if not found:
                    failures.append(
                        f"extension: no zeta for Q of order {Q.order},"
                        f" R of order {R.order}"
                    )
    return FrobeniusReport(passed=not failures, failures=tuple(failures))


def fully_centralized(F: FusionSystem, Q: FiniteGroup) -> bool:
    P = F.P
    C = centralizer(P, Q)
    QC = _product_subgroup(P, Q, C)
    cset = set(C)
    for xi in F.hom(P, QC):
        imgQ = P.subgroup_from_set({xi(x) for x in Q})
        target = set(centralizer(P, imgQ))
        if {xi(c) for c in cset} != target:
            return False
    return True


def fully_normalized(F: FusionSystem, Q: FiniteGroup) -> bool:
    P = F.P
    N = normalizer(P, Q)
    QN = N  # Q <= N_P(Q) already
    nset = set(N)
    for xi in F.hom(P, QN):
        imgQ = P.subgroup_from_set({xi(x) for x in Q})
        target = set(normalizer(P, imgQ))
        if {xi(n) for n in nset} != target:
            return False
    return True


# -- exterior quotient --------------------------------------------------------


@dataclass(frozen=True)
class FusionMorphismClass:
    """Class of a morphism modulo inner automorphisms of the target."""

    rep: GroupHom

    @property
    def source(self) -> FiniteGroup:
        return self.rep.source

    @property
    def target(self) -> FiniteGroup:
        return self.rep.target

    def __lt__(self, other: "FusionMorphismClass") -> bool:
        return self.rep.sort_key() < other.rep.sort_key()

    def __repr__(self) -> str:
        return f"~[{self.source.order}->{self.target.order}]"


class ExteriorQuotient:
    """F modulo target-side inner automorphisms, with class lookup."""

    def __init__(self, base: FusionSystem):
        self.base = base
        self._class_of: dict[GroupHom, FusionMorphismClass] = {}
        self._classes: dict[tuple[FiniteGroup, FiniteGroup], tuple[FusionMorphismClass, ...]] = {}
        for (Q, R), homs in base.hom_table.items():
            remaining = set(homs)
            out = []
            while remaining:
                f = min(remaining, key=lambda h: h.sort_key())
                members = set()
                for u in Q:
                    g = conjugation_hom(Q, u, Q).compose(f)
                    members.add(g)
                cls = FusionMorphismClass(rep=f)
                for g in members:
                    self._class_of[g] = cls
                remaining -= members
                out.append(cls)
            self._classes[(Q, R)] = tuple(sorted(out))

    def cls(self, f: GroupHom) -> FusionMorphismClass:
        return self._class_of[f]

    def classes(self, Q: FiniteGroup, R: FiniteGroup) -> tuple[FusionMorphismClass, ...]:
        return self._classes.get((Q, R), ())

    def members(self, c: FusionMorphismClass) -> tuple[GroupHom, ...]:
        return tuple(
            sorted(
                (f for f, k in self._class_of.items() if k is c),
                key=lambda f: f.sort_key(),
            )
        )

    def identity_cls(self, Q: FiniteGroup) -> FusionMorphismClass:
        from .groups import identity_hom

        return self.cls(identity_hom(Q))

    def compose(self, c1: FusionMorphismClass, c2: FusionMorphismClass) -> FusionMorphismClass:
        """Class of c1 o c2 (c2: T -> R, c1: R -> Q)."""
        return self.cls(c1.rep.compose(c2.rep))

    def same(self, f: GroupHom, g: GroupHom) -> bool:
        return self._class_of[f] is self._class_of[g]


def exterior_quotient(F: FusionSystem) -> ExteriorQuotient:
    return ExteriorQuotient(F)


# -- focal machinery ----------------------------------------------------------


def hyperfocal(F: FusionSystem) -> FiniteGroup:
    """Subgroup generated by u^{-1} sigma(u) over p'-elements sigma of F(Q)."""
    P = F.P
    seeds = set()
    for Q in F.objects:
        group, perm_to_hom, _ = F.aut_perm(Q)
        for perm in group:
            if perm.order() % F.p == 0 and perm.order() != 1:
                continue
            sigma = perm_to_hom[perm]
            for u in Q:
                seeds.add(u.inverse() * sigma(u))
    seeds.discard(P.identity())
    if not seeds:
        return P.subgroup_from_set({P.identity()})
    return P.subgroup_from_set(set(generate_group(sorted(seeds), degree=P.degree)))


def focal_subgroup(F: FusionSystem) -> FiniteGroup:
    """Subgroup generated by u^{-1} f(u) over all morphisms of F."""
    P = F.P
    seeds = set()
    for (Q, R), homs in F.hom_table.items():
        for f in homs:
            for u in R:
                seeds.add(u.inverse() * f(u))
    seeds.discard(P.identity())
    if not seeds:
        return P.subgroup_from_set({P.identity()})
    return P.subgroup_from_set(set(generate_group(sorted(seeds), degree=P.degree)))


def selfcentralizing_objects(F: FusionSystem) -> tuple[FiniteGroup, ...]:
    """Q with C_P(image) inside the image for every F(P,Q)-morphism."""
    out = []
    for Q in F.objects:
        ok = True
        for f in F.hom(F.P, Q):
            img = F.P.subgroup_from_set({f(x) for x in Q})
            if not centralizer(F.P, img).is_subgroup_of(img):
                ok = False
                break
        if ok:
            out.append(Q)
    return tuple(out)


# -- centralizer-focal functor ------------------------------------------------


@dataclass(frozen=True)
class CfValue:
    """Value of the centralizer-focal functor at one object.

    The abelian group lives at the fully centralized representative
    fc_object; to_fc is the chosen isomorphism from the object onto it.
    """

    fc_object: FiniteGroup
    to_fc: GroupHom
    quotient: Abelianization

    @property
    def group(self):
        return self.quotient.ab


class CfFunctor:
    """C_P(Q) modulo the focal subgroup of the centralizer fusion system.

    Contravariant on the exterior quotient: a class R -> Q induces an
    abelian-group map value(Q) -> value(R) via an extension morphism
    zeta with zeta(phi(v)) = v.
    """

    def __init__(self, F: FusionSystem, EQ: ExteriorQuotient | None = None):
        if F.G is None:
            raise NotRealizable("cf_functor needs a provenance group")
        self.F = F
        self.EQ = EQ if EQ is not None else exterior_quotient(F)
        self._values: dict[FiniteGroup, CfValue] = {}
        self._fc_quotients: dict[FiniteGroup, Abelianization] = {}
        self._map_cache: dict[FusionMorphismClass, AbHom] = {}
        for Q in F.objects:
            rep, rho = F.fc_representative(Q)
            if rep not in self._fc_quotients:
                self._fc_quotients[rep] = self._build_fc_quotient(rep)
            self._values[Q] = CfValue(
                fc_object=rep, to_fc=rho, quotient=self._fc_quotients[rep]
            )

    def _build_fc_quotient(self, Q: FiniteGroup) -> Abelianization:
        G, P = self.F.G, self.F.P
        CG = centralizer(G, Q)
        CP = centralizer(P, Q)
        CF = fusion_from_group(CG, CP)
        foc = focal_subgroup(CF)
        return abelian_quotient(CP, foc)

    def value(self, Q: FiniteGroup) -> CfValue:
        return self._values[Q]

    def _fc_map(self, psi: GroupHom) -> AbHom:
        """Map value(Q*) -> value(R*) for psi: R* -> Q*, both fully centralized."""
        F = self.F
        P = F.P
        Rs, Qs = psi.source, psi.target
        abQ = self._fc_quotients[Qs]
        abR = self._fc_quotients[Rs]
        CQ = centralizer(P, Qs)
        CR = centralizer(P, Rs)
        psiR = P.subgroup_from_set({psi(x) for x in Rs})
        dom = _product_subgroup(P, psiR, CQ)
        cod = _product_subgroup(P, Rs, CR)
        gens = Rs.generators or (Rs.identity(),)
        zeta = None
        for cand in F.hom(cod, dom):
            if all(cand(psi(v)) == v for v in gens):
                zeta = cand
                break
        if zeta is None:
            raise NotRealizable(
                "no extension morphism for the centralizer-focal map"
            )
        cols = [abR.project(zeta(b)) for b in abQ.basis]
        return AbHom.from_columns(abQ.ab, abR.ab, cols)

    def map(self, cls: FusionMorphismClass) -> AbHom:
        """AbHom value(target) -> value(source) for a morphism class."""
        if cls in self._map_cache:
            return self._map_cache[cls]
        f = cls.rep
        R, Q = f.source, f.target
        vR, vQ = self._values[R], self._values[Q]
        rhoR_inv = vR.to_fc.inverse()
        psi = vQ.to_fc.compose(f).compose(rhoR_inv)
        out = self._fc_map(psi)
        self._map_cache[cls] = out
        return out


def cf_functor(F: FusionSystem, EQ: ExteriorQuotient | None = None) -> CfFunctor:
    return CfFunctor(F, EQ)
