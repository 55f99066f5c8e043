"""Basic locality on a thick stable self-dual biset.

The ambient group is G = Aut of Omega as a right P-set, acting on points
(i, u) by block permutations with P-valued labels; it is never
enumerated.  P embeds via the left action, the transporter category of
the embedded copy realizes the fusion system, and the quotient by the
wreath socle of each point centralizer gives a p-coherent locality whose
kernel at Q is the direct sum, over canonical orbit types (T, eta), of
the abelianized quotients ab(N_{QxP}(Delta_eta(T)) / Delta_eta(T)).

Morphisms are stored as pairs (phi, kernel vector); composition lifts to
explicit automorphisms of Omega and reduces back, so associativity and
coherence are inherited from honest group multiplication.  The kernel
action on these sums is computed two independent ways: by conjugating
section representatives, and by a transfer formula over equivariant
injections between coset models that never touches Omega.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .bisets import ConcreteBiset, OrbitRecord, OrbitType, orbit_records
from .errors import (
    ConstructionFailed,
    LiftImpossible,
    NotCentralizing,
    NotComposable,
    NotTransporter,
)
from .fusion import ExteriorQuotient, FusionSystem, exterior_quotient
from .groups import (
    AbHom,
    Abelianization,
    DirectProduct,
    FinAb,
    FiniteGroup,
    GroupHom,
    Permutation,
    Quotient,
    abelianization,
    direct_product,
    finab_direct_sum,
    induced_ab_hom,
    normal_closure,
    normalizer,
    prime_power,
    quotient_group,
    transfer,
)


@lru_cache(maxsize=None)
def _derived_subgroup(group: FiniteGroup) -> FiniteGroup:
    gens = group.generators or (group.identity(),)
    comms = [a * b * a.inverse() * b.inverse() for a in gens for b in gens]
    return normal_closure(group, comms)


@dataclass(frozen=True)
class GElement:
    """Right-P-equivariant automorphism of Omega: (i, u) -> (sigma(i), label[i]*u)."""

    sigma: Permutation
    labels: tuple[Permutation, ...]

    def __mul__(self, other: "GElement") -> "GElement":
        sig = self.sigma * other.sigma
        lab = tuple(
            self.labels[other.sigma(i)] * other.labels[i]
            for i in range(len(self.labels))
        )
        return GElement(sig, lab)

    def inverse(self) -> "GElement":
        inv = self.sigma.inverse()
        lab = tuple(self.labels[inv(j)].inverse() for j in range(len(self.labels)))
        return GElement(inv, lab)

    def act(self, pt):
        i, u = pt
        return (self.sigma(i), self.labels[i] * u)

    def is_identity(self) -> bool:
        return self.sigma.is_identity() and all(x.is_identity() for x in self.labels)

    def __repr__(self) -> str:
        return f"GElement(k={len(self.labels)})"


@dataclass(frozen=True)
class LocMorphism:
    """Morphism R -> Q: underlying fusion map plus kernel vector at the source."""

    Q: FiniteGroup
    R: FiniteGroup
    phi: GroupHom
    kvec: tuple[int, ...]

    def is_iso(self) -> bool:
        return self.Q.order == self.R.order

    def __repr__(self) -> str:
        return f"Loc[{self.R.order}->{self.Q.order}; k={self.kvec}]"


@dataclass
class KernelBlock:
    """One canonical orbit type (T, eta) at Q with its normalizer quotient data."""

    type: OrbitType
    dp: DirectProduct
    delta: FiniteGroup
    norm: FiniteGroup
    nbar: Quotient
    abn: Abelianization
    records: tuple[int, ...]

    def project_pair(self, q: Permutation, y: Permutation):
        return self.abn.project(self.nbar.projection(self.dp.pair(q, y)))

    def nbar_of_pair(self, q: Permutation, y: Permutation) -> Permutation:
        return self.nbar.projection(self.dp.pair(q, y))


@dataclass
class QData:
    Q: FiniteGroup
    records: tuple[OrbitRecord, ...]
    block_rec: tuple[int, ...]
    types: tuple[OrbitType, ...]
    blocks: dict[OrbitType, KernelBlock]
    kernel: FinAb
    offsets: tuple[int, ...]
    charts: list[dict]


@dataclass(frozen=True)
class CentralizerBlock:
    type: OrbitType
    copies: int
    nbar_order: int
    ab_orders: tuple[int, ...]


@dataclass(frozen=True)
class LocalityReport:
    passed: bool
    p_coherent: bool
    checked_triples: int
    failures: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.passed


class BasicLocality:
    """The locality T_G / (wreath socle) attached to a thick basic biset."""

    def __init__(self, F: FusionSystem, omega: ConcreteBiset):
        if omega.P is not F.P and omega.P != F.P:
            raise ConstructionFailed("biset and fusion system disagree on P")
        self.F = F
        self.P = F.P
        self.p = F.p
        self.omega = omega
        self.k = omega.k
        self._embed = {w: GElement(Permutation(omega.left_sigma[w]), omega.left_label[w])
                       for w in self.P.elements}
        self._embed_table = {g: w for w, g in self._embed.items()}
        self._qdata: dict[FiniteGroup, QData] = {}
        self._eq: ExteriorQuotient | None = None
        self._ell_cache: dict = {}
        self._action_cache: dict = {}
        self._hom_sets: dict = {}

    # -- embedded copy of P ---------------------------------------------------

    @property
    def EQ(self) -> ExteriorQuotient:
        if self._eq is None:
            self._eq = exterior_quotient(self.F)
        return self._eq

    def embed(self, w: Permutation) -> GElement:
        return self._embed[w]

    def identity_element(self) -> GElement:
        return self._embed[self.P.identity()]

    # -- per-object kernel data -----------------------------------------------

    def qdata(self, Q: FiniteGroup) -> QData:
        data = self._qdata.get(Q)
        if data is None:
            data = self._build_qdata(Q)
            self._qdata[Q] = data
        return data

    def _build_qdata(self, Q: FiniteGroup) -> QData:
        records = orbit_records(self.omega, Q)
        block_rec = [0] * self.k
        for ri, rec in enumerate(records):
            for i in rec.blocks:
                block_rec[i] = ri
        types: list[OrbitType] = []
        per_type: dict[OrbitType, list[int]] = {}
        for ri, rec in enumerate(records):
            if rec.type not in per_type:
                per_type[rec.type] = []
                types.append(rec.type)
            per_type[rec.type].append(ri)
        types.sort(key=lambda t: t.sort_key())
        blocks: dict[OrbitType, KernelBlock] = {}
        for t in types:
            dp = direct_product(Q, self.P)
            delta = dp.group.subgroup_from_set(
                {dp.pair(q, y) for q, y in t.delta_pairs()}
            )
            norm = normalizer(dp.group, delta)
            nbar = quotient_group(norm, delta)
            abn = abelianization(nbar.group)
            blocks[t] = KernelBlock(
                type=t, dp=dp, delta=delta, norm=norm, nbar=nbar, abn=abn,
                records=tuple(per_type[t]),
            )
        kernel, offsets = finab_direct_sum([blocks[t].abn.ab for t in types])
        charts = [self._chart(Q, rec, None) for rec in records]
        return QData(
            Q=Q, records=records, block_rec=tuple(block_rec), types=tuple(types),
            blocks=blocks, kernel=kernel, offsets=tuple(offsets), charts=charts,
        )

    def _chart(self, Q: FiniteGroup, rec: OrbitRecord, twist: GroupHom | None) -> dict:
        """Point -> (q, y) in Q x P with (twisted) act(q, y, base) = point."""
        lgens = Q.generators or (Q.identity(),)
        rgens = self.P.generators or (self.P.identity(),)
        base = rec.base_point
        chart = {base: (Q.identity(), self.P.identity())}
        queue = [base]
        om = self.omega
        while queue:
            pt = queue.pop()
            a, b = chart[pt]
            for q in lgens:
                x = twist(q) if twist is not None else q
                npt = om.act_left(x, pt)
                if npt not in chart:
                    chart[npt] = (q * a, b)
                    queue.append(npt)
            for w in rgens:
                npt = (pt[0], pt[1] * w.inverse())
                if npt not in chart:
                    chart[npt] = (a, w * b)
                    queue.append(npt)
        return chart

    def kernel_value(self, Q: FiniteGroup) -> FinAb:
        return self.qdata(Q).kernel

    def centralizer_decomposition(self, Q: FiniteGroup) -> tuple[CentralizerBlock, ...]:
        data = self.qdata(Q)
        return tuple(
            CentralizerBlock(
                type=t,
                copies=len(data.blocks[t].records),
                nbar_order=data.blocks[t].nbar.group.order,
                ab_orders=data.blocks[t].abn.ab.orders,
            )
            for t in data.types
        )

    def centralizer_order(self, Q: FiniteGroup) -> int:
        total = 1
        for blk in self.centralizer_decomposition(Q):
            fact = 1
            for m in range(2, blk.copies + 1):
                fact *= m
            total *= blk.nbar_order ** blk.copies * fact
        return total

    # -- point centralizers and the socle quotient ----------------------------

    def in_centralizer(self, Q: FiniteGroup, c: GElement) -> bool:
        gens = Q.generators or (Q.identity(),)
        return all(c * self._embed[q] == self._embed[q] * c for q in gens)

    def _copy_labels(self, Q: FiniteGroup, c: GElement):
        """Per record: (target record index, normalizer coset pair (q, y))."""
        data = self.qdata(Q)
        out = []
        for ri, rec in enumerate(data.records):
            img = c.act(rec.base_point)
            rj = data.block_rec[img[0]]
            if data.records[rj].type != rec.type:
                raise NotCentralizing("orbit image changes the canonical type")
            pair = data.charts[rj].get(img)
            if pair is None:
                raise NotCentralizing("orbit image misses the matched orbit")
            out.append((rj, pair))
        return data, out

    def abproj(self, Q: FiniteGroup, c: GElement) -> tuple[int, ...]:
        """Image of c in the kernel sum; c must centralize the embedded Q."""
        if not self.in_centralizer(Q, c):
            raise NotCentralizing("element does not centralize the embedded copy")
        data, labels = self._copy_labels(Q, c)
        vec = list(data.kernel.zero())
        for ti, t in enumerate(data.types):
            blk = data.blocks[t]
            off = data.offsets[ti]
            acc = blk.abn.ab.zero()
            for ri in blk.records:
                _, (q, y) = labels[ri]
                acc = blk.abn.ab.add(acc, blk.project_pair(q, y))
            for j, v in enumerate(acc):
                vec[off + j] = v
        return tuple(vec)

    def sg_membership(self, Q: FiniteGroup, c: GElement) -> bool:
        """Socle membership by label products in the derived subgroup.

        Valid because every type has at least two copies (thickness): the
        normal closure of the top symmetric groups consists exactly of the
        wreath elements whose total label product, cycles traversed in
        canonical order, lies in [Nbar, Nbar].
        """
        if not self.in_centralizer(Q, c):
            raise NotCentralizing("element does not centralize the embedded copy")
        data, labels = self._copy_labels(Q, c)
        for t in data.types:
            blk = data.blocks[t]
            der = _derived_subgroup(blk.nbar.group)
            total = blk.nbar.group.identity()
            seen = set()
            for ri in blk.records:
                if ri in seen:
                    continue
                cur = ri
                while cur not in seen:
                    seen.add(cur)
                    rj, (q, y) = labels[cur]
                    total = total * blk.nbar_of_pair(q, y)
                    cur = rj
                if cur != ri:
                    raise NotCentralizing("copy permutation has broken cycles")
            if total not in der:
                return False
        return True

    def section(self, Q: FiniteGroup, kvec) -> GElement:
        """Centralizing element mapping onto the given kernel vector.

        Supported on the first orbit copy of each type with a nonzero
        component; identity elsewhere.
        """
        data = self.qdata(Q)
        kvec = data.kernel.reduce(tuple(kvec))
        sigma = list(range(self.k))
        labels = [self.P.identity()] * self.k
        ident = self.P.identity()
        for ti, t in enumerate(data.types):
            off = data.offsets[ti]
            blk = data.blocks[t]
            comp = tuple(kvec[off + j] for j in range(blk.abn.ab.rank))
            if all(v == 0 for v in comp):
                continue
            nu = blk.abn.section(comp)
            q0, y0 = blk.dp.unpair(blk.nbar.section(nu))
            ri = blk.records[0]
            rec = data.records[ri]
            chart = data.charts[ri]
            for i in rec.blocks:
                a, b = chart[(i, ident)]
                img = self.omega.act(a * q0, b * y0, rec.base_point)
                sigma[i] = img[0]
                labels[i] = img[1]
        return GElement(Permutation(sigma), tuple(labels))

    def zero_kvec(self, Q: FiniteGroup) -> tuple[int, ...]:
        return self.qdata(Q).kernel.zero()

    # -- transporter structure -------------------------------------------------

    def induced_map(self, Q: FiniteGroup, R: FiniteGroup, x: GElement) -> GroupHom:
        """Conjugation map R -> Q realized by x, if x transports R into Q."""
        xinv = x.inverse()
        mapping = {}
        for v in R.elements:
            g = x * self._embed[v] * xinv
            u = self._embed_table.get(g)
            if u is None or u not in Q:
                raise NotTransporter("element does not carry R into the embedded Q")
            mapping[v] = u
        return GroupHom(R, Q, mapping)

    def ell(self, Q: FiniteGroup, R: FiniteGroup, phi: GroupHom) -> GElement:
        """Canonical automorphism realizing phi: R -> Q.

        For maps induced by P-conjugation this is the embedding of the
        smallest realizing element, so inner morphisms get kernel vector
        zero; otherwise orbits of the plain and twisted restrictions are
        matched type by type.
        """
        key = (Q, R, phi)
        got = self._ell_cache.get(key)
        if got is not None:
            return got
        lift = None
        for u in self.P.elements:
            if all(u * v * u.inverse() == phi(v) for v in R.generators or (R.identity(),)):
                lift = self._embed[u]
                break
        if lift is None:
            lift = self._lift_by_matching(Q, R, phi)
        self._ell_cache[key] = lift
        return lift

    def _lift_by_matching(self, Q: FiniteGroup, R: FiniteGroup, phi: GroupHom) -> GElement:
        twist = phi if phi.target == self.P else phi.astype(self.P)
        data = self.qdata(R)
        twisted = orbit_records(self.omega, R, twist=twist)
        by_type: dict[OrbitType, list[OrbitRecord]] = {}
        for rec in twisted:
            by_type.setdefault(rec.type, []).append(rec)
        sigma = [0] * self.k
        labels = [self.P.identity()] * self.k
        ident = self.P.identity()
        for ri, rec in enumerate(data.records):
            pool = by_type.get(rec.type)
            if not pool:
                raise LiftImpossible(
                    "restriction along the map changes the orbit types"
                )
            target = pool.pop(0)
            chart = data.charts[ri]
            for i in rec.blocks:
                a, b = chart[(i, ident)]
                img = self.omega.act(twist(a), b, target.base_point)
                sigma[i] = img[0]
                labels[i] = img[1]
        if any(pool for pool in by_type.values()):
            raise LiftImpossible("orbit type multiplicities do not match")
        return GElement(Permutation(sigma), tuple(labels))

    # -- morphisms -------------------------------------------------------------

    def _hom_set(self, Q: FiniteGroup, R: FiniteGroup):
        key = (Q, R)
        got = self._hom_sets.get(key)
        if got is None:
            got = set(self.F.hom(Q, R))
            self._hom_sets[key] = got
        return got

    def reduce(self, Q: FiniteGroup, R: FiniteGroup, x: GElement) -> LocMorphism:
        phi = self.induced_map(Q, R, x)
        if phi not in self._hom_set(Q, R):
            raise ConstructionFailed("conjugation map missing from the hom table")
        c = self.ell(Q, R, phi).inverse() * x
        return LocMorphism(Q=Q, R=R, phi=phi, kvec=self.abproj(R, c))

    def lift(self, m: LocMorphism) -> GElement:
        return self.ell(m.Q, m.R, m.phi) * self.section(m.R, m.kvec)

    def morphism(self, Q: FiniteGroup, R: FiniteGroup, phi: GroupHom, kvec=None) -> LocMorphism:
        if phi not in self._hom_set(Q, R):
            raise ConstructionFailed("map is not in the fusion system")
        if kvec is None:
            kvec = self.zero_kvec(R)
        return LocMorphism(Q=Q, R=R, phi=phi, kvec=self.qdata(R).kernel.reduce(tuple(kvec)))

    def identity_morphism(self, Q: FiniteGroup) -> LocMorphism:
        from .groups import identity_hom

        return self.morphism(Q, Q, identity_hom(Q))

    def tau(self, Q: FiniteGroup, R: FiniteGroup, u: Permutation) -> LocMorphism:
        return self.reduce(Q, R, self._embed[u])

    def compose(self, m1: LocMorphism, m2: LocMorphism) -> LocMorphism:
        """m1 after m2; sources and targets must match."""
        if m1.R != m2.Q:
            raise NotComposable("inner object mismatch")
        return self.reduce(m1.Q, m2.R, self.lift(m1) * self.lift(m2))

    def invert(self, m: LocMorphism) -> LocMorphism:
        if not m.is_iso():
            raise NotComposable("only isomorphisms invert")
        return self.reduce(m.R, m.Q, self.lift(m).inverse())

    def restrict_morphism(self, m: LocMorphism, Q2: FiniteGroup, R2: FiniteGroup) -> LocMorphism:
        """Divisibility: the same automorphism viewed on smaller objects."""
        return self.reduce(Q2, R2, self.lift(m))

    def morphisms(self, Q: FiniteGroup, R: FiniteGroup):
        ker = self.qdata(R).kernel
        for phi in self.F.hom(Q, R):
            for kvec in ker.elements():
                yield LocMorphism(Q=Q, R=R, phi=phi, kvec=kvec)

    def morphism_count(self, Q: FiniteGroup, R: FiniteGroup) -> int:
        return len(self.F.hom(Q, R)) * self.qdata(R).kernel.order

    # -- kernel action: conjugation route -------------------------------------

    def kernel_action(self, Q: FiniteGroup, R: FiniteGroup, phi: GroupHom) -> AbHom:
        """Ker(Q) -> Ker(R) induced by conjugating centralizing elements.

        Factors through the exterior class of phi; cached accordingly.
        """
        cls = self.EQ.cls(phi)
        got = self._action_cache.get(cls)
        if got is not None:
            return got
        x = self.ell(Q, R, cls.rep)
        xinv = x.inverse()
        src = self.qdata(Q).kernel
        tgt = self.qdata(R).kernel
        cols = []
        for j in range(src.rank):
            e = list(src.zero())
            e[j] = 1
            c = self.section(Q, tuple(e))
            cols.append(self.abproj(R, xinv * c * x))
        out = AbHom.from_columns(src, tgt, cols)
        self._action_cache[cls] = out
        return out

    # -- kernel action: transfer route ----------------------------------------

    def kernel_action_transfer(self, Q: FiniteGroup, R: FiniteGroup, phi: GroupHom) -> AbHom:
        """Same map assembled from equivariant injections between coset models.

        For each source type (T, eta) at Q and target type (U, theta) at R,
        points of (QxP)/Delta_eta(T) with exact twisted stabilizer
        Delta_theta(U) are classified up to the two-sided normalizer
        action; each class contributes a transfer into the image
        stabilizer followed by the induced solve-map on abelianizations.
        """
        dataQ = self.qdata(Q)
        dataR = self.qdata(R)
        src = dataQ.kernel
        tgt = dataR.kernel
        total = AbHom.zero(src, tgt)
        for ti, t in enumerate(dataQ.types):
            blkQ = dataQ.blocks[t]
            model = _CosetModel(self, Q, blkQ)
            for uj, tu in enumerate(dataR.types):
                blkR = dataR.blocks[tu]
                comp = _transfer_component(self, phi, R, blkR, model)
                if comp is None:
                    continue
                total = total.add(_embed_component(
                    comp, src, tgt, dataQ.offsets[ti], dataR.offsets[uj]
                ))
        return total

    # -- structure report ------------------------------------------------------

    def check_axioms(self, seed: int = 0, triples: int = 200) -> LocalityReport:
        failures: list[str] = []
        rng = random.Random(seed)
        F = self.F
        objs = list(F.objects)

        p_ok = True
        for Q in objs:
            for n in self.qdata(Q).kernel.orders:
                pp = prime_power(n)
                if n != 1 and (pp is None or pp[0] != self.p):
                    p_ok = False
                    failures.append(f"kernel at |Q|={Q.order} has non-{self.p} part")
        for Q in objs:
            for u in Q.elements:
                m = self.tau(Q, Q, u)
                cu = GroupHom(Q, Q, {v: u * v * u.inverse() for v in Q.elements})
                if m.phi != cu:
                    failures.append("projection of an embedded element is not conjugation")
                    break

        pairs = [
            (Q, R) for Q in objs for R in objs if F.hom(Q, R)
        ]

        def rand_morphism(Q, R):
            phi = rng.choice(F.hom(Q, R))
            ker = self.qdata(R).kernel
            kvec = tuple(rng.randrange(n) for n in ker.orders)
            return self.morphism(Q, R, phi, kvec)

        count = 0
        while count < triples and pairs:
            Q, R = rng.choice(pairs)
            choices = [T for T in objs if F.hom(R, T)]
            if not choices:
                continue
            T = rng.choice(choices)
            m1 = rand_morphism(Q, R)
            m2 = rand_morphism(R, T)
            m12 = self.compose(m1, m2)
            deeper = [S for S in objs if F.hom(T, S)]
            if deeper:
                S = rng.choice(deeper)
                m3 = rand_morphism(T, S)
                left = self.compose(m12, m3)
                right = self.compose(m1, self.compose(m2, m3))
                if left != right:
                    failures.append("associativity failure")
            count += 1

        for Q, R in pairs:
            for _ in range(2):
                m = rand_morphism(Q, R)
                for v in R.generators or (R.identity(),):
                    lhs = self.compose(m, self.tau(R, R, v))
                    rhs = self.compose(self.tau(Q, Q, m.phi(v)), m)
                    if lhs != rhs:
                        failures.append("coherence failure")
                        break

        for Q, R in pairs:
            m = rand_morphism(Q, R)
            if self.reduce(Q, R, self.lift(m)) != m:
                failures.append("reduce/lift round trip failure")

        return LocalityReport(
            passed=not failures,
            p_coherent=p_ok,
            checked_triples=count,
            failures=tuple(failures),
        )


# -- transfer-route internals --------------------------------------------------


class _CosetModel:
    """(QxP)/Delta_eta(T) with left cosets indexed by their minimum element."""

    def __init__(self, L: BasicLocality, Q: FiniteGroup, blk: KernelBlock):
        self.Q = Q
        self.blk = blk
        dp = blk.dp
        delta_elems = sorted(blk.delta.elements)
        seen = set()
        reps = []
        index = {}
        for g in sorted(dp.group.elements):
            if g in seen:
                continue
            coset = [g * d for d in delta_elems]
            for h in coset:
                seen.add(h)
                index[h] = len(reps)
            reps.append(g)
        self.reps = reps
        self.index = index
        self.dp = dp

    def left(self, a: Permutation, b: Permutation, ci: int) -> int:
        return self.index[self.dp.pair(a, b) * self.reps[ci]]

    def right(self, ci: int, g: Permutation) -> int:
        return self.index[self.reps[ci] * g]


def _transfer_component(
    L: BasicLocality,
    phi: GroupHom,
    R: FiniteGroup,
    blkR: KernelBlock,
    model: _CosetModel,
):
    """Component ab(NbarQ) -> ab(NbarR) of the transfer formula, or None."""
    P = L.P
    tw = phi if phi.target == P else phi.astype(P)
    upairs = blkR.type.delta_pairs()
    delta_set = set(upairs)

    def stab_pairs(ci: int) -> set:
        out = set()
        for v in R.elements:
            a = tw(v)
            for y in P.elements:
                if model.left(a, y, ci) == ci:
                    out.add((v, y))
        return out

    exact = [ci for ci in range(len(model.reps)) if stab_pairs(ci) == delta_set]
    if not exact:
        return None

    norm_pairs_R = [
        blkR.dp.unpair(g) for g in blkR.norm.elements
    ]
    norm_elems_Q = sorted(model.blk.norm.elements)

    exact_set = set(exact)
    seen = set()
    abQ = model.blk.abn
    abR = blkR.abn
    comp = AbHom.zero(abQ.ab, abR.ab)
    for z in exact:
        if z in seen:
            continue
        orbit = {z}
        queue = [z]
        while queue:
            c = queue.pop()
            for v, y in norm_pairs_R:
                n = model.left(tw(v), y, c)
                if n not in orbit:
                    orbit.add(n)
                    queue.append(n)
            for g in norm_elems_Q:
                n = model.right(c, g)
                if n in exact_set and n not in orbit:
                    orbit.add(n)
                    queue.append(n)
        seen |= orbit

        image = _rp_orbit(L, tw, R, model, z)
        stab_elems = {
            g for g in norm_elems_Q if model.right(z, g) in image
        }
        stab_group = model.blk.nbar.group.subgroup_from_set(
            {model.blk.nbar.projection(g) for g in stab_elems}
        )
        ab_stab = abelianization(stab_group)
        ver = transfer(model.blk.nbar.group, stab_group)
        lift_sets = {}
        for g in sorted(stab_elems):
            lift_sets.setdefault(model.blk.nbar.projection(g), g)
        delta_map = {}
        for gbar in stab_group.elements:
            g = lift_sets[gbar]
            target_c = model.right(z, g.inverse())
            w = None
            for v, y in norm_pairs_R:
                if model.left(tw(v.inverse()), y.inverse(), z) == target_c:
                    w = blkR.nbar.projection(blkR.dp.pair(v, y))
                    break
            if w is None:
                raise ConstructionFailed("solve for the source automorphism failed")
            delta_map[gbar] = w
        delta_hom = GroupHom(stab_group, blkR.nbar.group, delta_map)
        comp = comp.add(
            induced_ab_hom(delta_hom, ab_stab, abR).compose(ver)
        )
    return comp


def _rp_orbit(L: BasicLocality, tw: GroupHom, R: FiniteGroup, model: _CosetModel, z: int) -> set:
    orbit = {z}
    queue = [z]
    gens = [(v, L.P.identity()) for v in (R.generators or (R.identity(),))]
    gens += [(R.identity(), y) for y in (L.P.generators or (L.P.identity(),))]
    while queue:
        c = queue.pop()
        for v, y in gens:
            n = model.left(tw(v), y, c)
            if n not in orbit:
                orbit.add(n)
                queue.append(n)
    return orbit


def _embed_component(comp: AbHom, src: FinAb, tgt: FinAb, off_q: int, off_r: int) -> AbHom:
    cols = []
    for j in range(src.rank):
        col = list(tgt.zero())
        if off_q <= j < off_q + comp.source.rank:
            v = comp(tuple(1 if i == j - off_q else 0 for i in range(comp.source.rank)))
            for i, x in enumerate(v):
                col[off_r + i] = x
        cols.append(tuple(col))
    return AbHom.from_columns(src, tgt, cols)


def basic_locality(F: FusionSystem, variant: int = 0) -> BasicLocality:
    from .bisets import construct_thick_basic

    res = construct_thick_basic(F, variant=variant)
    return BasicLocality(F, res.concrete)
