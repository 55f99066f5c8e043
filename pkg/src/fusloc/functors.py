"""Abelian-coefficient functors on the exterior quotient of a fusion system.

Values are FinAb groups indexed by subgroups of P, morphism classes act
by AbHom matrices.  The kernel functor of a basic locality is filtered
by closed sets of P-conjugacy classes; for a single class U the layer
is computed two ways (slicing kernel matrices, and the cotransfer
formula on orbit representatives of F(Q,U)), and the fixed/cofixed
presentations with their trace isomorphism give the s_m-layer functors
and the compatible complement with its two identities.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ComplementIdentityFailure,
    FunctorialityFailure,
    NotClosed,
    NotMinimal,
    TraceNotIso,
)
from .fusion import (
    ExteriorQuotient,
    FusionMorphismClass,
    FusionSystem,
    exterior_quotient,
)
from .groups import (
    AbHom,
    FinAb,
    FiniteGroup,
    GroupHom,
    abelianization,
    cotransfer,
    direct_product,
    finab_direct_sum,
    induced_ab_hom,
    left_coset_reps,
    normalizer,
    quotient_group,
)
from .lattices import kernel_gens, quotient, subgroup
from .locality import BasicLocality


class AbFunctor:
    """Functor from the exterior quotient to finite abelian groups.

    Contravariant by default: a class of phi: R -> Q is sent to an AbHom
    value(Q) -> value(R).  Values and maps are cached; map() checks the
    endpoints of every produced homomorphism.
    """

    def __init__(self, EQ: ExteriorQuotient, value_fn, map_fn,
                 contravariant: bool = True, name: str = ''):
        self.EQ = EQ
        self.F: FusionSystem = EQ.base
        self.contravariant = contravariant
        self.name = name
        self._value_fn = value_fn
        self._map_fn = map_fn
        self._values: dict[FiniteGroup, FinAb] = {}
        self._maps: dict[FusionMorphismClass, AbHom] = {}

    def value(self, Q: FiniteGroup) -> FinAb:
        got = self._values.get(Q)
        if got is None:
            got = self._value_fn(Q)
            self._values[Q] = got
        return got

    def map(self, cls: FusionMorphismClass) -> AbHom:
        got = self._maps.get(cls)
        if got is None:
            got = self._map_fn(cls)
            R, Q = cls.rep.source, cls.rep.target
            src, tgt = (Q, R) if self.contravariant else (R, Q)
            if got.source != self.value(src) or got.target != self.value(tgt):
                raise FunctorialityFailure(
                    f'{self.name}: map endpoints do not match values at '
                    f'({Q.order},{R.order})')
            self._maps[cls] = got
        return got

    def check_functoriality(self) -> None:
        F, EQ = self.F, self.EQ
        for Q in F.objects:
            ident = self.map(EQ.identity_cls(Q))
            if ident != AbHom.identity(self.value(Q)):
                raise FunctorialityFailure(
                    f'{self.name}: identity at |Q|={Q.order} is not identity')
        for (Q, R), _ in F.hom_table.items():
            for c1 in EQ.classes(Q, R):
                for T in F.objects:
                    for c2 in EQ.classes(R, T):
                        comp = EQ.compose(c1, c2)
                        if self.contravariant:
                            expect = self.map(c2).compose(self.map(c1))
                        else:
                            expect = self.map(c1).compose(self.map(c2))
                        if self.map(comp) != expect:
                            raise FunctorialityFailure(
                                f'{self.name}: composition failure at '
                                f'({Q.order},{R.order},{T.order})')


def kernel_functor(L: BasicLocality) -> AbFunctor:
    """The kernel of the structural projection of L as a functor."""
    EQ = L.EQ
    fun = AbFunctor(
        EQ,
        L.kernel_value,
        lambda cls: L.kernel_action(cls.rep.target, cls.rep.source, cls.rep),
        contravariant=True,
        name='kernel',
    )
    return fun


# -- P-conjugacy classes of subgroups -----------------------------------------


def p_class_rep(P: FiniteGroup, T: FiniteGroup) -> FiniteGroup:
    """Canonical representative of the P-conjugacy class of T."""
    best = None
    for n in P.elements:
        Tn = T.conjugate(n)
        if best is None or Tn.sort_key() < best.sort_key():
            best = Tn
    return best


def p_classes(F: FusionSystem) -> tuple[FiniteGroup, ...]:
    """Class representatives, ascending in a linear extension of
    containment-up-to-conjugacy."""
    reps = {p_class_rep(F.P, T) for T in F.objects}
    return tuple(sorted(reps, key=lambda T: (T.order, T.sort_key())))

def subconjugate(P: FiniteGroup, V: FiniteGroup, T: FiniteGroup) -> bool:
    """Some P-conjugate of V is contained in T."""
    return any(V.conjugate(n).is_subgroup_of(T) for n in P.elements)


def down_closure(F: FusionSystem, members) -> frozenset:
    P = F.P
    reps = {p_class_rep(P, T) for T in members}
    out = set()
    for V in p_classes(F):
        if any(subconjugate(P, V, T) for T in reps):
            out.add(V)
    return frozenset(out)


# -- filtration by closed class sets ------------------------------------------


def _slice_indices(L: BasicLocality, Q: FiniteGroup, reps: frozenset):
    data = L.qdata(Q)
    idx = []
    for ti, t in enumerate(data.types):
        if t.T in reps:
            off = data.offsets[ti]
            idx.extend(range(off, off + data.blocks[t].abn.ab.rank))
    return tuple(idx)


def _slice_value(L: BasicLocality, Q: FiniteGroup, reps: frozenset) -> FinAb:
    full = L.kernel_value(Q)
    return FinAb(tuple(full.orders[i] for i in _slice_indices(L, Q, reps)))


def _slice_map(L: BasicLocality, cls: FusionMorphismClass,
               take: frozenset, allowed: frozenset, name: str) -> AbHom:
    """Restrict a kernel matrix to the take-class rows and columns.

    On the kept columns, rows outside the allowed classes must vanish
    (the subfunctor property for the closure of take); rows in allowed
    but not in take are projected away (the filtration quotient).
    """
    R, Q = cls.rep.source, cls.rep.target
    full = L.kernel_action(Q, R, cls.rep)
    cols = _slice_indices(L, Q, take)
    want_rows = _slice_indices(L, R, take)
    ok = set(_slice_indices(L, R, allowed))
    for j in cols:
        for i in range(full.target.rank):
            if i not in ok and full.matrix[i][j] % full.target.orders[i]:
                raise FunctorialityFailure(
                    f'{name}: image leaks outside the closed class set at '
                    f'({Q.order},{R.order})')
    src = FinAb(tuple(full.source.orders[j] for j in cols))
    tgt = FinAb(tuple(full.target.orders[i] for i in want_rows))
    rows = [[full.matrix[i][j] for j in cols] for i in want_rows]
    return AbHom(src, tgt, rows)


def filtration_subfunctor(L: BasicLocality, members) -> AbFunctor:
    """Subfunctor of the kernel functor over a down-closed set of classes."""
    F = L.F
    reps = frozenset(p_class_rep(F.P, T) for T in members)
    if reps != down_closure(F, reps):
        raise NotClosed('class set is not closed under subconjugacy')
    return AbFunctor(
        L.EQ,
        lambda Q: _slice_value(L, Q, reps),
        lambda cls: _slice_map(L, cls, reps, reps, 'filtration'),
        contravariant=True,
        name='filtration',
    )


def layer_functor(L: BasicLocality, U: FiniteGroup, members=None) -> AbFunctor:
    """Quotient of consecutive filtration terms, supported on one class U."""
    F = L.F
    Urep = p_class_rep(F.P, U)
    if members is None:
        small = down_closure(F, [Urep]) - {Urep}
    else:
        small = frozenset(p_class_rep(F.P, T) for T in members)
        if small != down_closure(F, small):
            raise NotClosed('class set is not closed under subconjugacy')
        if Urep in small:
            raise NotMinimal('U already belongs to the class set')
        if not (down_closure(F, [Urep]) - {Urep}) <= small:
            raise NotMinimal('U is not minimal outside the class set')
    big = small | {Urep}
    only = frozenset({Urep})
    return AbFunctor(
        L.EQ,
        lambda Q: _slice_value(L, Q, only),
        lambda cls: _slice_map(L, cls, only, big, 'layer'),
        contravariant=True,
        name=f'layer|U|={Urep.order}',
    )


# -- the orbit-representative presentation of the U-layer ---------------------


@dataclass(frozen=True)
class EtaComponent:
    """Normalizer-quotient data of one twisted diagonal Delta_eta(U)."""

    eta: GroupHom
    delta: FiniteGroup
    norm: FiniteGroup
    nbar: object
    ab: object

    @property
    def fin(self) -> FinAb:
        return self.ab.ab


class ULayer:
    """The U-layer of the kernel functor on representatives of F(Q,U).

    Carries both presentations: the direct sum over orbit representatives
    (aligned with the kernel summands of the locality), and the full
    product over F(Q,U) with its Q x N_P(U)-action, fixed and cofixed
    subquotients, and the trace map between them.
    """

    def __init__(self, L: BasicLocality, U: FiniteGroup):
        self.L = L
        self.F = L.F
        self.EQ = L.EQ
        self.P = L.F.P
        self.U = p_class_rep(self.P, U)
        self.NPU = normalizer(self.P, self.U)
        self._q: dict[FiniteGroup, dict] = {}
        self._contra: dict[FusionMorphismClass, AbHom] = {}
        self._cov: dict[FusionMorphismClass, AbHom] = {}
        self._fixed: dict[FiniteGroup, object] = {}
        self._cofixed: dict[FiniteGroup, object] = {}
        self._trace: dict[FiniteGroup, AbHom] = {}

    # ---- per-object data

    def _act_eta(self, u, n, eta: GroupHom) -> GroupHom:
        ni = n.inverse()
        ui = u.inverse()
        return GroupHom(self.U, eta.target,
                        {v: u * eta(ni * v * n) * ui for v in self.U.elements})

    def _component(self, Q: FiniteGroup, eta: GroupHom) -> EtaComponent:
        dp = direct_product(Q, self.P)
        delta = dp.group.subgroup_from_set(
            {dp.pair(eta(v), v) for v in self.U.elements})
        norm = normalizer(dp.group, delta)
        nbar = quotient_group(norm, delta)
        return EtaComponent(eta=eta, delta=delta, norm=norm, nbar=nbar,
                            ab=abelianization(nbar.group))

    def qlayer(self, Q: FiniteGroup) -> dict:
        got = self._q.get(Q)
        if got is not None:
            return got
        data = self.L.qdata(Q)
        homs = list(self.F.hom(Q, self.U))
        reps = [t.eta for t in data.types if t.T == self.U]
        comps = {}
        for t in data.types:
            if t.T == self.U:
                blk = data.blocks[t]
                comps[t.eta] = EtaComponent(
                    eta=t.eta, delta=blk.delta, norm=blk.norm,
                    nbar=blk.nbar, ab=blk.abn)
        gens = [(q, self.P.identity()) for q in Q.generators]
        gens += [(Q.identity(), n) for n in self.NPU.generators]
        trans: dict[GroupHom, tuple[int, tuple]] = {}
        for i, eta0 in enumerate(reps):
            if eta0 in trans:
                raise FunctorialityFailure(
                    'orbit representatives are not independent')
            trans[eta0] = (i, (Q.identity(), self.P.identity()))
            queue = [eta0]
            while queue:
                eta = queue.pop()
                _, (u0, n0) = trans[eta]
                for (u, n) in gens:
                    eta2 = self._act_eta(u, n, eta)
                    if eta2 not in trans:
                        trans[eta2] = (i, (u * u0, n * n0))
                        if eta2 not in comps:
                            comps[eta2] = self._component(Q, eta2)
                        queue.append(eta2)
        if set(trans) != set(homs):
            raise FunctorialityFailure(
                'orbit representatives do not cover F(Q,U)')
        value, offsets = (finab_direct_sum([comps[e].fin for e in reps])
                          if reps else (FinAb(()), ()))
        got = {
            'homs': tuple(sorted(homs, key=lambda h: h.sort_key())),
            'reps': tuple(reps),
            'comps': comps,
            'trans': trans,
            'value': value,
            'offsets': tuple(offsets),
        }
        self._q[Q] = got
        return got

    def value(self, Q: FiniteGroup) -> FinAb:
        return self.qlayer(Q)['value']

    def _conj_hom(self, Q: FiniteGroup, u, n,
                  src: EtaComponent, tgt: EtaComponent) -> AbHom:
        """ab of conjugation by (u, n), from src to tgt component."""
        dp = direct_product(Q, self.P)
        g = dp.pair(u, n)
        gi = g.inverse()
        cols = []
        for e in _fin_basis(src.fin):
            w = src.nbar.section(src.ab.section(e))
            w2 = g * w * gi
            cols.append(tgt.ab.project(tgt.nbar.projection(w2)))
        return AbHom.from_columns(src.fin, tgt.fin, cols)

    def _phi_theta(self, phi: GroupHom, src: EtaComponent,
                   tgt: EtaComponent) -> GroupHom:
        """Hom of normalizer quotients induced by phi x id."""
        Q = phi.target
        dpR = direct_product(phi.source, self.P)
        dpQ = direct_product(Q, self.P)
        images = {}
        for x in src.nbar.group.elements:
            v, y = dpR.unpair(src.nbar.section(x))
            images[x] = tgt.nbar.projection(dpQ.pair(phi(v), y))
        return GroupHom(src.nbar.group, tgt.nbar.group, images)

    # ---- functor maps on representatives

    def contra_map(self, cls: FusionMorphismClass) -> AbHom:
        got = self._contra.get(cls)
        if got is not None:
            return got
        phi = cls.rep
        R, Q = phi.source, phi.target
        qla, rla = self.qlayer(Q), self.qlayer(R)
        src, tgt = qla['value'], rla['value']
        rows = [[0] * src.rank for _ in range(tgt.rank)]
        for j, theta in enumerate(rla['reps']):
            psi = phi.compose(theta)
            i, (u, n) = qla['trans'][psi]
            comp_theta = rla['comps'][theta]
            comp_psi = qla['comps'][psi]
            comp_rep = qla['comps'][qla['reps'][i]]
            block = cotransfer(
                self._phi_theta(phi, comp_theta, comp_psi)
            ).compose(self._conj_hom(Q, u, n, comp_rep, comp_psi))
            _insert_block(rows, block, rla['offsets'][j], qla['offsets'][i])
        got = AbHom(src, tgt, rows)
        self._contra[cls] = got
        return got

    def cov_map(self, cls: FusionMorphismClass) -> AbHom:
        got = self._cov.get(cls)
        if got is not None:
            return got
        phi = cls.rep
        R, Q = phi.source, phi.target
        qla, rla = self.qlayer(Q), self.qlayer(R)
        src, tgt = rla['value'], qla['value']
        rows = [[0] * src.rank for _ in range(tgt.rank)]
        for j, theta in enumerate(rla['reps']):
            psi = phi.compose(theta)
            i, (u, n) = qla['trans'][psi]
            comp_theta = rla['comps'][theta]
            comp_psi = qla['comps'][psi]
            comp_rep = qla['comps'][qla['reps'][i]]
            up = induced_ab_hom(self._phi_theta(phi, comp_theta, comp_psi),
                                comp_theta.ab, comp_psi.ab)
            block = self._conj_hom(Q, u, n, comp_rep, comp_psi).inverse()
            _insert_block(rows, block.compose(up),
                          qla['offsets'][i], rla['offsets'][j])
        got = AbHom(src, tgt, rows)
        self._cov[cls] = got
        return got

    def contravariant_functor(self) -> AbFunctor:
        return AbFunctor(self.EQ, self.value, self.contra_map,
                         contravariant=True, name=f'h^o|U|={self.U.order}')

    def covariant_functor(self) -> AbFunctor:
        return AbFunctor(self.EQ, self.value, self.cov_map,
                         contravariant=False, name=f'h_o|U|={self.U.order}')

    # ---- the full product over F(Q,U) with its action

    def big_value(self, Q: FiniteGroup):
        qla = self.qlayer(Q)
        homs = qla['homs']
        fins = [qla['comps'][e].fin for e in homs]
        big, offs = finab_direct_sum(fins) if homs else (FinAb(()), ())
        return big, tuple(offs), homs

    def big_action(self, Q: FiniteGroup, u, n) -> AbHom:
        big, offs, homs = self.big_value(Q)
        qla = self.qlayer(Q)
        pos = {e: k for k, e in enumerate(homs)}
        rows = [[0] * big.rank for _ in range(big.rank)]
        for k, eta in enumerate(homs):
            eta2 = self._act_eta(u, n, eta)
            block = self._conj_hom(Q, u, n, qla['comps'][eta],
                                   qla['comps'][eta2])
            _insert_block(rows, block, offs[pos[eta2]], offs[k])
        return AbHom(big, big, rows)

    def _action_gens(self, Q: FiniteGroup):
        gens = [(q, self.P.identity()) for q in Q.generators]
        gens += [(Q.identity(), n) for n in self.NPU.generators]
        return gens

    def fixed(self, Q: FiniteGroup):
        got = self._fixed.get(Q)
        if got is not None:
            return got
        got = self._fixed_uncached(Q)
        self._fixed[Q] = got
        return got

    def _fixed_uncached(self, Q: FiniteGroup):
        big, _, _ = self.big_value(Q)
        gens = []
        for (u, n) in self._action_gens(Q):
            act = self.big_action(Q, u, n)
            diff = act.sub(AbHom.identity(big))
            gens.append(diff)
        if not gens:
            return subgroup(big, _fin_basis(big))
        stacked_tgt, offs = finab_direct_sum([big] * len(gens))
        cols = []
        for e in _fin_basis(big):
            col = []
            for d in gens:
                col.extend(d(e))
            cols.append(tuple(col))
        stacked = AbHom.from_columns(big, stacked_tgt, cols)
        return subgroup(big, kernel_gens(stacked))

    def cofixed(self, Q: FiniteGroup):
        got = self._cofixed.get(Q)
        if got is not None:
            return got
        got = self._cofixed_uncached(Q)
        self._cofixed[Q] = got
        return got

    def _cofixed_uncached(self, Q: FiniteGroup):
        big, _, _ = self.big_value(Q)
        gens = []
        for (u, n) in self._action_gens(Q):
            act = self.big_action(Q, u, n)
            diff = act.sub(AbHom.identity(big))
            for e in _fin_basis(big):
                gens.append(diff(e))
        return quotient(big, gens)

    def trace_big(self, Q: FiniteGroup) -> AbHom:
        """£-less form of the relative trace: sum of the action over cosets
        of each component stabilizer, one column block per component."""
        big, offs, homs = self.big_value(Q)
        qla = self.qlayer(Q)
        pos = {e: k for k, e in enumerate(homs)}
        dp = direct_product(Q, self.P)
        if self.NPU == self.P:
            qn = dp.group
        else:
            qn = dp.group.subgroup_from_set(
                {dp.pair(u, n) for u in Q.elements for n in self.NPU.elements})
        rows = [[0] * big.rank for _ in range(big.rank)]
        for k, eta in enumerate(homs):
            comp = qla['comps'][eta]
            for g in left_coset_reps(qn, comp.norm)[0]:
                u, n = dp.unpair(g)
                eta2 = self._act_eta(u, n, eta)
                block = self._conj_hom(Q, u, n, comp, qla['comps'][eta2])
                _insert_block(rows, block, offs[pos[eta2]], offs[k],
                              accumulate=True)
        return AbHom(big, big, rows)

    def rep_to_fixed(self, Q: FiniteGroup) -> AbHom:
        """Spread a representative vector over its orbit; lands in fixed."""
        big, offs, homs = self.big_value(Q)
        qla = self.qlayer(Q)
        fix = self.fixed(Q)
        pos = {e: k for k, e in enumerate(homs)}
        cols = []
        for i, eta0 in enumerate(qla['reps']):
            comp0 = qla['comps'][eta0]
            for e in _fin_basis(comp0.fin):
                vec = [0] * big.rank
                for eta, (ii, (u, n)) in qla['trans'].items():
                    if ii != i:
                        continue
                    img = self._conj_hom(Q, u, n, comp0, qla['comps'][eta])(e)
                    off = offs[pos[eta]]
                    for a, x in enumerate(img):
                        vec[off + a] = (vec[off + a] + x)
                try:
                    cols.append(fix.project(big.reduce(vec)))
                except ValueError:
                    raise TraceNotIso('spread vector is not a fixed point')
        out = AbHom.from_columns(self.value(Q), fix.group, cols)
        if not out.is_iso():
            raise TraceNotIso('representatives do not present the fixed points')
        return out

    def rep_to_cofixed(self, Q: FiniteGroup) -> AbHom:
        big, offs, homs = self.big_value(Q)
        qla = self.qlayer(Q)
        cof = self.cofixed(Q)
        pos = {e: k for k, e in enumerate(homs)}
        cols = []
        for i, eta0 in enumerate(qla['reps']):
            comp0 = qla['comps'][eta0]
            off = offs[pos[eta0]]
            for e in _fin_basis(comp0.fin):
                vec = [0] * big.rank
                for a, x in enumerate(e):
                    vec[off + a] = x
                cols.append(cof.project(big.reduce(vec)))
        out = AbHom.from_columns(self.value(Q), cof.group, cols)
        if not out.is_iso():
            raise TraceNotIso(
                'representatives do not present the cofixed quotient')
        return out

    def trace_rep(self, Q: FiniteGroup) -> AbHom:
        got = self._trace.get(Q)
        if got is not None:
            return got
        got = self._trace_uncached(Q)
        self._trace[Q] = got
        return got

    def _trace_uncached(self, Q: FiniteGroup) -> AbHom:
        """The trace as a map of the representative presentation."""
        big, _, _ = self.big_value(Q)
        fix = self.fixed(Q)
        cof = self.cofixed(Q)
        tr = self.trace_big(Q)
        cols = []
        for e in _fin_basis(cof.group):
            w = tr(cof.lift(e))
            try:
                cols.append(fix.project(w))
            except ValueError:
                raise TraceNotIso('trace image is not a fixed point')
        induced = AbHom.from_columns(cof.group, fix.group, cols)
        out = self.rep_to_fixed(Q).inverse().compose(induced).compose(
            self.rep_to_cofixed(Q))
        if not out.is_iso():
            raise TraceNotIso('trace is not bijective')
        return out

    def big_contra_map(self, cls: FusionMorphismClass) -> AbHom:
        phi = cls.rep
        R, Q = phi.source, phi.target
        qla, rla = self.qlayer(Q), self.qlayer(R)
        bigQ, offQ, homsQ = self.big_value(Q)
        bigR, offR, homsR = self.big_value(R)
        posQ = {e: k for k, e in enumerate(homsQ)}
        rows = [[0] * bigQ.rank for _ in range(bigR.rank)]
        for j, theta in enumerate(homsR):
            psi = phi.compose(theta)
            block = cotransfer(self._phi_theta(
                phi, rla['comps'][theta], qla['comps'][psi]))
            _insert_block(rows, block, offR[j], offQ[posQ[psi]])
        return AbHom(bigQ, bigR, rows)

    def big_cov_map(self, cls: FusionMorphismClass) -> AbHom:
        phi = cls.rep
        R, Q = phi.source, phi.target
        qla, rla = self.qlayer(Q), self.qlayer(R)
        bigQ, offQ, homsQ = self.big_value(Q)
        bigR, offR, homsR = self.big_value(R)
        posQ = {e: k for k, e in enumerate(homsQ)}
        rows = [[0] * bigR.rank for _ in range(bigQ.rank)]
        for j, theta in enumerate(homsR):
            psi = phi.compose(theta)
            block = induced_ab_hom(
                self._phi_theta(phi, rla['comps'][theta], qla['comps'][psi]),
                rla['comps'][theta].ab, qla['comps'][psi].ab)
            _insert_block(rows, block, offQ[posQ[psi]], offR[j])
        return AbHom(bigR, bigQ, rows)


def _fin_basis(A: FinAb):
    return [tuple(int(i == j) for j in range(A.rank)) for i in range(A.rank)]


def _insert_block(rows, block: AbHom, row_off: int, col_off: int,
                  accumulate: bool = False):
    for a in range(block.target.rank):
        for b in range(block.source.rank):
            if accumulate:
                rows[row_off + a][col_off + b] += block.matrix[a][b]
            else:
                rows[row_off + a][col_off + b] = block.matrix[a][b]


# -- s_m layers and the compatible complement ---------------------------------


def s_indices(A: FinAb, p: int, m: int) -> tuple[int, ...]:
    return tuple(i for i, d in enumerate(A.orders) if d > p ** m)


def s_value(A: FinAb, p: int, m: int) -> FinAb:
    return FinAb((p,) * len(s_indices(A, p, m)))


def s_map(h: AbHom, p: int, m: int) -> AbHom:
    src = s_indices(h.source, p, m)
    tgt = s_indices(h.target, p, m)
    rows = [[h.matrix[i][j] % p for j in src] for i in tgt]
    return AbHom(s_value(h.source, p, m), s_value(h.target, p, m), rows)


def s_functor(base: AbFunctor, p: int, m: int) -> AbFunctor:
    return AbFunctor(
        base.EQ,
        lambda Q: s_value(base.value(Q), p, m),
        lambda cls: s_map(base.map(cls), p, m),
        contravariant=base.contravariant,
        name=f's_{m}({base.name})',
    )


def r_functors(layer: ULayer, m: int) -> tuple[AbFunctor, AbFunctor]:
    """The s_m layers of the fixed and cofixed U-layer presentations."""
    p = layer.F.p
    return (s_functor(layer.contravariant_functor(), p, m),
            s_functor(layer.covariant_functor(), p, m))


def compatible_complement(layer: ULayer, m: int) -> AbFunctor:
    """Covariant partner of the s_m layer, conjugated through the trace."""
    p = layer.F.p
    cov = layer.covariant_functor()

    def cmap(cls: FusionMorphismClass) -> AbHom:
        R, Q = cls.rep.source, cls.rep.target
        trQ = s_map(layer.trace_rep(Q), p, m)
        trR = s_map(layer.trace_rep(R), p, m)
        return trQ.compose(s_map(cov.map(cls), p, m)).compose(trR.inverse())

    return AbFunctor(
        layer.EQ,
        lambda Q: s_value(layer.value(Q), p, m),
        cmap,
        contravariant=False,
        name=f'complement_{m}|U|={layer.U.order}',
    )


def _double_coset_reps(Q: FiniteGroup, A: FiniteGroup, B: FiniteGroup):
    seen = set()
    reps = []
    for w in Q.elements:
        if w in seen:
            continue
        orbit = {a * w * b for a in A.elements for b in B.elements}
        seen |= orbit
        reps.append(min(orbit))
    return reps


def mackey_terms(F: FusionSystem, phi: GroupHom, psi: GroupHom):
    """Double-coset data for a pair of morphisms into the same target.

    Yields (phi_w, psi_w) with phi(phi_w(u)) = w u w^{-1} and
    psi(psi_w(u)) = u on S_w = phi(R)^w cap psi(T).
    """
    Q = phi.target
    phiR = phi.image()
    psiT = psi.image()
    phi_inv = {phi(v): v for v in phi.source.elements}
    psi_inv = {psi(v): v for v in psi.source.elements}
    for w in _double_coset_reps(Q, phiR, psiT):
        wi = w.inverse()
        members = {u for u in psiT.elements if (w * u * wi) in phi_inv}
        Sw = F.P.subgroup_from_set(members)
        phi_w = GroupHom(Sw, phi.source,
                         {u: phi_inv[w * u * wi] for u in Sw.elements})
        psi_w = GroupHom(Sw, psi.source,
                         {u: psi_inv[u] for u in Sw.elements})
        yield phi_w, psi_w


def check_complement_identities(layer: ULayer, m: int) -> int:
    """Verify annihilation and the double-coset identity for every class.

    Annihilation applies to non-isomorphism classes; on isomorphisms the
    complement inverts the restriction instead.  Returns the number of
    identities checked.
    """
    F, EQ = layer.F, layer.EQ
    p = F.p
    contra, _ = r_functors(layer, m)
    comp = compatible_complement(layer, m)
    checked = 0
    for (Q, R), _homs in F.hom_table.items():
        for cls in EQ.classes(Q, R):
            if R.order == Q.order:
                continue
            out = comp.map(cls).compose(contra.map(cls))
            if not out.is_zero():
                raise ComplementIdentityFailure(
                    f'annihilation fails at ({Q.order},{R.order}), '
                    f'|U|={layer.U.order}, m={m}')
            checked += 1
    for Q in F.objects:
        pairs = [(cls1, cls2)
                 for R in F.objects for cls1 in EQ.classes(Q, R)
                 for T in F.objects for cls2 in EQ.classes(Q, T)]
        for cls_phi, cls_psi in pairs:
            phi, psi = cls_phi.rep, cls_psi.rep
            lhs = contra.map(cls_psi).compose(comp.map(cls_phi))
            rhs = AbHom.zero(lhs.source, lhs.target)
            for phi_w, psi_w in mackey_terms(F, phi, psi):
                c1 = EQ.cls(phi_w)
                c2 = EQ.cls(psi_w)
                rhs = rhs.add(comp.map(c2).compose(contra.map(c1)))
            if lhs != rhs:
                raise ComplementIdentityFailure(
                    f'double-coset identity fails at ({Q.order},'
                    f'{phi.source.order},{psi.source.order}), '
                    f'|U|={layer.U.order}, m={m}')
            checked += 1
    return checked
