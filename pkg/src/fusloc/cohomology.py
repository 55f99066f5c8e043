"""Stable cochain complexes over the exterior quotient, with exact solvers.

An n-chain is a composable tuple of morphism classes q(0) -> ... -> q(n);
0-chains are plain objects.  A cochain assigns to every n-chain a value in
M(q(0)) for a contravariant coefficient functor M, and the differential
follows the alternating face pattern

    (dc)(f_1, ..., f_{n+1}) = M(f_1)(c(f_2, ..., f_{n+1}))
        + sum_{i=1..n} (-1)^i c(..., f_{i+1} o f_i, ...)
        + (-1)^{n+1} c(f_1, ..., f_n).

A cochain is stable when c(nu . q) = M(nu_0^{-1})(c(q)) for every natural
isomorphism nu of chains whose components lie in a chosen class of
isomorphisms.  The stable complex is realized on one representative chain
per isomorphism class; the value group at a representative is the subgroup
fixed by its chain automorphisms, and values elsewhere are transported.
"""

from collections import deque
from dataclasses import dataclass

from .errors import CocycleNotClosed, FunctorialityFailure, NoSolution
from .functors import AbFunctor
from .fusion import ExteriorQuotient
from .groups import AbHom, FinAb, conjugation_hom, finab_direct_sum
from .intlin import smith_solve
from .lattices import SubQuot, image_gens, kernel_gens, subgroup, subquotient


def inner_classes(EQ: ExteriorQuotient, Q, R):
    """Classes of conjugation maps R -> Q induced by elements of P."""
    P = EQ.base.P
    out = []
    seen = set()
    for u in P.elements:
        if not all((u * x * u.inverse()) in Q for x in R.elements):
            continue
        c = EQ.cls(conjugation_hom(Q, u, R))
        if c not in seen:
            seen.add(c)
            out.append(c)
    return tuple(sorted(out))


class ChainSpace:
    """Chains of morphism classes plus their isomorphism-orbit bookkeeping.

    category picks the edges: 'full' uses every class of the exterior
    quotient, 'inner' only classes of P-conjugation maps.  stability picks
    the isomorphisms used to transport chains and must lie inside the
    category.  reverse flips the canonical scan order used to choose orbit
    representatives (the cohomology must not depend on it).  With
    normalized=True every orbit that meets a chain with an identity edge is
    marked degenerate; stable cochains are pinned to zero there.
    """

    def __init__(self, EQ: ExteriorQuotient, category: str = 'full',
                 stability: str = 'full', normalized: bool = False,
                 reverse: bool = False):
        if category not in ('full', 'inner'):
            raise ValueError("category must be 'full' or 'inner'")
        if stability not in ('full', 'inner'):
            raise ValueError("stability must be 'full' or 'inner'")
        if category == 'inner' and stability == 'full':
            raise ValueError('stability isomorphisms must lie in the category')
        self.EQ = EQ
        self.F = EQ.base
        self.category = category
        self.stability = stability
        self.normalized = normalized
        self.reverse = reverse
        objs = sorted(set(self.F.objects),
                      key=lambda Q: (Q.order, Q.sort_key()))
        self.objects = tuple(objs)
        self._idcls = {Q: EQ.identity_cls(Q) for Q in objs}
        self._edges = {}
        self._iso_out = {}
        self._auts = {}
        self._inv = {}
        for R in objs:
            edges = []
            for Q in objs:
                if category == 'full':
                    cs = EQ.classes(Q, R)
                else:
                    cs = inner_classes(EQ, Q, R)
                edges.extend(cs)
                if Q.order == R.order:
                    if stability == 'full':
                        isos = [c for c in EQ.classes(Q, R)
                                if c.rep.is_bijective()]
                    else:
                        isos = [c for c in inner_classes(EQ, Q, R)
                                if c.rep.is_bijective()]
                    for c in isos:
                        self._iso_out.setdefault(R, []).append(c)
                        self._inv[c] = EQ.cls(c.rep.inverse())
                        if Q is R:
                            self._auts.setdefault(R, []).append(c)
            self._edges[R] = tuple(sorted(edges))
        for R in objs:
            self._iso_out[R] = tuple(sorted(self._iso_out.get(R, ())))
            self._auts[R] = tuple(sorted(self._auts.get(R, ())))
        self._chains = {}
        self._orbits = {}
        self._autos = {}

    # -- chain enumeration ----------------------------------------------

    def source(self, n: int, chain):
        return chain if n == 0 else chain[0].source

    def chains(self, n: int):
        got = self._chains.get(n)
        if got is not None:
            return got
        if n == 0:
            out = self.objects
        elif n == 1:
            out = tuple((c,) for R in self.objects for c in self._edges[R])
        else:
            out = tuple(ch + (c,) for ch in self.chains(n - 1)
                        for c in self._edges[ch[-1].target])
        self._chains[n] = out
        return out

    def is_degenerate(self, n: int, chain) -> bool:
        if n == 0:
            return False
        return any(f is self._idcls[f.source] for f in chain)

    # -- orbits under chain isomorphisms --------------------------------

    def _neighbors(self, n: int, chain):
        """Single-position transports; yields (new chain, 0-component or None)."""
        if n == 0:
            for v in self._iso_out[chain]:
                yield v.target, v
            return
        EQ = self.EQ
        for v in self._iso_out[chain[0].source]:
            yield (EQ.compose(chain[0], self._inv[v]),) + chain[1:], v
        for i in range(1, n):
            for v in self._iso_out[chain[i].source]:
                yield (chain[:i - 1]
                       + (EQ.compose(v, chain[i - 1]),
                          EQ.compose(chain[i], self._inv[v]))
                       + chain[i + 1:]), None
        for v in self._iso_out[chain[n - 1].target]:
            yield chain[:n - 1] + (EQ.compose(v, chain[n - 1]),), None

    def orbits(self, n: int):
        """(representatives, chain -> (rep index, nu0), degenerate indices)."""
        got = self._orbits.get(n)
        if got is not None:
            return got
        EQ = self.EQ
        scan = self.chains(n)
        if self.reverse:
            scan = tuple(reversed(scan))
        reps = []
        assign = {}
        for seed in scan:
            if seed in assign:
                continue
            idx = len(reps)
            reps.append(seed)
            assign[seed] = (idx, self._idcls[self.source(n, seed)])
            queue = deque([seed])
            while queue:
                ch = queue.popleft()
                _, nu0 = assign[ch]
                for nch, v in self._neighbors(n, ch):
                    if nch in assign:
                        continue
                    assign[nch] = (idx, EQ.compose(v, nu0) if v else nu0)
                    queue.append(nch)
        dead = frozenset(assign[ch][0] for ch in self.chains(n)
                         if self.normalized and self.is_degenerate(n, ch))
        got = (tuple(reps), assign, dead)
        self._orbits[n] = got
        return got

    def autos(self, n: int, chain):
        """0-components of chain automorphisms in the stability class."""
        key = (n, chain)
        got = self._autos.get(key)
        if got is not None:
            return got
        if n == 0:
            out = self._auts[chain]
        else:
            EQ = self.EQ
            found = set()

            def grow(i, prev, nu0):
                if i > n:
                    found.add(nu0)
                    return
                f = chain[i - 1]
                lhs = EQ.compose(f, prev)
                for cand in self._auts[f.target]:
                    if EQ.compose(cand, f) == lhs:
                        grow(i + 1, cand, nu0)

            for nu0 in self._auts[chain[0].source]:
                grow(1, nu0, nu0)
            out = tuple(sorted(found))
        self._autos[key] = out
        return out

    def check_transports(self, n: int) -> int:
        """Every stored transport maps its representative onto the chain."""
        reps, assign, _ = self.orbits(n)
        count = 0
        for ch, (idx, nu0) in assign.items():
            Q = self.source(n, ch)
            if nu0.target != Q or nu0.source != self.source(n, reps[idx]):
                raise FunctorialityFailure('transport endpoints are wrong')
            back = self._inv.get(nu0)
            if back is None:
                back = self.EQ.cls(nu0.rep.inverse())
            if self.EQ.compose(nu0, back) != self._idcls[Q]:
                raise FunctorialityFailure('transport inverse fails')
            count += 1
        return count


@dataclass(frozen=True)
class _Entry:
    chain: object
    fix: SubQuot
    offset: int


class StableComplex:
    """Stable cochains of a coefficient functor on a chain space.

    Cochains of degree n are vectors over the direct sum, across orbit
    representatives, of the subgroups fixed by the representative's chain
    automorphisms.  The differential is assembled sparsely by columns.
    """

    def __init__(self, space: ChainSpace, coeff: AbFunctor):
        if not coeff.contravariant:
            raise ValueError('coefficients must be contravariant')
        self.space = space
        self.coeff = coeff
        self._entries = {}
        self._totals = {}
        self._cols = {}
        self._dims = {}

    # -- stable value groups --------------------------------------------

    def entries(self, n: int):
        got = self._entries.get(n)
        if got is not None:
            return got
        sp, M = self.space, self.coeff
        reps, _, dead = sp.orbits(n)
        out = []
        off = 0
        for idx, ch in enumerate(reps):
            A = M.value(sp.source(n, ch))
            if idx in dead or A.rank == 0:
                fix = subgroup(A, ())
            else:
                auts = [a for a in sp.autos(n, ch)
                        if a is not sp._idcls[sp.source(n, ch)]]
                if not auts:
                    fix = subgroup(A, _std_basis(A))
                else:
                    rows = []
                    parts = []
                    for a in auts:
                        h = M.map(_inverse_cls(sp, a)).sub(AbHom.identity(A))
                        rows.extend(h.matrix)
                        parts.append(A)
                    big, _ = finab_direct_sum(parts)
                    fix = subgroup(A, kernel_gens(AbHom(A, big, rows)))
            out.append(_Entry(ch, fix, off))
            off += fix.group.rank
        got = (tuple(out), off)
        self._entries[n] = got
        return got

    def dim(self, n: int) -> int:
        return self.entries(n)[1]

    def total(self, n: int) -> FinAb:
        got = self._totals.get(n)
        if got is None:
            ents, _ = self.entries(n)
            orders = []
            for e in ents:
                orders.extend(e.fix.group.orders)
            got = FinAb(tuple(orders))
            self._totals[n] = got
        return got

    # -- evaluation and assembly ----------------------------------------

    def evaluate(self, n: int, vec, chain):
        """Value of the stable cochain vec at an arbitrary n-chain."""
        sp, M = self.space, self.coeff
        reps, assign, _ = sp.orbits(n)
        idx, nu0 = assign[chain]
        ents, _ = self.entries(n)
        e = ents[idx]
        A = M.value(sp.source(n, e.chain))
        if e.fix.group.rank == 0:
            return M.value(sp.source(n, chain)).zero()
        part = tuple(vec[e.offset + i] for i in range(e.fix.group.rank))
        v = e.fix.lift(part)
        return M.map(_inverse_cls(sp, nu0))(v)

    def assemble(self, n: int, value_at, check_orbits: bool = False):
        """Build the coordinate vector of a stable cochain from raw values.

        value_at(chain) must return an element of M(q(0)); values at the
        orbit representatives are projected onto the fixed subgroups and,
        with check_orbits, every other chain is compared against the
        transported representative value.
        """
        sp, M = self.space, self.coeff
        reps, assign, dead = sp.orbits(n)
        ents, total = self.entries(n)
        vec = [0] * total
        for e in ents:
            if e.fix.group.rank == 0:
                continue
            v = M.value(sp.source(n, e.chain)).reduce(value_at(e.chain))
            if not e.fix.contains(v):
                raise FunctorialityFailure(
                    'value at a representative is not fixed by its chain '
                    'automorphisms')
            part = e.fix.project(v)
            for i, x in enumerate(part):
                vec[e.offset + i] = x
        vec = tuple(vec)
        if check_orbits:
            for ch in sp.chains(n):
                A = M.value(sp.source(n, ch))
                got = A.reduce(value_at(ch))
                if got != self.evaluate(n, vec, ch):
                    raise FunctorialityFailure(
                        'values are not stable along the orbit')
        return vec

    # -- differential ----------------------------------------------------

    def _faces(self, k: int, y):
        """Faces of the k-chain y as (sign, (k-1)-chain, outer map or None)."""
        sp, M = self.space, self.coeff
        EQ = sp.EQ
        if k == 1:
            yield 1, y[0].target, M.map(y[0])
            yield -1, y[0].source, None
            return
        yield 1, y[1:], M.map(y[0])
        s = 1
        for i in range(1, k):
            s = -s
            yield s, (y[:i - 1] + (EQ.compose(y[i], y[i - 1]),) + y[i + 1:]), None
        yield -s, y[:k - 1], None

    def d_columns(self, n: int):
        """Sparse columns of d_n: list over source coordinates of
        ((row, value), ...) entries in the degree n+1 coordinates."""
        got = self._cols.get(n)
        if got is not None:
            return got
        sp, M = self.space, self.coeff
        src_ents, src_dim = self.entries(n)
        tgt_ents, tgt_dim = self.entries(n + 1)
        _, assign, _ = sp.orbits(n)
        cols = [[] for _ in range(src_dim)]
        for e in tgt_ents:
            if e.fix.group.rank == 0:
                continue
            Ay = M.value(sp.source(n + 1, e.chain))
            touched = {}
            for sign, z, outer in self._faces(n + 1, e.chain):
                idx, nu0 = assign[z]
                ex = src_ents[idx]
                if ex.fix.group.rank == 0:
                    continue
                block = M.map(_inverse_cls(sp, nu0)).compose(ex.fix.inject_hom())
                if outer is not None:
                    block = outer.compose(block)
                for j in range(ex.fix.group.rank):
                    col = touched.setdefault(ex.offset + j, [0] * Ay.rank)
                    for i in range(Ay.rank):
                        col[i] += sign * block.matrix[i][j]
            for j, col in sorted(touched.items()):
                v = Ay.reduce(col)
                if all(x == 0 for x in v):
                    continue
                if not e.fix.contains(v):
                    raise FunctorialityFailure(
                        'differential leaves the stable subspace')
                w = e.fix.project(v)
                for i, x in enumerate(w):
                    if x:
                        cols[j].append((e.offset + i, x))
        got = tuple(tuple(c) for c in cols)
        self._cols[n] = got
        return got

    def d_hom(self, n: int) -> AbHom:
        """The differential d_n as a dense homomorphism."""
        cols = self.d_columns(n)
        src, tgt = self.total(n), self.total(n + 1)
        rows = [[0] * src.rank for _ in range(tgt.rank)]
        for j, col in enumerate(cols):
            for i, x in col:
                rows[i][j] = x
        return AbHom(src, tgt, rows)

    def apply_d(self, n: int, vec):
        """d_n applied to a coordinate vector of degree n."""
        cols = self.d_columns(n)
        tgt = self.total(n + 1)
        out = [0] * tgt.rank
        for j, x in enumerate(vec):
            if x:
                for i, a in cols[j]:
                    out[i] += x * a
        return tgt.reduce(out)

    def is_cocycle(self, n: int, vec) -> bool:
        return all(x == 0 for x in self.apply_d(n, vec))

    # -- cohomology -------------------------------------------------------

    def _elementary_prime(self, *degrees):
        """The single prime q when every involved space is a GF(q) space."""
        seen = set()
        for n in degrees:
            seen.update(self.total(n).orders)
        if len(seen) != 1:
            return None
        q = seen.pop()
        for r in range(2, int(q ** 0.5) + 1):
            if q % r == 0:
                return None
        return q

    def cohomology(self, n: int) -> FinAb:
        """H^n of the stable complex as a finite abelian group."""
        degrees = (n, n + 1) if n == 0 else (n - 1, n, n + 1)
        q = self._elementary_prime(*degrees)
        if q is not None:
            out_rank = _mod_p_rank(self.d_columns(n), q)
            in_rank = 0 if n == 0 else _mod_p_rank(self.d_columns(n - 1), q)
            return FinAb((q,) * (self.dim(n) - out_rank - in_rank))
        top = kernel_gens(self.d_hom(n))
        bottom = () if n == 0 else image_gens(self.d_hom(n - 1))
        return subquotient(self.total(n), top, bottom).group

    def solve_coboundary(self, n: int, target):
        """A degree n-1 cochain x with d(x) = target; target must be a cocycle."""
        if n < 1:
            raise ValueError('need n >= 1')
        tgt = self.total(n)
        target = tgt.reduce(target)
        if not self.is_cocycle(n, target):
            raise CocycleNotClosed('coboundary target is not a cocycle')
        if all(x == 0 for x in target):
            return (0,) * self.dim(n - 1)
        q = self._elementary_prime(n - 1, n)
        cols = self.d_columns(n - 1)
        if q:
            sol = _mod_p_solve(cols, self.dim(n), target, q)
            if sol is None:
                raise NoSolution('cocycle is not a coboundary')
            return tuple(sol)
        h = self.d_hom(n - 1)
        rows = [list(r) for r in h.matrix]
        return tuple(smith_solve(rows, list(target), list(tgt.orders)))

    def certificate(self, n: int) -> dict:
        """Summary of the degree n computation for reporting."""
        H = self.cohomology(n)
        degrees = (n, n + 1) if n == 0 else (n - 1, n, n + 1)
        q = self._elementary_prime(*degrees)
        ranks = {}
        if q is not None:
            ranks['d_out'] = _mod_p_rank(self.d_columns(n), q)
            if n:
                ranks['d_in'] = _mod_p_rank(self.d_columns(n - 1), q)
        return {
            'category': self.space.category,
            'stability': self.space.stability,
            'normalized': self.space.normalized,
            'coefficients': self.coeff.name,
            'degree': n,
            'dims': [self.dim(n), self.dim(n + 1)],
            'invariant_factors': list(H.invariant_factors()),
            'ranks': ranks,
        }


# -- helpers ---------------------------------------------------------------


def _std_basis(A: FinAb):
    return [tuple(int(i == j) for j in range(A.rank)) for i in range(A.rank)]


def _inverse_cls(sp: ChainSpace, c):
    got = sp._inv.get(c)
    if got is None:
        got = sp.EQ.cls(c.rep.inverse())
        sp._inv[c] = got
    return got


def _mod_p_rank(cols, q) -> int:
    """Rank over GF(q) of the sparse column family."""
    if q == 2:
        pivots = {}
        rank = 0
        for col in cols:
            v = 0
            for i, x in col:
                if x & 1:
                    v ^= 1 << i
            while v:
                b = v.bit_length() - 1
                piv = pivots.get(b)
                if piv is None:
                    pivots[b] = v
                    rank += 1
                    break
                v ^= piv
        return rank
    pivots = {}
    rank = 0
    for col in cols:
        vec = {}
        for i, x in col:
            x %= q
            if x:
                vec[i] = x
        while vec:
            b = max(vec)
            piv = pivots.get(b)
            if piv is None:
                inv = pow(vec[b], -1, q)
                pivots[b] = {i: (x * inv) % q for i, x in vec.items()}
                rank += 1
                break
            c = vec[b]
            for i, x in piv.items():
                r = (vec.get(i, 0) - c * x) % q
                if r:
                    vec[i] = r
                else:
                    vec.pop(i, None)
    return rank


def _mod_p_solve(cols, tgt_dim, target, q):
    """Deterministic solution of (cols) x = target over GF(q), or None."""
    n = len(cols)
    if q == 2:
        pivots = {}
        for j, col in enumerate(cols):
            v = 0
            for i, x in col:
                if x & 1:
                    v ^= 1 << (i + n)
            v |= 1 << j
            while v >> n:
                b = (v >> n).bit_length() - 1
                piv = pivots.get(b)
                if piv is None:
                    pivots[b] = v
                    break
                v ^= piv
        t = 0
        for i, x in enumerate(target):
            if x & 1:
                t ^= 1 << (i + n)
        while t >> n:
            b = (t >> n).bit_length() - 1
            piv = pivots.get(b)
            if piv is None:
                return None
            t ^= piv
        return [(t >> j) & 1 for j in range(n)]
    pivots = {}
    for j, col in enumerate(cols):
        vec = {}
        for i, x in col:
            x %= q
            if x:
                vec[i + n] = x
        vec[j] = 1
        while any(k >= n for k in vec):
            b = max(k for k in vec if k >= n)
            piv = pivots.get(b)
            if piv is None:
                inv = pow(vec[b], -1, q)
                pivots[b] = {k: (x * inv) % q for k, x in vec.items()}
                break
            c = vec[b]
            for k, x in piv.items():
                r = (vec.get(k, 0) - c * x) % q
                if r:
                    vec[k] = r
                else:
                    vec.pop(k, None)
    t = {}
    for i, x in enumerate(target):
        x %= q
        if x:
            t[i + n] = x
    while any(k >= n for k in t):
        b = max(k for k in t if k >= n)
        piv = pivots.get(b)
        if piv is None:
            return None
        c = t[b]
        for k, x in piv.items():
            r = (t.get(k, 0) - c * x) % q
            if r:
                t[k] = r
            else:
                t.pop(k, None)
    return [(-t.get(j, 0)) % q for j in range(n)]
