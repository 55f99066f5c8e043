"""Subgroups and subquotients of FinAb groups presented on integer lattices.

A subquotient top/bottom is stored through the Hermite basis of the top
lattice (always containing the ambient relation lattice) and a Smith
change of basis that diagonalizes the bottom relations, so projection
and lifting are exact integer computations with canonical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .groups import AbHom, FinAb
from .intlin import (
    identity_matrix,
    kernel_basis,
    mat_vec,
    row_hnf,
    smith_normal_form,
    snf_diagonal,
    solve_int,
)


def _coords_in_rows(rows, vec, ncols):
    """Integer coordinates of vec in the given row basis, or None."""
    if not rows:
        return [] if not any(vec) else None
    Zt = [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]
    return solve_int(Zt, list(vec), ncols=len(rows))


def _int_inverse(M):
    n = len(M)
    cols = []
    for i in range(n):
        e = [int(j == i) for j in range(n)]
        x = solve_int(M, e, ncols=n)
        if x is None:
            raise ValueError('matrix is not unimodular')
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SubQuot:
    """A subquotient T/B of an ambient FinAb, with canonical coordinates."""

    ambient: FinAb
    group: FinAb
    _top: tuple = field(repr=False)
    _umat: tuple = field(repr=False)
    _uinv: tuple = field(repr=False)
    _keep: tuple = field(repr=False)
    _ds: tuple = field(repr=False)

    def contains(self, v) -> bool:
        return _coords_in_rows(self._top, self.ambient.reduce(v),
                               self.ambient.rank) is not None

    def project(self, v):
        """Class in group of an ambient element v of the top subgroup."""
        x = _coords_in_rows(self._top, self.ambient.reduce(v),
                            self.ambient.rank)
        if x is None:
            raise ValueError('element lies outside the subgroup')
        y = mat_vec(self._umat, x)
        return tuple(y[i] % self._ds[i] for i in self._keep)

    def lift(self, g):
        """An ambient representative of a group element."""
        y = [0] * len(self._ds)
        for gi, i in zip(g, self._keep):
            y[i] = int(gi)
        x = mat_vec(self._uinv, y)
        n = self.ambient.rank
        out = [0] * n
        for xi, row in zip(x, self._top):
            for j in range(n):
                out[j] += xi * row[j]
        return self.ambient.reduce(out)

    def project_hom(self) -> AbHom:
        """Projection ambient -> group; only defined when top is everything."""
        cols = [self.project(e) for e in _basis(self.ambient)]
        return AbHom.from_columns(self.ambient, self.group, cols)

    def inject_hom(self) -> AbHom:
        """Inclusion group -> ambient; only a hom when bottom is trivial."""
        cols = [self.lift(e) for e in _basis(self.group)]
        return AbHom.from_columns(self.group, self.ambient, cols)


def _basis(A: FinAb):
    return [tuple(int(i == j) for j in range(A.rank)) for i in range(A.rank)]


def subquotient(ambient: FinAb, top_gens=None, bottom_gens=()) -> SubQuot:
    """The subquotient (top + relations)/(bottom + relations) of ambient.

    top_gens None means the whole group.  bottom generators must lie in
    the top subgroup.
    """
    n = ambient.rank
    rel = [[ambient.orders[i] if j == i else 0 for j in range(n)]
           for i in range(n)]
    if top_gens is None:
        rows = identity_matrix(n)
    else:
        rows = [list(map(int, g)) for g in top_gens] + rel
    top = row_hnf(rows, ncols=n)
    r = len(top)
    bottom = [list(map(int, g)) for g in bottom_gens] + rel
    C = []
    for brow in bottom:
        c = _coords_in_rows(top, brow, n)
        if c is None:
            raise ValueError('bottom generators lie outside the top subgroup')
        C.append(c)
    if r == 0:
        return SubQuot(ambient, FinAb(()), (), (), (), (), ())
    Ct = [[C[k][i] for k in range(len(C))] for i in range(r)]
    S, U, _ = smith_normal_form(Ct, ncols=len(C))
    ds = snf_diagonal(S) + [0] * (r - len(snf_diagonal(S)))
    if any(d == 0 for d in ds):
        raise ValueError('subquotient is infinite')
    keep = tuple(i for i, d in enumerate(ds) if d > 1)
    group = FinAb(tuple(ds[i] for i in keep))
    uinv = _int_inverse([list(row) for row in U])
    return SubQuot(ambient, group,
                   tuple(tuple(row) for row in top),
                   tuple(tuple(row) for row in U),
                   tuple(tuple(row) for row in uinv),
                   keep, tuple(ds))


def subgroup(ambient: FinAb, gens) -> SubQuot:
    return subquotient(ambient, top_gens=gens)


def quotient(ambient: FinAb, gens) -> SubQuot:
    return subquotient(ambient, top_gens=None, bottom_gens=gens)


def kernel_gens(h: AbHom):
    """Generators of the kernel of h, as vectors in h.source."""
    ns, nt = h.source.rank, h.target.rank
    if nt == 0:
        return _basis(h.source)
    M = [list(h.matrix[i]) + [h.target.orders[i] if j == i else 0
                              for j in range(nt)] for i in range(nt)]
    rows = kernel_basis(M, ncols=ns + nt)
    return [tuple(row[:ns]) for row in rows]


def image_gens(h: AbHom):
    """Generators of the image of h, as vectors in h.target."""
    return [tuple(h.matrix[i][j] for i in range(h.target.rank))
            for j in range(h.source.rank)]


def preimage_gens(h: AbHom, target_gens):
    """Generators of the preimage under h of the span of target_gens."""
    ns, nt = h.source.rank, h.target.rank
    if nt == 0:
        return _basis(h.source)
    G = [list(map(int, g)) for g in target_gens]
    M = [list(h.matrix[i])
         + [-g[i] for g in G]
         + [h.target.orders[i] if j == i else 0 for j in range(nt)]
         for i in range(nt)]
    rows = kernel_basis(M, ncols=ns + len(G) + nt)
    return [tuple(row[:ns]) for row in rows]
