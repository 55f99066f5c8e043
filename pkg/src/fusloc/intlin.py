"""Integer linear algebra: Smith and Hermite normal forms, lattice solving.

Everything runs over plain Python ints on small dense matrices given as lists
of row lists, so there are no overflow concerns.  sympy's smith_normal_form
does not return the unimodular transforms, and we need those to solve systems
and to pick canonical solution representatives, so the forms are implemented
here.
"""

from __future__ import annotations

from .errors import NoSolution


def identity_matrix(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    if not A:
        return []
    n = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row)) for j in range(n)]
            for row in A]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def det(M):
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def smith_normal_form(M, ncols=None):
    """Return (S, U, V) with S = U*M*V in Smith normal form.

    U and V are unimodular; S is diagonal with nonnegative entries and
    S[0][0] | S[1][1] | ...  M is a list of rows; ncols must be given when
    M has no rows.
    """
    A = [list(r) for r in M]
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U = identity_matrix(m)
    V = identity_matrix(n)

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for r in A:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(i, j, q):
        # row_i -= q * row_j
        if q:
            A[i] = [a - q * b for a, b in zip(A[i], A[j])]
            U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def add_col(i, j, q):
        # col_i -= q * col_j
        if q:
            for r in A:
                r[i] -= q * r[j]
            for r in V:
                r[i] -= q * r[j]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None
                                or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // A[t][t])
                    if A[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // A[t][t])
                    if A[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            if (any(A[i][t] for i in range(t + 1, m))
                    or any(A[t][j] for j in range(t + 1, n))):
                continue
            carrier = None
            for i in range(t + 1, m):
                if any(x % A[t][t] for x in A[i][t + 1:]):
                    carrier = i
                    break
            if carrier is None:
                break
            # pull a non-divisible row up so the gcd loop can shrink the pivot
            add_row(t, carrier, -1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return A, U, V


def snf_diagonal(S):
    m = len(S)
    n = len(S[0]) if m else 0
    return [S[i][i] for i in range(min(m, n))]


def solve_int(M, b, ncols=None):
    """A particular integer solution x of M x = b, or None."""
    m = len(M)
    n = len(M[0]) if m else (ncols or 0)
    if m == 0:
        return [0] * n
    S, U, V = smith_normal_form(M, ncols=n)
    c = mat_vec(U, b)
    w = [0] * n
    for i in range(m):
        d = S[i][i] if i < n else 0
        if d:
            if c[i] % d:
                return None
            w[i] = c[i] // d
        elif c[i]:
            return None
    return mat_vec(V, w)


def kernel_basis(M, ncols=None):
    """Rows spanning the integer kernel lattice of M."""
    m = len(M)
    n = len(M[0]) if m else (ncols or 0)
    if m == 0:
        return identity_matrix(n)
    S, U, V = smith_normal_form(M, ncols=n)
    rank = sum(1 for d in snf_diagonal(S) if d)
    return [[V[r][j] for r in range(n)] for j in range(rank, n)]


def row_hnf(rows, ncols=None):
    """Canonical Hermite form (row style) of the lattice spanned by rows.

    Pivots are positive, in increasing column order, and entries above each
    pivot are reduced into [0, pivot).
    """
    H = [list(r) for r in rows if any(r)]
    n = len(H[0]) if H else (ncols or 0)
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, len(H)) if H[i][c]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda i: (abs(H[i][c]), i))
            for i in nz:
                if i != piv:
                    q = H[i][c] // H[piv][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[piv])]
        nz = [i for i in range(r, len(H)) if H[i][c]]
        if nz:
            H[r], H[nz[0]] = H[nz[0]], H[r]
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
            r += 1
    return [row for row in H[:r]]


def hnf_reduce(vec, H):
    """Canonical coset representative of vec modulo the HNF lattice H."""
    v = list(vec)
    for row in H:
        c = next(j for j, x in enumerate(row) if x)
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return v


def smith_solve(A, b, moduli):
    """Solve A x === b modulo per-row moduli; canonical solution or NoSolution.

    moduli is a single int applied to every row or a sequence with one
    modulus per row; modulus 0 means exact equality on that row.  The result
    is the canonical representative of the solution set modulo the lattice of
    homogeneous solutions (Hermite reduction), which makes it deterministic.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if isinstance(moduli, int):
        moduli = [moduli] * m
    moduli = list(moduli)
    if len(moduli) != m:
        raise ValueError('need one modulus per row')
    M = [list(A[i]) + [moduli[i] if j == i else 0 for j in range(m)]
         for i in range(m)]
    part = solve_int(M, list(b), ncols=n + m)
    if part is None:
        raise NoSolution(f'no solution of {A} x = {b} mod {moduli}')
    ker = kernel_basis(M, ncols=n + m)
    proj = [row[:n] for row in ker]
    H = row_hnf(proj, ncols=n)
    return tuple(hnf_reduce(part[:n], H))


def lattice_quotient_invariants(Z, B, ncols):
    """Invariant factors (> 1, or 0 for free parts) of lattice quotient Z/B.

    Z and B are lists of generating rows with B contained in the span of Z.
    """
    Zh = row_hnf(Z, ncols=ncols)
    if not Zh:
        if any(any(r) for r in B):
            raise ValueError('B not contained in Z')
        return []
    # express each B row in the Z basis: solve (Zh^T) c = b^T
    Zt = [[Zh[i][j] for i in range(len(Zh))] for j in range(ncols)]
    C = []
    for brow in B:
        c = solve_int(Zt, list(brow), ncols=len(Zh))
        if c is None:
            raise ValueError('B not contained in Z')
        C.append(c)
    if not C:
        return [0] * len(Zh)
    S, _, _ = smith_normal_form(C, ncols=len(Zh))
    diag = snf_diagonal(S)
    diag += [0] * (len(Zh) - len(diag))
    return [d for d in diag if d != 1]


def prime_power(n):
    """(p, k) with n = p**k if n is a prime power > 1, else None."""
    if n < 2:
        return None
    p = None
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            p = d
            while m % d == 0:
                m //= d
            break
        d += 1
    if p is None:
        p = n
        m = 1
    if m != 1:
        return None
    k = 0
    while n > 1:
        n //= p
        k += 1
    return p, k
