"""Integer Smith normal form and first-homology presentations.

Relations enter as integer row vectors over the edge-class generators;
H1 = Z^E / rowspace.  The SNF left transform yields an exact projection
onto the free part, optionally rebased so that a chosen set of edges maps
to the standard basis."""

from __future__ import annotations

from .errors import OrderError, ValidationError


def smith_normal_form(matrix):
    """Return (U, D, V) with U*A*V = D diagonal, d_i | d_{i+1}, U and V
    unimodular.  Plain gcd-reduction; matrices here are tiny."""
    A = [list(map(int, row)) for row in matrix]
    m = len(A)
    n = len(A[0]) if A else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def diagonalize():
        t = 0
        while t < min(m, n):
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j]:
                        pivot = (i, j)
                        break
                if pivot:
                    break
            if pivot is None:
                break
            i0, j0 = pivot
            if i0 != t:
                A[t], A[i0] = A[i0], A[t]
                U[t], U[i0] = U[i0], U[t]
            if j0 != t:
                for r in range(m):
                    A[r][t], A[r][j0] = A[r][j0], A[r][t]
                for r in range(n):
                    V[r][t], V[r][j0] = V[r][j0], V[r][t]
            while True:
                moved = False
                for i in range(t + 1, m):
                    if A[i][t]:
                        if abs(A[i][t]) < abs(A[t][t]):
                            A[t], A[i] = A[i], A[t]
                            U[t], U[i] = U[i], U[t]
                        k = A[i][t] // A[t][t]
                        A[i] = [a - k * b for a, b in zip(A[i], A[t])]
                        U[i] = [a - k * b for a, b in zip(U[i], U[t])]
                        if A[i][t]:
                            moved = True
                for j in range(t + 1, n):
                    if A[t][j]:
                        if abs(A[t][j]) < abs(A[t][t]):
                            for r in range(m):
                                A[r][t], A[r][j] = A[r][j], A[r][t]
                            for r in range(n):
                                V[r][t], V[r][j] = V[r][j], V[r][t]
                        k = A[t][j] // A[t][t]
                        for r in range(m):
                            A[r][j] -= k * A[r][t]
                        for r in range(n):
                            V[r][j] -= k * V[r][t]
                        if A[t][j]:
                            moved = True
                col_clear = all(A[i][t] == 0 for i in range(t + 1, m))
                row_clear = all(A[t][j] == 0 for j in range(t + 1, n))
                if not moved and col_clear and row_clear:
                    break
            if A[t][t] < 0:
                A[t] = [-a for a in A[t]]
                U[t] = [-a for a in U[t]]
            t += 1
        return t

    rank = diagonalize()
    while True:
        fixed = False
        for i in range(rank - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if a and b and b % a != 0:
                A[i] = [x + y for x, y in zip(A[i], A[i + 1])]
                U[i] = [x + y for x, y in zip(U[i], U[i + 1])]
                rank = diagonalize()
                fixed = True
                break
        if not fixed:
            break
    return U, A, V


def matmul(A, B):
    return [
        [sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
        for i in range(len(A))
    ]


def integer_inverse(M):
    """Inverse of a unimodular integer matrix, exact."""
    from fractions import Fraction

    n = len(M)
    aug = [
        [Fraction(M[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise OrderError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    inv = []
    for r in range(n):
        row = []
        for c in range(n, 2 * n):
            v = aug[r][c]
            if v.denominator != 1:
                raise OrderError("matrix is not unimodular")
            row.append(int(v))
        inv.append(row)
    return inv


class H1Presentation:
    """First homology of a one-vertex complex from abelianized relations.

    project() maps an exponent vector over the E edge generators to free
    H1 coordinates (length = betti number); torsion orders are recorded
    but the bundled complexes are torsion-free."""

    def __init__(self, relation_rows, n_edges, basis_edges=None):
        rows = [list(r) for r in relation_rows] or [[0] * n_edges]
        # columns of B are the relations; H1 = coker(B)
        B = [[rows[r][e] for r in range(len(rows))] for e in range(n_edges)]
        U, D, _V = smith_normal_form(B)
        diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
        free_rows = []
        torsion = []
        for i in range(n_edges):
            d = diag[i] if i < len(diag) else 0
            if d == 0:
                free_rows.append(U[i])
            elif d > 1:
                torsion.append(d)
        self.torsion = tuple(torsion)
        self.betti = len(free_rows)
        P = free_rows
        if basis_edges is not None:
            if len(basis_edges) != self.betti:
                raise OrderError(
                    f"h1 basis needs {self.betti} edges, got {len(basis_edges)}"
                )
            Bm = [[P[i][e] for e in basis_edges] for i in range(self.betti)]
            P = matmul(integer_inverse(Bm), P)
        self.projection = tuple(tuple(int(x) for x in row) for row in P)
        # paranoia: relations must project to zero
        for r in rows:
            img = self.project(r)
            if any(img):
                raise ValidationError("relation does not vanish in H1")

    def project(self, exponents):
        return tuple(
            sum(row[j] * exponents[j] for j in range(len(exponents)))
            for row in self.projection
        )
