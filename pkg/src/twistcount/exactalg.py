"""Exact linear algebra over Z and over finite products of cyclic groups.

Matrices are plain nested lists of Python ints (rows of equal length), so
every computation is arbitrary precision.  The two consumers are the
Smith reduction of integer matrices and homomorphisms between groups
Z/n_1 x ... x Z/n_c -> Z/m_1 x ... x Z/m_r given by an integer matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod

__all__ = [
    "AlgebraError",
    "DimensionMismatch",
    "IllDefinedHom",
    "smith_normal_form",
    "mat_mul",
    "mat_identity",
    "det",
    "CyclicHom",
    "hom_kernel_size",
    "kernel_size_by_enumeration",
    "kernel_size_by_smith",
    "image_size_by_enumeration",
    "hom_image_contains",
    "solve_congruence",
    "ENUMERATION_CROSSOVER",
]

# Kernel sizes are enumerated below this domain size and Smith-reduced above.
ENUMERATION_CROSSOVER = 10**6


class AlgebraError(ValueError):
    pass


class DimensionMismatch(AlgebraError):
    pass


class IllDefinedHom(AlgebraError):
    pass


def mat_identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B) -> list[list[int]]:
    if A and B and len(A[0]) != len(B):
        raise DimensionMismatch(f"{len(A[0])} columns times {len(B)} rows")
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [
        [sum(row[k] * B[k][j] for k in range(inner)) for j in range(cols)]
        for row in A
    ]


def det(A) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _min_nonzero_position(D, t):
    best = None
    for i in range(t, len(D)):
        for j in range(t, len(D[0])):
            if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                best = (i, j)
    return best


def smith_normal_form(A):
    """Return (U, D, V) with D = U*A*V, U and V unimodular, D = diag(d_1, ...),
    d_1 | d_2 | ... and all d_i >= 0.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    if any(len(row) != cols for row in A):
        raise DimensionMismatch("ragged matrix")
    D = [list(row) for row in A]
    U = mat_identity(rows)
    V = mat_identity(cols)

    def row_op(i, k, q):  # row_i -= q * row_k
        D[i] = [a - q * b for a, b in zip(D[i], D[k])]
        U[i] = [a - q * b for a, b in zip(U[i], U[k])]

    def col_op(j, k, q):  # col_j -= q * col_k
        for row in D:
            row[j] -= q * row[k]
        for row in V:
            row[j] -= q * row[k]

    t = 0
    while t < min(rows, cols):
        pos = _min_nonzero_position(D, t)
        if pos is None:
            break
        i, j = pos
        if i != t:
            D[t], D[i] = D[i], D[t]
            U[t], U[i] = U[i], U[t]
        if j != t:
            for row in D:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
        pivot = D[t][t]
        dirty = False
        for i in range(t + 1, rows):
            if D[i][t] % pivot:
                row_op(i, t, D[i][t] // pivot)
                dirty = True
        if dirty:
            continue
        for j in range(t + 1, cols):
            if D[t][j] % pivot:
                col_op(j, t, D[t][j] // pivot)
                dirty = True
        if dirty:
            continue
        for i in range(t + 1, rows):
            if D[i][t]:
                row_op(i, t, D[i][t] // pivot)
        for j in range(t + 1, cols):
            if D[t][j]:
                col_op(j, t, D[t][j] // pivot)
        # Divisibility d_t | d_{t+1} | ...: fold any offending row in and redo.
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if D[i][j] % pivot:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(t, offender, -1)
            continue
        t += 1
    for i in range(min(rows, cols)):
        if D[i][i] < 0:
            D[i] = [-a for a in D[i]]
            U[i] = [-a for a in U[i]]
    return U, D, V


@dataclass(frozen=True)
class CyclicHom:
    """Homomorphism prod Z/n_j -> prod Z/m_i given by an integer matrix.

    Well-definedness (m_i divides matrix[i][j] * n_j) is checked at
    construction so convention errors in map assembly fail immediately.
    """

    matrix: tuple[tuple[int, ...], ...]
    domain_moduli: tuple[int, ...]
    codomain_moduli: tuple[int, ...]

    def __post_init__(self):
        rows = len(self.codomain_moduli)
        cols = len(self.domain_moduli)
        if len(self.matrix) != rows or any(len(row) != cols for row in self.matrix):
            raise DimensionMismatch(
                f"matrix shape does not match {rows} x {cols} moduli"
            )
        if any(n < 1 for n in self.domain_moduli + self.codomain_moduli):
            raise AlgebraError("moduli must be positive")
        for i in range(rows):
            for j in range(cols):
                if (self.matrix[i][j] * self.domain_moduli[j]) % self.codomain_moduli[i]:
                    raise IllDefinedHom(
                        f"entry ({i}, {j}) does not send n_j-torsion to m_i-torsion"
                    )

    @classmethod
    def of(cls, matrix, domain_moduli, codomain_moduli) -> "CyclicHom":
        return cls(
            tuple(tuple(int(a) for a in row) for row in matrix),
            tuple(int(n) for n in domain_moduli),
            tuple(int(m) for m in codomain_moduli),
        )

    @property
    def domain_size(self) -> int:
        return prod(self.domain_moduli)

    def apply(self, x) -> tuple[int, ...]:
        if len(x) != len(self.domain_moduli):
            raise DimensionMismatch("vector length does not match the domain")
        return tuple(
            sum(a * v for a, v in zip(row, x)) % m
            for row, m in zip(self.matrix, self.codomain_moduli)
        )


def kernel_size_by_enumeration(h: CyclicHom) -> int:
    """Count kernel elements by sweeping the whole domain.

    The sweep is split in two halves whose images are tabulated and
    matched, which visits every domain element implicitly but costs only
    about the square root of the domain size.
    """
    return _match_count(h, (0,) * len(h.codomain_moduli))


def _half_table(h: CyclicHom, indices) -> dict[tuple[int, ...], int]:
    table: dict[tuple[int, ...], int] = {}
    mods = h.codomain_moduli
    columns = [tuple(h.matrix[i][j] for i in range(len(mods))) for j in indices]
    ranges = [range(h.domain_moduli[j]) for j in indices]
    for x in itertools.product(*ranges):
        key = tuple(
            sum(col[i] * v for col, v in zip(columns, x)) % mods[i]
            for i in range(len(mods))
        )
        table[key] = table.get(key, 0) + 1
    return table


def _split_indices(h: CyclicHom) -> tuple[list[int], list[int]]:
    order = sorted(range(len(h.domain_moduli)), key=lambda j: -h.domain_moduli[j])
    left: list[int] = []
    right: list[int] = []
    size_l = size_r = 1
    for j in order:
        if size_l <= size_r:
            left.append(j)
            size_l *= h.domain_moduli[j]
        else:
            right.append(j)
            size_r *= h.domain_moduli[j]
    return left, right


def _match_count(h: CyclicHom, target) -> int:
    left, right = _split_indices(h)
    table_l = _half_table(h, left)
    table_r = _half_table(h, right)
    if len(table_l) > len(table_r):
        table_l, table_r = table_r, table_l
    mods = h.codomain_moduli
    total = 0
    for key, count in table_l.items():
        complement = tuple((t - k) % m for t, k, m in zip(target, key, mods))
        total += count * table_r.get(complement, 0)
    return total


def kernel_size_by_smith(h: CyclicHom) -> int:
    """Kernel size via the relation lattice.

    |ker h| = prod(n_j) * |coker [A | diag(m)]| / prod(m_i): the image of h
    equals the image of Z^c -> prod Z/m_i, whose cokernel is cut out by the
    columns of A together with the moduli relations.
    """
    rows = len(h.codomain_moduli)
    if rows == 0:
        return h.domain_size
    stacked = [
        list(h.matrix[i]) + [h.codomain_moduli[i] if j == i else 0 for j in range(rows)]
        for i in range(rows)
    ]
    _, D, _ = smith_normal_form(stacked)
    coker = prod(D[i][i] for i in range(rows))
    assert coker != 0, "moduli block has full rank"
    return h.domain_size * coker // prod(h.codomain_moduli)


def hom_kernel_size(h: CyclicHom, crossover: int = ENUMERATION_CROSSOVER) -> int:
    """Exact cardinality of ker h, enumerated below the crossover size."""
    if h.domain_size <= crossover:
        return kernel_size_by_enumeration(h)
    return kernel_size_by_smith(h)


def image_size_by_enumeration(h: CyclicHom) -> int:
    seen = set()
    for x in itertools.product(*(range(n) for n in h.domain_moduli)):
        seen.add(h.apply(x))
    return len(seen)


def hom_image_contains(h: CyclicHom, t) -> tuple[bool, tuple[int, ...] | None]:
    """Decide whether t lies in the image of h; on success return a witness x
    with h(x) = t exactly.

    Solves A x + diag(m) y = t over Z through the Smith form.
    """
    rows = len(h.codomain_moduli)
    cols = len(h.domain_moduli)
    if len(t) != rows:
        raise DimensionMismatch(f"target has {len(t)} entries, codomain {rows}")
    if rows == 0:
        return True, (0,) * cols
    stacked = [
        list(h.matrix[i]) + [h.codomain_moduli[i] if j == i else 0 for j in range(rows)]
        for i in range(rows)
    ]
    U, D, V = smith_normal_form(stacked)
    rhs = [sum(U[i][k] * t[k] for k in range(rows)) for i in range(rows)]
    w = []
    for i in range(rows):
        d = D[i][i]
        if d == 0:
            if rhs[i]:
                return False, None
            w.append(0)
        else:
            if rhs[i] % d:
                return False, None
            w.append(rhs[i] // d)
    w += [0] * (cols + rows - len(w))
    z = [sum(V[j][i] * w[i] for i in range(len(w))) for j in range(cols + rows)]
    witness = tuple(z[j] % h.domain_moduli[j] for j in range(cols))
    assert h.apply(witness) == tuple(
        v % m for v, m in zip(t, h.codomain_moduli)
    )
    return True, witness


def solve_congruence(a: int, b: int, n: int) -> tuple[int, int] | None:
    """Solve a*x = b (mod n); returns (x0, step) describing all solutions
    x0 + step*Z, or None when gcd(a, n) does not divide b.
    """
    if n < 1:
        raise AlgebraError(f"modulus {n} < 1")
    g = gcd(a, n)
    if b % g:
        return None
    step = n // g
    if step == 1:
        return 0, 1
    x0 = (b // g) * pow(a // g, -1, step) % step
    return x0, step
