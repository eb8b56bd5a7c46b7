"""Cartan data, root systems, and Weyl group combinatorics.

All structural data (Cartan matrices, root coordinates, the invariant
form on simple roots) is kept in exact integer / rational arithmetic.
Floating point only appears in the orthonormalizing change of basis
returned by :func:`invariant_form_h`.

Conventions, pinned here and relied on everywhere else:

* ``cartan[i][j]`` is the pairing of the simple root ``alpha_j`` with the
  coroot ``alpha_i_vee``.
* The invariant form on the weight side is normalized so every *long*
  root has squared length 2.
* Node 0 is the long node in type B and the short node in type C; in
  type G2 node 0 is short.  (The labeling is a convention and is pinned
  by tests.)
* Weyl word letters are 0-based node indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from .errors import NonReducedWordError, UnsupportedTypeError

#: (series, rank) pairs the desk-scope artifact supports.
SUPPORTED = {("A", 1), ("A", 2), ("A", 3), ("B", 2), ("C", 2), ("G", 2)}


@dataclass(frozen=True)
class CartanDatum:
    """Cartan matrix plus the symmetrizing data of a simple root system."""

    series: str
    rank: int
    cartan: Tuple[Tuple[int, ...], ...]
    d: Tuple[int, ...]
    gram_hstar: Tuple[Tuple[Fraction, ...], ...]

    @property
    def label(self) -> str:
        return f"{self.series}{self.rank}"

    def pairing(self, i: int, j: int) -> int:
        """<alpha_j, alpha_i_vee>."""
        return self.cartan[i][j]


@dataclass(frozen=True)
class RootSystem:
    """Positive roots in simple-root coordinates."""

    datum: CartanDatum
    positive_roots: Tuple[Tuple[int, ...], ...]
    highest_root: Tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.positive_roots)


@dataclass(frozen=True)
class WeylWord:
    """A word in the simple reflections (letters are 0-based node indices)."""

    letters: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))

    @property
    def length(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)


def _letters(word) -> Tuple[int, ...]:
    if isinstance(word, WeylWord):
        return word.letters
    return tuple(int(x) for x in word)


def parse_type(label: str) -> Tuple[str, int]:
    """Parse a label like ``"A2"`` into ``("A", 2)``."""
    label = label.strip()
    if len(label) < 2 or not label[0].isalpha():
        raise UnsupportedTypeError(f"cannot parse group type {label!r}")
    return label[0].upper(), int(label[1:])


def build_cartan(series: str, rank: int) -> CartanDatum:
    """Build the Cartan datum for a supported (series, rank) pair.

    The symmetrizers ``d`` satisfy d_i a_ij = d_j a_ji exactly, and the
    Gram matrix of the simple roots is d_i * a_ij / max(d), which puts
    every long root at squared length 2.
    """
    series = series.upper()
    if (series, rank) not in SUPPORTED:
        raise UnsupportedTypeError(
            f"type {series}{rank} not supported (scope: A1-A3, B2, C2, G2)"
        )
    n = rank
    if series == "A":
        cartan = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)]
                  for i in range(n)]
        d = [1] * n
    elif series == "B":  # node 0 long
        cartan = [[2, -1], [-2, 2]]
        d = [2, 1]
    elif series == "C":  # node 0 short
        cartan = [[2, -2], [-1, 2]]
        d = [1, 2]
    else:  # G2, node 0 short
        cartan = [[2, -3], [-1, 2]]
        d = [1, 3]

    dmax = max(d)
    gram = tuple(
        tuple(Fraction(d[i] * cartan[i][j], dmax) for j in range(n)) for i in range(n)
    )
    for i in range(n):
        for j in range(n):
            if d[i] * cartan[i][j] != d[j] * cartan[j][i]:
                raise AssertionError("symmetrizer mismatch")
            if gram[i][j] != gram[j][i]:
                raise AssertionError("gram not symmetric")
    return CartanDatum(series, rank, tuple(tuple(r) for r in cartan), tuple(d), gram)


def simple_reflection_matrix(datum: CartanDatum, i: int) -> np.ndarray:
    """Matrix of s_i acting on simple-root coordinates (integer entries)."""
    n = datum.rank
    m = np.eye(n, dtype=np.int64)
    for j in range(n):
        m[i, j] -= datum.cartan[i][j]
    return m


def word_matrix(datum: CartanDatum, word) -> np.ndarray:
    """Action of s_{i_1} ... s_{i_k} on simple-root coordinates."""
    m = np.eye(datum.rank, dtype=np.int64)
    for i in _letters(word):
        m = m @ simple_reflection_matrix(datum, i)
    return m


def positive_roots(datum: CartanDatum) -> RootSystem:
    """Generate the full positive system by reflection closure."""
    n = datum.rank
    simples = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    roots = set(simples)
    frontier = list(simples)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(n):
                pair = sum(datum.cartan[i][j] * beta[j] for j in range(n))
                refl = list(beta)
                refl[i] -= pair
                refl_t = tuple(refl)
                if all(c >= 0 for c in refl_t) and refl_t not in roots:
                    roots.add(refl_t)
                    nxt.append(refl_t)
        frontier = nxt
    ordered = sorted(roots, key=lambda r: (sum(r), r))
    highest = ordered[-1]
    return RootSystem(datum, tuple(ordered), highest)


def weyl_length(datum: CartanDatum, word) -> int:
    """Length of the Weyl element represented by ``word``.

    Counted as the number of positive roots sent to negative roots, so
    it is independent of how the word was produced.
    """
    rs = positive_roots(datum)
    m = word_matrix(datum, word)
    count = 0
    for beta in rs.positive_roots:
        img = m @ np.array(beta, dtype=np.int64)
        if all(c <= 0 for c in img):
            count += 1
    return count


def is_reduced(datum: CartanDatum, word) -> bool:
    return weyl_length(datum, word) == len(_letters(word))


def reduced_word_w0(datum: CartanDatum) -> WeylWord:
    """Canonical reduced word for the longest element.

    Grows the word on the right, always appending the smallest node index
    whose simple root is still sent to a positive root.  Deterministic,
    so it doubles as the pinned word of each type.
    """
    n = datum.rank
    rs = positive_roots(datum)
    m = np.eye(n, dtype=np.int64)
    letters = []
    for _ in range(rs.N):
        for i in range(n):
            img = m @ np.array([1 if k == i else 0 for k in range(n)], dtype=np.int64)
            if all(c >= 0 for c in img):
                letters.append(i)
                m = m @ simple_reflection_matrix(datum, i)
                break
        else:
            raise AssertionError("no ascent found before reaching length N")
    word = WeylWord(tuple(letters))
    if not is_reduced(datum, word):
        raise AssertionError("constructed w0 word is not reduced")
    return word


def braid_order(datum: CartanDatum, i: int, j: int) -> int:
    """Order m of s_i s_j in the Weyl group."""
    prod = datum.cartan[i][j] * datum.cartan[j][i]
    return {0: 2, 1: 3, 2: 4, 3: 6}[prod]


def braid_move(datum: CartanDatum, word, position: int):
    """Apply the braid relation starting at ``position``.

    Requires the letters at ``position`` to alternate (i, j, i, ...) for
    the full braid length m; returns the moved word together with m.
    """
    letters = list(_letters(word))
    if not 0 <= position < len(letters) - 1:
        raise NonReducedWordError(f"no braid move possible at position {position}")
    i, j = letters[position], letters[position + 1]
    if i == j:
        raise NonReducedWordError("adjacent equal letters admit no braid move")
    m = braid_order(datum, i, j)
    if position + m > len(letters):
        raise NonReducedWordError(
            f"braid relation of length {m} does not fit at position {position}"
        )
    expected = [(i if k % 2 == 0 else j) for k in range(m)]
    if letters[position:position + m] != expected:
        raise NonReducedWordError(
            f"letters at position {position} do not match the (i,j) braid pattern"
        )
    letters[position:position + m] = [(j if k % 2 == 0 else i) for k in range(m)]
    moved = WeylWord(tuple(letters))
    if not is_reduced(datum, moved):
        raise AssertionError("braid move produced a non-reduced word")
    return moved, m


def all_reduced_words_w0(datum: CartanDatum):
    """All reduced words of w0 (exhaustive DFS; fine at desk-scope ranks)."""
    rs = positive_roots(datum)
    n = datum.rank
    out = []

    def grow(prefix, m):
        if len(prefix) == rs.N:
            out.append(tuple(prefix))
            return
        for i in range(n):
            img = m @ np.array([1 if k == i else 0 for k in range(n)], dtype=np.int64)
            if all(c >= 0 for c in img):
                grow(prefix + [i], m @ simple_reflection_matrix(datum, i))

    grow([], np.eye(n, dtype=np.int64))
    return out


def dynkin_involution(datum: CartanDatum) -> Tuple[int, ...]:
    """The involution i -> i* defined by w0(alpha_i) = -alpha_{i*}."""
    w0 = word_matrix(datum, reduced_word_w0(datum))
    n = datum.rank
    istar = []
    for i in range(n):
        img = -(w0 @ np.array([1 if k == i else 0 for k in range(n)], dtype=np.int64))
        matches = [j for j in range(n) if all(img[k] == (1 if k == j else 0) for k in range(n))]
        if len(matches) != 1:
            raise AssertionError("w0 does not permute the simple roots")
        istar.append(matches[0])
    return tuple(istar)


def coroot_gram_exact(datum: CartanDatum):
    """Exact Gram matrix of the coroots, <alpha_i_vee, alpha_j_vee>."""
    g = datum.gram_hstar
    n = datum.rank
    return tuple(
        tuple(4 * g[i][j] / (g[i][i] * g[j][j]) for j in range(n)) for i in range(n)
    )


def invariant_form_h(datum: CartanDatum):
    """Invariant form on the Cartan subalgebra in coroot coordinates.

    Returns ``(G, B)`` where ``G[i][j] = <alpha_i_vee, alpha_j_vee>`` and
    the columns of ``B`` are an orthonormal basis: ``B.T @ G @ B = Id``.
    """
    G = np.array([[float(x) for x in row] for row in coroot_gram_exact(datum)])
    L = np.linalg.cholesky(G)
    B = np.linalg.inv(L).T
    return G, B


def alpha_on_coroots(datum: CartanDatum) -> np.ndarray:
    """Matrix P with alpha_i(h) = sum_j P[i, j] h_j for h in coroot coordinates."""
    A = np.array(datum.cartan, dtype=float)
    return A.T.copy()


def simple_root_values(datum: CartanDatum, h: Sequence[float]) -> np.ndarray:
    """Values alpha_i(h) of all simple roots on h (coroot coordinates)."""
    h = np.asarray(h)
    return alpha_on_coroots(datum).astype(h.dtype if h.dtype.kind == "c" else float) @ h
