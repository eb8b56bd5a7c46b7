"""Fundamental representations and the matrix model of the group.

Each fundamental module V(omega_i) is built over exact rationals by
breadth-first application of the lowering generators to a highest weight
vector.  Linear dependence and the maximal submodule are eliminated with
the contravariant form (recursion <f_j u, v> = <u, e_j v>), so the rank
decisions that pick the basis are exact, never floating point.  The
canonical basis consists of the first-constructed independent
f-monomials, which makes coefficient extraction stable across runs.

Group elements are stored as their matrices in every fundamental
representation simultaneously; that is enough to evaluate any
generalized minor and hence everything downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import json
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DimensionCapError, NonReducedWordError
from .rootsys import (
    CartanDatum,
    WeylWord,
    _letters,
    build_cartan,
    dynkin_involution,
    is_reduced,
    reduced_word_w0,
)

Mono = Tuple[int, ...]  # (j1, ..., jk) stands for f_{j1} f_{j2} ... f_{jk} v+


# ---------------------------------------------------------------------------
# exact rational linear algebra (tiny systems only)
# ---------------------------------------------------------------------------

def _solve_exact(G: List[List[Fraction]], rhs: List[Fraction]) -> List[Fraction]:
    """Solve G x = rhs by fraction-exact Gaussian elimination."""
    k = len(G)
    M = [row[:] + [rhs[r]] for r, row in enumerate(G)]
    for col in range(k):
        piv = next((r for r in range(col, k) if M[r][col] != 0), None)
        if piv is None:
            raise AssertionError("singular exact system")
        M[col], M[piv] = M[piv], M[col]
        inv = Fraction(1, 1) / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(k):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[r][k] for r in range(k)]


def _is_nonsingular(G: List[List[Fraction]]) -> bool:
    k = len(G)
    M = [row[:] for row in G]
    for col in range(k):
        piv = next((r for r in range(col, k) if M[r][col] != 0), None)
        if piv is None:
            return False
        M[col], M[piv] = M[piv], M[col]
        for r in range(col + 1, k):
            if M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return True


# ---------------------------------------------------------------------------
# module construction
# ---------------------------------------------------------------------------

@dataclass
class WeightModule:
    """One fundamental representation V(omega_i) in its canonical basis."""

    datum: CartanDatum
    label: int  # node index i of omega_i
    dim: int
    monomials: List[Mono]
    weights: List[Tuple[int, ...]]  # <mu, alpha_j_vee> per basis vector
    E: List[np.ndarray]
    F: List[np.ndarray]
    H: List[np.ndarray]
    E_exact: List[List[List[Fraction]]]
    F_exact: List[List[List[Fraction]]]
    form_exact: List[List[Fraction]]
    lowest_index: int = 0
    highest_index: int = 0

    def weight_space(self, weight: Tuple[int, ...]) -> List[int]:
        return [k for k, w in enumerate(self.weights) if w == weight]

    def to_json(self) -> str:
        """Debug dump: weights, dimension and generator action matrices."""
        def mat(m):
            return [[[x.real, x.imag] for x in row] for row in np.asarray(m).tolist()]
        payload = {
            "type": self.datum.label,
            "fundamental": self.label,
            "dim": self.dim,
            "weights": [list(w) for w in self.weights],
            "monomials": [list(m) for m in self.monomials],
            "E": [mat(m) for m in self.E],
            "F": [mat(m) for m in self.F],
        }
        return json.dumps(payload)


def _weight_of(datum: CartanDatum, label: int, mono: Mono) -> Tuple[int, ...]:
    n = datum.rank
    w = [1 if k == label else 0 for k in range(n)]
    for l in mono:
        for k in range(n):
            w[k] -= datum.cartan[k][l]
    return tuple(w)


class _VermaCalc:
    """Exact Shapovalov-form bookkeeping on f-monomials."""

    def __init__(self, datum: CartanDatum, label: int):
        self.datum = datum
        self.label = label
        self._shapo_cache: Dict[Tuple[Mono, Mono], Fraction] = {}

    def pairing(self, mono: Mono, j: int) -> int:
        w = _weight_of(self.datum, self.label, mono)
        return w[j]

    def e_action(self, j: int, mono: Mono) -> Dict[Mono, Fraction]:
        """e_j applied to an f-monomial, as a combination of f-monomials."""
        if not mono:
            return {}
        head, rest = mono[0], mono[1:]
        out: Dict[Mono, Fraction] = {}
        for m, c in self.e_action(j, rest).items():
            key = (head,) + m
            out[key] = out.get(key, Fraction(0)) + c
        if head == j:
            c = Fraction(self.pairing(rest, j))
            if c != 0:
                out[rest] = out.get(rest, Fraction(0)) + c
        return {m: c for m, c in out.items() if c != 0}

    def shapo(self, m1: Mono, m2: Mono) -> Fraction:
        if len(m1) != len(m2):
            return Fraction(0)
        if _weight_of(self.datum, self.label, m1) != _weight_of(self.datum, self.label, m2):
            return Fraction(0)
        key = (m1, m2)
        if key in self._shapo_cache:
            return self._shapo_cache[key]
        if not m1:
            val = Fraction(1)
        else:
            head, rest = m1[0], m1[1:]
            val = Fraction(0)
            for m, c in self.e_action(head, m2).items():
                val += c * self.shapo(rest, m)
        self._shapo_cache[key] = val
        self._shapo_cache[(m2, m1)] = val  # the form is symmetric
        return val


def build_fundamental(datum: CartanDatum, label: int, dim_cap: int = 64) -> WeightModule:
    """Construct V(omega_label) exactly, then freeze complex matrices.

    Raises :class:`DimensionCapError` if the module grows past ``dim_cap``
    (a guard against calling this outside the desk scope).
    """
    n = datum.rank
    if not 0 <= label < n:
        raise ValueError(f"node index {label} out of range")
    calc = _VermaCalc(datum, label)

    basis: List[Mono] = [()]
    expansions: Dict[Mono, Dict[int, Fraction]] = {(): {0: Fraction(1)}}
    level = [()]
    while level:
        # candidates grouped by weight, in construction order
        groups: Dict[Tuple[int, ...], List[Mono]] = {}
        for b in level:
            for j in range(n):
                cand = (j,) + b
                w = _weight_of(datum, label, cand)
                groups.setdefault(w, []).append(cand)
        new_level: List[Mono] = []
        for w, cands in groups.items():
            selected: List[Mono] = []
            for c in cands:
                trial = selected + [c]
                G = [[calc.shapo(x, y) for y in trial] for x in trial]
                if _is_nonsingular(G):
                    selected.append(c)
            if len(basis) + len(selected) > dim_cap:
                raise DimensionCapError(
                    f"V(omega_{label}) for {datum.label} exceeds cap {dim_cap}"
                )
            offset = len(basis)
            basis.extend(selected)
            Gsel = [[calc.shapo(x, y) for y in selected] for x in selected]
            for c in cands:
                rhs = [calc.shapo(b, c) for b in selected]
                if selected:
                    coords = _solve_exact(Gsel, rhs)
                else:
                    coords = []
                expansions[c] = {
                    offset + k: v for k, v in enumerate(coords) if v != 0
                }
            new_level.extend(selected)
        level = new_level

    dim = len(basis)
    index = {m: k for k, m in enumerate(basis)}
    weights = [_weight_of(datum, label, m) for m in basis]

    def expand(mono: Mono) -> Dict[int, Fraction]:
        """Coordinates of an arbitrary f-monomial in the canonical basis."""
        if mono in expansions:
            return expansions[mono]
        head, rest = mono[0], mono[1:]
        out: Dict[int, Fraction] = {}
        for k, c in expand(rest).items():
            for k2, c2 in expansions[(head,) + basis[k]].items():
                out[k2] = out.get(k2, Fraction(0)) + c * c2
        out = {k: v for k, v in out.items() if v != 0}
        expansions[mono] = out
        return out

    F_exact = []
    E_exact = []
    for j in range(n):
        Fm = [[Fraction(0)] * dim for _ in range(dim)]
        Em = [[Fraction(0)] * dim for _ in range(dim)]
        for col, b in enumerate(basis):
            for row, c in expand((j,) + b).items():
                Fm[row][col] = c
            for m, c in calc.e_action(j, b).items():
                for row, c2 in expand(m).items():
                    Em[row][col] += c * c2
        F_exact.append(Fm)
        E_exact.append(Em)

    H = [np.diag([float(w[j]) for w in weights]).astype(complex) for j in range(n)]
    E = [np.array([[complex(x) for x in row] for row in m]) for m in E_exact]
    F = [np.array([[complex(x) for x in row] for row in m]) for m in F_exact]
    form = [[calc.shapo(a, b) for b in basis] for a in basis]

    # the lowest weight space is the unique deepest one
    lowest = max(range(dim), key=lambda k: len(basis[k]))

    return WeightModule(
        datum=datum,
        label=label,
        dim=dim,
        monomials=basis,
        weights=weights,
        E=E,
        F=F,
        H=H,
        E_exact=E_exact,
        F_exact=F_exact,
        form_exact=form,
        lowest_index=lowest,
        highest_index=0,
    )


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------

class GroupElement:
    """A group point as its matrices in every fundamental representation."""

    __slots__ = ("family", "blocks")

    def __init__(self, family: "FundamentalFamily", blocks: List[np.ndarray]):
        self.family = family
        self.blocks = blocks

    def block(self, i: int) -> np.ndarray:
        return self.blocks[i]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.family, [a @ b for a, b in zip(self.blocks, other.blocks)]
        )

    def inv(self) -> "GroupElement":
        return GroupElement(self.family, [np.linalg.inv(b) for b in self.blocks])

    def copy(self) -> "GroupElement":
        return GroupElement(self.family, [b.copy() for b in self.blocks])

    def norm(self) -> float:
        return max(np.linalg.norm(b) for b in self.blocks)

    def distance(self, other: "GroupElement") -> float:
        return max(
            np.linalg.norm(a - b) for a, b in zip(self.blocks, other.blocks)
        )


def _exact_exp_nilpotent(mat: List[List[Fraction]], t: Fraction) -> List[List[Fraction]]:
    dim = len(mat)
    out = [[Fraction(1) if i == j else Fraction(0) for j in range(dim)] for i in range(dim)]
    term = [row[:] for row in out]
    k = 0
    while True:
        k += 1
        term = [
            [sum(term[i][l] * mat[l][j] for l in range(dim)) for j in range(dim)]
            for i in range(dim)
        ]
        if all(all(x == 0 for x in row) for row in term):
            break
        coef = t ** k / _factorial(k)
        for i in range(dim):
            for j in range(dim):
                out[i][j] += coef * term[i][j]
        if k > dim:
            raise AssertionError("generator not nilpotent")
    return out


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


class FundamentalFamily:
    """All fundamental modules of one group, with shared caches.

    This is the working model of the group: one-parameter subgroups,
    torus points and Weyl representatives are produced here, and the
    peeling/decomposition algorithms in :mod:`todamirror.chevgroup`
    consume the cached index data.
    """

    def __init__(self, datum: CartanDatum, dim_cap: int = 64):
        self.datum = datum
        self.rank = datum.rank
        self.modules = [build_fundamental(datum, i, dim_cap) for i in range(datum.rank)]
        self.w0_word = reduced_word_w0(datum)
        self.istar = dynkin_involution(datum)

        # nilpotent power series E^k/k!, F^k/k! per module and node;
        # computed in exact arithmetic (float products of the exact zeros
        # would leave cancellation dust) and then frozen
        self._xpow: List[List[List[np.ndarray]]] = []
        self._ypow: List[List[List[np.ndarray]]] = []
        for mod in self.modules:
            xrow, yrow = [], []
            for i in range(self.rank):
                xrow.append(_nilpotent_powers_exact(mod.E_exact[i]))
                yrow.append(_nilpotent_powers_exact(mod.F_exact[i]))
            self._xpow.append(xrow)
            self._ypow.append(yrow)

        # Weyl representatives s_i_dot = x_i(-1) y_i(1) x_i(-1), exact then frozen
        self._shat: List[GroupElement] = []
        for i in range(self.rank):
            blocks = []
            for mod in self.modules:
                xm = _exact_exp_nilpotent(mod.E_exact[i], Fraction(-1))
                ym = _exact_exp_nilpotent(mod.F_exact[i], Fraction(1))
                prod = _frac_matmul(_frac_matmul(xm, ym), xm)
                blocks.append(np.array([[complex(x) for x in row] for row in prod]))
            self._shat.append(GroupElement(self, blocks))

        self.w0dot = self.weyl(self.w0_word)
        # v- = w0dot v+ per module, plus the support data used by peeling
        self.vminus = [g[:, 0].copy() for g in self.w0dot.blocks]
        self._low_support = []
        for m, v in zip(self.modules, self.vminus):
            idx = _single_support(v)
            if idx != m.lowest_index:
                raise AssertionError("w0 image of v+ not at the lowest weight")
            self._low_support.append((idx, v[idx]))
        # E_i @ v- in module i*, for lower-triangular peeling
        self._lower_peel = []
        for i in range(self.rank):
            mstar = self.istar[i]
            v = self.modules[mstar].E[i] @ self.vminus[mstar]
            idx = _single_support(v)
            self._lower_peel.append((mstar, idx, v[idx]))
        # index of the basis monomial (i,) in module i
        self.f1_index = []
        for i, mod in enumerate(self.modules):
            self.f1_index.append(mod.monomials.index((i,)))
        self._peel_plans: Dict[Tuple, object] = {}

    def _peel_plan(self, word, lower: bool):
        """Cached peeling plan (see chevgroup._PeelPlan) for a word."""
        from .chevgroup import _PeelPlan

        key = (_letters(word), lower)
        if key not in self._peel_plans:
            self._peel_plans[key] = _PeelPlan(self, word, lower)
        return self._peel_plans[key]

    # -- element constructors ------------------------------------------------

    def identity(self) -> GroupElement:
        return GroupElement(self, [np.eye(m.dim, dtype=complex) for m in self.modules])

    def x(self, i: int, t: complex) -> GroupElement:
        """x_i(t) = exp(t e_i)."""
        return GroupElement(
            self, [_poly_eval(self._xpow[k][i], t) for k in range(len(self.modules))]
        )

    def y(self, i: int, t: complex) -> GroupElement:
        """y_i(t) = exp(t f_i)."""
        return GroupElement(
            self, [_poly_eval(self._ypow[k][i], t) for k in range(len(self.modules))]
        )

    def torus(self, h: Sequence[complex]) -> GroupElement:
        """exp(h) for h given in coroot coordinates."""
        h = np.asarray(h, dtype=complex)
        blocks = []
        for mod in self.modules:
            expo = np.array([np.dot(w, h) for w in mod.weights])
            blocks.append(np.diag(np.exp(expo)))
        return GroupElement(self, blocks)

    def coroot_power(self, i: int, value: complex) -> GroupElement:
        """value^{alpha_i_vee}; weights pair integrally so no branch cuts."""
        blocks = []
        for mod in self.modules:
            diag = np.array([value ** int(w[i]) for w in mod.weights], dtype=complex)
            blocks.append(np.diag(diag))
        return GroupElement(self, blocks)

    def shat(self, i: int) -> GroupElement:
        return self._shat[i]

    def weyl(self, word) -> GroupElement:
        """Representative of a reduced word (product of the s_i_dot)."""
        letters = _letters(word)
        if not is_reduced(self.datum, letters):
            raise NonReducedWordError(f"word {letters} is not reduced")
        out = self.identity()
        for i in letters:
            out = out @ self._shat[i]
        return out

    def x_product(self, word, params) -> GroupElement:
        """x_{i_1}(a_1) ... x_{i_N}(a_N) along ``word``."""
        out = self.identity()
        for i, t in zip(_letters(word), params):
            out = out @ self.x(i, t)
        return out

    def y_product(self, word, params) -> GroupElement:
        out = self.identity()
        for i, t in zip(_letters(word), params):
            out = out @ self.y(i, t)
        return out

    def x_product_inverse(self, word, params) -> GroupElement:
        """Inverse of :meth:`x_product`, formed exactly as a reversed product."""
        out = self.identity()
        for i, t in zip(reversed(_letters(word)), reversed(list(params))):
            out = out @ self.x(i, -t)
        return out


def _nilpotent_powers_exact(mat: List[List[Fraction]]) -> List[np.ndarray]:
    dim = len(mat)
    ident = [[Fraction(1) if i == j else Fraction(0) for j in range(dim)] for i in range(dim)]
    powers = [np.eye(dim, dtype=complex)]
    cur = ident
    k = 0
    while True:
        k += 1
        cur = _frac_matmul(cur, mat)
        if all(all(x == 0 for x in row) for row in cur):
            break
        fk = _factorial(k)
        powers.append(
            np.array([[complex(x / fk) for x in row] for row in cur])
        )
        if k > dim:
            raise AssertionError("generator not nilpotent")
    return powers


def _poly_eval(powers: List[np.ndarray], t: complex) -> np.ndarray:
    out = powers[0].copy()
    tk = 1.0 + 0.0j
    for p in powers[1:]:
        tk = tk * t
        out = out + tk * p
    return out


def _frac_matmul(a, b):
    dim = len(a)
    return [
        [sum(a[i][l] * b[l][j] for l in range(dim)) for j in range(dim)]
        for i in range(dim)
    ]


def _single_support(v: np.ndarray, tol: float = 1e-12) -> int:
    idx = int(np.argmax(np.abs(v)))
    rest = np.abs(v).sum() - abs(v[idx])
    if rest > tol * max(1.0, abs(v[idx])):
        raise AssertionError("vector not supported on a single basis line")
    return idx


@lru_cache(maxsize=None)
def fundamental_family(series: str, rank: int) -> FundamentalFamily:
    """Cached family for a supported type, e.g. ``fundamental_family("A", 2)``."""
    return FundamentalFamily(build_cartan(series, rank))


# ---------------------------------------------------------------------------
# coefficient extraction
# ---------------------------------------------------------------------------

def coeff(module: WeightModule, v: np.ndarray, basis_index: int) -> complex:
    """Coefficient of the canonical basis vector ``basis_index`` in ``v``."""
    return complex(v[basis_index])


def extremal_coeff(module: WeightModule, v: np.ndarray, ref: np.ndarray) -> complex:
    """Coefficient of ``v`` along an extremal-weight reference vector.

    ``ref`` must span a one-dimensional weight space (true for any
    Weyl-orbit image of the highest weight vector), so the coefficient
    <v, ref> is well defined independently of basis scaling.
    """
    idx = _single_support(ref)
    return complex(v[idx] / ref[idx])


def minor(
    family: FundamentalFamily,
    g: GroupElement,
    i: int,
    w_left=(),
    w_right=(),
) -> complex:
    """Generalized minor <g . w_right v+, w_left v+> in V(omega_i)."""
    mod = family.modules[i]
    vr = family.weyl(w_right).block(i)[:, 0] if _letters(w_right) else _unit(mod.dim, 0)
    vl = family.weyl(w_left).block(i)[:, 0] if _letters(w_left) else _unit(mod.dim, 0)
    return extremal_coeff(mod, g.block(i) @ vr, vl)


def rho_minor(family: FundamentalFamily, g: GroupElement) -> complex:
    """<g v-_rho, v+_rho>, exposed as the product of the fundamental minors."""
    out = 1.0 + 0.0j
    for i in range(family.rank):
        out *= extremal_coeff(
            family.modules[i], g.block(i) @ family.vminus[i], _unit(family.modules[i].dim, 0)
        )
    return out


def _unit(dim: int, idx: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[idx] = 1.0
    return v
