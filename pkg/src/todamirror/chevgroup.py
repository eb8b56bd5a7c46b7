"""Group-level algorithms: coordinate extraction and decompositions.

Everything here works through two inner products per node, taken in the
fundamental representations:

* ``e_i^*`` / ``f_i^*`` read off the simple-root coefficient of a
  unipotent element from the top two weight spaces of V(omega_i);
* the opposite Gaussian decomposition M = ybar * b  (ybar lower
  unipotent, b in the positive Borel) needs only the ratios
  <M v+, f_i v+> / <M v+, v+>;
* full unipotent factorizations along a reduced word are computed by
  peeling one letter at a time, each letter given exactly by a ratio of
  two matrix coefficients (the peeled minor is linear in the parameter).

No series logarithms and no iterative solvers are involved; failures
surface as vanishing denominators and raise with diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import FactorizationError, SingularParameterError
from .reps import FundamentalFamily, GroupElement
from .rootsys import _letters

#: relative tolerance declaring a principal minor "vanished"
MINOR_TOL = 1e-12


@dataclass
class GaussFactors:
    """Result of the opposite Gaussian (U- * B+) decomposition."""

    fstar: Optional[np.ndarray]  # f_i^*(ybar) per node
    principal_minors: np.ndarray  # <M v+_{omega_i}, v+_{omega_i}> per node
    success: bool
    failing_index: Optional[int] = None


def _unipotent_check(family: FundamentalFamily, u: GroupElement, tag: str, tol=1e-9):
    """Torus-part minors of a unipotent element must equal 1."""
    for i in range(family.rank):
        top = u.block(i)[0, 0]
        low_idx, low_ref = family._low_support[i]
        low = (u.block(i) @ family.vminus[i])[low_idx] / low_ref
        if abs(top - 1.0) > tol or abs(low - 1.0) > tol:
            raise FactorizationError(
                f"element is not unipotent ({tag}): torus minors "
                f"({top:.3g}, {low:.3g}) differ from 1 at node {i}"
            )


def estar(family: FundamentalFamily, u: GroupElement, i: int) -> complex:
    """e_i^*(u) for u in U+: coefficient of e_i in log(u).

    Extracted as <u . f_i v+, v+> in V(omega_i); valid in every type.
    """
    _unipotent_check(family, u, "estar")
    fi = family.f1_index[i]
    return complex(u.block(i)[0, fi])


def fstar(family: FundamentalFamily, ubar: GroupElement, i: int) -> complex:
    """f_i^*(ubar) for ubar in U-: coefficient of f_i in log(ubar)."""
    _unipotent_check(family, ubar, "fstar")
    fi = family.f1_index[i]
    return complex(ubar.block(i)[fi, 0])


def gauss_minus_plus(family: FundamentalFamily, M: GroupElement) -> GaussFactors:
    """Decompose M = ybar * b with ybar in U-, b in B+ (coefficients only).

    Succeeds iff every principal minor <M v+, v+> is nonzero; on failure
    the offending node index and minor magnitude are reported instead of
    returning garbage.  The full ybar is available separately through
    :func:`lower_factor`.
    """
    n = family.rank
    minors = np.empty(n, dtype=complex)
    fs = np.empty(n, dtype=complex)
    for i in range(n):
        blk = M.block(i)
        minors[i] = blk[0, 0]
        scale = np.linalg.norm(blk)
        if abs(minors[i]) <= MINOR_TOL * max(scale, 1.0):
            return GaussFactors(None, minors, False, failing_index=i)
        fs[i] = blk[family.f1_index[i], 0] / blk[0, 0]
    return GaussFactors(fs, minors, True)


class _PeelPlan:
    """Precomputed extraction slots for letterwise peeling along a word.

    Peeling the prefix letter i_j off a product along a reduced word
    tracks, in each module V(omega_k), the extremal weight line at
    w_(j) w0 omega_k (upper peel) or w_(j) omega_k (lower peel), where
    w_(j) = s_{i_j} ... s_{i_N} is the remaining suffix.  The peeled
    coefficient there is a polynomial in the letter whose degree is the
    string multiplicity m; the letter is its (common) root across
    modules.  m = 0 slots carry no condition and are skipped.
    """

    def __init__(self, family: FundamentalFamily, word, lower: bool):
        datum = family.datum
        letters = _letters(word)
        A = np.array(datum.cartan, dtype=np.int64)
        self.letters = letters
        self.lower = lower
        # per module: weight -> basis index map (extremal lines are 1-dim)
        slot_rows: List[List[Tuple[int, int]]] = []  # [pos][k] = (index, m)
        pairings = []
        for k, mod in enumerate(family.modules):
            start = mod.weights[mod.lowest_index if not lower else 0]
            pairings.append(np.array(start, dtype=np.int64))
        slots_rev: List[List[Tuple[int, int]]] = []
        for pos in range(len(letters) - 1, -1, -1):
            i = letters[pos]
            row = []
            for k, mod in enumerate(family.modules):
                p = pairings[k]
                p = p - p[i] * A[:, i]  # reflect by s_i
                pairings[k] = p
                target = tuple(int(x) for x in p)
                matches = [t for t, w in enumerate(mod.weights) if w == target]
                if len(matches) != 1:
                    raise AssertionError("extremal peel slot is not one-dimensional")
                m = int(p[i]) if not lower else -int(p[i])
                row.append((matches[0], m))
            slots_rev.append(row)
        self.slots = slots_rev[::-1]


def _peel_coords(
    family: FundamentalFamily, M: GroupElement, word, lower: bool
) -> np.ndarray:
    """Letter coordinates of the unipotent prefix of M along ``word``.

    Upper peel: M in x_{i_1}(a_1)...x_{i_N}(a_N) B-; the B- factor only
    rescales the tracked extremal lines.  Lower peel: M = y_{i_1}(c_1)
    ... y_{i_N}(c_N) b with b in B+.

    At each step the tracked coefficient, as a function of the trial
    letter a, is exactly const * (a_true - a)^m (the extremal string
    through the slot is unbroken, so no stray terms survive), which
    pins the letter to a_j = m * [W]_slot / [E_i W]_slot.
    """
    plan = family._peel_plan(word, lower)
    letters = plan.letters
    cur = M.copy()
    coords = np.empty(len(letters), dtype=complex)
    n_mod = len(family.modules)
    for pos, i in enumerate(letters):
        best = None  # (m, -|den|/scale, value)
        all_null = True  # every slot has num ~ 0 as well: the letter is 0
        for k in range(n_mod):
            idx, m = plan.slots[pos][k]
            if m < 1:
                continue
            if lower:
                w = cur.block(k)[:, 0]
                op = family.modules[k].F[i]
            else:
                w = cur.block(k) @ family.vminus[k]
                op = family.modules[k].E[i]
            num = w[idx]
            den = (op @ w)[idx]
            scale = max(np.abs(w).max(), 1e-290)
            if abs(num) > MINOR_TOL * scale:
                all_null = False
            if abs(den) <= MINOR_TOL * scale:
                continue
            cand = (m, -abs(den) / scale, m * num / den)
            if best is None or cand[:2] < best[:2]:
                best = cand
        if best is None:
            if all_null:
                # the element already sits in the smaller cell
                coords[pos] = 0.0
                continue
            raise FactorizationError(
                f"peeling stalled at position {pos} (letter {i}): "
                "all extraction slots degenerate",
                index=pos,
            )
        a = best[2]
        coords[pos] = a
        cur = (family.y(i, -a) if lower else family.x(i, -a)) @ cur
    # remainder must lie in the opposite Borel
    for k in range(n_mod):
        if lower:
            v = cur.block(k)[:, 0]
            lead = abs(v[0])
        else:
            v = cur.block(k) @ family.vminus[k]
            idx, _ = family._low_support[k]
            lead = abs(v[idx])
        resid = np.abs(v).sum() - lead
        if resid > 1e-7 * max(lead, 1.0):
            raise FactorizationError(
                "peeling remainder is not in the opposite Borel",
                residual=float(resid),
            )
    return coords


def _peel_upper_coords(family: FundamentalFamily, M: GroupElement, word) -> np.ndarray:
    return _peel_coords(family, M, word, lower=False)


def big_cell_coords(family: FundamentalFamily, M: GroupElement, word=None) -> np.ndarray:
    """Coordinates of the flag M . B- in the reduced-word chart."""
    word = family.w0_word if word is None else word
    return _peel_upper_coords(family, M, word)


def factorize_unipotent(
    family: FundamentalFamily, u: GroupElement, word=None, tol: float = 1e-10
) -> np.ndarray:
    """Factor u in U+ as x_{i_1}(a_1)...x_{i_N}(a_N) along ``word``.

    The recovered coordinates are multiplied back and must reproduce u to
    ``tol`` (relative); otherwise a :class:`FactorizationError` carrying
    the residual is raised (off the open stratum, typically).
    """
    word = family.w0_word if word is None else word
    _unipotent_check(family, u, "factorize_unipotent")
    coords = _peel_upper_coords(family, u, word)
    small = np.abs(coords) <= 1e-13 * max(1.0, np.abs(coords).max())
    if small.any():
        raise FactorizationError(
            f"coordinate {int(np.argmax(small))} vanishes: off the open stratum",
            index=int(np.argmax(small)),
        )
    rebuilt = family.x_product(word, coords)
    resid = rebuilt.distance(u) / max(u.norm(), 1.0)
    if resid > tol:
        raise FactorizationError(
            f"factorization residual {resid:.3g} exceeds {tol:.1g}",
            residual=float(resid),
        )
    return coords


def lower_factor(
    family: FundamentalFamily, M: GroupElement, word=None
) -> Tuple[GroupElement, np.ndarray]:
    """Recover the full U- factor of M = ybar * b by letterwise peeling.

    Returns (ybar, coords) with ybar = y_{i_1}(c_1)...y_{i_N}(c_N).  The
    peeling order is the family's pinned word unless a word is supplied.
    """
    word = family.w0_word if word is None else word
    coords = _peel_coords(family, M, word, lower=True)
    ybar = family.y_product(word, coords)
    return ybar, coords


def lemma_yi(
    family: FundamentalFamily, u: GroupElement, i: int, s: complex
) -> Tuple[GroupElement, GroupElement]:
    """Closed-form factorization u y_i(s) = b_(s) u_(s).

    b_(s) = (1+s e_i^*(u))^{alpha_i_vee} y_i(s (1+s e_i^*(u))) lies in B-
    and u_(s) in U+.  Singular exactly when 1 + s e_i^*(u) = 0.
    """
    e = estar(family, u, i)
    factor = 1.0 + s * e
    if abs(factor) < 1e-14:
        raise SingularParameterError(
            f"1 + s*e_{i}^*(u) = 0: the factorization of u y_{i}(s) degenerates"
        )
    b = family.coroot_power(i, factor) @ family.y(i, s * factor)
    u_s = (
        family.y(i, -s * factor)
        @ family.coroot_power(i, 1.0 / factor)
        @ u
        @ family.y(i, s)
    )
    return b, u_s


def is_totally_positive(
    family: FundamentalFamily, u: GroupElement, word=None
) -> Tuple[bool, Optional[np.ndarray]]:
    """Whether u lies in the totally positive part of U+.

    True iff the reduced-word factorization exists with all-real,
    all-positive coordinates; the coordinates are returned alongside.
    Positivity does not depend on the word used.
    """
    try:
        coords = factorize_unipotent(family, u, word)
    except FactorizationError:
        return False, None
    real_ok = np.abs(coords.imag) <= 1e-10 * np.maximum(np.abs(coords.real), 1.0)
    if not (real_ok.all() and (coords.real > 0).all()):
        return False, coords
    return True, coords.real
