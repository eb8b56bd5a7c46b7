"""The mirror datum: fibers, superpotential, volume forms, Whittaker functions.

A point of the fiber over h is stored through its chart coordinates
a in (C*)^N: the flag representative is x_{i_1}(a_1)...x_{i_N}(a_N),
which equals the *inverse* of the upper unipotent factor u of the group
point g = u e^h ubar^{-1}.  The lower factor ubar is pinned by the fiber
condition; its simple coordinates come out of the opposite Gaussian
decomposition of e^{-h} x(a) w0dot, so the superpotential needs two
matrix coefficients per node and nothing else.

Sign convention (documented once, pinned by the rank-1 oracle tests):
with these chart coordinates e_i^*(u) = -(sum of a_j over letters i),
so the rank-1 superpotential reads -(a + e^{alpha(h)}/a)/z; the familiar
"u + q/u" shape corresponds to a -> -a.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .chevgroup import (
    GaussFactors,
    big_cell_coords,
    estar,
    gauss_minus_plus,
    lemma_yi,
    lower_factor,
)
from .errors import OffFiberError, TodaMirrorError
from .reps import FundamentalFamily, GroupElement, rho_minor
from .rootsys import WeylWord, _letters, simple_root_values


# ---------------------------------------------------------------------------
# fiber points
# ---------------------------------------------------------------------------

@dataclass
class MirrorPoint:
    """A point of the fiber Z_h in reduced-word chart coordinates."""

    family: FundamentalFamily
    word: Tuple[int, ...]
    a: np.ndarray
    h: np.ndarray
    z: float
    gauss: GaussFactors = field(repr=False, default=None)

    @property
    def N(self) -> int:
        return len(self.a)

    def flag_element(self) -> GroupElement:
        """x(a) = u^{-1}, the chart representative of the flag."""
        return self.family.x_product(self.word, self.a)

    def u_element(self) -> GroupElement:
        return self.family.x_product_inverse(self.word, self.a)

    def ubar_inverse(self) -> GroupElement:
        """ubar^{-1} = the U- factor of e^{-h} x(a) w0dot, recovered fully."""
        M = self._gauss_argument()
        ybar, _ = lower_factor(self.family, M)
        return ybar

    def group_point(self) -> GroupElement:
        """g = u e^h ubar^{-1}."""
        return self.u_element() @ self.family.torus(self.h) @ self.ubar_inverse()

    def _gauss_argument(self) -> GroupElement:
        fam = self.family
        return fam.torus(-self.h) @ self.flag_element() @ fam.w0dot


def mirror_point(
    family: FundamentalFamily,
    a: Sequence[complex],
    h: Sequence[complex],
    z: float = 1.0,
    word=None,
    validate: bool = True,
) -> MirrorPoint:
    """Construct (and by default validate) a point of Z_h.

    Validation checks that all chart coordinates are nonzero, that the
    Gaussian decomposition behind the f-coordinates succeeds, and that
    the reconstructed group point really maps B+ to B-.
    """
    word = _letters(family.w0_word if word is None else word)
    a = np.asarray(a, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if len(word) != len(a):
        raise ValueError("coordinate count does not match the word length")
    p = MirrorPoint(family, word, a, h, float(z))
    if np.any(np.abs(a) == 0.0):
        raise OffFiberError("chart coordinates must be nonzero")
    gauss = gauss_minus_plus(family, p._gauss_argument())
    if not gauss.success:
        raise OffFiberError(
            f"point leaves the big cell: principal minor {gauss.failing_index} vanishes"
        )
    p.gauss = gauss
    if validate:
        g = p.group_point()
        for k in range(family.rank):
            col = g.block(k)[:, 0]
            low_idx, _ = family._low_support[k]
            resid = np.abs(col).sum() - abs(col[low_idx])
            if resid > 1e-10 * max(abs(col[low_idx]), 1e-30):
                raise OffFiberError(
                    f"reconstructed point violates g.B+ = B- at node {k} "
                    f"(residual {resid:.2e})"
                )
    return p


# ---------------------------------------------------------------------------
# superpotential
# ---------------------------------------------------------------------------

@dataclass
class SuperpotentialValue:
    total: complex
    e_part: np.ndarray
    f_part: np.ndarray


def superpotential_from_uinv(
    family: FundamentalFamily, u_inv: GroupElement, h, z: float
) -> SuperpotentialValue:
    """Superpotential of the fiber point with flag representative u_inv.

    e_i^*(u) = -e_i^*(u_inv); f_i^*(ubar) = -f_i^*(ybar) where ybar is
    the U- factor of e^{-h} u_inv w0dot.
    """
    h = np.asarray(h, dtype=complex)
    e_part = np.array([-estar(family, u_inv, i) for i in range(family.rank)])
    M = family.torus(-h) @ u_inv @ family.w0dot
    gauss = gauss_minus_plus(family, M)
    if not gauss.success:
        raise OffFiberError(
            f"point leaves the fiber: principal minor {gauss.failing_index} vanishes"
        )
    f_part = -gauss.fstar
    total = (e_part.sum() + f_part.sum()) / z
    return SuperpotentialValue(complex(total), e_part, f_part)


def superpotential(p: MirrorPoint) -> SuperpotentialValue:
    """F(p) = (1/z)(sum_i e_i^*(u) + sum_i f_i^*(ubar)) on the chart."""
    letters = p.word
    e_part = np.zeros(p.family.rank, dtype=complex)
    for j, i in enumerate(letters):
        e_part[i] -= p.a[j]
    gauss = p.gauss or gauss_minus_plus(p.family, p._gauss_argument())
    if not gauss.success:
        raise OffFiberError("point leaves the fiber")
    f_part = -gauss.fstar
    total = (e_part.sum() + f_part.sum()) / p.z
    return SuperpotentialValue(complex(total), e_part, f_part)


def translate(p: MirrorPoint, h) -> MirrorPoint:
    """Translation action: same flag (same chart coordinates), shifted h."""
    h = np.asarray(h, dtype=complex)
    return mirror_point(p.family, p.a, p.h + h, p.z, word=p.word)


# ---------------------------------------------------------------------------
# volume forms
# ---------------------------------------------------------------------------

def gklo_weight(family: FundamentalFamily, u: GroupElement) -> complex:
    """<u v-_rho, v+_rho>: the density relating the two volume forms.

    Computed as the product over nodes of the fundamental minors
    <u v-_{omega_i}, v+_{omega_i}>.
    """
    return rho_minor(family, u)


def _rho_minor_fi_ratio(family: FundamentalFamily, u: GroupElement, i: int) -> complex:
    """<u v-_rho, f_i v+_rho> / <u v-_rho, v+_rho>.

    Only the node-i slot of f_i v+_rho survives, so the ratio reduces to
    the corresponding ratio in V(omega_i).
    """
    mod = family.modules[i]
    w = u.block(i) @ family.vminus[i]
    return complex(w[family.f1_index[i]] / w[0])


def predicted_pullback_factor(
    family: FundamentalFamily,
    word,
    a: np.ndarray,
    transform: str,
    i: Optional[int] = None,
    s: complex = 0.0,
    h=None,
    form: str = "plain",
) -> complex:
    """Closed-form pullback factor of the volume form under left translation.

    ``transform`` is one of ``"torus"``, ``"y"``, ``"x"``; ``form`` picks
    the plain chart form or its rho-minor-weighted variant.
    """
    fam = family
    u = fam.x_product(word, a)
    if transform == "torus":
        plain = 1.0 + 0.0j
    elif transform == "y":
        e = sum(a[j] for j, l in enumerate(_letters(word)) if l == i)
        plain = 1.0 / (1.0 + e * s)
    elif transform == "x":
        ratio = _rho_minor_fi_ratio(fam, u, i)
        plain = 1.0 / (1.0 + ratio * s)
    else:
        raise ValueError(f"unknown transform {transform!r}")
    if form == "plain":
        return complex(plain)
    if form != "gklo":
        raise ValueError(f"unknown form {form!r}")
    if transform == "torus":
        return complex(np.exp(2.0 * np.asarray(h, dtype=complex).sum()))
    if transform == "x":
        return 1.0 + 0.0j
    # y-translation of the weighted form: density ratio times plain factor
    g = fam.y(i, s)
    new_coords = big_cell_coords(fam, g @ u, word)
    u2 = fam.x_product(word, new_coords)
    return complex(rho_minor(fam, u2) / rho_minor(fam, u) * plain)


def chart_jacobian_ratio(
    family: FundamentalFamily,
    word,
    a: Sequence[complex],
    transform: str,
    i: Optional[int] = None,
    s: complex = 0.0,
    h=None,
    form: str = "plain",
    fd_step: float = 1e-6,
) -> Tuple[complex, complex]:
    """Numeric pullback factor of the volume form, with its prediction.

    The induced coordinate map a -> a' (recomputed by peeling the
    translated flag) is differentiated by central differences; the
    pullback factor is det(da'/da) * prod(a_j / a'_j), times the density
    ratio for the weighted form.  Returns (numeric, predicted).
    """
    fam = family
    word = _letters(word)
    a = np.asarray(a, dtype=complex)
    n = len(a)

    if transform == "torus":
        g = fam.torus(h)
    elif transform == "y":
        g = fam.y(i, s)
    elif transform == "x":
        g = fam.x(i, s)
    else:
        raise ValueError(f"unknown transform {transform!r}")

    def image(coords: np.ndarray) -> np.ndarray:
        return big_cell_coords(fam, g @ fam.x_product(word, coords), word)

    center = image(a)
    jac = np.empty((n, n), dtype=complex)
    for j in range(n):
        step = fd_step * max(1.0, abs(a[j]))
        ap = a.copy()
        am = a.copy()
        ap[j] += step
        am[j] -= step
        jac[:, j] = (image(ap) - image(am)) / (2.0 * step)
    numeric = complex(np.linalg.det(jac) * np.prod(a / center))
    if form == "gklo":
        dens = rho_minor(fam, fam.x_product(word, center)) / rho_minor(
            fam, fam.x_product(word, a)
        )
        numeric *= dens
    predicted = predicted_pullback_factor(fam, word, a, transform, i, s, h, form)
    return numeric, predicted


# ---------------------------------------------------------------------------
# Whittaker functions on the zero fiber
# ---------------------------------------------------------------------------

def _psi_plus_of_flag(family: FundamentalFamily, u_inv: GroupElement, z: float) -> complex:
    chi = sum(-estar(family, u_inv, i) for i in range(family.rank))
    return complex(np.exp(chi / z))


def _psi_minus_of_flag(family: FundamentalFamily, u_inv: GroupElement, z: float) -> complex:
    delta = rho_minor(family, u_inv)
    if abs(delta) < 1e-300:
        raise OffFiberError("rho-minor vanishes: pole of the lower Whittaker vector")
    gauss = gauss_minus_plus(family, u_inv @ family.w0dot)
    if not gauss.success:
        raise OffFiberError("point leaves the zero fiber")
    chibar = (-gauss.fstar).sum()
    return complex(np.exp(chibar / z) / delta)


def _require_zero_fiber(p: MirrorPoint):
    if np.abs(np.asarray(p.h)).max() > 0:
        raise TodaMirrorError("Whittaker vectors live on the h = 0 fiber")


def psi_plus(p: MirrorPoint) -> complex:
    """exp(chi(u)) with chi(e_i) = 1/z, on the zero fiber."""
    _require_zero_fiber(p)
    return _psi_plus_of_flag(p.family, p.flag_element(), p.z)


def psi_minus(p: MirrorPoint) -> complex:
    """exp(chibar(ubar)) / <u^{-1} v-_rho, v+_rho> with chibar(f_i) = 1/z."""
    _require_zero_fiber(p)
    return _psi_minus_of_flag(p.family, p.flag_element(), p.z)


def whittaker_vector_check(
    p: MirrorPoint, i: int, which: str = "plus", fd_step: float = 1e-4
) -> float:
    """Relative residual of the Whittaker-vector property at p.

    ``which="plus"`` differentiates the e_i-action on psi+, ``"minus"``
    the f_i-action on psi-; either derivative must equal psi/z.  The
    f_i-action is evaluated through the closed-form factorization
    u y_i(s) = b_(s) u_(s), whose Borel part contributes the section
    weight 1/(1 + s e_i^*(u)).
    """
    fam = p.family
    _require_zero_fiber(p)
    x_a = p.flag_element()

    if which == "plus":
        psi0 = psi_plus(p)

        def value(s: float) -> complex:
            return _psi_plus_of_flag(fam, fam.x(i, -s) @ x_a, p.z)

    elif which == "minus":
        psi0 = psi_minus(p)
        u = p.u_element()
        e_i = estar(fam, u, i)

        def value(s: float) -> complex:
            b, u_s = lemma_yi(fam, u, i, s)
            u_s_inv = u_s.inv()
            return _psi_minus_of_flag(fam, u_s_inv, p.z) / (1.0 + s * e_i)

    else:
        raise ValueError("which must be 'plus' or 'minus'")

    deriv = (value(fd_step) - value(-fd_step)) / (2.0 * fd_step)
    return float(abs(deriv - psi0 / p.z) / abs(psi0))
