"""Acceptance suite: the exit criteria, one test per criterion.

Each test prints a single pass/fail line (visible with ``pytest -s`` or
in verbose mode through the test name) and asserts its criterion at the
stated tolerance, including the stated runtime budget where one is given.
Tolerances are pinned here and nowhere else.
"""

import time
from fractions import Fraction

import numpy as np

from todamirror.chevgroup import estar, gauss_minus_plus, lemma_yi, lower_factor
from todamirror.crit import find_negative_critical, find_positive_critical, peterson_check
from todamirror.mirror import (
    chart_jacobian_ratio,
    mirror_point,
    superpotential,
    translate,
    whittaker_vector_check,
)
from todamirror.quadrature import CycleSpec, braid_compare, s_gamma
from todamirror.rootsys import positive_roots, simple_root_values
from todamirror.toda import bessel_k0, verify, whittaker_condition_check

from test_reps import weyl_dimension
from test_chevgroup import _dense_ul_free_lu


def _report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def i0_series(x, terms=80):
    s, term = Fraction(1), Fraction(1)
    xq = Fraction(x).limit_denominator(10**12)
    for k in range(1, terms):
        term *= (xq / 2) ** 2 / k**2
        s += term
    return float(s)


def test_criterion_01_a1_closed_form(families):
    """S over the compact cycle equals 2 pi i I0(2 e^{alpha(h)/2})."""
    fam = families["A1"]
    t0 = time.time()
    worst = 0.0
    for ah in (-1.0, 0.0, 0.5, 1.0):
        res = s_gamma(
            fam, CycleSpec("torus", (0,), nodes_per_dim=64), [ah / 2], 1.0,
            compute_refinement=False,
        )
        oracle = 2j * np.pi * i0_series(2 * np.exp(ah / 2))
        worst = max(worst, abs(res.value - oracle) / abs(oracle))
    elapsed = time.time() - t0
    ok = worst <= 1e-10 and elapsed < 1.0
    _report("criterion 1 (A1 compact-cycle closed form)", ok,
            f"max rel err {worst:.2e} (tol 1e-10), {elapsed:.2f}s (< 1s)")


def test_criterion_02_a1_toda_residual(families):
    """Toda residual of the A1 compact-cycle integral."""
    t0 = time.time()
    rep = verify(
        families["A1"], CycleSpec("torus", (0,), nodes_per_dim=64),
        [0.2], 1.0, fd_step=1e-2, tolerance=1e-6,
    )
    elapsed = time.time() - t0
    richardson_ok = 3.0 < rep.richardson_ratio < 5.0
    ok = rep.verdict and rep.residual_rel <= 1e-6 and richardson_ok and elapsed < 5.0
    _report("criterion 2 (A1 Toda residual, torus)", ok,
            f"rel residual {rep.residual_rel:.2e} (tol 1e-6), "
            f"step-halving ratio {rep.richardson_ratio:.2f}, {elapsed:.2f}s (< 5s)")


def test_criterion_03_a1_positive_cycle(families):
    """Positive cycle: S = 2 K0 (documented orientation: +), plus residual."""
    fam = families["A1"]
    t0 = time.time()
    worst = 0.0
    for ah in (-1.0, 0.0, 0.5, 1.0):
        res = s_gamma(fam, CycleSpec("positive", (0,)), [ah / 2], 1.0,
                      compute_refinement=False)
        oracle = 2.0 * bessel_k0(2 * np.exp(ah / 2)).real
        worst = max(worst, abs(res.value - oracle) / abs(oracle))
    rep = verify(fam, CycleSpec("positive", (0,)), [0.2], 1.0,
                 fd_step=1e-2, tolerance=1e-5)
    elapsed = time.time() - t0
    ok = worst <= 1e-8 and rep.residual_rel <= 1e-5 and elapsed < 10.0
    _report("criterion 3 (A1 positive cycle)", ok,
            f"max rel err vs 2K0 {worst:.2e} (tol 1e-8), "
            f"Toda residual {rep.residual_rel:.2e} (tol 1e-5), {elapsed:.2f}s (< 10s)")


def test_criterion_04_a2_toda_residual(families):
    """A2 Toda residual at 32^3 nodes with the 24^3 refinement check."""
    fam = families["A2"]
    h = [0.15, -0.2]  # |alpha_i(h)| <= 0.5
    assert np.abs(simple_root_values(fam.datum, h)).max() <= 0.5
    t0 = time.time()
    rep = verify(fam, CycleSpec("torus", (0, 1, 0), nodes_per_dim=32), h, 1.0,
                 fd_step=1e-2, tolerance=1e-6)
    res = s_gamma(fam, CycleSpec("torus", (0, 1, 0), nodes_per_dim=32), h, 1.0,
                  check_nodes=24)
    elapsed = time.time() - t0
    delta_rel = res.refinement_delta / abs(res.value)
    ok = (rep.verdict and rep.residual_rel <= 1e-6
          and res.refinement_delta <= 1e-8 and elapsed < 300.0)
    _report("criterion 4 (A2 Toda residual, 32^3 torus)", ok,
            f"rel residual {rep.residual_rel:.2e} (tol 1e-6), "
            f"delta(24^3 vs 32^3) {res.refinement_delta:.2e} "
            f"[{delta_rel:.1e} rel] (tol 1e-8), {elapsed:.1f}s (< 300s)")


def test_criterion_05_braid_independence(families):
    """Word independence of S for A2 and B2."""
    bcA = braid_compare(families["A2"], [0.1, 0.05], 1.0, (0, 1, 0), (1, 0, 1))
    bcB = braid_compare(families["B2"], [0.1, -0.05], 1.0,
                        (0, 1, 0, 1), (1, 0, 1, 0))
    ok = bcA.relative_difference <= 1e-10 and bcB.relative_difference <= 1e-9
    _report("criterion 5 (braid/word independence)", ok,
            f"A2 rel diff {bcA.relative_difference:.2e} (tol 1e-10), "
            f"B2 rel diff {bcB.relative_difference:.2e} (tol 1e-9)")


def test_criterion_06_radius_invariance(families):
    """A2 torus radii (1,1,1) vs (0.7,1.3,1.0) at 48^3 nodes."""
    fam = families["A2"]
    h = [0.1, 0.05]
    kw = dict(compute_refinement=False)
    r1 = s_gamma(fam, CycleSpec("torus", (0, 1, 0), nodes_per_dim=48), h, 1.0, **kw)
    r2 = s_gamma(fam, CycleSpec("torus", (0, 1, 0), nodes_per_dim=48,
                                radii=np.array([0.7, 1.3, 1.0])), h, 1.0, **kw)
    rel = abs(r1.value - r2.value) / abs(r1.value)
    ok = rel <= 1e-8
    _report("criterion 6 (radius invariance)", ok, f"rel agreement {rel:.2e} (tol 1e-8)")


def test_criterion_07_bare_form_normalization(families):
    """Integral of the chart volume form alone equals (2 pi i)^N."""
    worst = 0.0
    for name, word in (("A1", (0,)), ("A2", (0, 1, 0)), ("B2", (0, 1, 0, 1))):
        fam = families[name]
        res = s_gamma(fam, CycleSpec("torus", word, nodes_per_dim=8),
                      np.zeros(fam.rank), 1.0, bare_form=True,
                      compute_refinement=False)
        expect = (2j * np.pi) ** len(word)
        worst = max(worst, abs(res.value - expect) / abs(expect))
    ok = worst <= 1e-12
    _report("criterion 7 (bare-form normalization)", ok,
            f"max rel err {worst:.2e} (tol 1e-12)")


def test_criterion_08_critical_points(families):
    """Critical parameters, gradient norms, Peterson/Kim cross-checks."""
    famA1 = families["A1"]
    hc = 0.2
    root = np.exp(hc)  # e^{alpha(h)/2} with alpha(h) = 2 hc
    cp1 = find_positive_critical(famA1, [hc], 1.0)
    cn1 = find_negative_critical(famA1, [hc], 1.0)
    param_err = max(abs(cp1.params[0] - root), abs(cn1.params[0] - root))

    famA2 = families["A2"]
    cp2 = find_positive_critical(famA2, [0.1, -0.2], 1.0)
    cn2 = find_negative_critical(famA2, [0.1, -0.2], 1.0)
    grad = max(cp2.grad_norm, cn2.grad_norm)

    reports = [peterson_check(famA1, cp1, tolerance=1e-8),
               peterson_check(famA1, cn1, tolerance=1e-8),
               peterson_check(famA2, cp2, tolerance=1e-8)]
    peterson_ok = all(r.passed for r in reports)

    ok = param_err <= 1e-8 and grad <= 1e-10 and peterson_ok
    _report("criterion 8 (critical points + Peterson/Kim)", ok,
            f"A1 param err {param_err:.2e} (tol 1e-8), "
            f"A2 grad norm {grad:.2e} (tol 1e-10), "
            f"Peterson checks {'all pass' if peterson_ok else 'FAIL'}")


def test_criterion_09_identity_suites(families, rng):
    """Pointwise identity suites at their stated tolerances."""
    details = []

    # Borel factorization identity, 100 samples in each of A2, B2, G2
    worst = 0.0
    for name in ("A2", "B2", "G2"):
        fam = families[name]
        N = fam.w0_word.length
        for _ in range(100):
            u = fam.x_product(fam.w0_word, rng.uniform(0.1, 1.5, N))
            i = int(rng.integers(0, fam.rank))
            s = float(rng.uniform(-0.5, 1.0))
            if abs(1 + s * estar(fam, u, i)) < 1e-3:
                continue
            lhs = u @ fam.y(i, s)
            b, u_s = lemma_yi(fam, u, i, s)
            worst = max(worst, lhs.distance(b @ u_s) / max(lhs.norm(), 1.0))
    ok1 = worst <= 1e-12
    details.append(f"factorization identity {worst:.2e} (tol 1e-12)")

    # volume-form pullback factors (A2, A3)
    worst = 0.0
    for name in ("A2", "A3"):
        fam = families[name]
        a = rng.uniform(0.5, 1.3, fam.w0_word.length)
        for transform, kwargs in (
            ("torus", {"h": rng.uniform(-0.3, 0.3, fam.rank)}),
            ("y", {"i": 0, "s": 0.1}),
            ("x", {"i": fam.rank - 1, "s": 0.1}),
        ):
            num, pred = chart_jacobian_ratio(fam, fam.w0_word, a, transform, **kwargs)
            worst = max(worst, abs(num - pred) / abs(pred))
    ok2 = worst <= 1e-6
    details.append(f"pullback factors {worst:.2e} (tol 1e-6)")

    # weighted-form invariances
    worst = 0.0
    for name in ("A2", "A3"):
        fam = families[name]
        a = rng.uniform(0.5, 1.3, fam.w0_word.length)
        h = rng.uniform(-0.3, 0.3, fam.rank)
        num, pred = chart_jacobian_ratio(fam, fam.w0_word, a, "torus", h=h, form="gklo")
        worst = max(worst, abs(num - pred) / abs(pred))
        num, _ = chart_jacobian_ratio(fam, fam.w0_word, a, "x", i=0, s=0.1, form="gklo")
        worst = max(worst, abs(num - 1.0))
    ok3 = worst <= 1e-6
    details.append(f"weighted-form factors {worst:.2e} (tol 1e-6)")

    # Whittaker-vector residuals: psi+ in all types, psi- in A1 and A2
    worst = 0.0
    for name, fam in families.items():
        p = mirror_point(fam, rng.uniform(0.5, 1.4, fam.w0_word.length),
                         np.zeros(fam.rank), 1.0)
        for i in range(fam.rank):
            worst = max(worst, whittaker_vector_check(p, i, "plus"))
    for name in ("A1", "A2"):
        fam = families[name]
        p = mirror_point(fam, rng.uniform(0.5, 1.4, fam.w0_word.length),
                         np.zeros(fam.rank), 1.0)
        for i in range(fam.rank):
            worst = max(worst, whittaker_vector_check(p, i, "minus"))
    ok4 = worst <= 1e-6
    details.append(f"Whittaker vectors {worst:.2e} (tol 1e-6)")

    # multiplicativity of the canonical Whittaker function
    worst = 0.0
    for name in ("A1", "A2", "B2"):
        fam = families[name]
        N, n = fam.w0_word.length, fam.rank
        worst = max(worst, whittaker_condition_check(
            fam,
            [rng.uniform(-0.4, 0.4, n) for _ in range(10)],
            [rng.uniform(0.1, 1.2, N) for _ in range(10)],
            [rng.uniform(0.1, 1.2, N) for _ in range(10)],
            1.0,
        ))
    ok5 = worst <= 1e-10
    details.append(f"multiplicativity defect {worst:.2e} (tol 1e-10)")

    # translation identity for the superpotential
    worst = 0.0
    for name in ("A1", "A2", "B2"):
        fam = families[name]
        p0 = mirror_point(fam, rng.uniform(0.5, 1.4, fam.w0_word.length),
                          np.zeros(fam.rank), 1.0)
        sp0 = superpotential(p0)
        h = rng.uniform(-0.4, 0.4, fam.rank)
        sp1 = superpotential(translate(p0, h))
        scale = np.exp(simple_root_values(fam.datum, h))
        worst = max(worst,
                    float(np.abs(sp1.f_part - scale * sp0.f_part).max()),
                    float(np.abs(sp1.e_part - sp0.e_part).max()))
    ok6 = worst <= 1e-12
    details.append(f"translation identity {worst:.2e} (tol 1e-12)")

    ok = ok1 and ok2 and ok3 and ok4 and ok5 and ok6
    _report("criterion 9 (identity suites)", ok, "; ".join(details))


def test_criterion_10_construction_suite(families, rng):
    """Representation dimensions and Gaussian-decomposition cross-checks."""
    dim_ok = all(
        mod.dim == weyl_dimension(fam.datum, i)
        for fam in families.values()
        for i, mod in enumerate(fam.modules)
    )

    # type-A agreement with the dense triangular factorization
    worst_a = 0.0
    for name in ("A2", "A3"):
        fam = families[name]
        N = fam.w0_word.length
        for _ in range(10):
            M = (fam.y_product(fam.w0_word, rng.uniform(0.2, 1.4, N))
                 @ fam.torus(rng.uniform(-0.4, 0.4, fam.rank))
                 @ fam.x_product(fam.w0_word, rng.uniform(0.2, 1.4, N)))
            gf = gauss_minus_plus(fam, M)
            L, _ = _dense_ul_free_lu(M.block(0))
            for i in range(fam.rank):
                worst_a = max(worst_a, abs(gf.fstar[i] - L[i + 1, i]))
    ok_a = worst_a <= 1e-12

    # B2/G2 reconstruction through the recovered lower factor
    worst_rec = 0.0
    for name in ("B2", "G2"):
        fam = families[name]
        N = fam.w0_word.length
        for _ in range(5):
            ytrue = fam.y_product(fam.w0_word, rng.uniform(0.2, 1.2, N))
            M = ytrue @ fam.torus(rng.uniform(-0.3, 0.3, fam.rank)) @ fam.x_product(
                fam.w0_word, rng.uniform(0.1, 0.9, N))
            ybar, _ = lower_factor(fam, M)
            rebuilt = ybar @ (ybar.inv() @ M)
            worst_rec = max(worst_rec,
                            ybar.distance(ytrue) / max(1.0, ytrue.norm()),
                            rebuilt.distance(M) / max(1.0, M.norm()))
            b = ybar.inv() @ M
            for k in range(fam.rank):
                col = b.block(k)[:, 0]
                worst_rec = max(worst_rec,
                                float(np.abs(col[1:]).max() / max(abs(col[0]), 1.0)))
    ok_rec = worst_rec <= 1e-10

    ok = dim_ok and ok_a and ok_rec
    _report("criterion 10 (construction suite)", ok,
            f"dims {'match' if dim_ok else 'MISMATCH'} Weyl formula; "
            f"type-A dense-LU agreement {worst_a:.2e} (tol 1e-12); "
            f"B2/G2 reconstruction {worst_rec:.2e} (tol 1e-10)")
