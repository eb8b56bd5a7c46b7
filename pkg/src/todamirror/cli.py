"""Command-line front end for the verification workflows.

Subcommands: roots, integrate, verify-toda, crit, braid-check,
identities.  Every run writes its full resolved configuration into the
JSON report so results are reproducible; Weyl word letters are 1-based
on this surface (0-based internally).

Exit codes: 0 verification passed, 1 verification failed, 2 usage or
runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import crit as crit_mod
from . import mirror as mirror_mod
from . import toda as toda_mod
from .errors import TodaMirrorError
from .quadrature import CycleSpec, braid_compare, integrand_csv, s_gamma
from .reps import fundamental_family
from .rootsys import (
    all_reduced_words_w0,
    build_cartan,
    invariant_form_h,
    parse_type,
    positive_roots,
    reduced_word_w0,
)


def _parse_floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_word(text):
    return tuple(int(x) - 1 for x in text.split(",") if x.strip())


def _family(args):
    series, rank = parse_type(args.type)
    return fundamental_family(series, rank)


def _resolve_h(args, rank):
    if args.h is None:
        return np.zeros(rank)
    h = np.asarray(_parse_floats(args.h))
    if len(h) != rank:
        raise TodaMirrorError(f"--h needs {rank} coroot coordinates")
    return h


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get("TODAMIRROR_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _emit(args, payload, verdict_line):
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(verdict_line)


def _h_report(datum, h):
    _, B = invariant_form_h(datum)
    return {
        "coroot": [float(x) for x in h],
        "orthonormal": [float(x) for x in np.linalg.solve(B, h)],
    }


def cmd_roots(args):
    series, rank = parse_type(args.type)
    datum = build_cartan(series, rank)
    rs = positive_roots(datum)
    word = reduced_word_w0(datum)
    payload = {
        "type": datum.label,
        "cartan": [list(r) for r in datum.cartan],
        "symmetrizers": list(datum.d),
        "gram_hstar": [[float(x) for x in row] for row in datum.gram_hstar],
        "positive_roots": [list(r) for r in rs.positive_roots],
        "N": rs.N,
        "highest_root": list(rs.highest_root),
        "w0_word": [l + 1 for l in word.letters],
        "reduced_words_of_w0": len(all_reduced_words_w0(datum)),
    }
    _emit(args, payload, f"ok: {datum.label}, N = {rs.N}")
    return 0


def cmd_integrate(args):
    fam = _family(args)
    h = _resolve_h(args, fam.rank)
    word = _parse_word(args.word) if args.word else fam.w0_word.letters
    radii = np.asarray(_parse_floats(args.radii)) if args.radii else None
    spec = CycleSpec(
        kind=args.cycle, word=word, radii=radii, nodes_per_dim=args.nodes
    )
    res = s_gamma(fam, spec, h, args.z, threads=_threads(args))
    if args.csv:
        integrand_csv(fam, spec, h, args.z, args.csv)
    payload = json.loads(res.to_json())
    payload["h_coordinates"] = _h_report(fam.datum, h)
    _emit(
        args,
        payload,
        f"ok: S = {res.value:.12g}, refinement delta {res.refinement_delta:.3g}",
    )
    return 0


def cmd_verify_toda(args):
    fam = _family(args)
    h = _resolve_h(args, fam.rank)
    word = _parse_word(args.word) if args.word else fam.w0_word.letters
    spec = CycleSpec(kind=args.cycle, word=word, nodes_per_dim=args.nodes)
    rep = toda_mod.verify(
        fam, spec, h, args.z, fd_step=args.fd_step, tolerance=args.tol,
        threads=_threads(args),
    )
    payload = json.loads(rep.to_json())
    payload["h_coordinates"] = _h_report(fam.datum, h)
    verdict = "pass" if rep.verdict else "FAIL"
    _emit(
        args,
        payload,
        f"{verdict}: relative Toda residual {rep.residual_rel:.3e} "
        f"(tolerance {args.tol:g})",
    )
    return 0 if rep.verdict else 1


def cmd_crit(args):
    fam = _family(args)
    h = _resolve_h(args, fam.rank)
    out = {"type": fam.datum.label, "z": args.z, "h_coordinates": _h_report(fam.datum, h)}
    ok = True
    for kind, finder in (
        ("positive", crit_mod.find_positive_critical),
        ("negative", crit_mod.find_negative_critical),
    ):
        cp = finder(fam, h, args.z)
        entry = json.loads(cp.to_json())
        if fam.datum.series == "A":
            rep = crit_mod.peterson_check(fam, cp, tolerance=args.tol)
            entry["peterson"] = json.loads(rep.to_json())
            ok = ok and rep.passed
        ok = ok and cp.grad_norm <= args.tol and cp.hessian_definite
        out[kind] = entry
    _emit(args, out, ("pass" if ok else "FAIL") + ": critical points located")
    return 0 if ok else 1


def cmd_braid_check(args):
    fam = _family(args)
    h = _resolve_h(args, fam.rank)
    word1 = _parse_word(args.word) if args.word else fam.w0_word.letters
    if args.word2:
        word2 = _parse_word(args.word2)
    else:
        words = all_reduced_words_w0(fam.datum)
        others = [w for w in words if w != tuple(word1)]
        word2 = others[0] if others else tuple(word1)
    res = braid_compare(
        fam, h, args.z, word1, word2, kind=args.cycle,
        nodes_per_dim=args.nodes, threads=_threads(args),
    )
    payload = {
        "type": fam.datum.label,
        "word_1": [l + 1 for l in word1],
        "word_2": [l + 1 for l in word2],
        "cycle": args.cycle,
        "nodes": args.nodes,
        "h_coordinates": _h_report(fam.datum, h),
        "z": args.z,
        "S_1": {"re": res.value_1.real, "im": res.value_1.imag},
        "S_2": {"re": res.value_2.real, "im": res.value_2.imag},
        "predicted_sign": res.predicted_sign,
        "relative_difference": res.relative_difference,
        "tolerance": args.tol,
    }
    ok = res.relative_difference <= args.tol
    _emit(
        args,
        payload,
        ("pass" if ok else "FAIL")
        + f": word independence, relative difference {res.relative_difference:.3e}",
    )
    return 0 if ok else 1


def cmd_identities(args):
    fam = _family(args)
    rng = np.random.default_rng(args.seed)
    z = args.z
    n = fam.rank
    N = fam.w0_word.length
    checks = {}

    # closed-form Borel factorization identity at random samples
    worst = 0.0
    for _ in range(args.samples):
        u = fam.x_product(fam.w0_word, rng.uniform(0.1, 1.5, N))
        i = int(rng.integers(0, n))
        s = float(rng.uniform(-0.4, 0.9))
        from .chevgroup import lemma_yi

        b, u_s = lemma_yi(fam, u, i, s)
        lhs = u @ fam.y(i, s)
        rhs = b @ u_s
        worst = max(worst, lhs.distance(rhs) / max(lhs.norm(), 1.0))
    checks["borel_factorization_residual"] = worst

    # volume-form pullback factors at a random chart point
    a = rng.uniform(0.4, 1.3, N)
    h = rng.uniform(-0.3, 0.3, n)
    results = []
    for transform, kwargs in (
        ("torus", {"h": h}),
        ("y", {"i": 0, "s": 0.1}),
        ("x", {"i": 0, "s": 0.1}),
    ):
        num, pred = mirror_mod.chart_jacobian_ratio(
            fam, fam.w0_word, a, transform, **kwargs
        )
        results.append(abs(num - pred) / abs(pred))
    checks["pullback_factor_error"] = max(results)
    num, pred = mirror_mod.chart_jacobian_ratio(
        fam, fam.w0_word, a, "torus", h=h, form="gklo"
    )
    checks["weighted_form_torus_error"] = abs(num - pred) / abs(pred)
    num, _ = mirror_mod.chart_jacobian_ratio(
        fam, fam.w0_word, a, "x", i=0, s=0.12, form="gklo"
    )
    checks["weighted_form_uplus_invariance"] = abs(num - 1.0)

    # Whittaker vector residuals on the zero fiber
    p0 = mirror_mod.mirror_point(fam, rng.uniform(0.5, 1.4, N), np.zeros(n), z)
    checks["whittaker_plus_residual"] = max(
        mirror_mod.whittaker_vector_check(p0, i, "plus") for i in range(n)
    )
    checks["whittaker_minus_residual"] = max(
        mirror_mod.whittaker_vector_check(p0, i, "minus") for i in range(n)
    )

    # multiplicativity of the canonical Whittaker function
    checks["whittaker_condition_defect"] = toda_mod.whittaker_condition_check(
        fam,
        [rng.uniform(-0.3, 0.3, n) for _ in range(args.samples)],
        [rng.uniform(0.1, 1.0, N) for _ in range(args.samples)],
        [rng.uniform(0.1, 1.0, N) for _ in range(args.samples)],
        z,
    )

    # translation identity for the superpotential
    p = mirror_mod.mirror_point(fam, rng.uniform(0.5, 1.4, N), np.zeros(n), z)
    sp0 = mirror_mod.superpotential(p)
    hshift = rng.uniform(-0.4, 0.4, n)
    sp1 = mirror_mod.superpotential(mirror_mod.translate(p, hshift))
    from .rootsys import simple_root_values

    scale = np.exp(simple_root_values(fam.datum, hshift))
    checks["translation_identity_error"] = float(
        np.abs(sp1.f_part - scale * sp0.f_part).max()
        + np.abs(sp1.e_part - sp0.e_part).max()
    )

    tol = {
        "borel_factorization_residual": 1e-12,
        "pullback_factor_error": 1e-6,
        "weighted_form_torus_error": 1e-6,
        "weighted_form_uplus_invariance": 1e-6,
        "whittaker_plus_residual": 1e-6,
        "whittaker_minus_residual": 1e-6,
        "whittaker_condition_defect": 1e-10,
        "translation_identity_error": 1e-12,
    }
    payload = {"type": fam.datum.label, "z": z, "samples": args.samples, "checks": {}}
    ok = True
    for name, value in checks.items():
        good = value <= tol[name]
        ok = ok and good
        payload["checks"][name] = {
            "value": value,
            "tolerance": tol[name],
            "pass": bool(good),
        }
    _emit(args, payload, ("pass" if ok else "FAIL") + ": identity suite")
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="todamirror",
        description="Mirror-symmetric quantum Toda verification workflows",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, nodes_default=0):
        sp.add_argument("--type", required=True, help="group type, e.g. A2, B2, G2")
        sp.add_argument("--h", help="comma-separated coroot coordinates of h")
        sp.add_argument("--z", type=float, default=1.0)
        sp.add_argument("--word", help="1-based reduced word, e.g. 1,2,1")
        sp.add_argument("--nodes", type=int, default=nodes_default)
        sp.add_argument("--out", help="write the JSON report to this path")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: TODAMIRROR_THREADS or all cores)")

    sp = sub.add_parser("roots", help="root-system and Weyl data")
    sp.add_argument("--type", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_roots)

    sp = sub.add_parser("integrate", help="compute the cycle integral S")
    common(sp)
    sp.add_argument("--cycle", choices=["torus", "positive"], default="torus")
    sp.add_argument("--radii", help="comma-separated torus radii")
    sp.add_argument("--csv", help="dump integrand samples to this CSV path")
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("verify-toda", help="Toda-Hamiltonian residual of S")
    common(sp)
    sp.add_argument("--cycle", choices=["torus", "positive"], default="torus")
    sp.add_argument("--fd-step", type=float, default=1e-2)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.set_defaults(func=cmd_verify_toda)

    sp = sub.add_parser("crit", help="locate and cross-check critical points")
    common(sp)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_crit)

    sp = sub.add_parser("braid-check", help="word independence of S")
    common(sp)
    sp.add_argument("--cycle", choices=["torus", "positive"], default="torus")
    sp.add_argument("--word2", help="second reduced word (default: a braid move away)")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_braid_check)

    sp = sub.add_parser("identities", help="run the pointwise identity suite")
    common(sp)
    sp.add_argument("--samples", type=int, default=25)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_identities)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except TodaMirrorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
