"""Distinguished integration cycles and the quadrature engine.

Two cycle families are supported:

* ``torus``: the compact cycles |a_j| = r_j, integrated by the product
  trapezoidal rule in the angles.  The integrand extends to an entire
  function of the angles (the superpotential is a Laurent polynomial on
  the chart), so the rule converges geometrically.
* ``positive``: the non-compact totally positive cycles a in R_{>0}^N,
  integrated in logarithmic coordinates over a window sized from the
  measured decay of Re F along coordinate rays.

Grid evaluation is vectorized per chunk; chunk sums are combined by a
fixed-shape pairwise reduction, so results are bitwise reproducible
independently of the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import json
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import QuadratureError, UnsupportedTypeError
from .reps import FundamentalFamily
from .rootsys import _letters, simple_root_values

#: hard cap on the cycle dimension (A3/B2/G2 desk scope tops out at 6)
MAX_DIM = 6

#: default decay margin (in units of F) below the ray maximum; e^{-36}
#: puts the truncated tails at the double-precision floor
DECAY_MARGIN = 36.0


@dataclass
class CycleSpec:
    """Which cycle to integrate over, and how to discretize it."""

    kind: str  # "torus" | "positive"
    word: Tuple[int, ...]
    radii: Optional[np.ndarray] = None  # torus kind
    nodes_per_dim: int = 0  # 0 -> kind default (32 torus, 200 positive)
    log_window: Optional[List[Tuple[float, float]]] = None  # positive kind
    orientation: int = 1

    def __post_init__(self):
        if self.kind not in ("torus", "positive"):
            raise ValueError(f"unknown cycle kind {self.kind!r}")
        self.word = _letters(self.word)
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.nodes_per_dim == 0:
            self.nodes_per_dim = 32 if self.kind == "torus" else 200
        if self.radii is not None:
            self.radii = np.asarray(self.radii, dtype=float)
            if np.any(self.radii <= 0):
                raise ValueError("radii must be positive")


@dataclass
class QuadratureResult:
    value: complex
    node_count: int
    refinement_delta: float
    failures: int = 0
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = dict(self.config)
        payload.update(
            {
                "S": {"re": self.value.real, "im": self.value.imag},
                "node_count": self.node_count,
                "refinement_delta": self.refinement_delta,
                "failures": self.failures,
            }
        )
        return json.dumps(payload)


# ---------------------------------------------------------------------------
# vectorized superpotential evaluation
# ---------------------------------------------------------------------------

def superpotential_grid(
    family: FundamentalFamily, word, a_grid: np.ndarray, h, z: float
) -> np.ndarray:
    """F at every row of ``a_grid`` (shape (nodes, N)).

    Per module: propagate W = x_{i_1}(a_1)...x_{i_N}(a_N) w0dot v+ as a
    batch, then f_i^*(ubar) = -(W[f_i slot]/W[v+ slot]) e^{alpha_i(h)}.
    Aborts if any node sees a vanishing principal minor (off the fiber).
    """
    letters = _letters(word)
    a_grid = np.asarray(a_grid)
    nodes = a_grid.shape[0]
    h = np.asarray(h, dtype=complex)
    alpha_h = simple_root_values(family.datum, h)

    zF = np.zeros(nodes, dtype=complex)
    # e-parts
    for j, i in enumerate(letters):
        zF -= a_grid[:, j]
    # f-parts via batched propagation
    for i, mod in enumerate(family.modules):
        W = np.broadcast_to(family.vminus[i], (nodes, mod.dim)).copy()
        for j in range(len(letters) - 1, -1, -1):
            powers = family._xpow[i][letters[j]]
            t = a_grid[:, j]
            new = W.copy()
            tk = np.ones(nodes, dtype=complex)
            for p in powers[1:]:
                tk = tk * t
                new += tk[:, None] * (W @ p.T)
            W = new
        denom = W[:, 0]
        scale = np.abs(W).max()
        bad = np.abs(denom) <= 1e-13 * max(scale, 1e-290)
        nbad = int(np.count_nonzero(bad))
        if nbad:
            raise QuadratureError(
                f"{nbad} node(s) left the fiber chart at module {i} "
                f"(vanishing principal minor)",
                failures=nbad,
            )
        zF -= (W[:, family.f1_index[i]] / denom) * np.exp(alpha_h[i])
    return zF / z


# ---------------------------------------------------------------------------
# grids and reductions
# ---------------------------------------------------------------------------

def _pairwise_sum(values: List[complex]) -> complex:
    vals = list(values)
    if not vals:
        return 0.0 + 0.0j
    while len(vals) > 1:
        nxt = [vals[k] + vals[k + 1] for k in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _chunked_weighted_sum(
    family: FundamentalFamily,
    word,
    h,
    z: float,
    coords_of: callable,
    weights_of: callable,
    total: int,
    chunk: int,
    threads: int,
    bare_form: bool,
) -> complex:
    """sum over nodes of weight * e^F, chunked and deterministically reduced."""

    def one_chunk(c0: int) -> complex:
        c1 = min(c0 + chunk, total)
        idx = np.arange(c0, c1)
        a = coords_of(idx)
        w = weights_of(idx)
        if bare_form:
            vals = w.astype(complex)
        else:
            vals = w * np.exp(superpotential_grid(family, word, a, h, z))
        return complex(vals.sum())

    starts = list(range(0, total, chunk))
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sums = list(pool.map(one_chunk, starts))
    else:
        sums = [one_chunk(c0) for c0 in starts]
    return _pairwise_sum(sums)


def _digits(idx: np.ndarray, base: int, ndim: int) -> np.ndarray:
    """Mixed-radix digits of flat indices, shape (len(idx), ndim)."""
    out = np.empty((len(idx), ndim), dtype=np.int64)
    rem = idx.copy()
    for d in range(ndim - 1, -1, -1):
        out[:, d] = rem % base
        rem = rem // base
    return out


# ---------------------------------------------------------------------------
# decay scan (positive cycles)
# ---------------------------------------------------------------------------

@dataclass
class DecayRay:
    dim: int
    direction: int  # +1 or -1
    t: np.ndarray
    re_f: np.ndarray
    diverges: bool
    knee: float


@dataclass
class DecayReport:
    rays: List[DecayRay]
    window: List[Tuple[float, float]]
    all_diverge: bool
    summand_bounded: bool


def decay_scan(
    family: FundamentalFamily,
    word,
    h,
    z: float,
    t_range: float = 14.0,
    samples: int = 120,
    margin: float = DECAY_MARGIN,
) -> DecayReport:
    """Scan Re F along the coordinate rays of the positive cycle.

    Each ray fixes the other coordinates at 1 and sends one a_j to 0+ or
    +infinity on a log grid.  The report records whether Re F diverges to
    -infinity on every ray (the decay condition behind convergence), the
    knee where it has dropped ``margin`` below the ray maximum, and the
    per-dimension log windows assembled from the knees.  It also checks
    that no individual superpotential summand tends to +infinity.
    """
    letters = _letters(word)
    N = len(letters)
    h = np.asarray(h, dtype=float)
    rays = []
    window = []
    summand_bounded = True
    for j in range(N):
        knees = []
        for direction in (+1, -1):
            t = np.linspace(0.0, direction * t_range, samples)
            grid = np.ones((samples, N), dtype=complex)
            grid[:, j] = np.exp(t)
            zF = superpotential_grid(family, letters, grid, h, z)
            re_f = zF.real
            # individual summands: e-parts are -a_j (bounded above by 0);
            # f-parts are recovered from the total minus e-part, per node
            e_part = -grid.real.sum(axis=1) / z
            f_tot = re_f - e_part
            if f_tot.max() > 1e3:
                summand_bounded = False
            peak = re_f.max()
            below = np.nonzero(re_f < peak - margin)[0]
            diverges = len(below) > 0 and re_f[-1] < peak - margin
            knee = float(t[below[0]]) if len(below) else direction * t_range
            rays.append(DecayRay(j, direction, t, re_f, bool(diverges), knee))
            knees.append(knee)
        window.append((min(knees[1], -0.5), max(knees[0], 0.5)))
    all_div = all(r.diverges for r in rays)
    return DecayReport(rays, window, all_div, summand_bounded)


# ---------------------------------------------------------------------------
# the integral
# ---------------------------------------------------------------------------

def s_gamma(
    family: FundamentalFamily,
    spec: CycleSpec,
    h,
    z: float,
    compute_refinement: bool = True,
    check_nodes: Optional[int] = None,
    bare_form: bool = False,
    threads: int = 1,
    chunk: int = 1 << 15,
    _no_recurse: bool = False,
) -> QuadratureResult:
    """S_Gamma(h, z) = integral of e^F against the chart volume form.

    ``bare_form=True`` integrates the volume form alone (F set to 0),
    which must give (2 pi i)^N on the torus cycle.  ``check_nodes`` picks
    the coarser grid used for the refinement diagnostic (default: half
    the nodes).
    """
    letters = spec.word
    N = len(letters)
    if N > MAX_DIM:
        raise UnsupportedTypeError(
            f"cycle dimension {N} exceeds the supported maximum {MAX_DIM}"
        )
    h = np.asarray(h, dtype=complex)
    n = spec.nodes_per_dim

    if spec.kind == "torus":
        radii = spec.radii if spec.radii is not None else np.ones(N)
        if len(radii) != N:
            raise ValueError("radii length does not match the cycle dimension")
        dtheta = 2.0 * np.pi / n

        def coords_of(idx):
            ang = _digits(idx, n, N) * dtheta
            return radii[None, :] * np.exp(1j * ang)

        def weights_of(idx):
            return np.full(len(idx), dtheta**N)

        total = n**N
        s = _chunked_weighted_sum(
            family, letters, h, z, coords_of, weights_of, total, chunk, threads, bare_form
        )
        value = spec.orientation * (1j**N) * s
    else:
        if np.abs(h.imag).max() > 0:
            raise ValueError("positive cycles are defined over real h")
        window = spec.log_window
        if window is None:
            window = decay_scan(family, letters, h.real, z).window
        lows = np.array([w[0] for w in window])
        highs = np.array([w[1] for w in window])
        steps = (highs - lows) / (n - 1)

        def coords_of(idx):
            d = _digits(idx, n, N)
            t = lows[None, :] + d * steps[None, :]
            return np.exp(t.astype(complex))

        def weights_of(idx):
            d = _digits(idx, n, N)
            w = np.ones(len(idx))
            for k in range(N):
                edge = (d[:, k] == 0) | (d[:, k] == n - 1)
                w *= np.where(edge, 0.5, 1.0) * steps[k]
            return w

        total = n**N
        s = _chunked_weighted_sum(
            family, letters, h, z, coords_of, weights_of, total, chunk, threads, bare_form
        )
        value = spec.orientation * s

    delta = 0.0
    if compute_refinement and not _no_recurse:
        m = check_nodes if check_nodes is not None else max(2, n // 2)
        coarse_spec = CycleSpec(
            kind=spec.kind,
            word=letters,
            radii=spec.radii,
            nodes_per_dim=m,
            log_window=spec.log_window,
            orientation=spec.orientation,
        )
        coarse = s_gamma(
            family,
            coarse_spec,
            h,
            z,
            compute_refinement=False,
            bare_form=bare_form,
            threads=threads,
            chunk=chunk,
            _no_recurse=True,
        )
        delta = abs(value - coarse.value)

    config = {
        "type": family.datum.label,
        "word": [int(l) + 1 for l in letters],
        "cycle": spec.kind,
        "nodes": n,
        "h": [float(x.real) for x in h] if np.abs(h.imag).max() == 0 else
             [[float(x.real), float(x.imag)] for x in h],
        "z": z,
        "orientation": spec.orientation,
    }
    if spec.kind == "torus":
        config["radii"] = [float(r) for r in (spec.radii if spec.radii is not None else np.ones(N))]
    else:
        config["log_window"] = [[float(a), float(b)] for a, b in window]
    return QuadratureResult(complex(value), total, float(delta), 0, config)


@dataclass
class BraidCompareResult:
    value_1: complex
    value_2: complex
    predicted_sign: int
    relative_difference: float


def braid_compare(
    family: FundamentalFamily,
    h,
    z: float,
    word1,
    word2,
    kind: str = "torus",
    nodes_per_dim: int = 0,
    threads: int = 1,
) -> BraidCompareResult:
    """Integrate with both words and compare.

    For the distinguished cycles the chart-form sign and the cycle
    orientation sign cancel, so the combined prediction is always +1:
    both integrals must agree outright.
    """
    vals = []
    for w in (word1, word2):
        spec = CycleSpec(kind=kind, word=_letters(w), nodes_per_dim=nodes_per_dim)
        vals.append(s_gamma(family, spec, h, z, compute_refinement=False, threads=threads).value)
    s1, s2 = vals
    rel = abs(s1 - s2) / max(abs(s1), abs(s2), 1e-300)
    return BraidCompareResult(s1, s2, +1, float(rel))


def integrand_csv(
    family: FundamentalFamily,
    spec: CycleSpec,
    h,
    z: float,
    path: str,
    max_rows: int = 250000,
) -> int:
    """Dump integrand samples (chart coordinates, F, e^F) as CSV."""
    letters = spec.word
    N = len(letters)
    n = spec.nodes_per_dim
    total = n**N
    if total > max_rows:
        raise ValueError(f"{total} rows exceed the cap {max_rows}; lower nodes_per_dim")
    idx = np.arange(total)
    if spec.kind == "torus":
        radii = spec.radii if spec.radii is not None else np.ones(N)
        a = radii[None, :] * np.exp(1j * _digits(idx, n, N) * (2 * np.pi / n))
    else:
        window = spec.log_window or decay_scan(family, letters, np.asarray(h, float), z).window
        lows = np.array([w[0] for w in window])
        highs = np.array([w[1] for w in window])
        t = lows[None, :] + _digits(idx, n, N) * ((highs - lows) / (n - 1))[None, :]
        a = np.exp(t.astype(complex))
    F = superpotential_grid(family, letters, a, np.asarray(h, complex), z)
    ef = np.exp(F)
    with open(path, "w") as fh:
        cols = [f"re_a{j+1},im_a{j+1}" for j in range(N)]
        fh.write(",".join(cols) + ",re_F,im_F,re_expF,im_expF\n")
        for r in range(total):
            row = []
            for j in range(N):
                row += [f"{a[r, j].real:.17g}", f"{a[r, j].imag:.17g}"]
            row += [f"{F[r].real:.17g}", f"{F[r].imag:.17g}",
                    f"{ef[r].real:.17g}", f"{ef[r].imag:.17g}"]
            fh.write(",".join(row) + "\n")
    return total
