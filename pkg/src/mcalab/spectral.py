"""Characters, dual actions, diffusion ranks, and randomization experiments.

Harmonic analysis here is strictly abelian: characters live on abelian
groups (or abelian factors of a tower) in the coordinates provided by
``abelian_invariants``.  The dual action of a linear rule on characters is
exact integer arithmetic; its correctness is pinned by the adjointness
identity <chi, push_forward(rule, m)> == <dual_action(rule, chi), m>.
Cesàro randomization experiments combine an exact push-forward chain on a
shrinking window with an optional seeded Monte-Carlo extension.
"""
from __future__ import annotations

import cmath
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import McaLabError, NotAbelianError, NotCentralError, WindowError
from .groups import AbelianCoords, FiniteGroup, GroupMap, abelian_invariants
from .measures import MeasureSpec, WindowMeasure, push_forward, star_product_measure
from .rules import Config, McaRule, apply_window, local_table
from .util import STATE_CAP, check_cap, digit_planes, iter_words

__all__ = [
    "Character",
    "characters_of",
    "fourier_coefficient",
    "bernoulli_fourier",
    "LinearRuleDual",
    "dual_action",
    "DiffusionReport",
    "diffusion_report",
    "relative_diffusion_rank",
    "fibre_rank_independence",
    "FibreRankCheck",
    "harmonic_mixing_profile",
    "Probe",
    "ProbeRow",
    "TvRow",
    "RandomizationReport",
    "cesaro_randomization",
]


# -- characters ---------------------------------------------------------------


@dataclass(frozen=True)
class Character:
    """A character of A^(window) with finite support, times a fixed phase.

    ``support`` maps cell index to a nonzero coefficient tuple against the
    cyclic orders in ``invariants``; evaluation multiplies
    exp(2πi Σ cᵢaᵢ/nᵢ) over the support.  ``phase`` carries the constant of
    an affine character (1 for a plain character).
    """

    invariants: tuple[int, ...]
    support: tuple[tuple[int, tuple[int, ...]], ...]
    phase: complex = 1.0 + 0j
    coords: AbelianCoords | None = field(default=None, compare=False)

    def __post_init__(self):
        seen = set()
        for cell, coeff in self.support:
            if cell in seen:
                raise McaLabError(f"duplicate support cell {cell}")
            seen.add(cell)
            if len(coeff) != len(self.invariants):
                raise McaLabError("coefficient tuple has wrong arity")
            if all(c % n == 0 for c, n in zip(coeff, self.invariants)):
                raise McaLabError("support tuples must be nonzero")

    @classmethod
    def make(cls, coords: AbelianCoords, support: dict[int, Sequence[int]],
             phase: complex = 1.0 + 0j) -> "Character":
        orders = coords.orders
        items = []
        for cell in sorted(support):
            coeff = tuple(c % n for c, n in zip(support[cell], orders))
            if any(coeff):
                items.append((cell, coeff))
        return cls(orders, tuple(items), phase, coords)

    @property
    def rank(self) -> int:
        return len(self.support)

    def support_map(self) -> dict[int, tuple[int, ...]]:
        return dict(self.support)

    def cells(self) -> tuple[int, ...]:
        return tuple(cell for cell, _ in self.support)

    def is_trivial(self) -> bool:
        return not self.support

    def cell_values(self, coords: AbelianCoords | None = None
                    ) -> dict[int, np.ndarray]:
        """Per-cell complex value table over group-element indices."""
        coords = coords or self.coords
        if coords is None:
            raise McaLabError("character needs coordinates to evaluate")
        if coords.orders != self.invariants:
            raise McaLabError("coordinate system does not match the character")
        out = {}
        for cell, coeff in self.support:
            vals = np.empty(coords.group.order, dtype=np.complex128)
            for g in range(coords.group.order):
                t = coords.to_tuple[g]
                angle = 2.0 * math.pi * math.fsum(
                    c * a / n for c, a, n in zip(coeff, t, self.invariants))
                vals[g] = cmath.exp(1j * angle)
            out[cell] = vals
        return out

    def eval_word(self, lo: int, word: Sequence[int],
                  coords: AbelianCoords | None = None) -> complex:
        """Value at one configuration word starting at cell ``lo``."""
        tabs = self.cell_values(coords)
        val = self.phase
        for cell, tab in tabs.items():
            if not (lo <= cell < lo + len(word)):
                raise WindowError(f"support cell {cell} outside the word")
            val *= tab[word[cell - lo]]
        return val


def _nonzero_tuples(orders: tuple[int, ...]) -> list[tuple[int, ...]]:
    out = list(iter_words_mixed(orders))
    return [t for t in out if any(t)]


def iter_words_mixed(orders: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All coefficient tuples against mixed cyclic orders, lex order."""
    import itertools

    yield from itertools.product(*(range(n) for n in orders))


def characters_of(A: FiniteGroup, lo: int, hi: int) -> Iterator[Character]:
    """All characters supported inside [lo..hi), by rank then lex order."""
    import itertools

    if not A.is_abelian:
        raise NotAbelianError("characters need an abelian group")
    coords = abelian_invariants(A)
    nz = _nonzero_tuples(coords.orders)
    cells = range(lo, hi)
    yield Character(coords.orders, (), 1.0 + 0j, coords)
    for r in range(1, hi - lo + 1):
        for combo in itertools.combinations(cells, r):
            for assignment in itertools.product(nz, repeat=r):
                yield Character(coords.orders, tuple(zip(combo, assignment)),
                                1.0 + 0j, coords)


def fourier_coefficient(chi: Character, m: WindowMeasure,
                        coords: AbelianCoords | None = None,
                        cap: int = STATE_CAP) -> complex:
    """<chi, m> = Σ_w m[w]·chi(w), summed exactly then rounded once.

    The support must sit inside the measure window.  Cells outside the
    support integrate out for free (character value ignores them).
    """
    coords = coords or chi.coords
    if coords is None and m.group is not None:
        coords = abelian_invariants(m.group)
    if coords is None and chi.support:
        raise McaLabError("no coordinate system available for the alphabet")
    for cell, _ in chi.support:
        if not (m.lo <= cell < m.hi):
            raise WindowError(f"support cell {cell} outside [{m.lo}..{m.hi})")
    total = m.size ** m.length
    check_cap(total, cap, "fourier sum")
    tabs = chi.cell_values(coords) if chi.support else {}
    vals = np.full(total, chi.phase, dtype=np.complex128)
    if tabs:
        digits = digit_planes(np.arange(total, dtype=np.int64), m.size, m.length)
        for cell, tab in tabs.items():
            vals *= tab[digits[cell - m.lo]]
    weights = np.asarray([float(Fraction(n, m.den)) for n in m.num])
    return complex((vals * weights).sum())


def bernoulli_fourier(chi: Character, cell_dist: Sequence,
                      coords: AbelianCoords | None = None) -> complex:
    """<chi, μ> for an i.i.d. product measure, via per-cell factorization.

    ``cell_dist`` is the single-cell distribution over group-element
    indices.  Equals ``fourier_coefficient`` on any containing window.
    """
    coords = coords or chi.coords
    if coords is None:
        raise McaLabError("character needs coordinates to evaluate")
    probs = [float(p) for p in cell_dist]
    val = chi.phase
    for _, tab in chi.cell_values(coords).items():
        val *= complex(sum(p * t for p, t in zip(probs, tab)))
    return val


# -- dual action of linear rules ----------------------------------------------


def _endo_matrix(coords: AbelianCoords, endo: GroupMap) -> tuple[tuple[int, ...], ...]:
    """Column j = coordinates of endo(generator j)."""
    cols = [coords.to_tuple[endo(g)] for g in coords.generators]
    d = len(coords.orders)
    return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))


def _dual_coeff(coords: AbelianCoords, matrix, coeff: tuple[int, ...]
                ) -> tuple[int, ...]:
    """Coefficient tuple of chi_coeff ∘ endo, by exact integer division."""
    orders = coords.orders
    if not orders:
        return ()
    big = orders[-1]
    out = []
    for j, nj in enumerate(orders):
        t = sum(c * matrix[i][j] * (big // orders[i])
                for i, c in enumerate(coeff))
        step = big // nj
        if t % step:
            raise McaLabError("dual coefficient is not integral; bad matrix")
        out.append((t // step) % nj)
    return tuple(out)


@dataclass(frozen=True)
class LinearRuleDual:
    """A linear rule over an abelian group, in dual (coefficient) form.

    ``matrices[v]`` is the combined endomorphism at position v as an
    integer matrix in the invariant coordinates; ``bias_coords`` is the
    rule bias.  Acting on a character transposes these matrices onto the
    coefficient tuples.
    """

    coords: AbelianCoords
    matrices: tuple[tuple[int, tuple[tuple[int, ...], ...]], ...]
    bias_coords: tuple[int, ...]

    @classmethod
    def from_rule(cls, rule: McaRule) -> "LinearRuleDual":
        A = rule.group
        if not A.is_abelian:
            raise NotAbelianError("dual form needs an abelian group")
        coords = abelian_invariants(A)
        combined: dict[int, GroupMap] = {}
        for pos, coeff in rule.factors:
            prev = combined.get(pos)
            if prev is None:
                combined[pos] = coeff
            else:
                images = [A.mul(prev(x), coeff(x)) for x in A.elements()]
                combined[pos] = GroupMap(A, A, images, True, _trusted=True)
        mats = tuple((pos, _endo_matrix(coords, endo))
                     for pos, endo in sorted(combined.items()))
        return cls(coords, mats, coords.to_tuple[rule.bias])

    def positions(self) -> tuple[int, ...]:
        return tuple(pos for pos, _ in self.matrices)


def dual_action(dual: LinearRuleDual, chi: Character) -> Character:
    """Coefficients of chi ∘ rule: mass at cell k spreads to cells k+v.

    The convention matches <chi, push_forward(rule, m)> ==
    <dual_action(dual, chi), m>; the bias contributes one phase factor
    chi_k(bias) per support cell.
    """
    coords = dual.coords
    if chi.invariants != coords.orders:
        raise McaLabError("character and dual rule have different invariants")
    acc: dict[int, list[int]] = {}
    phase = chi.phase
    for cell, coeff in chi.support:
        angle = 2.0 * math.pi * math.fsum(
            c * b / n for c, b, n in zip(coeff, dual.bias_coords, coords.orders))
        phase *= cmath.exp(1j * angle)
        for v, matrix in dual.matrices:
            add = _dual_coeff(coords, matrix, coeff)
            if not any(add):
                continue
            tgt = acc.setdefault(cell + v, [0] * len(coords.orders))
            for i, (a, n) in enumerate(zip(add, coords.orders)):
                tgt[i] = (tgt[i] + a) % n
    support = tuple((cell, tuple(t)) for cell, t in sorted(acc.items())
                    if any(t))
    return Character(coords.orders, support, phase, coords)


@dataclass
class DiffusionReport:
    """Rank trajectory of a character under iterated dual action."""

    ranks: list[int]
    thresholds: tuple[int, ...]
    densities: dict[int, float]
    density_trail: dict[int, list[tuple[int, float]]]

    def density(self, threshold: int, j_up: int | None = None) -> float:
        upto = len(self.ranks) - 1 if j_up is None else j_up
        hits = sum(1 for j in range(1, upto + 1) if self.ranks[j] > threshold)
        return hits / upto if upto else 0.0


def diffusion_report(dual: LinearRuleDual, chi: Character, j_max: int,
                     thresholds: Sequence[int] = (2, 4, 10)) -> DiffusionReport:
    """Iterate the dual action and summarize how ranks grow.

    ``densities[r]`` is the fraction of 1 ≤ j ≤ j_max with rank > r; the
    trail records that fraction at doubling prefixes, as evidence (never
    an assertion) of diffusion in density.
    """
    ranks = [chi.rank]
    cur = chi
    for _ in range(j_max):
        cur = dual_action(dual, cur)
        ranks.append(cur.rank)
    report = DiffusionReport(ranks, tuple(thresholds), {}, {})
    for r in report.thresholds:
        report.densities[r] = report.density(r)
        trail = []
        m = 1
        while m <= j_max:
            trail.append((m, report.density(r, m)))
            m *= 2
        if trail and trail[-1][0] != j_max:
            trail.append((j_max, report.density(r)))
        report.density_trail[r] = trail
    return report


# -- relative diffusion (central case) ----------------------------------------


def relative_diffusion_rank(split, alpha: Character, j: int) -> int:
    """rank[alpha ∘ fibre^(j)] in the central case = rank[alpha ∘ lin^j]."""
    if not split.frame.a_is_central:
        raise NotCentralError("relative diffusion rank needs the central case")
    dual = LinearRuleDual.from_rule(split.lin_rule)
    cur = alpha
    for _ in range(j):
        cur = dual_action(dual, cur)
    return cur.rank


@dataclass
class FibreRankCheck:
    rank: int
    linear_rank: int
    all_equal: bool
    ranks_seen: tuple[int, ...]


def fibre_rank_independence(dec, split, alpha: Character, j: int,
                            cap: int = STATE_CAP) -> FibreRankCheck:
    """Exhaustively verify rank[alpha ∘ fibre^(j)_c] is the same for all c.

    Builds the j-step fibre composite for every quotient word on the
    needed window, extracts its linear part by finite differences (exact
    group arithmetic), and compares the resulting character ranks to the
    linear-rule prediction.
    """
    from .decompose import fibre_step_sequence

    rule = dec.rule
    frame = dec.frame
    A, C = frame.a_group, frame.C
    coords = abelian_invariants(A)
    if alpha.invariants != coords.orders:
        raise McaLabError("probe does not match the fibre group invariants")
    cells = alpha.cells()
    out_lo = min(cells) if cells else 0
    out_hi = (max(cells) + 1) if cells else 1
    in_lo, in_hi = out_lo + j * rule.v_lo, out_hi + j * rule.v_hi
    n_in = in_hi - in_lo
    check_cap(C.order ** n_in, cap, "fibre rank independence")
    lin_rank = relative_diffusion_rank(split, alpha, j)
    gens = coords.generators
    ranks = set()
    for w in iter_words(C.order, n_in):
        c_cfg = Config(C, in_lo, w)
        steps = fibre_step_sequence(dec, c_cfg, j)

        def composite(a_word):
            cfg = Config(A, in_lo, a_word)
            for st in steps:
                cfg = apply_window(st, cfg)
            return [cfg.at(k) for k in cells]

        base = composite([0] * n_in)
        rank = 0
        for m in range(n_in):
            # coefficient tuple of (alpha ∘ composite) at input cell m, by
            # exact finite differences along each generator direction
            coeff = []
            for gi, g in enumerate(gens):
                probe = [0] * n_in
                probe[m] = g
                diff = [A.mul(y, A.inv(b))
                        for y, b in zip(composite(probe), base)]
                num = Fraction(0)
                for (_, ctup), d in zip(alpha.support, diff):
                    t = coords.to_tuple[d]
                    num += sum(Fraction(c * a, o) for c, a, o in
                               zip(ctup, t, coords.orders))
                scaled = (num % 1) * coords.orders[gi]
                if scaled.denominator != 1:
                    raise McaLabError("fibre composite is not affine-linear")
                coeff.append(int(scaled) % coords.orders[gi])
            if any(coeff):
                rank += 1
        ranks.add(rank)
    ranks_seen = tuple(sorted(ranks))
    one = len(ranks_seen) == 1
    return FibreRankCheck(rank=ranks_seen[0] if one else -1,
                          linear_rank=lin_rank,
                          all_equal=one and ranks_seen[0] == lin_rank,
                          ranks_seen=ranks_seen)


# -- harmonic mixing ----------------------------------------------------------


def harmonic_mixing_profile(spec: MeasureSpec, r_max: int,
                            group: FiniteGroup | None = None,
                            gap_pad: int = 2) -> list[float]:
    """Max |<chi, μ>| per character rank r ≤ r_max (decay ⇒ mixing evidence).

    Bernoulli: the single-cell maximum to the r-th power (exact
    factorization).  Markov: exact transfer-matrix products over all
    supports inside a window of r + gap_pad cells, which bounds the gap
    structure at desk scale.
    """
    if group is not None:
        coords = abelian_invariants(group)
    else:
        from .groups import make_cyclic

        coords = abelian_invariants(make_cyclic(spec.size))
    nz = _nonzero_tuples(coords.orders)
    if spec.kind in ("uniform", "bernoulli"):
        probs = [float(p) for p in spec.cell_distribution()]
        best = 0.0
        for coeff in nz:
            tab = _coeff_table(coords, coeff)
            best = max(best, float(abs(sum(p * t for p, t in zip(probs, tab)))))
        return [1.0] + [best ** r for r in range(1, r_max + 1)]
    if spec.kind != "markov":
        raise McaLabError(f"no mixing profile for kind {spec.kind!r}")
    import itertools

    pi = np.asarray([float(p) for p in spec.probs])
    T = np.asarray([[float(p) for p in row] for row in spec.transition])
    out = [1.0]
    for r in range(1, r_max + 1):
        window = r + gap_pad
        best = 0.0
        for combo in itertools.combinations(range(window), r):
            if combo[0] != 0:
                continue  # shift invariance: anchor the first support cell
            for assignment in itertools.product(nz, repeat=r):
                vec = pi * _coeff_table(coords, assignment[0])
                prev = combo[0]
                for cell, coeff in zip(combo[1:], assignment[1:]):
                    vec = vec @ np.linalg.matrix_power(T, cell - prev)
                    vec = vec * _coeff_table(coords, coeff)
                    prev = cell
                best = max(best, float(abs(vec.sum())))
        out.append(best)
    return out


def _coeff_table(coords: AbelianCoords, coeff: tuple[int, ...]) -> np.ndarray:
    vals = np.empty(coords.group.order, dtype=np.complex128)
    for g in range(coords.group.order):
        t = coords.to_tuple[g]
        angle = 2.0 * math.pi * math.fsum(
            c * a / n for c, a, n in zip(coeff, t, coords.orders))
        vals[g] = cmath.exp(1j * angle)
    return vals


# -- Cesàro randomization experiments -----------------------------------------


@dataclass(frozen=True)
class Probe:
    """A product character probe against a (possibly skew) alphabet.

    For an abelian rule group, set only ``alpha`` (over the group itself).
    For a skew product, ``alpha`` probes the fibre part and ``phi`` the
    quotient part through the frame's star coordinates.
    """

    probe_id: str
    alpha: Character | None = None
    phi: Character | None = None

    def cells(self) -> tuple[int, ...]:
        cells = set()
        for chi in (self.alpha, self.phi):
            if chi is not None:
                cells.update(chi.cells())
        return tuple(sorted(cells))

    def value_tables(self, group: FiniteGroup, frame
                     ) -> tuple[dict[int, np.ndarray], complex]:
        """(per-cell complex tables over group-element indices, phase)."""
        tables: dict[int, np.ndarray] = {}

        def fold(chi: Character, part):
            if chi is None:
                return
            for cell, tab in chi.cell_values().items():
                col = np.asarray([tab[part(b)] for b in range(group.order)])
                tables[cell] = tables.get(cell, np.ones(group.order,
                                                        dtype=np.complex128)) * col

        if frame is None:
            if self.phi is not None:
                raise McaLabError("quotient probe needs a frame")
            fold(self.alpha, lambda b: b)
        else:
            fold(self.alpha, lambda b: frame.a_index(frame.a_part[b]))
            fold(self.phi, lambda b: frame.c_part[b])
        phase = (self.alpha.phase if self.alpha else 1.0) * (
            self.phi.phase if self.phi else 1.0)
        return tables, complex(phase)


@dataclass
class ProbeRow:
    n: int
    probe_id: str
    coef_abs: float
    cesaro_mean: float
    mode: str
    samples: int
    stderr: float


@dataclass
class TvRow:
    n: int
    tv_distance: float
    cesaro_tv: float
    mode: str
    samples: int
    stderr: float


@dataclass
class RandomizationReport:
    probe_rows: list[ProbeRow]
    tv_rows: list[TvRow]
    n_exact: int
    coprimality_ok: bool | None
    seed: int | None


def _exponent_sums(rule: McaRule) -> dict[int, int] | None:
    """Position -> multiplicity, when every factor is the identity map."""
    out: dict[int, int] = {}
    ident = tuple(range(rule.group.order))
    for pos, coeff in rule.factors:
        if tuple(coeff.image_of) != ident:
            return None
        out[pos] = out.get(pos, 0) + 1
    return out


def cesaro_randomization(rule: McaRule, init, n_max: int,
                         probes: Sequence[Probe] = (),
                         frame=None,
                         dec=None,
                         tv_cells: int = 1,
                         cap_states: int = STATE_CAP,
                         mc_samples: int = 0,
                         mc_checkpoints: Sequence[int] | None = None,
                         seed: int | None = None,
                         workers: int = 1) -> RandomizationReport:
    """Track probe coefficients and TV-from-uniform along iterated images.

    ``init`` is a MeasureSpec over the rule group, or a (λ, ν) pair of
    specs with ``frame`` giving the product measure through star
    coordinates.  Probe rows ride the factorized dual path out to n_max
    whenever the probe's factor is abelian and the matching initial factor
    is i.i.d. (abelian rules; quotient probes with ``dec``); everything
    else gets exact rows while the window fits the state cap, then
    Monte-Carlo rows (``mc_samples`` > 0) at deterministic chunk-seeded
    checkpoints.
    """
    group = rule.group
    cells = sorted({c for p in probes for c in p.cells()} | set(range(tv_cells)))
    out_lo, out_hi = min(cells), max(cells) + 1
    spread = rule.spread
    # exact horizon: largest n whose input window enumeration fits the cap
    n_exact = -1
    for n in range(n_max + 1):
        width = (out_hi - out_lo) + n * spread
        if group.order ** width > cap_states:
            break
        n_exact = n
    if n_exact < 0:
        check_cap(group.order ** (out_hi - out_lo), cap_states,
                  "randomization output window")
    exps = _exponent_sums(rule)
    coprime = None
    if exps is not None:
        coprime = all(math.gcd(m, group.order) == 1 for m in exps.values())
        if not coprime:
            warnings.warn("some exponent sum shares a factor with the group "
                          "order; the density-one randomization hypothesis "
                          "fails", stacklevel=2)
    fast = [_dual_fast_path(rule, init, probe, dec) for probe in probes]
    tables = [p.value_tables(group, frame) for p in probes]
    rows_by_probe: dict[int, list[ProbeRow]] = {i: [] for i in range(len(probes))}
    # factorized dual rows cover every n up to n_max
    for i, (probe, path) in enumerate(zip(probes, fast)):
        if path is None:
            continue
        dual, chi, dist = path
        cur_chi, acc = chi, 0.0
        for n in range(n_max + 1):
            val = abs(bernoulli_fourier(cur_chi, dist))
            acc += val
            rows_by_probe[i].append(ProbeRow(n, probe.probe_id, val,
                                             acc / (n + 1), "exact", 0, 0.0))
            if n < n_max:
                cur_chi = dual_action(dual, cur_chi)
    # exact measure chain: TV always, probes without a dual path
    in_lo = out_lo + n_exact * rule.v_lo
    in_hi = out_hi + n_exact * rule.v_hi
    mu = _initial_measure(init, frame, group, in_lo, in_hi, cap_states)
    tv_rows: list[TvRow] = []
    cesaro: dict[int, float] = {i: 0.0 for i in range(len(probes))}
    cesaro_n: dict[int, int] = {i: 0 for i in range(len(probes))}
    tv_sum, tv_count = 0.0, 0
    cur = mu
    for n in range(n_exact + 1):
        for i, (probe, (tabs, phase)) in enumerate(zip(probes, tables)):
            if fast[i] is not None:
                continue
            val = abs(_probe_on_measure(tabs, phase, cur, cap_states))
            cesaro[i] += val
            cesaro_n[i] += 1
            rows_by_probe[i].append(ProbeRow(
                n, probe.probe_id, val, cesaro[i] / cesaro_n[i],
                "exact", 0, 0.0))
        tv = float(cur.marginal(out_lo, out_lo + tv_cells).tv_from_uniform())
        tv_sum += tv
        tv_count += 1
        tv_rows.append(TvRow(n, tv, tv_sum / tv_count, "exact", 0, 0.0))
        if n < n_exact:
            cur = push_forward(rule, cur, cap_states)
    if mc_samples > 0 and n_max > n_exact:
        if mc_checkpoints is None:
            mc_checkpoints = []
            m = 1
            while m <= n_max:
                if m > n_exact:
                    mc_checkpoints.append(m)
                m *= 2
            if n_max not in mc_checkpoints:
                mc_checkpoints.append(n_max)
        mc_tables = [t for t, f in zip(tables, fast) if f is None]
        mc_index = [i for i, f in enumerate(fast) if f is None]
        for n in sorted(set(int(m) for m in mc_checkpoints)):
            if n <= n_exact or n > n_max:
                continue
            stats = _mc_step(rule, init, frame, n, out_lo, out_hi, tv_cells,
                             mc_tables, mc_samples, seed or 0, workers)
            for i, (mean_abs, se) in zip(mc_index, stats["probes"]):
                cesaro[i] += mean_abs
                cesaro_n[i] += 1
                rows_by_probe[i].append(ProbeRow(
                    n, probes[i].probe_id, mean_abs,
                    cesaro[i] / cesaro_n[i], "mc", mc_samples, se))
            tv, tv_se = stats["tv"]
            tv_sum += tv
            tv_count += 1
            tv_rows.append(TvRow(n, tv, tv_sum / tv_count, "mc",
                                 mc_samples, tv_se))
    probe_rows = [row for i in range(len(probes)) for row in rows_by_probe[i]]
    probe_rows.sort(key=lambda r: (r.n, r.probe_id))
    return RandomizationReport(probe_rows, tv_rows, n_exact, coprime, seed)


def _dual_fast_path(rule: McaRule, init, probe: Probe, dec):
    """(dual, seed character, cell distribution) when factorization applies."""
    if isinstance(init, MeasureSpec):
        if (rule.group.is_abelian and probe.phi is None
                and probe.alpha is not None
                and init.kind in ("uniform", "bernoulli")):
            return (LinearRuleDual.from_rule(rule), probe.alpha,
                    init.cell_distribution())
        return None
    lam, nu = init
    if (dec is not None and probe.alpha is None and probe.phi is not None
            and dec.h_rule.group.is_abelian
            and nu.kind in ("uniform", "bernoulli")):
        return (LinearRuleDual.from_rule(dec.h_rule), probe.phi,
                nu.cell_distribution())
    return None


def _initial_measure(init, frame, group: FiniteGroup, lo: int, hi: int,
                     cap: int) -> WindowMeasure:
    if isinstance(init, MeasureSpec):
        if init.size != group.order:
            raise McaLabError("initial measure alphabet mismatch")
        return init.window_measure(lo, hi, group, cap)
    lam, nu = init
    if frame is None:
        raise McaLabError("a (λ, ν) pair needs a frame")
    check_cap(group.order ** (hi - lo), cap, "initial product measure")
    ma = lam.window_measure(lo, hi, frame.a_group, cap)
    mc = nu.window_measure(lo, hi, frame.C, cap)
    return star_product_measure(frame, ma, mc)


def _probe_on_measure(tabs: dict[int, np.ndarray], phase: complex,
                      m: WindowMeasure, cap: int) -> complex:
    total = m.size ** m.length
    check_cap(total, cap, "probe evaluation")
    vals = np.full(total, phase, dtype=np.complex128)
    if tabs:
        digits = digit_planes(np.arange(total, dtype=np.int64), m.size, m.length)
        for cell, tab in tabs.items():
            if not (m.lo <= cell < m.hi):
                raise WindowError(f"probe cell {cell} outside [{m.lo}..{m.hi})")
            vals *= tab[digits[cell - m.lo]]
    weights = np.asarray([float(Fraction(x, m.den)) for x in m.num])
    return complex((vals * weights).sum())


def _sample_words(spec_pair, frame, group: FiniteGroup, length: int,
                  rng: np.random.Generator, count: int) -> np.ndarray:
    """Sample initial words (count × length int64) from the initial law."""

    def sample_spec(spec: MeasureSpec, size: int) -> np.ndarray:
        if spec.kind in ("uniform", "bernoulli"):
            p = np.asarray([float(x) for x in spec.probs])
            p = p / p.sum()
            flat = rng.choice(size, size=count * length, p=p)
            return flat.reshape(count, length).astype(np.int64)
        # markov: sample column by column
        out = np.empty((count, length), dtype=np.int64)
        start = np.asarray([float(x) for x in spec.probs])
        out[:, 0] = rng.choice(size, size=count, p=start / start.sum())
        T = np.asarray([[float(x) for x in row] for row in spec.transition])
        T = T / T.sum(axis=1, keepdims=True)
        for j in range(1, length):
            u = rng.random(count)
            cum = np.cumsum(T[out[:, j - 1]], axis=1)
            out[:, j] = np.minimum((u[:, None] > cum).sum(axis=1), size - 1)
        return out

    if isinstance(spec_pair, MeasureSpec):
        return sample_spec(spec_pair, group.order)
    lam, nu = spec_pair
    a = sample_spec(lam, frame.a_group.order)
    c = sample_spec(nu, frame.C.order)
    star = np.asarray(frame.b_of, dtype=np.int64)
    return star[a, c]


def _mc_step(rule: McaRule, init, frame, n: int, out_lo: int, out_hi: int,
             tv_cells: int, tables: list[tuple[dict[int, np.ndarray], complex]],
             samples: int, seed: int, workers: int) -> dict:
    """One Monte-Carlo checkpoint: sample, evolve n steps, measure."""
    group = rule.group
    s = group.order
    tbl = local_table(rule)
    in_lo = out_lo + n * rule.v_lo
    in_hi = out_hi + n * rule.v_hi
    length = in_hi - in_lo
    width = rule.width
    chunk = 1 << 14

    def run_chunk(ci: int) -> tuple:
        lo_i = ci * chunk
        m = min(chunk, samples - lo_i)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(n, ci)))
        words = _sample_words(init, frame, group, length, rng, m)
        for _ in range(n):
            k = words.shape[1] - rule.spread
            codes = np.zeros((m, k), dtype=np.int64)
            for t in range(width):
                codes = codes * s + words[:, t:t + k]
            words = tbl[codes]
        probe_sums = []
        for tabs, phase in tables:
            vals = np.full(m, phase, dtype=np.complex128)
            for cell, tab in tabs.items():
                vals *= tab[words[:, cell - out_lo]]
            probe_sums.append((vals.sum(), (vals.real ** 2).sum(),
                               (vals.imag ** 2).sum()))
        tv_idx = np.zeros(m, dtype=np.int64)
        for j in range(tv_cells):
            tv_idx = tv_idx * s + words[:, j]
        counts = np.bincount(tv_idx, minlength=s ** tv_cells)
        return probe_sums, counts, m

    n_chunks = (samples + chunk - 1) // chunk
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, range(n_chunks)))
    else:
        parts = [run_chunk(ci) for ci in range(n_chunks)]
    probe_stats = []
    for pi in range(len(tables)):
        tot = sum(p[0][pi][0] for p in parts)
        sq_r = sum(p[0][pi][1] for p in parts)
        sq_i = sum(p[0][pi][2] for p in parts)
        mean = tot / samples
        var = (sq_r / samples - mean.real ** 2) + (sq_i / samples - mean.imag ** 2)
        se = math.sqrt(max(var, 0.0) / samples)
        probe_stats.append((abs(mean), se))
    counts = sum((p[1] for p in parts), np.zeros(s ** tv_cells, dtype=np.int64))
    phat = counts / samples
    unif = 1.0 / len(phat)
    tv = 0.5 * float(np.abs(phat - unif).sum())
    tv_se = 0.5 * float(np.sqrt(phat * (1 - phat) / samples).sum())
    return {"probes": probe_stats, "tv": (tv, tv_se)}
