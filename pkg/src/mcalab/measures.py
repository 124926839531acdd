"""Exact window measures, push-forwards, and partition entropies.

Measures on length-ℓ windows are stored as integer numerators over one
common denominator, so push-forward and marginalization are exact; only
the final entropy evaluation leaves the rationals.  Bipermutative rules
admit closed-form entropies (overlap × shift entropy), which the
trajectory-enumeration functions cross-check at finite horizon.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import McaLabError, NotPermutativeError, WindowError
from .groups import FiniteGroup
from .rules import (
    Config,
    McaRule,
    NhcaSequence,
    apply_window,
    is_bipermutative,
    local_table,
)
from .util import STATE_CAP, check_cap, digit_planes, iter_words

__all__ = [
    "WindowMeasure",
    "MeasureSpec",
    "push_forward",
    "partition_entropy",
    "trajectory_joint_distribution",
    "trajectory_partition_entropy",
    "formula_entropy",
    "skew_entropy",
    "fibre_trajectory_entropy",
    "product_measure",
    "star_product_measure",
]

_INT64_SAFE = 2 ** 62


def _overlaps(op) -> tuple[int, int]:
    """(left, right) overlap of any local family, from its neighborhood."""
    return -min(op.v_lo, 0), max(0, op.v_hi)


@dataclass(frozen=True)
class WindowMeasure:
    """A probability vector over all words on a window of cells [lo..hi).

    Probabilities are ``num[i] / den`` with word ``i`` in big-endian index
    order; they are exact and sum to 1.  ``group`` is optional — only the
    alphabet size matters for measure arithmetic.
    """

    size: int
    lo: int
    hi: int
    num: tuple[int, ...]
    den: int
    group: FiniteGroup | None = None

    def __post_init__(self):
        if self.hi < self.lo:
            raise WindowError(f"bad window [{self.lo}..{self.hi})")
        object.__setattr__(self, "num", tuple(int(x) for x in self.num))
        if len(self.num) != self.size ** self.length:
            raise McaLabError(
                f"need {self.size ** self.length} weights, got {len(self.num)}")
        if self.den <= 0 or any(x < 0 for x in self.num):
            raise McaLabError("weights must be nonnegative with positive denominator")
        if sum(self.num) != self.den:
            raise McaLabError("weights must sum exactly to the denominator")

    @property
    def length(self) -> int:
        return self.hi - self.lo

    @classmethod
    def uniform(cls, size: int, lo: int, hi: int,
                group: FiniteGroup | None = None) -> "WindowMeasure":
        n = size ** (hi - lo)
        return cls(size, lo, hi, (1,) * n, n, group)

    @classmethod
    def point_mass(cls, size: int, lo: int, word: Sequence[int],
                   group: FiniteGroup | None = None) -> "WindowMeasure":
        hi = lo + len(word)
        idx = 0
        for x in word:
            idx = idx * size + x
        num = [0] * size ** len(word)
        num[idx] = 1
        return cls(size, lo, hi, tuple(num), 1, group)

    def prob(self, word_or_index: Union[int, Sequence[int]]) -> Fraction:
        if isinstance(word_or_index, int):
            idx = word_or_index
        else:
            idx = 0
            for x in word_or_index:
                idx = idx * self.size + x
        return Fraction(self.num[idx], self.den)

    def probs(self) -> list[Fraction]:
        return [Fraction(n, self.den) for n in self.num]

    def marginal(self, lo: int, hi: int) -> "WindowMeasure":
        """Restriction to a sub-window (sums out the other cells)."""
        if not (self.lo <= lo <= hi <= self.hi):
            raise WindowError(f"[{lo}..{hi}) is not inside [{self.lo}..{self.hi})")
        s = self.size
        tail = s ** (self.hi - hi)
        keep = s ** (hi - lo)
        out = [0] * keep
        if self.den < _INT64_SAFE:
            arr = np.asarray(self.num, dtype=np.int64)
            idx = (np.arange(len(arr), dtype=np.int64) // tail) % keep
            acc = np.zeros(keep, dtype=np.int64)
            np.add.at(acc, idx, arr)
            out = [int(x) for x in acc]
        else:
            for i, n in enumerate(self.num):
                out[(i // tail) % keep] += n
        return WindowMeasure(s, lo, hi, tuple(out), self.den, self.group)

    def entropy_bits(self) -> float:
        """Shannon entropy in bits (0·log 0 = 0), from exact weights."""
        acc = math.fsum(n * math.log2(n) for n in self.num if n)
        return math.log2(self.den) - acc / self.den

    def tv_from_uniform(self) -> Fraction:
        """Exact total-variation distance to the uniform vector."""
        m = len(self.num)
        total = sum(abs(n * m - self.den) for n in self.num)
        return Fraction(total, 2 * self.den * m)

    def is_uniform(self) -> bool:
        return len(set(self.num)) == 1

    def same_distribution(self, other: "WindowMeasure") -> bool:
        """Exact equality of probability vectors (windows must agree)."""
        if (self.size, self.lo, self.hi) != (other.size, other.lo, other.hi):
            return False
        return all(a * other.den == b * self.den
                   for a, b in zip(self.num, other.num))

    def sorted_probabilities(self) -> tuple[Fraction, ...]:
        """The probability multiset — invariant of partition equivalence."""
        return tuple(sorted(Fraction(n, self.den) for n in self.num))


class MeasureSpec:
    """Analytic description of a shift-invariant measure on full sequences.

    Kinds: ``uniform`` (needs only the alphabet size), ``bernoulli``
    (i.i.d. cells with a given distribution), ``markov`` (stationary chain;
    the initial vector must be invariant under the transition matrix, which
    is checked exactly).  Generates window measures of any length and
    knows its shift entropy in closed form.
    """

    def __init__(self, kind: str, size: int,
                 probs: Sequence[Fraction] | None = None,
                 transition: Sequence[Sequence[Fraction]] | None = None,
                 initial: Sequence[Fraction] | None = None):
        if size <= 0:
            raise McaLabError("alphabet size must be positive")
        self.kind = kind
        self.size = size
        if kind == "uniform":
            self.probs = tuple(Fraction(1, size) for _ in range(size))
        elif kind == "bernoulli":
            if probs is None or len(probs) != size:
                raise McaLabError("bernoulli needs one probability per symbol")
            self.probs = tuple(Fraction(p) for p in probs)
            if any(p < 0 for p in self.probs) or sum(self.probs) != 1:
                raise McaLabError("bernoulli probabilities must be >= 0 and sum to 1")
        elif kind == "markov":
            if transition is None or initial is None:
                raise McaLabError("markov needs a transition matrix and initial vector")
            self.transition = tuple(tuple(Fraction(p) for p in row)
                                    for row in transition)
            self.probs = tuple(Fraction(p) for p in initial)
            if len(self.transition) != size or any(len(r) != size for r in self.transition):
                raise McaLabError("transition matrix must be size x size")
            if any(p < 0 for row in self.transition for p in row):
                raise McaLabError("transition probabilities must be nonnegative")
            if any(sum(row) != 1 for row in self.transition):
                raise McaLabError("transition rows must sum to 1")
            if len(self.probs) != size or sum(self.probs) != 1 or any(
                    p < 0 for p in self.probs):
                raise McaLabError("initial vector must be a distribution")
            for j in range(size):
                if sum(self.probs[i] * self.transition[i][j]
                       for i in range(size)) != self.probs[j]:
                    raise McaLabError("initial vector is not stationary")
        else:
            raise McaLabError(f"unknown measure kind {kind!r}")

    def cell_distribution(self) -> tuple[Fraction, ...]:
        return self.probs

    def word_weight(self, word: Sequence[int]) -> Fraction:
        """Exact probability of one finite word."""
        if self.kind == "markov":
            if not word:
                return Fraction(1)
            p = self.probs[word[0]]
            for a, b in zip(word, word[1:]):
                p *= self.transition[a][b]
            return p
        p = Fraction(1)
        for x in word:
            p *= self.probs[x]
        return p

    def window_measure(self, lo: int, hi: int,
                       group: FiniteGroup | None = None,
                       cap: int = STATE_CAP) -> WindowMeasure:
        n = hi - lo
        check_cap(self.size ** n, cap, "window measure")
        if self.kind == "uniform":
            return WindowMeasure.uniform(self.size, lo, hi, group)
        weights = [self.word_weight(w) for w in iter_words(self.size, n)]
        den = math.lcm(*(w.denominator for w in weights)) if weights else 1
        num = tuple(int(w * den) for w in weights)
        return WindowMeasure(self.size, lo, hi, num, den, group)

    def shift_entropy_bits(self) -> float:
        """Entropy rate of the shift in bits per cell, in closed form."""
        if self.kind == "uniform":
            return math.log2(self.size)
        if self.kind == "bernoulli":
            return _entropy_of(self.probs)
        acc = 0.0
        for pi, row in zip(self.probs, self.transition):
            if pi:
                acc += float(pi) * _entropy_of(row)
        return acc

    def is_uniform(self) -> bool:
        return all(p == Fraction(1, self.size) for p in self.probs) and (
            self.kind != "markov"
            or all(row == self.probs for row in self.transition))


def _entropy_of(probs: Iterable[Fraction]) -> float:
    acc = 0.0
    for p in probs:
        if p:
            acc -= float(p) * (math.log2(p.numerator) - math.log2(p.denominator))
    return acc


def partition_entropy(dist) -> float:
    """Shannon entropy in bits of a distribution in any common shape.

    Accepts a WindowMeasure, a mapping to weights, or a bare weight
    sequence; weights may be Fractions, ints, or floats and need not be
    normalized (they are divided by their sum).
    """
    if isinstance(dist, WindowMeasure):
        return dist.entropy_bits()
    values = list(dist.values()) if isinstance(dist, Mapping) else list(dist)
    if not values:
        return 0.0
    total = sum(values)
    if total <= 0:
        raise McaLabError("entropy needs positive total weight")
    probs = [float(Fraction(v) / total) if not isinstance(v, float) else v / total
             for v in values]
    return -math.fsum(p * math.log2(p) for p in probs if p)


def push_forward(op: Union[McaRule, NhcaSequence], m: WindowMeasure,
                 cap: int = STATE_CAP) -> WindowMeasure:
    """Exact image of a window measure under one synchronous step.

    The output lives on the shrunken window; every input word's weight is
    added to the weight of its image word.
    """
    group = op.group
    if m.size != group.order:
        raise McaLabError("measure alphabet does not match the rule's group")
    out_lo, out_hi = m.lo - op.v_lo, m.hi - op.v_hi
    if out_lo > out_hi:
        raise WindowError("window too narrow for the rule")
    s = m.size
    n_in, n_out = m.length, out_hi - out_lo
    check_cap(s ** n_in, cap, "push-forward")
    idx_map = _image_index_map(op, m.lo, n_in, n_out, cap)
    out_size = s ** n_out
    if m.den < _INT64_SAFE:
        arr = np.asarray(m.num, dtype=np.int64)
        if m.is_uniform():
            counts = np.bincount(idx_map, minlength=out_size)
            acc = counts * int(m.num[0])
        else:
            acc = np.zeros(out_size, dtype=np.int64)
            np.add.at(acc, idx_map, arr)
        out_num = tuple(int(x) for x in acc)
    else:
        out = [0] * out_size
        for i, n in enumerate(m.num):
            if n:
                out[int(idx_map[i])] += n
        out_num = tuple(out)
    return WindowMeasure(s, out_lo, out_hi, out_num, m.den, group)


def _image_index_map(op, in_lo: int, n_in: int, n_out: int,
                     cap: int) -> np.ndarray:
    """Big-endian word index of the image, for every input word index."""
    s = op.group.order
    total = s ** n_in
    check_cap(total, cap, "image index map")
    digits = digit_planes(np.arange(total, dtype=np.int64), s, n_in)
    out_lo = in_lo - op.v_lo
    out = np.zeros(total, dtype=np.int64)
    width = op.v_hi - op.v_lo + 1
    for j in range(n_out):
        cell = out_lo + j
        rule = op if isinstance(op, McaRule) else op.rule_at(cell)
        tbl = local_table(rule, cap)
        code = np.zeros(total, dtype=np.int64)
        for t in range(width):
            code = code * s + digits[cell + op.v_lo - in_lo + t]
        out = out * s + tbl[code]
    return out


def _step_list(op, n_steps: int) -> list:
    if isinstance(op, (McaRule, NhcaSequence)):
        steps = [op] * n_steps
    else:
        steps = list(op)
        if len(steps) != n_steps:
            raise McaLabError(f"need {n_steps} steps, got {len(steps)}")
    if not steps:
        return steps
    shape = (steps[0].v_lo, steps[0].v_hi)
    if any((st.v_lo, st.v_hi) != shape for st in steps):
        raise WindowError("all steps must share the same neighborhood")
    return steps


def trajectory_joint_distribution(op, spec: MeasureSpec, n_steps: int,
                                  cap: int = STATE_CAP) -> dict[tuple[int, ...], Fraction]:
    """Joint law of the cells [-L..R) observed at times 0..n_steps-1.

    Keys are the concatenated observations (time-major); enumeration runs
    over the generating input window [-nL..nR).
    """
    steps = _step_list(op, max(n_steps - 1, 0))
    if steps:
        first = steps[0]
    elif isinstance(op, (McaRule, NhcaSequence)):
        first = op
    else:
        raise McaLabError("need a rule object, not a list, when no step is applied")
    group = first.group
    s = group.order
    L, R = _overlaps(first)
    lo, hi = -n_steps * L, n_steps * R
    n_in = hi - lo
    check_cap(s ** n_in, cap, "trajectory enumeration")
    joint: dict[tuple[int, ...], Fraction] = {}
    for w in iter_words(s, n_in):
        p = spec.word_weight(w)
        if not p:
            continue
        cfg = Config(group, lo, w)
        obs: list[int] = []
        for n in range(n_steps):
            obs.extend(cfg.word[-L - cfg.lo: R - cfg.lo])
            if n + 1 < n_steps:
                cfg = apply_window(steps[n], cfg)
        key = tuple(obs)
        joint[key] = joint.get(key, Fraction(0)) + p
    return joint


def trajectory_partition_entropy(op, spec: MeasureSpec, n_steps: int,
                                 cap: int = STATE_CAP) -> float:
    """Entropy in bits of the time-0..N-1 trajectory observations.

    For bipermutative rules this equals the entropy of the input marginal
    on [-NL..NR) (the two partitions are equivalent).  Uniform measures
    with a single rule take a vectorized counting path; everything else
    enumerates words with exact weights.
    """
    if isinstance(op, McaRule) and spec.kind == "uniform":
        return _uniform_trajectory_entropy(op, n_steps, cap)
    return partition_entropy(trajectory_joint_distribution(op, spec, n_steps, cap))


def _uniform_trajectory_entropy(rule: McaRule, n_steps: int, cap: int) -> float:
    s = rule.group.order
    L, R = _overlaps(rule)
    n_in = n_steps * (L + R)
    if n_in == 0:
        return 0.0
    total = s ** n_in
    check_cap(total, cap, "trajectory enumeration")
    width = rule.width
    tbl = local_table(rule, cap)
    hits = np.zeros(total, dtype=np.uint8)
    chunk = 1 << 20
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cells = digit_planes(idx, s, n_in)
        lo = -n_steps * L
        sig = np.zeros(len(idx), dtype=np.int64)
        for n in range(n_steps):
            for x in range(-L, R):
                sig = sig * s + cells[x - lo]
            if n + 1 < n_steps:
                new_lo = lo - rule.v_lo
                new_len = len(cells) - rule.spread
                nxt = []
                for j in range(new_len):
                    code = np.zeros(len(idx), dtype=np.int64)
                    base = new_lo + j + rule.v_lo - lo
                    for t in range(width):
                        code = code * s + cells[base + t]
                    nxt.append(tbl[code])
                cells, lo = nxt, new_lo
        hits[sig] = 1
    distinct = int(np.count_nonzero(hits))
    if distinct == total:
        # trajectory map is a bijection on the generating window, so the
        # joint is uniform over all `total` outcomes
        return n_in * math.log2(s)
    check_cap(total, 1 << 24, "non-bijective trajectory counting")
    counts = np.zeros(total, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cells = digit_planes(idx, s, n_in)
        lo = -n_steps * L
        sig = np.zeros(len(idx), dtype=np.int64)
        for n in range(n_steps):
            for x in range(-L, R):
                sig = sig * s + cells[x - lo]
            if n + 1 < n_steps:
                new_lo = lo - rule.v_lo
                new_len = len(cells) - rule.spread
                nxt = []
                for j in range(new_len):
                    code = np.zeros(len(idx), dtype=np.int64)
                    base = new_lo + j + rule.v_lo - lo
                    for t in range(width):
                        code = code * s + cells[base + t]
                    nxt.append(tbl[code])
                cells, lo = nxt, new_lo
        counts += np.bincount(sig, minlength=total)
    nz = counts[counts > 0].astype(np.float64)
    p = nz / float(total)
    return float(-(p * np.log2(p)).sum())


def formula_entropy(rule: Union[McaRule, NhcaSequence], spec: MeasureSpec,
                    cap: int = STATE_CAP) -> float:
    """Closed-form entropy overlap × shift-entropy for bipermutative rules.

    Requires bipermutativity.  Invariance of the measure under the rule is
    verified for the uniform spec (push-forward on a width-sized window);
    any other spec is accepted with a warning since invariance is then the
    caller's assertion.
    """
    if not is_bipermutative(rule):
        raise NotPermutativeError("closed-form entropy needs a bipermutative rule")
    if spec.is_uniform():
        if isinstance(rule, McaRule):
            probe = spec.window_measure(0, rule.width + 1, rule.group, cap)
            if not push_forward(rule, probe, cap).is_uniform():
                raise McaLabError("uniform measure unexpectedly not invariant")
    else:
        warnings.warn("measure invariance under the rule is assumed, not checked",
                      stacklevel=2)
    left, right = _overlaps(rule)
    return (left + right) * spec.shift_entropy_bits()


def skew_entropy(v_overlap: int, w_overlap: int,
                 h_lambda: float, h_nu: float) -> float:
    """Entropy of a skew product from its two bipermutative components."""
    return v_overlap * h_lambda + w_overlap * h_nu


def fibre_trajectory_entropy(dec, lambda_spec: MeasureSpec,
                             nu_spec: MeasureSpec, n_steps: int,
                             cap: int = STATE_CAP) -> float:
    """Finite-horizon relative trajectory entropy, averaged over the base.

    For each quotient word on the generating window, evolves the fibre
    rule sequence along the driven quotient configuration, takes the joint
    entropy of the fibre observations under the fibre measure, and averages
    with the quotient weights — a finite-N stand-in for the relative
    entropy closed form (divide by n_steps for the per-step rate).
    """
    from .decompose import fibre_nhca, fibre_step_sequence  # avoid cycle

    rule = dec.rule
    L, R = _overlaps(rule)
    lo, hi = -n_steps * L, n_steps * R
    C = dec.frame.C
    check_cap(dec.frame.B.order ** (hi - lo), cap, "fibrewise enumeration")
    acc = []
    for w in iter_words(C.order, hi - lo):
        p = nu_spec.word_weight(w)
        if not p:
            continue
        c_cfg = Config(C, lo, w)
        if n_steps > 1:
            op = fibre_step_sequence(dec, c_cfg, n_steps - 1)
        else:
            op = fibre_nhca(dec, c_cfg, c_cfg.lo - rule.v_lo, c_cfg.hi - rule.v_hi)
        acc.append(float(p) * trajectory_partition_entropy(op, lambda_spec,
                                                           n_steps, cap))
    return math.fsum(acc)


def product_measure(a: WindowMeasure, b: WindowMeasure) -> WindowMeasure:
    """Independent product on the paired alphabet (a-symbol, b-symbol).

    Both factors must live on the same window; the pair (x, y) is encoded
    as x·|b-alphabet| + y.
    """
    if (a.lo, a.hi) != (b.lo, b.hi):
        raise WindowError("product factors must share the window")
    size = a.size * b.size
    n = a.length
    num = [0] * size ** n
    for i, wa in enumerate(iter_words(a.size, n)):
        if not a.num[i]:
            continue
        for j, wb in enumerate(iter_words(b.size, n)):
            if not b.num[j]:
                continue
            idx = 0
            for x, y in zip(wa, wb):
                idx = idx * size + (x * b.size + y)
            num[idx] = a.num[i] * b.num[j]
    return WindowMeasure(size, a.lo, a.hi, tuple(num), a.den * b.den)


def star_product_measure(frame, a: WindowMeasure, c: WindowMeasure) -> WindowMeasure:
    """Product of fibre and base measures, carried onto the big group.

    Cellwise, the pair (x, y) becomes the group element x⋆y, giving a
    measure on words over B; exact.
    """
    from .pseudo import star_compose

    if (a.lo, a.hi) != (c.lo, c.hi):
        raise WindowError("product factors must share the window")
    B = frame.B
    n = a.length
    num = [0] * B.order ** n
    for i, wa in enumerate(iter_words(a.size, n)):
        if not a.num[i]:
            continue
        for j, wc in enumerate(iter_words(c.size, n)):
            if not c.num[j]:
                continue
            idx = 0
            for x, y in zip(wa, wc):
                idx = idx * B.order + star_compose(frame, x, y)
            num[idx] = a.num[i] * c.num[j]
    return WindowMeasure(B.order, a.lo, a.hi, tuple(num), a.den * c.den, B)
