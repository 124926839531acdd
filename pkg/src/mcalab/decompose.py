"""Skew-product decomposition of rules over a product frame.

If every coefficient of a rule over B leaves the frame subgroup A invariant,
the CA factors as a skew product: a quotient CA over C = B/A driving, fibre
by fibre, an affine nonhomogeneous CA over A.  The fibre local maps are
assembled from the per-coefficient splits in closed form and cross-checked
exhaustively against direct evaluation (the two paths must agree exactly).
Iterating on the upper central series yields a tower that bottoms out in an
abelian CA exactly when the group is nilpotent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FrameError, NotCentralError, WindowError
from .groups import FiniteGroup, GroupMap, abelian_invariants, center
from .pseudo import (
    PseudoFrame,
    SplitEndo,
    make_frame,
    split_endo,
    star_compose,
    star_decompose,
)
from .rules import Config, McaRule, NhcaSequence, apply_window, eval_local, local_table
from .util import STATE_CAP, check_cap, iter_words

__all__ = [
    "SkewDecomposition",
    "RecomposeReport",
    "CentralSplit",
    "TowerLevel",
    "NilpotentTower",
    "decompose_mca",
    "recompose_check",
    "central_split",
    "nilpotent_tower",
    "tower_eval",
    "tower_apply",
    "fibre_nhca",
    "fibre_step_sequence",
]


@dataclass(eq=False)
class SkewDecomposition:
    """A rule over B split into quotient rule, fibre maps, and error terms.

    ``h_rule`` is the induced rule over C.  For a window word ``w`` over C,
    :meth:`fibre` assembles the affine fibre rule over A from the stored
    per-factor splits and ``error_map`` — fibres are rebuilt on demand so a
    corrupted part shows up in recomposition checks.
    """

    frame: PseudoFrame
    rule: McaRule
    h_rule: McaRule
    bias_a: int
    bias_c: int
    factor_splits: list[SplitEndo]
    error_map: dict[tuple[int, ...], int]
    verified: bool = False
    _conj_cache: dict[int, GroupMap] = field(default_factory=dict, repr=False)

    def _conj_by(self, b_elem: int) -> GroupMap:
        """Conjugation by a B element, restricted to A (A is normal)."""
        got = self._conj_cache.get(b_elem)
        if got is None:
            fr = self.frame
            images = [fr.a_index(fr.B.conjugate(b_elem, a_b)) for a_b in fr.a_embed]
            got = GroupMap(fr.a_group, fr.a_group, images, True, _trusted=True)
            self._conj_cache[b_elem] = got
        return got

    def fibre(self, c_word: tuple[int, ...]) -> McaRule:
        """Affine fibre rule over A for one quotient window word.

        The rule over B evaluated on a*c splits as
        ``f_bias * prod_i Conj_{S_i}(f_i(a) * g'_i(c_i)) * error(c)`` where
        S_i is the running product of section values; this is renormalized
        into bias-times-endomorphism-product form by conjugating each factor
        with its ascending suffix of constants.
        """
        fr, A, B = self.frame, self.frame.a_group, self.frame.B
        rule = self.rule
        if len(c_word) != rule.width:
            raise WindowError(f"fibre word needs {rule.width} cells")
        sigma = fr.sigma
        running = sigma[self.bias_c]
        phis: list[GroupMap] = []
        consts: list[int] = []
        for (pos, _), sp in zip(rule.factors, self.factor_splits):
            c_val = c_word[pos - rule.v_lo]
            conj = self._conj_by(running)
            phis.append(conj.compose(sp.f))
            consts.append(conj(sp.gprime(c_val)))
            running = B.mul(running, sigma[sp.h(c_val)])
        err = self.error_map[tuple(c_word)]
        # normalize f_bias*phi_0(.)k_0*...*phi_{I-1}(.)k_{I-1}*err into
        # bias * prod phi'_i(.) with phi'_i = T_i^-1 phi_i T_i,
        # T_i = k_i k_{i+1} ... k_{I-1} err  (ascending suffix products).
        suffix = err
        new_factors = []
        for (pos, _), phi, k in zip(reversed(rule.factors), reversed(phis),
                                    reversed(consts)):
            suffix = A.mul(k, suffix)
            inv_s = A.inv(suffix)
            conj_t = GroupMap(
                A, A, [A.mul(A.mul(inv_s, phi(x)), suffix) for x in A.elements()],
                True, _trusted=True)
            new_factors.append((pos, conj_t))
        new_factors.reverse()
        bias = A.mul(self.bias_a, suffix)
        return McaRule(A, rule.v_lo, rule.v_hi, new_factors, bias,
                       one_sided=rule.one_sided)

    def fibre_table(self) -> dict[tuple[int, ...], McaRule]:
        """Dense map of every quotient window word to its fibre rule."""
        return {w: self.fibre(w)
                for w in iter_words(self.frame.C.order, self.rule.width)}


@dataclass
class RecomposeReport:
    ok: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.ok


def decompose_mca(rule: McaRule, frame: PseudoFrame,
                  cap: int = STATE_CAP) -> SkewDecomposition:
    """Split a rule through a frame; exhaustively verified before return.

    Every coefficient must leave the frame subgroup invariant (checked by
    the per-coefficient splits).  Verification evaluates the original rule
    on all |B|**width window words and compares both components against the
    quotient rule and the assembled fibre rules — a mismatch means an
    internal error and raises.
    """
    if rule.group is not frame.B:
        raise FrameError("rule and frame act on different groups")
    check_cap(frame.B.order ** rule.width, cap, "decomposition verification")
    bias_a, bias_c = star_decompose(frame, rule.bias)
    splits = [split_endo(frame, coeff) for _, coeff in rule.factors]
    h_rule = McaRule(frame.C, rule.v_lo, rule.v_hi,
                     [(pos, sp.h) for (pos, _), sp in zip(rule.factors, splits)],
                     bias_c, one_sided=rule.one_sided)
    B, C, sigma = frame.B, frame.C, frame.sigma
    error_map: dict[tuple[int, ...], int] = {}
    for w in iter_words(C.order, rule.width):
        acc = sigma[bias_c]
        for (pos, _), sp in zip(rule.factors, splits):
            acc = B.mul(acc, sigma[sp.h(w[pos - rule.v_lo])])
        h_val = eval_local(h_rule, w)
        e_val = B.mul(acc, B.inv(sigma[h_val]))
        if e_val not in frame.A:
            raise FrameError("error term escaped the subgroup")
        error_map[w] = frame.a_index(e_val)
    dec = SkewDecomposition(frame=frame, rule=rule, h_rule=h_rule,
                            bias_a=bias_a, bias_c=bias_c,
                            factor_splits=splits, error_map=error_map)
    report = recompose_check(dec)
    if not report.ok:
        raise FrameError(f"decomposition self-check failed: {report.witness}")
    dec.verified = True
    return dec


def recompose_check(dec: SkewDecomposition, rule: McaRule | None = None) -> RecomposeReport:
    """Exhaustively compare the decomposition against the original rule.

    Rebuilds each fibre from the stored parts, so tampering with any of
    them (e.g. the error map) is caught; returns the first mismatch as a
    witness instead of raising.
    """
    rule = rule if rule is not None else dec.rule
    fr = dec.frame
    A, C = fr.a_group, fr.C
    width = rule.width
    rule_tbl = local_table(rule)
    h_tbl = local_table(dec.h_rule)
    for w in iter_words(C.order, width):
        try:
            fib = dec.fibre(w)
        except KeyError:
            return RecomposeReport(False, {"c_word": w, "reason": "missing error term"})
        h_idx = 0
        for c in w:
            h_idx = h_idx * C.order + c
        h_out = int(h_tbl[h_idx])
        for u in iter_words(A.order, width):
            b_idx = 0
            for a, c in zip(u, w):
                b_idx = b_idx * fr.B.order + star_compose(fr, a, c)
            a_out, c_out = star_decompose(fr, int(rule_tbl[b_idx]))
            if c_out != h_out:
                return RecomposeReport(False, {
                    "c_word": w, "a_word": u, "part": "quotient",
                    "expected": c_out, "got": h_out})
            got = eval_local(fib, u)
            if got != a_out:
                return RecomposeReport(False, {
                    "c_word": w, "a_word": u, "part": "fibre",
                    "expected": a_out, "got": got})
    return RecomposeReport(True)


def fibre_nhca(dec: SkewDecomposition, c_config: Config,
               out_lo: int, out_hi: int) -> NhcaSequence:
    """Fibre rules along a fixed quotient configuration, one per output cell."""
    rule = dec.rule
    rules = {}
    for m in range(out_lo, out_hi):
        w = tuple(c_config.at(m + v) for v in range(rule.v_lo, rule.v_hi + 1))
        rules[m] = dec.fibre(w)
    return NhcaSequence(dec.frame.a_group, rule.v_lo, rule.v_hi, rules,
                        one_sided=rule.one_sided)


def fibre_step_sequence(dec: SkewDecomposition, c_config: Config,
                        n_steps: int) -> list[NhcaSequence]:
    """Time-varying fibre families driven by the evolving quotient config.

    Step n uses the fibres of the n-times-evolved quotient configuration;
    the usable cell range shrinks by the window spread each step.
    """
    out: list[NhcaSequence] = []
    cur = c_config
    for _ in range(n_steps):
        lo, hi = cur.lo - dec.rule.v_lo, cur.hi - dec.rule.v_hi
        if lo > hi:
            raise WindowError("quotient configuration too narrow for the step count")
        out.append(fibre_nhca(dec, cur, lo, hi))
        cur = apply_window(dec.h_rule, cur)
    return out


# -- central case ------------------------------------------------------------


@dataclass(eq=False)
class CentralSplit:
    """Fibres over a central subgroup: one linear rule plus a block map.

    Every fibre equals ``lin_rule + block_map[c_word]`` — the linear part is
    shared by all fibres, only the additive block depends on the quotient
    word.  ``linear_coeffs`` combines all factors at one position into a
    single endomorphism of the (abelian) fibre group.
    """

    frame: PseudoFrame
    h_rule: McaRule
    lin_rule: McaRule
    linear_coeffs: dict[int, GroupMap]
    block_map: dict[tuple[int, ...], int]


def central_split(rule: McaRule, frame: PseudoFrame,
                  cap: int = STATE_CAP,
                  dec: SkewDecomposition | None = None) -> CentralSplit:
    """Specialize a decomposition when the frame subgroup is central."""
    if not frame.a_is_central:
        raise NotCentralError("central split needs a central frame subgroup")
    if dec is None:
        dec = decompose_mca(rule, frame, cap)
    A = frame.a_group
    per_pos: dict[int, GroupMap] = {}
    for (pos, _), sp in zip(rule.factors, dec.factor_splits):
        prev = per_pos.get(pos)
        if prev is None:
            per_pos[pos] = sp.f
        else:
            images = [A.mul(prev(x), sp.f(x)) for x in A.elements()]
            per_pos[pos] = GroupMap(A, A, images, True, _trusted=True)
    lin_rule = McaRule(A, rule.v_lo, rule.v_hi, sorted(per_pos.items()),
                       0, one_sided=rule.one_sided)
    block_map: dict[tuple[int, ...], int] = {}
    for w in iter_words(frame.C.order, rule.width):
        val = dec.bias_a
        val = A.mul(val, dec.error_map[w])
        for (pos, _), sp in zip(rule.factors, dec.factor_splits):
            val = A.mul(val, sp.gprime(w[pos - rule.v_lo]))
        block_map[w] = val
    split = CentralSplit(frame=frame, h_rule=dec.h_rule, lin_rule=lin_rule,
                         linear_coeffs=per_pos, block_map=block_map)
    # verify fibre == linear + block on every input
    lin_tbl = local_table(lin_rule, cap)
    a_table = A.table
    for w in iter_words(frame.C.order, rule.width):
        fib_tbl = local_table(dec.fibre(w), cap)
        if not np.array_equal(fib_tbl, a_table[lin_tbl, block_map[w]]):
            raise FrameError(f"central split disagrees with fibre at {w}")
    return split


# -- nilpotent towers --------------------------------------------------------


@dataclass(eq=False)
class TowerLevel:
    frame: PseudoFrame
    decomposition: SkewDecomposition
    split: CentralSplit


@dataclass(eq=False)
class NilpotentTower:
    """Iterated central decompositions until the quotient turns abelian.

    ``levels[k]`` decomposes the current rule over the center of its group;
    ``tail_rule`` is what remains.  ``is_complete`` is True exactly when the
    tail group is abelian (i.e. the group was nilpotent); otherwise the tail
    group has trivial center and is the non-nilpotent residue.
    """

    rule: McaRule
    levels: list[TowerLevel]
    tail_rule: McaRule
    is_complete: bool
    factor_invariants: list[tuple[int, ...]]

    @property
    def depth(self) -> int:
        return len(self.levels) + 1

    @property
    def residue_group(self) -> FiniteGroup | None:
        return None if self.is_complete else self.tail_rule.group


def nilpotent_tower(rule: McaRule, cap: int = STATE_CAP) -> NilpotentTower:
    """Peel central skew factors until the remaining group is abelian.

    Verifies on return that recomposing all levels reproduces the original
    rule on every window word.
    """
    levels: list[TowerLevel] = []
    invariants: list[tuple[int, ...]] = []
    cur = rule
    while not cur.group.is_abelian:
        Z = center(cur.group)
        if Z.order == 1:
            break
        frame = make_frame(cur.group, Z)
        dec = decompose_mca(cur, frame, cap)
        split = central_split(cur, frame, cap, dec)
        invariants.append(abelian_invariants(frame.a_group).orders)
        levels.append(TowerLevel(frame=frame, decomposition=dec, split=split))
        cur = dec.h_rule
    complete = cur.group.is_abelian
    if complete:
        invariants.append(abelian_invariants(cur.group).orders)
    tower = NilpotentTower(rule=rule, levels=levels, tail_rule=cur,
                           is_complete=complete, factor_invariants=invariants)
    check_cap(rule.group.order ** rule.width, cap, "tower verification")
    tbl = local_table(rule, cap)
    B = rule.group
    for idx, word in enumerate(iter_words(B.order, rule.width)):
        if tower_eval(tower, word) != int(tbl[idx]):
            raise FrameError(f"tower recomposition fails on window word {word}")
    return tower


def tower_eval(tower: NilpotentTower, word: tuple[int, ...]) -> int:
    """Evaluate the original local map through the tower levels."""

    def level_eval(k: int, w: tuple[int, ...]) -> int:
        if k == len(tower.levels):
            return eval_local(tower.tail_rule, w)
        lev = tower.levels[k]
        pairs = [star_decompose(lev.frame, b) for b in w]
        a_word = tuple(p[0] for p in pairs)
        c_word = tuple(p[1] for p in pairs)
        a_out = eval_local(lev.decomposition.fibre(c_word), a_word)
        c_out = level_eval(k + 1, c_word)
        return star_compose(lev.frame, a_out, c_out)

    return level_eval(0, word)


def tower_apply(tower: NilpotentTower, config: Config) -> Config:
    """One synchronous step computed through the tower (window shrinks)."""

    def level_apply(k: int, cfg: Config) -> Config:
        rule = tower.rule
        if k == len(tower.levels):
            return apply_window(tower.tail_rule, cfg)
        lev = tower.levels[k]
        pairs = [star_decompose(lev.frame, b) for b in cfg.word]
        a_cfg = Config(lev.frame.a_group, cfg.offset, [p[0] for p in pairs])
        c_cfg = Config(lev.frame.C, cfg.offset, [p[1] for p in pairs])
        lo, hi = cfg.lo - rule.v_lo, cfg.hi - rule.v_hi
        fibres = fibre_nhca(lev.decomposition, c_cfg, lo, hi)
        a_out = apply_window(fibres, a_cfg)
        c_out = level_apply(k + 1, c_cfg)
        assert (a_out.lo, a_out.hi) == (c_out.lo, c_out.hi)
        word = [star_compose(lev.frame, a, c)
                for a, c in zip(a_out.word, c_out.word)]
        return Config(lev.frame.B, a_out.lo, word)

    return level_apply(0, config)
