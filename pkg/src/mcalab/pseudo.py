"""Product frames: writing a group B as A * C through a section of B -> B/A.

A frame fixes a normal subgroup A, the quotient C = B/A, and a section
sigma: C -> B with sigma(identity) = identity.  Every b then factors
uniquely as b = a * sigma(c), giving a bijection A x C -> B.  When sigma is
itself a homomorphism the frame is semidirect and the twisting cocycle is
trivial.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import FrameError, NotInvariantError, TableInvalidError
from .groups import (
    FiniteGroup,
    GroupMap,
    Subgroup,
    enumerate_automorphisms,
    is_fully_characteristic,
    quotient,
)
from .util import ENUMERATION_CAP

__all__ = [
    "PseudoFrame",
    "SplitEndo",
    "make_frame",
    "star_compose",
    "star_decompose",
    "conj_auto",
    "cocycle_zeta",
    "is_polymorph",
    "split_endo",
]


@dataclass(eq=False)
class PseudoFrame:
    """All the bookkeeping for one factorization B = A * C.

    ``a_group`` is the subgroup A reindexed as its own group with
    ``a_embed[i]`` the B-index of its i-th element; ``sigma[c]`` is the
    B-index of the section at coset c.  ``b_of[a, c]`` tabulates the star
    bijection and ``a_part``/``c_part`` invert it.
    """

    B: FiniteGroup
    A: Subgroup
    C: FiniteGroup
    pi: GroupMap
    a_group: FiniteGroup
    a_embed: list[int]
    sigma: tuple[int, ...]
    b_of: np.ndarray
    a_part: np.ndarray
    c_part: np.ndarray
    is_semidirect: bool
    a_is_central: bool
    _a_index: dict[int, int] = field(default_factory=dict)

    def a_index(self, b_elem: int) -> int:
        """A-index of a B-element known to lie in A."""
        try:
            return self._a_index[b_elem]
        except KeyError:
            raise FrameError(f"element {b_elem} is not in the distinguished subgroup")


def make_frame(B: FiniteGroup, A: Subgroup, section: list[int] | None = None) -> PseudoFrame:
    """Build the frame for B = A * C.

    The default section sends each coset to its minimal-index member (which
    maps the identity coset to the identity).  A user-supplied ``section``
    must satisfy pi(section[c]) = c and section[0] = 0.
    """
    if A.parent is not B:
        raise FrameError("subgroup belongs to a different group")
    C, pi = quotient(B, A)
    if section is None:
        sigma = [min(x for x in B.elements() if pi(x) == c) for c in C.elements()]
    else:
        if len(section) != C.order:
            raise FrameError(f"section needs {C.order} entries, got {len(section)}")
        sigma = [int(s) for s in section]
        if sigma[0] != 0:
            raise FrameError("section must send the identity coset to the identity")
        for c, s in enumerate(sigma):
            if not (0 <= s < B.order) or pi(s) != c:
                raise FrameError(f"section[{c}] = {s} is not in coset {c}")
    a_group, a_embed = A.as_group()
    a_index = {p: i for i, p in enumerate(a_embed)}
    b_of = np.empty((A.order, C.order), dtype=np.int64)
    seen = np.zeros(B.order, dtype=bool)
    a_part = np.empty(B.order, dtype=np.int64)
    c_part = np.empty(B.order, dtype=np.int64)
    for i, a in enumerate(a_embed):
        for c in C.elements():
            b = B.mul(a, sigma[c])
            if seen[b]:
                raise FrameError(f"star map is not a bijection at (a={a}, c={c})")
            seen[b] = True
            b_of[i, c] = b
            a_part[b] = i
            c_part[b] = c
    semidirect = all(
        B.mul(sigma[c1], sigma[c2]) == sigma[C.mul(c1, c2)]
        for c1 in C.elements() for c2 in C.elements())
    central = all(B.mul(a, b) == B.mul(b, a) for a in A.members for b in B.elements())
    return PseudoFrame(
        B=B, A=A, C=C, pi=pi, a_group=a_group, a_embed=a_embed,
        sigma=tuple(sigma), b_of=b_of, a_part=a_part, c_part=c_part,
        is_semidirect=semidirect, a_is_central=central, _a_index=a_index)


def star_compose(frame: PseudoFrame, a: int, c: int) -> int:
    """B-element of the pair (a, c): a * sigma(c)."""
    return int(frame.b_of[a, c])


def star_decompose(frame: PseudoFrame, b: int) -> tuple[int, int]:
    """Unique (a, c) with b = a * sigma(c)."""
    return int(frame.a_part[b]), int(frame.c_part[b])


def conj_auto(frame: PseudoFrame, c: int) -> GroupMap:
    """The automorphism c* of A: a -> sigma(c) a sigma(c)^-1."""
    B = frame.B
    s = frame.sigma[c]
    images = []
    for a_b in frame.a_embed:
        y = B.conjugate(s, a_b)
        if y not in frame.A:
            raise NotInvariantError(
                f"conjugation by section of {c} leaves the subgroup: {a_b} -> {y}")
        images.append(frame.a_index(y))
    return GroupMap(frame.a_group, frame.a_group, images, True)


def cocycle_zeta(frame: PseudoFrame, c1: int, c2: int) -> int:
    """Twisting cocycle sigma(c1 c2)^-1 sigma(c1) sigma(c2), as an A-index.

    Cochain identities only make the usual sense when A is central; outside
    that case the value is still returned but a warning flags it.
    """
    if not frame.a_is_central:
        warnings.warn("cocycle over a non-central subgroup: identities may not apply",
                      stacklevel=2)
    B, C = frame.B, frame.C
    prod = B.mul(frame.sigma[c1], frame.sigma[c2])
    z = B.mul(B.inv(frame.sigma[C.mul(c1, c2)]), prod)
    if z not in frame.A:
        raise FrameError(f"cocycle value {z} escaped the subgroup")
    return frame.a_index(z)


def is_polymorph(frame: PseudoFrame, cap: int = ENUMERATION_CAP) -> bool:
    """Frame supports uniform splitting of every invariant endomorphism.

    Three conditions: the frame is semidirect; both A and sigma(C) are fully
    characteristic in B; and every conjugation c* is central in Aut(A).
    """
    if not frame.is_semidirect:
        return False
    if not is_fully_characteristic(frame.B, frame.A, cap):
        return False
    try:
        sigma_sub = Subgroup(frame.B, frame.sigma)
    except TableInvalidError:
        return False   # section image is not even a subgroup
    if not is_fully_characteristic(frame.B, sigma_sub, cap):
        return False
    autos = enumerate_automorphisms(frame.a_group, cap)
    for c in frame.C.elements():
        cstar = conj_auto(frame, c)
        for phi in autos:
            if cstar.compose(phi).image_of != phi.compose(cstar).image_of:
                return False
    return True


@dataclass(eq=False)
class SplitEndo:
    """Split of an A-invariant endomorphism g through a frame.

    ``f`` is the restriction of g to A, ``h`` the induced map on C, and
    ``gprime(c) = g(sigma(c)) * sigma(h(c))^-1`` the A-valued correction
    (a plain map, not generally a homomorphism; gprime(identity)=identity).
    The defining identity g(a * c) = (f(a) * gprime(c)) * h(c) is verified
    exhaustively at construction.
    """

    frame: PseudoFrame
    f: GroupMap
    h: GroupMap
    gprime: GroupMap


def split_endo(frame: PseudoFrame, g: GroupMap) -> SplitEndo:
    """Split an endomorphism of B that maps A into A."""
    B, C = frame.B, frame.C
    if g.source is not B or g.target is not B:
        raise FrameError("endomorphism must act on the frame's group")
    if not g.is_homomorphism:
        raise FrameError("split requires a homomorphism")
    for a_b in frame.a_embed:
        if g(a_b) not in frame.A:
            raise NotInvariantError(
                f"map does not leave the subgroup invariant: {a_b} -> {g(a_b)}")
    f = GroupMap(frame.a_group, frame.a_group,
                 [frame.a_index(g(a_b)) for a_b in frame.a_embed], True)
    # induced quotient map: h(pi(b)) = pi(g(b)); well-defined by invariance
    h_images = [frame.pi(g(frame.sigma[c])) for c in C.elements()]
    h = GroupMap(C, C, h_images, True)
    gp_images = []
    for c in C.elements():
        val = B.mul(g(frame.sigma[c]), B.inv(frame.sigma[h(c)]))
        if val not in frame.A:
            raise FrameError(f"correction term at {c} escaped the subgroup")
        gp_images.append(frame.a_index(val))
    gprime = GroupMap(C, frame.a_group, gp_images, False)
    # defining identity, all |A| x |C| inputs
    for a in frame.a_group.elements():
        for c in C.elements():
            lhs = g(star_compose(frame, a, c))
            rhs = star_compose(frame, frame.a_group.mul(f(a), gprime(c)), h(c))
            if lhs != rhs:
                raise FrameError(f"split identity fails at (a={a}, c={c})")
    return SplitEndo(frame=frame, f=f, h=h, gprime=gprime)
