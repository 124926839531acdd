"""
Structure of the quaternion group
=================================

Build Q8, walk its upper central series, and split the group through its
center: every element factors uniquely as (sign) * (coset representative),
and the multiplication defect of the representatives is a 2-cocycle we can
tabulate.
"""
from mcalab import (center, cocycle_zeta, make_frame, make_quaternion,
                    split_endo, upper_central_series, GroupMap)

Q8 = make_quaternion()
print("elements:", " ".join(Q8.labels))

# the ascending chain of centers reaches the whole group: Q8 is nilpotent
series = upper_central_series(Q8)
for k, sub in enumerate(series.chain):
    print(f"Z_{k} = {{{', '.join(Q8.labels[m] for m in sorted(sub.members))}}}")
print("factor invariants:", series.factor_invariants)

# carve Q8 into center x cosets; the canonical section picks 1, i, j, k
frame = make_frame(Q8, center(Q8))
print("\nsection:", [Q8.labels[frame.sigma[c]] for c in range(frame.C.order)])
print("semidirect?", frame.is_semidirect)

# sigma(c1) * sigma(c2) = sigma(c1 c2) * zeta(c1, c2); zeta lands in {+-1}
print("\ncocycle table (rows c1, cols c2):")
A = frame.a_group
for c1 in range(4):
    row = [A.labels[cocycle_zeta(frame, c1, c2)] for c2 in range(4)]
    print("  " + "  ".join(f"{v:>2}" for v in row))

# an endomorphism that respects the center splits into three pieces:
# its restriction f to the center, the induced map h on the cosets, and
# a correction g' recording how representatives drift
rot = GroupMap(Q8, Q8, [0, 1, 4, 5, 6, 7, 2, 3], True)   # i -> j -> k -> i
neg = GroupMap(Q8, Q8, [0, 1, 3, 2, 6, 7, 4, 5], True)   # i -> -i, j <-> k
for name, g in (("rotation", rot), ("half-swap", neg)):
    s = split_endo(frame, g)
    print(f"\n{name}: f = {list(s.f.image_of)}, h = {list(s.h.image_of)}, "
          f"g' = {[A.labels[v] for v in s.gprime.image_of]}")
