"""
Cesàro convergence toward the uniform measure
=============================================

Iterating a permutative rule on a biased initial measure does not converge
— coefficients revisit their starting size along sparse times — but the
running averages do settle.  Exact windows carry the early steps; seeded
Monte Carlo takes over once windows outgrow the state cap.
"""
from fractions import Fraction

from mcalab import (Character, GroupMap, McaRule, MeasureSpec, Probe,
                    abelian_invariants, cesaro_randomization, center,
                    decompose_mca, make_cyclic, make_frame, make_quaternion)

# --- additive warm-up: two-cell sum over Z/2 from a 90/10 coin -------------
Z2 = make_cyclic(2)
ident = GroupMap.identity(Z2)
xor = McaRule(Z2, 0, 1, [(0, ident), (1, ident)], one_sided=True)
coin = MeasureSpec("bernoulli", 2, probs=[Fraction(9, 10), Fraction(1, 10)])
probe = Probe("cell0", Character.make(abelian_invariants(Z2), {0: (1,)}))

rep = cesaro_randomization(xor, coin, 64, [probe], cap_states=4096)
rows = {r.n: r for r in rep.probe_rows}
print("two-cell sum, |coefficient| and running mean:")
for n in (0, 1, 2, 3, 4, 8, 16, 32, 63, 64):
    r = rows[n]
    print(f"  n={n:3d}  |coef|={r.coef_abs:.6f}  cesaro={r.cesaro_mean:.6f}")
print("  (power-of-two times recohere; the average still drains)")

# --- nonabelian main event: width-4 rule over Q8 ---------------------------
Q8 = make_quaternion()
idq = GroupMap.identity(Q8)
wide = McaRule(Q8, 0, 3, [(3, idq)] + [(0, idq)] * 3 + [(2, idq)] * 5
               + [(1, idq)] * 3)
frame = make_frame(Q8, center(Q8))
dec = decompose_mca(wide, frame)

lam = MeasureSpec("bernoulli", 2, probs=[Fraction(7, 10), Fraction(3, 10)])
nu = MeasureSpec("bernoulli", 4, probs=[Fraction(4, 10), Fraction(3, 10),
                                        Fraction(2, 10), Fraction(1, 10)])

rep = cesaro_randomization(wide, (lam, nu), 64, frame=frame, dec=dec,
                           cap_states=4 * 10 ** 6, mc_samples=20000,
                           seed=7)
print(f"\nquaternion rule (exponent sums coprime to 8: "
      f"{rep.coprimality_ok}); exact through n={rep.n_exact}:")
print("  n    TV(marginal, uniform)   cesaro TV    mode")
for r in rep.tv_rows:
    print(f"  {r.n:3d}  {r.tv_distance:.6f}             "
          f"{r.cesaro_tv:.6f}    {r.mode}")
