# Number partition as a delivery problem: one day, capacity half the total.
from fractions import Fraction

from irpfl import build_csiap_lp, exact_iap, make_partition_gadget, partition_exists, solve_lp, solve_detailed

for S in ([1, 2, 3, 4], [2, 2, 2], [3, 3, 2, 2, 2]):
    g = make_partition_gadget(S, w=7)
    lp = solve_lp(build_csiap_lp(g))          # splitting allowed: always 2 trips
    opt = exact_iap(g)                         # whole items only
    sol = solve_detailed(g)                    # LP rounding then repacking
    print(f"S={S} U={g.capacity}")
    print(f"  LP {lp.objective}  exact {opt.optimum}  rounded {sol.schedule.total}")
    print(f"  partition exists: {partition_exists(S)}  exact == 2w: {opt.optimum == 14}")

# The {2,2,2} gadget is an integrality gap instance: LP 2w against optimum 3w.
g = make_partition_gadget([2, 2, 2], Fraction(1))
print("gap ratio", exact_iap(g).optimum / solve_lp(build_csiap_lp(g)).objective)
