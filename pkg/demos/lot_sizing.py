# With no capacity the access problem is lot sizing: a block DP solves it exactly.
import random
import time

from irpfl import IapGeneratorParams, generate_random_iap, visit_enum_iap, ww_dp

x = generate_random_iap(IapGeneratorParams(T=10, demand_density=0.8, distance_range=(5, 20)), seed=1)
res = ww_dp(x)
print("visit days", [d.day for d in res.witness.deliveries], "cost", res.optimum)
for d in res.witness.deliveries:
    print(f"  day {d.day} covers deadlines {sorted(d.delivered)}")

# the DP agrees with brute force over all visit sets
rng = random.Random(0)
t0 = time.perf_counter()
for _ in range(50):
    y = generate_random_iap(IapGeneratorParams(T=rng.randint(1, 12)), rng.randrange(10**6))
    assert ww_dp(y).optimum == visit_enum_iap(y).optimum
print(f"50 random instances agree ({time.perf_counter() - t0:.2f}s)")
