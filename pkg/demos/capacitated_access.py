# Single depot, single client, trips of capacity U: splittable rounding, then repacking.
from irpfl import IapGeneratorParams, Variant, exact_iap, generate_random_iap, solve_detailed

params = IapGeneratorParams(T=6, capacity=6, variant=Variant.CAP_UNSPLIT, items_per_day=2,
                            demand_range=(2, 6))
x = generate_random_iap(params, seed=11)
print("items", [(t, str(a)) for t, a in x.demands], "distance", x.distance)

sol = solve_detailed(x)
plan = sol.plans[1]
print("half-mass days", dict(plan.s_star))
print("anchors", plan.anchors, "visit days", plan.visit_days)

split, whole = sol.split_schedule, sol.schedule
for r in sol.repacks:
    loads = [str(a) for a in next(d for d in whole.deliveries if d.day == r.day).loads]
    print(f"day {r.day}: {r.split_trips} split trips -> {r.unsplit_trips} whole trips {loads}")

print(f"LP {sol.lp.objective}  split {split.total}  unsplit {whole.total}")
print(f"holding before/after repacking: {split.holding_cost} / {whole.holding_cost}")
print("exact unsplittable optimum", exact_iap(x).optimum)
print("exact splittable optimum", exact_iap(x, Variant.CAP_SPLIT).optimum)
