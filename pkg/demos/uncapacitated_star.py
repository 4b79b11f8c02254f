# Walk through the uncapacitated rounding on one random instance.
from irpfl import GeneratorParams, exact_sirpfl, generate_random, solve_detailed
from irpfl.schedule import schedule_to_csv

x = generate_random(GeneratorParams(n=5, T=4, demand_density=0.4, max_demands=8), seed=3)
print("demands", {k: str(v) for k, v in x.demands.items()})
print("facility costs", [str(f) for f in x.facility_costs])

sol = solve_detailed(x)
lp = sol.lp
print(f"LP {lp.objective} = facility {lp.facility_cost} + routing {lp.routing_cost} + holding {lp.holding_cost}")
print(f"LP size: {len(lp.model.variables)} variables, {len(lp.model.constraints)} rows, {lp.iterations} pivots")

# each client gets anchors (demand days whose half-mass day becomes a visit)
for v, plan in sol.plans.items():
    print(f"client {v}: s*={dict(plan.s_star)} anchors={plan.anchors} visits={plan.visit_days}")

# balls around clients, kept greedily by radius; the cheapest vertex of each kept ball opens
b = sol.balls
for v in sorted(b.balls, key=b.radius):
    mark = "kept" if v in b.selected else "skipped"
    print(f"ball {v}: radius {b.radius(v)} members {sorted(b.balls[v])} z-mass {b.z_mass[v]} {mark}")
print("opened", sorted(b.opened), "assignment", b.facility_of)

s = sol.schedule
print(f"rounded {s.total} (f {s.facility_cost}, r {s.routing_cost}, h {s.holding_cost})")
print("exact optimum", exact_sirpfl(x).optimum)
print(schedule_to_csv(s))
