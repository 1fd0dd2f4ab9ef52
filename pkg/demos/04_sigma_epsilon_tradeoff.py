"""Trade-off between trigger aggressiveness and closed-loop performance.

Sweeps the six (sigma, epsilon) operating points of the levitation example:
lowering sigma or raising epsilon cuts transmissions, at the price of a
larger steady-state estimate-norm integral J_X.
"""

from etcontrol import build_trigger_design, design_gains, get_scenario, metrics, simulate

sc = get_scenario("maglev")
gains = design_gains(sc.model, sc.weights)

print(f"{'sigma':>6} {'epsilon':>8} {'n_s':>5} {'J_X':>8} {'min gap':>9}")
for eps in (0.01, 0.05):
    for sig in (0.75, 0.5, 0.25):
        design = build_trigger_design(sc.model, gains, sigma=sig, epsilon=eps)
        trace = simulate(sc.model, gains, design, sc.config)
        r = metrics(trace, design, weights=sc.weights)
        print(f"{sig:>6} {eps:>8} {r.n_s:>5} {r.J_X:>8.3f} {r.min_interval:>9.4f}")
