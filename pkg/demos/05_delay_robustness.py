"""Effect of network delay on the mass-spring closed loop.

Packets are applied a fixed number of steps after the detector fires; the
loop still regulates the state to the epsilon-ball for delays of 10 ms and
100 ms.  A coarser grid than the headline experiment keeps the demo quick.
"""

import numpy as np

from etcontrol import build_trigger_design, design_gains, get_scenario, simulate

base = get_scenario("mass-spring").with_overrides(step=1e-4)
gains = design_gains(base.model, base.weights)

print(f"{'delay [s]':>10} {'packets':>8} {'terminal |x|':>13} {'min gap [s]':>12}")
for delay in (0.0, 0.01, 0.1):
    sc = base.with_overrides(delay=delay)
    design = build_trigger_design(sc.model, gains, sigma=sc.sigma, epsilon=sc.epsilon)
    trace = simulate(sc.model, gains, design, sc.config)
    terminal = np.linalg.norm(trace.x[-1])
    print(f"{delay:>10} {trace.events.packet_count:>8} {terminal:>13.4g} "
          f"{trace.events.min_interval:>12.4g}")
