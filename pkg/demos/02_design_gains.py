"""Compute LQR and observer gains for the bundled scenarios.

Shows the Riccati-based gain design plus the separation-principle spectrum
of the augmented closed loop.
"""

import numpy as np

from etcontrol import build_trigger_design, design_gains, get_scenario

for name in ("maglev", "mass-spring", "ieee13"):
    sc = get_scenario(name)
    gains = design_gains(sc.model, sc.weights)
    design = build_trigger_design(sc.model, gains, sigma=sc.sigma, epsilon=sc.epsilon)
    eigs = np.sort_complex(np.linalg.eigvals(design.A_tilde))
    print(f"--- {name} ---")
    print("K =", np.round(gains.K.ravel(), 4))
    print("L =", np.round(gains.L.ravel(), 4))
    print("closed-loop eigenvalues:")
    for lam in eigs:
        print(f"   {lam.real: .4g} {lam.imag:+.4g}j")
    print(f"all stable: {bool(np.all(eigs.real < 0))}")
    print()
