"""Realize a state-space model from an input/output record.

A known two-mass system is excited with an exponential chirp; the pipeline
deconvolves the impulse response, picks the order from the Hankel singular
values, and returns a continuous-time model whose poles match the truth.
"""

import numpy as np

from etcontrol import LtiModel, c2d_tustin, gen_chirp, identify
from etcontrol.sysid import ChirpSpec, EraDataset, simulate_discrete

true_model = LtiModel(
    A=np.array([[0.0, 1.0], [-4.0, -0.8]]),
    B=np.array([[0.0], [1.0]]),
    C=np.array([[1.0, 0.0]]),
    D=np.zeros((1, 1)),
)

fs = 50.0
spec = ChirpSpec(amplitude=1.0, f_start=0.1, f_end=20.0, num_samples=2000, sample_rate=fs)
u = np.concatenate([gen_chirp(spec), np.zeros(600)])  # silent tail
y = simulate_discrete(c2d_tustin(true_model, fs), u)

result = identify(EraDataset(u=u, y=y, sample_rate=fs))

print(f"selected order:   {result.order}")
print(f"energy captured:  {result.energy_captured:.6f}")
print(f"output fit:       {result.fit:.6f}")
print("true poles:      ", np.sort_complex(np.linalg.eigvals(true_model.A)))
print("identified poles:", np.sort_complex(np.linalg.eigvals(result.model.A)))
print("leading Hankel singular values:", np.round(result.singular_values[:6], 6))
