# %% [markdown]
# # Pulsed steady states
#
# Instead of a continuous field, apply a short rotation every dt and let the
# spin relax in between.  The period map has an exact fixed point.

# %%
import numpy as np

from qrelax.control import ControlSpec, bloch_generators, stabilized_fixed_point
from qrelax.scenarios import (
    OneSpinParams,
    PulseTrain,
    max_transverse_magnetization,
    one_spin_model,
    pulsed_steady_state,
    transverse_magnitude,
)

model = one_spin_model(OneSpinParams(1.0, 1.0))
gens = bloch_generators()
u = np.array([0.0, 1.0, 0.0])
continuous = stabilized_fixed_point(model, ControlSpec(gens, u)).r
for dt in (0.2, 0.1, 0.05, 0.025):
    r = pulsed_steady_state(model, PulseTrain(u, dt, gens))
    print(f"dt={dt:<6} steady state {np.round(r, 5)}  error {np.linalg.norm(r - continuous):.2e}")

# %% [markdown]
# Best achievable transverse magnetization: half the equilibrium value when
# T1 = T2, and shrinking like sqrt(T2/T1) / 2 as dephasing gets faster.

# %%
for ratio in (1, 10, 100, 1000):
    p = OneSpinParams(1.0, float(ratio))
    cont, u_best = max_transverse_magnetization(p)
    pulsed, _ = max_transverse_magnetization(p, dt=1e-3)
    print(f"T1/T2={ratio:<5} continuous {cont:.5f} (u_y={u_best:.3f})  pulsed dt=1e-3 {pulsed:.5f}")

# %% [markdown]
# Sweeping the flip angle at a fixed repetition interval.

# %%
dt = 0.05
for theta in np.linspace(0.01, 0.2, 5):
    r = pulsed_steady_state(model, PulseTrain((0, theta / dt, 0), dt, gens))
    print(f"flip angle {theta:.3f} rad -> transverse {transverse_magnitude(r):.4f}")
