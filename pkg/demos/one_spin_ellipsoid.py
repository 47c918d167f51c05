# %% [markdown]
# # Stabilizable states of a relaxing spin-1/2
#
# A spin damped towards |up> with rates gamma1 (longitudinal) and gamma2
# (transverse) can be parked anywhere on an ellipsoid by a constant rotation.

# %%
import numpy as np

from qrelax.control import (
    ControlSpec,
    bloch_generators,
    ellipsoid_residual,
    one_spin_controller,
    sample_manifold,
    stabilized_fixed_point,
    synthesize_controller,
)
from qrelax.lindblad import build_affine
from qrelax.scenarios import OneSpinParams, one_spin_model

params = OneSpinParams(gamma1=1.0, gamma2=2.0)
model = one_spin_model(params)
rep = build_affine(model)
print("B =\n", rep.B)
print("c =", rep.c)

# %% [markdown]
# Random rotations about any axis; every fixed point lands on
# (z - 1/2)^2 + (gamma2/gamma1)(x^2 + y^2) = 1/4.

# %%
sample = sample_manifold(model, bloch_generators(), 1000, 5.0, seed=0)
residuals = [ellipsoid_residual(res.r, params.gamma1, params.gamma2) for res in sample]
print(f"{len(sample)} fixed points, max |ellipsoid residual| = {np.max(np.abs(residuals)):.2e}")

# %% [markdown]
# Going backwards: pick a point on the ellipsoid and solve for the rotation.

# %%
z = 0.7
x = np.sqrt((0.25 - (z - 0.5) ** 2) * params.gamma1 / params.gamma2)
ux, uy = one_spin_controller(x, 0.0, z, params.gamma1, params.gamma2)
general = synthesize_controller(model, bloch_generators(), [x, 0.0, z])
print("closed form (ux, uy):", (ux, uy))
print("least squares u:", general.u, "residual", general.residual)
print("achieved:", stabilized_fixed_point(model, ControlSpec(bloch_generators(), (ux, uy, 0))).r)

# %% [markdown]
# Off the ellipsoid there is no constant control that works.

# %%
print("stabilizable?", synthesize_controller(model, bloch_generators(), [0.5, 0.0, 0.5]).stabilizable)
