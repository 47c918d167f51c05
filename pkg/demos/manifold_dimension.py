# %% [markdown]
# # How many states can be stabilized?
#
# The map from control amplitudes to fixed points has a Jacobian whose rank
# is the local dimension of the stabilizable set: N^2 - N with unrestricted
# controls, less when the controls are restricted.

# %%
import numpy as np

from qrelax.control import full_generators, local_generators, manifold_dimension
from qrelax.scenarios import OneSpinParams, TwoSpinParams, one_spin_model, two_spin_model

rng = np.random.default_rng(1)
one = one_spin_model(OneSpinParams(1.0, 1.5))
two = two_spin_model(TwoSpinParams(1.0, 1.0))

print("one spin, su(2) controls:", manifold_dimension(one, full_generators(1), rng.normal(size=3)))
print("two spins, su(4) controls:", manifold_dimension(two, full_generators(2), rng.normal(size=15)))
print("two spins, local controls:", manifold_dimension(two, local_generators(2), rng.normal(size=6)))
