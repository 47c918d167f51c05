# %% [markdown]
# # An entangled fixed point from local controls
#
# Two spins decay independently to |up up> and interact through J Z1 Z2.
# Adding 4 sqrt(J)/5 (X1 + X2) - J (Z1 + Z2) moves the fixed point towards
# rho_e = (|up up><up up| + |psi+><psi+|)/2, whose entanglement of
# formation is h((1 + sqrt(3)/2)/2) = 0.3546 ebits.

# %%
import numpy as np

from qrelax.control import stabilized_fixed_point
from qrelax.entanglement import entanglement_of_formation
from qrelax.scenarios import TwoSpinParams, bell_mixture_state, entanglement_vs_J, magic_control, two_spin_model

rho_e = bell_mixture_state()
print("rho_e:", entanglement_of_formation(rho_e))

# %%
print(f"{'J/gamma':>10} {'EoF':>10} {'C':>10} {'F(rho_e)':>10}")
for row in entanglement_vs_J(1.0, np.geomspace(1e-2, 1e4, 13)):
    print(f"{row.J:10.3g} {row.eof:10.5f} {row.concurrence:10.5f} {row.fidelity_to_rho_e:10.6f}")

# %% [markdown]
# The fixed point itself at a large coupling.

# %%
J = 1e4
res = stabilized_fixed_point(two_spin_model(TwoSpinParams(1.0, J)), magic_control(J))
np.set_printoptions(precision=4, suppress=True)
print(res.rho.real)
print("slowest relaxation rate:", -res.spectral_abscissa)
