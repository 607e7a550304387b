# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # CNOT circuits at logarithmic depth
#
# A CX-only circuit computes a linear map over GF(2). Rebuilding that map
# from XOR trees with fresh ancillae gives depth that grows with log n
# instead of the gate count.

# %%
import numpy as np

from qpar import parallelize_cnot_circuit, verify_embedding
from qpar.basic import ceil_log2
from qpar.cnot import load_depth_constants, plan_cnot_resynthesis
from qpar.generators import random_cnot
from qpar.gf2 import data_action, matrix_of_cnot_circuit

# %% [markdown]
# ## A small instance, checked by simulation

# %%
c = random_cnot(5, 40, np.random.default_rng(0))
e = parallelize_cnot_circuit(c)
print(f"input depth {c.depth}, output depth {e.depth}, ancillae {e.n_anc}")
print(verify_embedding(e, c, up_to_phase=False))

# %% [markdown]
# The five stages: build every output parity, clear the tree scratch, write
# the inverse parities back onto the data wires to zero them, clear again,
# then swap outputs onto the data wires.

# %%
plan = plan_cnot_resynthesis(matrix_of_cnot_circuit(c))
for name, stage in zip("ABCDE", plan.stages):
    print(name, len(stage), "layers,", sum(len(l) for l in stage), "gates")

# %% [markdown]
# ## Scaling
#
# Past a dozen qubits we check the GF(2) map instead of simulating.

# %%
k = load_depth_constants("cnot")
print(f"{'n':>4} {'gates':>6} {'depth':>6} {'bound':>6} {'anc':>6}")
for n in (4, 8, 16, 32, 64, 128):
    c = random_cnot(n, n * n, np.random.default_rng(n))
    e = parallelize_cnot_circuit(c)
    m, anc = data_action(e.circuit, n)
    assert m == matrix_of_cnot_circuit(c) and not any(anc)
    print(f"{n:>4} {n * n:>6} {e.depth:>6} {k.depth_bound(n):>6} {e.n_anc:>6}")

# %%
print("depth per doubling of n is about", k.a, "layers; log2(128) =", ceil_log2(128))
