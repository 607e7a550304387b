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
# # Clifford circuits in normal form
#
# Any circuit over H, X, Z, CX, CZ and W (CZ conjugated by H on one qubit)
# can be rewritten as a CNOT block, three CZ bands separated by full
# Hadamard layers, and a last partial H layer. Each piece parallelizes.

# %%
import numpy as np

from qpar import normal_form, parallelize_clifford, verify_embedding
from qpar.clifford import comb_hadamards, default_rules
from qpar.generators import gen_css_demo, random_clifford
from qpar.textformat import emit_circuit

# %%
rules = default_rules()
print(len(rules), "rewrite rules, all checked against 3-qubit unitaries at load")
print(rules["wzw_to_zwz"])

# %% [markdown]
# ## The seven-qubit encoder

# %%
c = gen_css_demo()
print(emit_circuit(c))

# %% [markdown]
# Moving every H to the end turns the CX gates it crosses into W or CZ.

# %%
body, final_h = comb_hadamards(c)
print([str(g) for g in body.gates])
print("H still owed on", final_h)

# %%
nf = normal_form(c)
print("cnot block", [str(g) for g in nf.cnot_block])
print("z1", [str(g) for g in nf.z1])
print("z2", [str(g) for g in nf.z2])
print("z3", [str(g) for g in nf.z3])
print("phase", nf.phase)

# %%
e = parallelize_clifford(c)
print(f"depth {c.depth} -> {e.depth}, width {e.width}")
print(verify_embedding(e, c))

# %% [markdown]
# ## Random instances

# %%
rng = np.random.default_rng(3)
for n in (3, 5, 8):
    c = random_clifford(n, 6 * n, rng)
    e = parallelize_clifford(c)
    ok = verify_embedding(e, c).equivalent
    print(f"n={n}: depth {c.depth} -> {e.depth}, ancillae {e.n_anc}, equivalent {ok}")
