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
# # Diagonal unitaries, QFT layers and the staircase

# %%
import math

import numpy as np

from qpar import PhaseVector, mu_coefficients, synthesize_diagonal, verify_embedding
from qpar.cli import run_pass
from qpar.circuit import CircuitError
from qpar.generators import dft_matrix, gen_qft, gen_staircase
from qpar.sim import unitary_of

# %% [markdown]
# ## Parity coefficients
#
# A phase vector splits into +-1 parity patterns. CZ has phase pi on |11>
# only, which is pi/4 times (1 - mu_0 - mu_1 + mu_01).

# %%
coeffs = mu_coefficients(PhaseVector([0, 0, 0, math.pi]))
for s, t in coeffs.subsets().items():
    print(s, round(t / (math.pi / 4), 12), "* pi/4")

# %%
p = PhaseVector(np.random.default_rng(1).uniform(-math.pi, math.pi, 8))
c = synthesize_diagonal(p)
print(f"{len(c.gates)} gates, depth {c.depth}")
print(verify_embedding(c, p.matrix(), up_to_phase=False))

# %% [markdown]
# ## QFT in 2n - 1 layers
#
# Qubit i gets its H in layer 2i; the phase between i and j runs in layer
# i + j, so every layer holds disjoint pairs.

# %%
for n in (2, 4, 8, 16):
    print(n, gen_qft(n).depth)
print(np.allclose(unitary_of(gen_qft(5, reverse=True)), dft_matrix(5)))

# %% [markdown]
# ## Staircases
#
# A chain of controlled-H gates is refused by every pass. Controlled-X and
# controlled-phase chains are accepted.

# %%
h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
try:
    run_pass("auto", gen_staircase(5, h))
except CircuitError as exc:
    print("rejected:", exc)

for label, u in (("X", np.array([[0, 1], [1, 0]])), ("phase", np.diag([1, np.exp(0.4j)]))):
    c = gen_staircase(6, u)
    e, used = run_pass("auto", c)
    print(label, used, c.depth, "->", e.depth, verify_embedding(e, unitary_of(c) / e.phase).equivalent)
