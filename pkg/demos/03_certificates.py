
# coding: utf-8

# # Checking near-best guarantees

# For a finished run the threshold q_N gives two cheap bounds: a lower bound on the best possible error with n degrees of freedom and an upper bound on the error of the produced tree. On small problems the best error sigma_n can be found exactly, so all three inequalities can be checked directly.

# In[1]:

import numpy as np

from quarktree import CoefficientErrors, CoefficientSequence, brute_force_sigma, certify, nearbest_tree, trim
from quarktree.haar import full_index_set
from quarktree.nearbest import sigma_bounds_for


# A random coefficient sequence on levels up to 3 and degrees up to 2, decaying with the level.

# In[2]:

rng = np.random.default_rng(0)
idx = full_index_set(3, 2)
c = CoefficientSequence({i: rng.standard_normal() * 2.0 ** (-max(i.j, 0)) for i in idx})
oracle = CoefficientErrors(c)


# In[3]:

N = 6
run = nearbest_tree(oracle, N)
T = trim(run)
print("trimmed tree degrees:", {(lam.j, lam.k): p for lam, p in sorted(T.pmax.items())})


# sigma_n is exact as long as the search covers every tree with at most n quarklets: depth (n-1)//2 and degree n-1 are enough.

# In[4]:

print(" n   sigma_n    E(T_N)    bound     q_N(N-n+1)  q_N(2N+1)  ok")
for n in range(1, N + 1):
    sigma = brute_force_sigma(oracle, n, *sigma_bounds_for(n))
    cert = certify(run, T, n, sigma)
    print(f"{n:2d}  {sigma:.4f}   {cert.global_error:.4f}   {cert.bound:.4f}   {cert.lower:.4f}      {cert.upper:.4f}     {cert.ok}")


# The same check is available from the shell:
#
#     quarktree coeffs --function spike --jmax 4 --pmax 2 --out c.csv
#     quarktree certify --coeffs c.csv --steps 6 --n 3 --depth-bound 2
