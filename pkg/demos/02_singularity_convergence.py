
# coding: utf-8

# # Quarklets versus Haar wavelets on x^(3/4)

# The target f(x) = x^(3/4) is smooth everywhere except at x = 0. Wavelet trees have to refine towards the singularity and reach only an algebraic rate; quarklet trees can swap subdivisions for polynomial degree away from it. This notebook runs both and compares error curves. It takes about ten seconds.

# In[1]:

import time

from quarktree import TestFunction, fit_rate, run_experiment
from quarktree.bench import Comparison

f = TestFunction("singularity")


# # Coefficients and trees

# run_experiment computes coefficients (adaptive Richardson on the Gramian system), then runs NEARBEST_TREE and TRIM for every N up to 50. With p_max = 0 it is the plain Haar baseline.

# In[2]:

t0 = time.perf_counter()
quarklet = run_experiment(f, j_max=10, p_max=5, n_max=50)
wavelet = run_experiment(f, j_max=10, p_max=0, n_max=50)
print(f"both runs took {time.perf_counter() - t0:.1f} s")
print("solver converged:", quarklet.converged, wavelet.converged)


# In[3]:

print(" N   dofs   L2 (quarklet)   estimator   |  dofs   L2 (Haar)")
for rq, rw in zip(quarklet.records[::5], wavelet.records[::5]):
    print(f"{rq.N:2d}  {rq.dofs:5d}   {rq.l2_error:.3e}      {rq.estimator:.3e}   |  {rw.dofs:4d}   {rw.l2_error:.3e}")


# # Rates

# The Haar curve should look like n^-1 on a log-log plot. For quarklets we fit exp(-beta n^gamma) over a grid of gamma values.

# In[4]:

alg = fit_rate(wavelet.records, "algebraic")
exp = fit_rate(quarklet.records, "exponential")
print(f"Haar:     error ~ n^-{alg.s:.3f}   (R^2 = {alg.r2:.4f})")
print(f"quarklet: error ~ exp(-{exp.beta:.3f} n^{exp.gamma})   (R^2 = {exp.r2:.4f})")


# The fitted gamma sits at the bottom of the grid. The coefficients come from a frame, which is redundant, and Richardson iteration cannot resolve the badly conditioned high-degree directions. The coefficient sequence is therefore mostly a Haar expansion plus a few low-level polynomial terms, and the tree algorithm can only be as good as the coefficients it is given.

# In[5]:

cmp = Comparison(quarklet, wavelet)
print(f"at {cmp.common_dofs} degrees of freedom: quarklet {cmp.quarklet_error:.3e}, Haar {cmp.wavelet_error:.3e}")


# # Reliability

# The estimator is computed from coefficients only. Its ratio to the true squared L2 error stays within a modest band.

# In[6]:

ratios = [r.l2_error ** 2 / r.estimator ** 2 for r in quarklet.records]
print(f"l2^2 / estimator^2 in [{min(ratios):.3f}, {max(ratios):.3f}]")


# The records also export as CSV for any plotting tool:

# In[7]:

print(quarklet.to_csv().splitlines()[:4])
