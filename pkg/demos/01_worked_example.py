
# coding: utf-8

# # A three-node example, by hand and by machine

# This notebook walks through one step of NEARBEST_TREE on a tiny coefficient sequence. Every number printed here can be checked by hand, which makes it a good first look at how local errors, penalized errors and thresholds fit together.

# In[1]:

import math

from quarktree import CoefficientErrors, CoefficientSequence, ROOT, WaveletIndex
from quarktree import brute_force_sigma, global_error, nearbest_tree, quarklet_cardinality, trim


# The sequence lives on the root (with its generator slot, level -1) and its two children, in degrees 0 and 1. We store squared magnitudes and take square roots.

# In[2]:

squares = {
    (0, -1, 0): 1.0, (0, 0, 0): 1.0, (0, 1, 0): 0.25, (0, 1, 1): 0.25,
    (1, -1, 0): 0.5, (1, 0, 0): 0.5, (1, 1, 0): 0.1, (1, 1, 1): 0.1,
}
c = CoefficientSequence({idx: math.sqrt(v) for idx, v in squares.items()})
oracle = CoefficientErrors(c)


# # Local errors

# e_p(lam) collects the degree tail above p along the chain from lam up to the first right node, plus everything below lam. At the root with p=0 that is 0.5 + 0.5 (degree tails) plus 0.7 (all of level 1).

# In[3]:

L10, L11 = WaveletIndex(1, 0), WaveletIndex(1, 1)
for lam in (ROOT, L10, L11):
    print(lam, [round(oracle.local_error(lam, p), 12) for p in (0, 1)])


# (1,0) is a left child, so its chain reaches the root and it inherits the root's degree tail: 1.1. The right child (1,1) only sees its own tail: 0.1.

# # One step of the algorithm

# In[4]:

run = nearbest_tree(oracle, 1)
root = run.nodes[ROOT]
print("r(R) =", root.r)
print("E_1(R) =", root.E, " (min of 1.1 + 0.1 and e_1(R) = 0.7)")
print("tilde E_1(R) =", root.tilde_E, " vs 1.19/2.4 =", 1.19 / 2.4)
print("q_1 =", run.qN, " next subdivision s(R) =", root.s)


# Trimming cuts wherever E equals e_r. At the root polynomial enrichment wins (0.7 < 1.2), so the tree collapses back to the root with degree 1.

# In[5]:

T1 = trim(run)
print("pmax:", T1.pmax)
print("#T_1 =", quarklet_cardinality(T1), " global error =", global_error(T1, oracle))


# # Best possible trees

# For n = 1 the only admissible tree is the bare root, for n = 2 the root with degree 1 is best.

# In[6]:

for n in (1, 2):
    print(f"sigma_{n} =", brute_force_sigma(oracle, n, j_bound=(n - 1) // 2, p_bound=n - 1))
