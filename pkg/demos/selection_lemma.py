"""Pick two elements whose neighbourhoods share many non-similar witnesses.

Forty elements share the whole ground set as neighbourhood and are grouped
into similarity cliques of size two. Every pair from different cliques
qualifies; the search returns the first one in lexicographic order.
"""

from fractions import Fraction

import numpy as np

from dyadlab.selection import SelectionInstance, dumps_instance, find_pair, random_instance, verify_hypotheses

clique = np.arange(40) // 2
inst = SelectionInstance.from_sets(6, [range(6)] * 40, Fraction(1, 2), relation=lambda d, u, v: clique[u] == clique[v])
print("hypotheses:", verify_hypotheses(inst))
print("certificate:", find_pair(inst))

rng = np.random.default_rng(0)
small = random_instance(rng, 4, 3, Fraction(1, 2), cap_slack=1)
check = verify_hypotheses(small)
print("\nrandom instance in text form:\n" + dumps_instance(small))
print("hypotheses:", check.ok, check.reason)
print("certificate:", find_pair(small))
