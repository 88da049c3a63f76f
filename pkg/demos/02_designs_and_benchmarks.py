"""Latin hypercube designs and the benchmark catalogue.

A maximin hypercube spreads points better than a plain one; a nested
design can later be grown into a larger hypercube without moving points.
"""

import numpy as np
from scipy.spatial.distance import pdist

from adasamp import list_benchmarks
from adasamp.core import DesignDomain
from adasamp.doe import LhsConfig, default_sizes, extend_lhs, lhs

unit = DesignDomain.unit(2)
plain = lhs(unit, LhsConfig(20, criterion="plain", seed=0))
maximin = lhs(unit, LhsConfig(20, seed=0))
print(f"min pairwise distance: plain {pdist(plain).min():.3f}, maximin {pdist(maximin).min():.3f}")

nested = lhs(unit, LhsConfig(20, seed=0, fine_strata=50))
grown = np.vstack([nested, extend_lhs(unit, nested, 50, seed=1)])
strata = np.floor(grown * 50).astype(int)
print("grown to 50 points; one point per stratum in every dimension:",
      all(len(set(strata[:, j])) == 50 for j in range(2)))

for n in (1, 2, 3, 4, 6, 8):
    sizes = default_sizes(n)
    names = ", ".join(fn.name for fn in list_benchmarks(n))
    print(f"n={n}: m_init={sizes['m_init']:>3} m_max={sizes['m_max']:>3}  {names}")
