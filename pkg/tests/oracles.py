"""Independent direct-iteration oracle for preperiodic points."""
import math

from preper.enumeration import elements_of_bounded_height
from preper.heights import preper_height_bound_holds, relative_height

PHI4 = ((1 + math.sqrt(5)) / 2) ** 4


class IterationOracle:
    """PrePer(f_c, K) for every c in K with H_K(c) <= Bc.

    Every preperiodic point satisfies H_K(P)^2 <= phi^4 H_K(c), so one pool
    of elements up to phi^2 sqrt(Bc) serves all parameters; a point is preperiodic
    exactly when its orbit repeats without leaving the bounded set.
    """

    def __init__(self, K, Bc):
        self.K = K
        top = math.ceil(math.sqrt(PHI4 * Bc)) + 1
        self.pool = [(float(h), x) for h, x in elements_of_bounded_height(K, top, with_heights=True)]

    def candidates(self, c):
        hc = float(relative_height(c))
        lim = PHI4 * hc
        out = []
        for h, x in self.pool:
            if h * h > lim * (1 + 1e-9):
                break
            if h * h < lim * (1 - 1e-9) or preper_height_bound_holds(x, c):
                out.append(x)
        return out

    def preper(self, c) -> set:
        cands = self.candidates(c)
        inside = set(cands)
        succ = {}
        for P in cands:
            Q = P * P + c
            succ[P] = Q if Q in inside else None
        good, bad = set(), set()
        for P in cands:
            path, seen = [], set()
            x = P
            while x is not None and x not in good and x not in bad and x not in seen:
                seen.add(x)
                path.append(x)
                x = succ[x]
            (good if x is not None and (x in good or x in seen) else bad).update(path)
        return good
