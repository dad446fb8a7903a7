"""
Sweeping the angle between two voter blocs
==========================================

How does each aggregation rule treat a 30% minority as its scoring vector
rotates away from the 70% majority's?  We sweep the opening angle phi and
track each bloc's proportionality on *contested* item pairs only -- pairs
the two blocs themselves order differently, which is where aggregation
actually has to take sides.
"""

import numpy as np

from propagg import (
    OptimizerOptions,
    UniformSphere,
    ip_tilde_estimates,
    make_rule,
    two_voter_profile,
)

RULES = ("arith", "angular", "median", "borda", "psb")
PHIS = (30.0, 90.0, 135.0, 175.0)

items = UniformSphere(2)

# ----------------------------------------------------------------------
# For each angle and rule, estimate the contested-pair level of both
# blocs over R random batches.  Levels are normalized by entitlement:
# the majority's fair share of contested pairs is 0.7, the minority's 0.3,
# so 1.0 always means "exactly proportional".
# ----------------------------------------------------------------------
header = f"{'phi':>5s} " + "".join(f"{r:>16s}" for r in RULES)
print(header)
print(" " * 6 + "".join(f"{'maj   min':>16s}" for _ in RULES))
for phi in PHIS:
    profile = two_voter_profile(phi, 0.7)
    cells = []
    for name in RULES:
        rule = make_rule(name, OptimizerOptions(seed=0))
        means, _ses, _skipped = ip_tilde_estimates(
            rule, profile, items, 10, 800, 0
        )
        cells.append(f"{means[0]:5.2f} {means[1]:5.2f}")
    print(f"{phi:5.0f} " + "".join(f"{c:>16s}" for c in cells))

# ----------------------------------------------------------------------
# Reading the table:
#   * The two mean-of-vectors rules start near 1.0/1.0: under mild
#     disagreement their compromise direction splits contested pairs
#     nearly in proportion.  As phi grows the weighted average (arith)
#     drifts majoritarian and its minority column decays toward 0.
#   * The geometric median is majoritarian at *every* angle: any bloc
#     holding more than half the weight pins the median to its own
#     vector, so the minority never wins a contested pair.
#   * The angular mean holds both columns near 1.0 all the way to nearly
#     opposed blocs: its distance to each voter is capped by the *other*
#     bloc's weight, which is exactly the proportionality mechanism.
#   * The per-batch positional rules (borda, psb) land in between.
# ----------------------------------------------------------------------
print()
theta = np.degrees(
    np.arccos(float(two_voter_profile(175.0, 0.7).vectors.prod(axis=0).sum()))
)
print(f"sanity: constructed opening angle at phi=175 is {theta:.1f} degrees")
