#!/usr/bin/env python3
"""Independent scalar evaluation of the hand-derived reference values.

Uses only the standard library at 50 significant digits, then rounds to
17 for the JSON fixture read by the engine's example tests.

    python3 oracle/derived.py > crates/core/tests/fixtures/derived.json
"""
import json
from decimal import Decimal as D, getcontext

getcontext().prec = 50


def dist(p, q):
    return sum((a - b) ** 2 for a, b in zip(p, q)).sqrt()


def cost(s, a, g, w=D(1)):
    moved = [x + y for x, y in zip(s, a)]
    effort = sum(x * x for x in a).sqrt()
    return dist(moved, g) - dist(s, g) + w * effort


def exp(x):
    return x.exp()


zero, one = D(0), D(1)
s = (zero, zero)
g1, g2 = (one, zero), (zero, one)
nudge = (D("0.1"), zero)

q_orth = cost(s, (zero, one), g1)
q_half = cost(s, (one, zero), g1, D("0.5"))
q_wrong = cost(s, nudge, g2)
lik_wrong = exp(-q_wrong)
post_g1 = one / (one + exp(-q_wrong))
post_g2 = exp(-q_wrong) / (one + exp(-q_wrong))
q_push = cost(s, (one, zero), g1, D("0.2"))
assist = [D("0.75") * x + D("0.25") * y for x, y in zip(g1, g2)]

values = {
    "q_no_comm_orthogonal": q_orth,
    "q_comm_half_belief": q_half,
    "q_no_comm_wrong_goal": q_wrong,
    "likelihood_wrong_goal_beta1": lik_wrong,
    "posterior_two_goal_g1": post_g1,
    "posterior_two_goal_g2": post_g2,
    "q_comm_low_belief_push": q_push,
    "assist_weighted_x": assist[0],
    "assist_weighted_y": assist[1],
}
print(json.dumps({k: float(format(v, ".17g")) for k, v in values.items()}, indent=2))
