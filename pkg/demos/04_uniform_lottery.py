"""Best of both worlds: a lottery fair in expectation and in every draw.

The fractional allocation giving every agent exactly its entitlement
share of every item is envy-free (after normalizing by entitlements)
under all consistent valuations.  Realized as a fractional perfect
matching and decomposed into permutation matrices, it becomes a lottery:
the mixture still equals the entitlement shares exactly, while every
support allocation is integral and proportional up to one item.
"""

from fractions import Fraction

from fairmatch import (
    check_allocation,
    check_wsdef_fractional,
    uniform_lottery,
    validate_instance,
)

items = ["mop", "vacuum", "trash", "dust", "sink"]
instance = validate_instance(
    "chores",
    items,
    [
        ("ada", Fraction(1, 2), ["sink", "trash", "mop", "dust", "vacuum"]),
        ("ben", Fraction(1, 3), ["mop", "dust", "sink", "vacuum", "trash"]),
        ("eve", Fraction(1, 6), ["trash", "mop", "vacuum", "sink", "dust"]),
    ],
)

lottery = uniform_lottery(instance)
print(f"{len(lottery.entries)} outcomes:")
for weight, allocation in lottery.entries:
    bundles = {a.name: sorted(b) for a, b in zip(instance.agents, allocation.bundles)}
    print(f"  with probability {weight}: {bundles}")
    assert check_allocation(instance, allocation).passes

mixture = lottery.mixture(instance)
for i, agent in enumerate(instance.agents):
    assert all(share == agent.entitlement for share in mixture.shares[i])
assert check_wsdef_fractional(instance, mixture)
assert sum(w for w, _ in lottery.entries) == 1
print("mixture equals the entitlement shares exactly; every draw verifies.")
