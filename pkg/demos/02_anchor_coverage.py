"""
Address coverage of data-plane anchors
======================================

Pick IXPs greedily by how much IPv4 space their members announce, with
and without each member's direct customers (the 1-hop customer cone).
"""

from ixpgraph import coverage, greedy_anchors, parse_as_prefixes, parse_membership, parse_relationships

members = parse_membership("ixp_id,asn\nAMS,1\nAMS,2\nFRA,2\nFRA,3\nLON,4\nLON,1\nPAR,5\n")
prefixes = parse_as_prefixes(
    "asn,prefix\n1,11.0.0.0/8\n2,12.0.0.0/9\n3,12.0.0.0/10\n4,13.0.0.0/12\n5,14.0.0.0/16\n6,15.0.0.0/8\n"
)
# AS 5 is a customer of AS 3 and AS 6 a customer of AS 4
rels = parse_relationships("3|5|-1\n4|6|-1\n")

for cone in (False, True):
    res = greedy_anchors(members, prefixes, rels, k=4, cone=cone)
    print("cone" if cone else "direct")
    for ixp, gain, frac in zip(res.order, res.gains, res.fraction_of_announced):
        print(f"  {ixp}: +{gain} addresses, {frac:.1%} of announced space")

# a single anchor, reported on its own
rep = coverage(members, prefixes, rels, ["LON"], cone=True)
print("LON with cone covers", rep.covered.size, "addresses from ASes", sorted(rep.ases))
