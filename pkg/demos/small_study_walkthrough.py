"""
Walkthrough: true-discovery bounds on a five-hypothesis study
=============================================================

A researcher runs five tests, looks at the p-values, and wants to claim
"at least d of the hypotheses I picked are real effects" for whatever
selection they end up liking.  The closed-testing machinery below makes
every such claim simultaneously valid at one error level, so the
selection may be made after seeing the data.
"""

from tdbounds import (
    AnalysisConfig,
    HypothesisSet,
    PValueStudy,
    condition_on_nulls,
    defining_family,
    discovery_bound,
    discovery_bound_table,
    full_closure,
    minimal_transversals,
)

# Two strong signals, one borderline, two plausible nulls.
study = PValueStudy(
    ("gene_a", "gene_b", "gene_c", "gene_d", "gene_e"),
    (0.001, 0.008, 0.03, 0.2, 0.7),
)
config = AnalysisConfig(alpha=0.05)

closure = full_closure(study, config)

# d(S) is a lower bound on the number of false null hypotheses inside S,
# valid for every S at once.
for labels in [("gene_a",), ("gene_a", "gene_b"), ("gene_a", "gene_b", "gene_c"), study.labels]:
    sel = HypothesisSet.of(study.index(l) for l in labels)
    res = discovery_bound(closure, sel)
    print(f"selected {','.join(labels):40s} -> at least {res.d} true discoveries")

# The full table over all 2^m selections, indexed by bitmask.  Growing a
# selection never loses certified discoveries.
table = discovery_bound_table(closure)
assert table[HypothesisSet.of((0, 1)).mask] <= table[HypothesisSet.of((0, 1, 2)).mask]
print(f"\nbound table has {len(table)} entries, max d = {int(table.max())}")

# Everything above is generated by a small family of witness sets: the
# minimal rejected sets.  d(S) equals the smallest number of hypotheses
# one must pick from S to touch every witness set contained in S.
family = defining_family(closure)
print("\nminimal rejected sets:")
for member in family.sets:
    print("  {" + ",".join(study.labels[i] for i in member) + "}")

# Dualizing the family yields the minimal "explanations": each
# transversal is a set of hypotheses that, if all true effects, would
# account for every rejection the procedure made.
duals = minimal_transversals(family)
print("\nminimal explanations (each hits every witness set):")
for member in duals.sets:
    print("  {" + ",".join(study.labels[i] for i in member) + "}")

# Suppose an external replication shows gene_c is a true null.  Drop the
# explanations that relied on it; hypotheses present in every surviving
# explanation are then implicated as true discoveries.
known_null = HypothesisSet.of((study.index("gene_c"),))
surviving, implicated = condition_on_nulls(duals, known_null)
print(f"\nwith gene_c known null: {len(surviving.sets)} explanations survive")
print("implicated as true discoveries: "
      + (",".join(study.labels[i] for i in implicated) or "(none)"))
