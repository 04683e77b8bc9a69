"""Stability and diversity analytics over a simulated population.

Splits each user's iterations into subsets, scores cluster agreement
(AMI) and match rates, then measures Shannon entropy of the collated
fingerprints and the additive value of combining vectors.
"""

from audiofp import PopulationConfig, VECTOR_ORDER, generate_population
from audiofp.analysis import (
    combined_diversity,
    diversity_report,
    format_table,
    match_score_report,
    stability_report,
    ua_homogeneity,
)
from audiofp.collate import collate_records

records = generate_population(PopulationConfig(num_users=400, num_classes=30, seed=7))

print("average subset agreement (AMI):")
rep = stability_report(records, s_values=(3, 6, 10, 15))
rows = [
    (v.value, *(f"{rep.averages[(v, s)]:.4f}" for s in (3, 6, 10, 15)))
    for v in VECTOR_ORDER
]
print(format_table(["vector", "s=3", "s=6", "s=10", "s=15"], rows))

print("\nfingerprint match scores:")
msr = match_score_report(records, s_values=(15, 10, 3))
rows = [
    (v.value, *(f"{msr.scores[(v, s)]:.4f}" for s in (15, 10, 3)))
    for v in VECTOR_ORDER
]
print(format_table(["vector", "s=15", "s=10", "s=3"], rows))

print("\ndiversity of collated fingerprints:")
label_maps = []
rows = []
for v in VECTOR_ORDER:
    labels = collate_records(records, v).components().labels
    label_maps.append(labels)
    d = diversity_report(labels)
    rows.append((v.value, d.distinct, d.unique, f"{d.entropy_bits:.3f}", f"{d.normalized:.3f}"))
combo = combined_diversity(label_maps)
rows.append(("Combined", combo.distinct, combo.unique,
             f"{combo.entropy_bits:.3f}", f"{combo.normalized:.3f}"))
print(format_table(["vector", "distinct", "unique", "entropy", "normalized"], rows))

ua_by_user = {r.user_id: r.ua for r in records}
hom = ua_homogeneity(collate_records(records, VECTOR_ORDER[1]).components(), ua_by_user)
print(f"\nUA homogeneity (FFT clusters): {hom.spanning_uas} of {hom.multi_user_uas} "
      f"multi-user UA strings span more than one cluster")
