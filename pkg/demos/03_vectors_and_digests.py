"""Run all seven fingerprinting vectors for a couple of device profiles.

A stable profile leaves one digest per vector no matter how often it is
fingerprinted; a fickle profile cycles within its finite variant set,
which is what the collation graph later stitches back together.
"""

from audiofp import DeviceProfile, VECTOR_ORDER, run_all

stable = DeviceProfile("demo-stable", perturb_seed=11)
fickle = DeviceProfile("demo-fickle", perturb_seed=12, variant_count=26, fickleness_p=0.2)

for name, profile in (("stable", stable), ("fickle", fickle)):
    results = run_all(profile, k=30)
    print(f"{name} profile ({profile.class_id}):")
    for v in VECTOR_ORDER:
        digests = [r.fingerprint.digest for r in results[v]]
        ms = sum(r.elapsed for r in results[v]) * 1000
        print(f"  {v.value:14s} {len(set(digests)):2d} distinct / 30 iterations  "
              f"first={digests[0][:12]}...  ({ms:.1f} ms total)")
    print()
