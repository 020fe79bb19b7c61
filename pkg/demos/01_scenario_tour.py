"""Tour of the scenario model: presets, structure, validation, serialization.

Run: python3 demos/01_scenario_tour.py
"""
from vcauction import (
    GenConfig,
    JobTypeSpec,
    PRESET_NAMES,
    generate,
    preset,
    scenario_dumps,
    scenario_loads,
    validate_scenario,
)


def describe(s, name):
    print(f"--- {name} (seed {s.seed}) ---")
    print(f"jobs: {len(s.jobs)}, buyers: {len(s.buyers)}, "
          f"providers: {len(s.sps)}, sellers: {len(s.sellers)}")
    for job in s.jobs:
        times = ", ".join(f"{t:.2f}" for t in job.tolerable_times)
        print(f"  job {job.owner_index}: alpha {job.alpha:.2f}, "
              f"{len(job.tolerable_times)} components (t = {times}), "
              f"{len(job.edges)} edges")
    sample = s.sellers[:4]
    for sel in sample:
        print(f"  seller {sel.id.label()}: capability {sel.capability:.2f}, "
              f"bid {sel.bid:.3f} (true value {sel.true_value:.3f})")
    print(f"  coverage of buyer {s.buyers[0].label()}: "
          f"providers {sorted(s.coverage[0])}")
    print(f"  cross-provider contact floor epsilon = {s.epsilon:.2f}")
    flags = validate_scenario(s)
    print(f"  validation: {'clean' if not flags else flags}")


print(f"available presets: {', '.join(PRESET_NAMES)}\n")
for name in ("small", "large"):
    describe(generate(preset(name), seed=7), name)
    print()

# Scenarios serialize to JSON and round-trip exactly.
s = generate(preset("small"), seed=7)
blob = scenario_dumps(s)
assert scenario_dumps(scenario_loads(blob)) == blob
print(f"JSON round-trip: stable, {len(blob)} bytes")

# Custom job topologies plug into the generator alongside the built-in types.
ring = JobTypeSpec(9, 4, ((0, 1), (1, 2), (2, 3), (3, 0)))
cfg = GenConfig(job_types=(9,), sp_count=2, vms_per_sp=(2, 2), custom_types=(ring,))
custom = generate(cfg, seed=1)
print(f"custom 4-component ring type: {len(custom.buyers)} buyers, "
      f"{sum(len(j.edges) for j in custom.jobs)} edges, "
      f"validation {'clean' if not validate_scenario(custom) else 'FLAGGED'}")
