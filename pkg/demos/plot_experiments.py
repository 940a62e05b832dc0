"""
Sweeping network size and vulnerability
=======================================

Each experiment runs several seeds per axis value and checks its expected
trend. Three seeds keep this demo quick; the defaults use ten.
"""

from p2pvirus import experiments

for result in (
    experiments.downloads_vs_size(values=(100, 200, 400), seeds=3),
    experiments.vulnerability(seeds=3),
    experiments.reinfection(seeds=5),
):
    print(result.status_line())

# On a complete graph the simulation follows the mean-field model closely.
mf = experiments.populations(experiments.MEAN_FIELD_SCENARIO, seeds=8, tolerance=0.05)
print(mf.status_line())
