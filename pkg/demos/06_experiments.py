"""
Desk-scale experiments: the spectrum in Gamma_d and the gap in Omega_d
======================================================================

Both runners return reports that serialise deterministically and are written
as JSON plus a Markdown table named by a content hash.
"""

import tempfile

from racgdiv import morse_heuristic, run_gamma_spectrum, run_omega_gap, write_report

spec = run_gamma_spectrum([1, 2], 3)
for row in spec.comparisons:
    print(row)
for d, fit in spec.fits.items():
    print(d, fit.model, round(fit.parameter, 3), morse_heuristic(fit))

gap = run_omega_gap(1, 3)
for row in gap.ratios:
    print(row["r"], row["alpha"]["value"], row["h"]["value"], row["ratio_h_over_alpha"])

with tempfile.TemporaryDirectory() as out:
    j, m = write_report(spec, {"d": [1, 2], "r_max": 3}, out, "spectrum")
    print(open(m).read())
