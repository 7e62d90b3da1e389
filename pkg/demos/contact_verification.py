"""
Edge and vertex contacts
========================

For two touching triangles the smoothness conditions and the agreement of
shared translate coefficients describe the same linear space.  Here we
check that for every contact class and small n.
"""

from boxspline.contact import ContactConfig, build_contact_matrices, contact_classes, sweep, sweep_summary

for name, t, u in contact_classes():
    cfg = ContactConfig.between((2, 2, 1), t, u)
    mats = build_contact_matrices(cfg)
    print(f"{name:9s} {cfg.label():12s} shared p={mats.p:2d} own q={mats.q:2d} "
          f"conditions={mats.A_i.nrows}")

results = sweep((2, 2, 2), "all", jobs=1)
summary = sweep_summary(results)
print(f"{summary['passed']} of {summary['cases']} cases agree")
