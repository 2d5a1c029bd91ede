# Recomputing the published comparison tables
#
# The tables list other authors' best points. Recomputing objective and
# constraints at those points shows which rows hold up.

from porcellio.benchmarks import KNOWN_MISMATCHES, audit_table

for name in ("pressure_vessel", "himmelblau"):
    print(f"\n{name}")
    for v in audit_table(name):
        status = "ok"
        if not v.f_ok:
            status = f"f off by {v.f_error:+.4f}"
        elif not v.flags_match:
            status = (f"violations recomputed {sorted(j + 1 for j in v.recomputed_violations)}"
                      f" vs marked {sorted(j + 1 for j in v.flagged_violations)}")
        if (name, v.source) in KNOWN_MISMATCHES:
            status += "  [known]"
        print(f"  {v.source:>6}  f={v.recomputed_f:12.4f}  {status}")
