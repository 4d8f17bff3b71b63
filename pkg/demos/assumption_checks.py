"""
Checking the bandwidth and mixing conditions
============================================

The uniform rate needs the bandwidth to shrink slowly enough that n h^d
still grows, and the mixing coefficients to decay faster than n^-p with
p fixed by the kernel's Lipschitz order and the dimension. A Gaussian
AR(1) chain mixes geometrically, which is encoded as nu = inf.
"""

import json

from censkern import AssumptionParams, BandwidthRule, check_assumptions, mixing_threshold

params = AssumptionParams(d=1, gamma=1.0, mu=0.5)
print("p =", params.p, " mixing exponent must exceed", mixing_threshold(params))

for rule in (BandwidthRule.optimal(1.0), BandwidthRule.fixed(0.3)):
    report = check_assumptions(params, rule)
    print(f"\n{rule.kind} bandwidth: all pass = {report.all_pass}")
    for check in (report.a1, report.a3, report.a7):
        print(f"  {check.name}: {check.passed}")
    print("  A1 details:", json.dumps(report.a1.details))
