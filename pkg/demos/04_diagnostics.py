"""
How far is a finite sample from the asymptotic regime?
======================================================

The limit theorems rest on conditions that only hold as n grows. The report
evaluates each quantity at the chosen n, k_n and kernel order.
"""

from frontierest import KernelSpec, build_partition, diagnostics_report, lobed_frontier

f = lobed_frontier()

for n, k, m in [(100, 20, 7), (10_000, 200, 7)]:
    report = diagnostics_report(KernelSpec(m), build_partition(k), f, n)
    print(f"\nn = {n}, k_n = {k}, m = {m}")
    print(f"delta_n = {report.values['delta_n']:.4g}, omega_n = {report.values['omega_n']:.4g}")
    print("smoothing error Psi at x = 0, pi/2, pi:", [round(v, 5) for v in report.per_x["psi"]])
    print(report.table())
