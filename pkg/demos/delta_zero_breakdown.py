"""Where the theory stops: delta -> 0 divergence and formulation thresholds.

The velocity law u = R_perp |D|^{-delta} theta loses one full derivative of
smoothing as delta -> 0, and the mode-wise lattice sums S(k, R) =
sum_h alpha_{k,h}^2 / (|h|^2 |h-k|^2) stop converging: at delta = 0 each
dyadic annulus contributes a near-constant increment (the signature of a
logarithmic divergence), while for any delta > 0 the increments decay
geometrically.  That is why delta = 0 is accepted by the diagnostics in this
package but rejected by the dynamics.

The second half scans the streamline formulation: for which Sobolev exponents
s does sum_k |k|^{2s} E|B_k|^2 converge?  The scan fits the dyadic-shell
growth rate over an s grid and reports the empirical threshold for both
coefficient normalization variants, next to the nominal reference value
-2 + delta.  The two variants bracket the nominal value without either
matching it — a real discrepancy the report keeps visible.
"""

from msqg import inner_sum, streamline_threshold_scan


def main():
    print("== dyadic increments of S((1,0), R) out to R = 512 ==")
    reports = {d: inner_sum((1, 0), d, 512) for d in (0.0, 0.25, 1.0)}
    radii = reports[0.0].radii
    print(f"{'annulus':>12}" + "".join(f"{f'delta={d:g}':>14}" for d in reports))
    for row in range(len(radii) - 1):
        cells = "".join(f"{reports[d].increments[row]:>14.4e}" for d in reports)
        print(f"{radii[row]:>5}->{radii[row + 1]:<5}" + cells)
    for d, rep in reports.items():
        tail = f", tail bound {rep.tail_bound:.2e}" if d > 0 else ""
        print(f"delta = {d:4g}: verdict {rep.verdict}{tail}")

    print("\n== streamline formulation: convergence threshold in s ==")
    scan = streamline_threshold_scan(1.0, s_grid=[-4, -3, -2, -1, 0], k_max=32)
    print(f"{'s':>4} {'growth (consistent)':>21} {'growth (alternate)':>20}")
    for i, s in enumerate(scan.s_grid):
        print(
            f"{s:>4g} {scan.growth_consistent[i]:>12.3f} ({scan.verdict_consistent[i]:>9s})"
            f" {scan.growth_alternate[i]:>11.3f} ({scan.verdict_alternate[i]:>9s})"
        )
    print(f"empirical threshold, consistent variant: s = {scan.threshold_consistent:.2f}")
    print(f"empirical threshold, alternate variant : s = {scan.threshold_alternate:.2f}")
    print(f"nominal reference threshold            : s = {scan.nominal_threshold:g}")


if __name__ == "__main__":
    main()
