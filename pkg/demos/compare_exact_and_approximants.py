"""Print exterior and interior error tables and the pole matching summary."""

from __future__ import annotations

import cmath
import math

from rational_painleve.compare import exterior_error, interior_error, match_poles, tangent_check


def main() -> None:
    for report in exterior_error([3, 5, 10], [-3, 2.5]):
        print(report.table())
    for report in interior_error([4, 6, 8, 10], [0.3, 0.5 * cmath.exp(1j * math.pi / 6)]):
        print(report.table())
    for m in (6, 9):
        match = match_poles(m)
        print(f"m={m}: {match.exact_count} exact poles, {match.lattice_count} lattice poles, "
              f"max mismatch {match.max_mismatch:.2e} (bound {match.tolerance:.2e})")
    print(f"tangent check at m=8: {tangent_check(0.3, 0.5 + 0.3j, 0.4 - 0.2j):.4f}")


if __name__ == "__main__":
    main()
