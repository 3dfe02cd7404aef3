"""Average order-statistic variance D_n(0) for the three unit-variance parents."""

from common import parser, write_csv

from mslab.distributions import UNIT_VARIANCE_PARENTS
from mslab.order_stats import zero_rate_curve

ap = parser(__doc__)
ap.add_argument("--n-max", type=int, default=128)
args = ap.parse_args()

rows = []
for p in UNIT_VARIANCE_PARENTS:
    for n, d in zero_rate_curve(p, args.n_max).points:
        rows.append({"parent": p.family.value, "n": n, "D_n0": d, "n_times_D": n * d})
write_csv(rows, args.out)
