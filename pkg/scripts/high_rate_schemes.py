"""Per-letter rate reductions of the high-rate schemes: closed form and simulation."""

from common import parser, write_csv

from mslab.distributions import ContinuousParent, SeedSpec
from mslab.quantizer import high_rate_validate, scheme_ledger

ap = parser(__doc__)
ap.add_argument("--K", type=int, nargs="+", default=[2, 3, 4])
ap.add_argument("--step-exp", type=int, default=6, help="quantizer step is 2^-step_exp")
ap.add_argument("--letters", type=int, default=10**7)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

rows = []
for K in args.K:
    hr = high_rate_validate(
        ContinuousParent.gaussian(), K, 2.0**-args.step_exp, n_letters=args.letters, seed=SeedSpec(args.seed)
    )
    for row in scheme_ledger(K).rows:
        measured = hr.rate[1] - hr.rate[row.scheme] if row.scheme in hr.rate else float("nan")
        rows.append({
            "K": K,
            "scheme": row.scheme,
            "name": row.name,
            "reduction_formula": row.rate_reduction_bits,
            "reduction_measured": measured,
            "distortion_factor": row.distortion_factor,
        })
write_csv(rows, args.out)
