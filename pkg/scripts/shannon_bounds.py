"""Lower and upper rate-distortion bounds for sorted Gaussian pairs."""

from common import parser, write_csv

from mslab.rd_bounds import bound_curve

ap = parser(__doc__)
ap.add_argument("--points", type=int, default=1000)
args = ap.parse_args()

slb = bound_curve("slb", args.points)
sub = bound_curve("sub", args.points)
rows = [
    {"D": d, "slb_bits": rl, "sub_bits": ru, "gap_bits": ru - rl}
    for (rl, d), (ru, _) in zip(slb.points, sub.points)
]
write_csv(rows, args.out)
