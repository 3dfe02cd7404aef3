"""Finite-n normalized redundancy of the equiprobable-types mixture."""

from common import parser, write_csv

from mslab.universal_codec import normalized_redundancy_general, redundancy_terms_empirical

ap = parser(__doc__)
ap.add_argument("--binary-max-exp", type=int, default=16)
ap.add_argument("--ternary-max-exp", type=int, default=8)
args = ap.parse_args()

rows = []
for A, top in ((2, args.binary_max_exp), (3, args.ternary_max_exp)):
    for e in range(2, top + 1):
        h, hc, rho = redundancy_terms_empirical(A, 2**e)
        rows.append({
            "alphabet": A,
            "n": 2**e,
            "H_types_bits": h,
            "H_cond_bits": hc,
            "normalized_redundancy": rho,
            "limit": normalized_redundancy_general(A),
        })
write_csv(rows, args.out)
