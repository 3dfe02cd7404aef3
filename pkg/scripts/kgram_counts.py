"""Distinct binary k-gram multisets against the (n+1)^(2^k) bound."""

from common import parser, write_csv

from mslab.markov_empirical import kgram_count_table

ap = parser(__doc__)
ap.add_argument("--n-max", type=int, default=16)
ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
args = ap.parse_args()

rows = [
    {"n": r.n, "k": r.k, "distinct": r.distinct, "log2_distinct": r.log2_distinct, "log2_bound": r.log2_bound}
    for r in kgram_count_table(args.n_max, args.k)
]
write_csv(rows, args.out)
