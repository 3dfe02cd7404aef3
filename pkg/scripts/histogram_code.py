"""Decode a run-length histogram stream and show the multiset it carries."""

from common import parser, write_csv

from mslab.universal_codec import histogram_decode, histogram_encode

ap = parser(__doc__)
ap.add_argument("--bits", default="01001100000111010001")
args = ap.parse_args()

counts = histogram_decode(args.bits)
assert histogram_encode(counts).to_str() == args.bits
write_csv([{"bin": i + 1, "count": k} for i, k in enumerate(counts)], args.out)
