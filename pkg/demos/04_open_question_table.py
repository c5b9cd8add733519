# How many 3-secant new lines does an odd-order ellipse or hyperbola have?
# The data suggest a3 is not a function of q and s alone.
import csv
import io
from collections import defaultdict

from hallconics.census import emit_open_question_table

rows = list(csv.DictReader(io.StringIO(emit_open_question_table([3, 5]))))
for r in rows:
    print(r)

by_qs = defaultdict(set)
for r in rows:
    by_qs[(r["q"], r["kind"], r["s"])].add(r["a3"])
print({k: sorted(v) for k, v in by_qs.items() if len(v) > 1})
