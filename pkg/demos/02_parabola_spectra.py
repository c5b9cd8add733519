# Secant spectra of parabolas: odd q versus even q.
from math import comb

from hallconics import field_for_q, parabola, secant_spectrum
from hallconics.inherited import per_point_line_distribution

for q in (3, 5, 7):
    F = field_for_q(q)
    u = next(x for x in F.elements() if not F.in_subfield(x))
    K = parabola(F, u, 0)
    s = secant_spectrum(K)
    print(f"q={q}: a = {s.as_list()}  a3={s[3]} a4={s[4]}  a3+4a4={s[3] + 4 * s[4]} vs C(q+1,3)={comb(q + 1, 3)}")

# %% even q: infinite point and nucleus both off D
F = field_for_q(8)
u = next(x for x in F.elements() if not F.in_subfield(x))
for v, label in ((F.conj(u), "conjugate"), (next(x for x in F.elements()
                 if not F.in_subfield(x) and x not in (u, F.conj(u))), "not conjugate")):
    K = parabola(F, u, v)
    s = secant_spectrum(K)
    print(label, {i: n for i, n in enumerate(s.a) if n})

# every point of the conjugate parabola sees the same picture
K = parabola(F, u, F.conj(u))
print(per_point_line_distribution(K, K.affine_points[0]))
