# Hyperbolas as arcs of the projective Hall plane.
from hallconics import Conic, HallPlane, arc_report, field_for_q, hyperbola_xy, secant_spectrum
from hallconics.inherited import hall_infinite_points_of

F = field_for_q(5)
H = HallPlane.of(F)
d = next(x for x in F.nonzero() if not F.is_square(x))

for K, name in ((hyperbola_xy(F, 1), "XY = 1"), (hyperbola_xy(F, F.neg(d)), "XY = -d")):
    rep = arc_report(K.affine_points, H)
    print(f"{name}: arc={rep.is_arc} complete={rep.is_complete} size={rep.size} "
          f"max collinear={rep.max_collinear}")

# %% conjugate infinite points: D is all external or all internal
m = next(x for x in F.elements() if not F.in_subfield(x))
b, c = F.neg(F.add(m, F.conj(m))), F.norm(m)
for e in list(F.nonzero())[:6]:
    K = Conic(F, [1, b, c, 0, 0, F.neg(e)])
    ext, internal, _ = K.classify_derivation_set()
    line = secant_spectrum(K)[F.q + 1]
    extra = ""
    if internal == F.q + 1:
        oval = arc_report(K.affine_points, H, hall_infinite_points_of(K))
        extra = f" oval of size {oval.size}: {oval.is_arc}"
    print(f"e={F.digits(e)}: external={ext} internal={internal} (q+1)-secants={line}{extra}")
