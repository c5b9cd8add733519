# A walk through GF(q^2), the derivation set and the Hall plane.
import numpy as np

from hallconics import HallPlane, get_field
from hallconics.plane import check_affine_plane_axioms

F = get_field(3, 1)  # GF(9) over GF(3)
print(F)
print("subfield GF(3):", [F.digits(c) for c in F.subfield])

t = F.from_digits([0, 1])
print("t^2 =", F.digits(F.mul(t, t)), " conj(t) =", F.digits(F.conj(t)))
print("multiplication table shape:", F.mul_table.shape)

# %% the Hall plane
H = HallPlane.of(F)
print("D =", H.derivation_set)
print("directions (one per new parallel class):", H.directions)

new = list(H.new_lines())
old = list(H.old_lines())
print(len(new), "new lines,", len(old), "old lines")

L = H.line_through((0, 0), (1, 1))
print("line through (0,0),(1,1):", L)
print("its points:", H.points_on(L))

# coset representatives give every point's new line in one lookup
rep = H.coset_rep[0]
print("rep table for the first class:", np.asarray(rep))

# %% axioms, by brute force
print(check_affine_plane_axioms(H))
