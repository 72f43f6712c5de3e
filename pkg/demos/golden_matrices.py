"""Walk the Hall envelope matrix of the two-block Grassmannian example across slopes.

Run: python3 demos/golden_matrices.py
"""
from fractions import Fraction

from stabenv.envelopes import GenericityError, envelope_matrix, verify_axioms
from stabenv.quiver import Block, QuiverData
from stabenv.torus_fixed import TorusFixed

blocks = [Block((1,), (2,), "a1"), Block((1,), (2,), "a2")]
data = QuiverData.from_blocks(("0",), (), blocks, (), "out", (-1,))
tf = TorusFixed(data, [(0,), (1,), (2,)])
print("fixed components:", [F.label() for F in tf.components])

# the off-diagonal entry jumps by a2/a1 each time s crosses a half-integer
for s in ("1/3", "4/3", "7/3", "-2/3"):
    M = envelope_matrix(tf, (1, -1), s, "K")
    print(f"\nslope {s}")
    for lab, row in zip(M.labels(), M.entries):
        print(f"  {lab}:", " | ".join(str(x) for x in row))
    print("  axioms ok:", verify_axioms(M)["ok"])

# a wall: s + e/2 lands on a half-integer
try:
    envelope_matrix(tf, (1, -1), Fraction(1, 2), "K")
except GenericityError as exc:
    print("\nslope 1/2 is a wall:", exc)

# cohomology limit
M = envelope_matrix(tf, (1, -1), 0, "coh")
print("\ncohomology:")
for lab, row in zip(M.labels(), M.entries):
    print(f"  {lab}:", " | ".join(str(x) for x in row))
