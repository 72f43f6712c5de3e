"""Kempf-Ness strata of a one-node quiver, then the A1 minuscule Nakajima envelope.

Run: python3 demos/kn_and_nakajima.py
"""
from stabenv.envelopes import NakajimaFixed, attracting_rank, nakajima_minuscule_matrix, verify_axioms
from stabenv.kn_strata import kn_stratify
from stabenv.quiver import Block, FramedQuiver, QuiverData

Q = FramedQuiver(("0",), (), (1,), (2,), (-1,))
for st in kn_stratify(Q, (3,)):
    print(st.to_json())

blocks = [Block((1,), (0,), "a1"), Block((1,), (0,), "a2")]
data = QuiverData.from_blocks(("0",), (), blocks, (), "none", (-1,))
nf = NakajimaFixed(data, [(0,), (1,), (2,)])
M = nakajima_minuscule_matrix(nf, (1, -1), "1/3")
print("\nA1 envelope, chamber (1,-1):")
for lab, row in zip(M.labels(), M.entries):
    print(f"  {lab}:", " | ".join(str(x) for x in row))
print("axioms ok:", verify_axioms(M)["ok"])
print("attracting ranks:", {F.label(): attracting_rank(nf, F, (1, -1)) for F in nf.components})
