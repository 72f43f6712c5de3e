"""Yang-Baxter and triangle checks on three copies of a one-node framing block.

Run: python3 demos/ybe_and_triangle.py
"""
from stabenv.envelopes import ThreeFactor, check_triangle, check_ybe
from stabenv.quiver import Block, QuiverData
from stabenv.torus_fixed import TorusFixed


def three_blocks(d_in, d_out):
    blocks = [Block((d_in,), (d_out,), f"a{i}") for i in (1, 2, 3)]
    data = QuiverData.from_blocks(("0",), (), blocks, (), "out", (-1,))
    return TorusFixed(data, [(k,) for k in range(4)])


for d in ((1, 1), (1, 2)):
    tfac = ThreeFactor(("0",), (), (d[0],), (d[1],))
    plain = check_ybe(tfac, "1/3", shifted=False)
    shifted = check_ybe(tfac, "1/3", shifted=True)
    print(f"d={d}: plain YBE {plain['verdict']}, shifted YBE {shifted['verdict']}")
    if shifted["verdict"] != "equal":
        w = shifted["witness"]
        print(f"   witness: row {w['row']}, column {w['column']}")

# symmetric framing: every face agrees; asymmetric framing breaks on {a1 = a2 > a3}
for d in ((1, 1), (1, 2)):
    tf = three_blocks(*d)
    for face in ((1, 0, 0), (1, 1, 0)):
        res = check_triangle(tf, (3, 2, 1), face, "1/3", "K")
        print(f"d={d} face {face}: triangle {res['verdict']}")
