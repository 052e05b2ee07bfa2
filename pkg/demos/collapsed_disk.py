"""A surface that is not reciprocal: a square with a disk collapsed to a point.

Curves through the collapsed disk get shorter, so both moduli grow. The
ring modulus around the disk no longer tends to 0 as the inner radius
shrinks, because every ball around the center contains the whole disk.
A quadrilateral whose bottom and top arcs both touch the disk has a curve
of length 0 between them, which makes the first modulus infinite.
"""
import math

from recipmod import build_collapsed_disk, reciprocality_report, ring_modulus, sub_rectangle
from recipmod.surface import build_rectangle, nearest_vertex


def main():
    mesh, frame = build_collapsed_disk(1.5, 32, 0.5)
    rep = reciprocality_report(mesh, frame)
    print(f"3x3 square, disk of radius 0.5 collapsed (n=32): Mod G1 = {rep.mod_gamma1:.4f}, "
          f"Mod G2 = {rep.mod_gamma2:.4f}, product = {rep.product:.4f}")
    print(f"  lower bounds: {rep.lower}")
    print(f"  ring condition: {rep.ring} {tuple(round(v, 4) for v in rep.ring_values)}")

    c = nearest_vertex(mesh, (0, 0))
    sq, _ = build_rectangle(3, 3, 32)
    s = nearest_vertex(sq, (1.5, 1.5))
    print("\n  r      disk ring   plane ring  2pi/log(R/r)   (R = 1)")
    for r in (0.2, 0.1, 0.05, 0.025):
        a = ring_modulus(mesh, c, r, 1.0).value
        b = ring_modulus(sq, s, r, 1.0).value
        print(f"  {r:<6} {a:<11.4f} {b:<11.4f} {2 * math.pi / math.log(1 / r):.4f}")

    sub, sub_frame, _ = sub_rectangle(mesh, -1.5, 1.5, -0.25, 0.25)
    rep = reciprocality_report(sub, sub_frame)
    print(f"\nwindow whose bottom and top arcs touch the disk: Mod G1 = {rep.mod_gamma1}, "
          f"Mod G2 = {rep.mod_gamma2:.4f}, product = {rep.product}")
    print(f"  upper bounds: {rep.upper}")


if __name__ == "__main__":
    main()
