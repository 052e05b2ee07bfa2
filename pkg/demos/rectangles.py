"""Moduli of rectangles and of conformally weighted squares.

In the plane the two conjugate families of a rectangle have moduli a/b and
b/a, so their product is 1. Conformal weights change both moduli but keep
the product at 1 in the limit of fine meshes.
"""
from recipmod import FamilySpec, build_rectangle, certify, solve_modulus
from recipmod.zoo import zoo_surface


def main():
    print("rectangle  n   Mod G1      Mod G2      product")
    for width in (1, 2, 3):
        mesh, frame = build_rectangle(width, 1, 32)
        g1, g2 = FamilySpec.gamma1(frame), FamilySpec.gamma2(frame)
        r1, r2 = solve_modulus(mesh, g1), solve_modulus(mesh, g2)
        assert certify(r1, mesh, g1).passed and certify(r2, mesh, g2).passed
        print(f"{width}x1        32  {r1.value:<10.6f}  {r2.value:<10.6f}  {r1.value * r2.value:.6f}")

    print("\nweighted squares: the product approaches 1 as the mesh is refined")
    for name in ("conformal_quadratic", "conformal_wave"):
        for n in (8, 16, 32):
            mesh, frame = zoo_surface(name, n)
            r1 = solve_modulus(mesh, FamilySpec.gamma1(frame))
            r2 = solve_modulus(mesh, FamilySpec.gamma2(frame))
            print(f"{name:<20} n={n:<3} {r1.value:.6f} * {r2.value:.6f} = {r1.value * r2.value:.6f}")


if __name__ == "__main__":
    main()
