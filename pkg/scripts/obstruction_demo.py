"""Metabolizers, slice verdicts, characteristic-vector maxima and kernel candidates on small inputs."""
from fractions import Fraction

from hfd import catalog
from hfd.dinv import d_table
from hfd.obstruct import (
    DInvariantTable,
    Lattice,
    LinkingForm,
    char_vector_max,
    e8,
    enumerate_metabolizers,
    intform_kernel_candidates,
    slice_obstruction,
)

F = Fraction


def main():
    forms = {
        "Z/9, xy/9": LinkingForm((9,), ((F(1, 9),),)),
        "(Z/3)^2, diag(1/3, -1/3)": LinkingForm((3, 3), ((F(1, 3), 0), (0, F(-1, 3)))),
        "(Z/5)^2, diag(1/5, 1/5)": LinkingForm((5, 5), ((F(1, 5), 0), (0, F(1, 5)))),
        "Z/2": LinkingForm((2,), ((F(1, 2),),)),
    }
    for name, f in forms.items():
        mets = enumerate_metabolizers(f)
        print(f"{name}: {list(mets.subgroups) or mets.reason or 'none'}")

    entries = {(t,): ((F(0), F(0)) if t % 3 == 0 else (F(2, 9), F(2, 9))) for t in range(9)}
    z9 = forms["Z/9, xy/9"]
    for label, comp, patch in (("all zero on <3>", 1, None), ("d_bot(3) = -2", 1, (F(-2), F(0))),
                               ("two components", 2, None)):
        e = dict(entries)
        if patch:
            e[(3,)] = patch
        v = slice_obstruction(DInvariantTable(0, (9,), e), z9, comp)
        print(f"slice check, {label}: {v.label} ({v.reason})")

    for r in range(1, 5):
        res = char_vector_max(Lattice(tuple(tuple(-1 if i == j else 0 for j in range(r)) for i in range(r))))
        print(f"diag(-1)^{r}: max(c^2 + r) = {res.value}, certified = {res.certified}")
    res = char_vector_max(e8())
    print(f"E8(-1): max(c^2 + 8) = {res.value}, witness {res.witness}, certified = {res.certified}")

    t = d_table(catalog.build_example_hyp(), 3)
    for c in intform_kernel_candidates(t):
        print(f"kernel candidate {c.subspace}: d = {c.d}, tight = {c.tight}")


if __name__ == "__main__":
    main()
