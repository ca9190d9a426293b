import itertools
import json
from fractions import Fraction

import pytest

from orbidisk import fans, linalg
from orbidisk.errors import ValidationError
from orbidisk.fan import (box_elements, calabi_yau_covector, fan_from_dict,
                          kernel_data, parse_stacky_fan,
                          validate_compactification, verify_calabi_yau,
                          verify_semi_fano)

F = Fraction


def load(name):
    return fans.load(name)


# ---------------------------------------------------------------------------
# parsing and validation


def test_parse_c3():
    fan = load("c3")
    assert fan.m == fan.m_prime == 3
    assert fan.rank == 3


def test_parse_kp2():
    fan = load("kp2")
    assert fan.m == fan.m_prime == 4


def test_parse_c3z3():
    fan = load("c3z3")
    assert fan.m == 3 and fan.m_prime == 4
    # membership of the extra vector solved exactly
    from orbidisk.fan import minimal_cone
    support, coeffs = minimal_cone(fan, (0, 0, 1))
    assert support == (0, 1, 2)
    assert list(coeffs) == [F(1, 3)] * 3


def test_reject_non_primitive_ray():
    doc = {"rank": 2, "rays": [[2, 0], [0, 1]], "cones": [[0, 1]]}
    with pytest.raises(ValidationError):
        fan_from_dict(doc)


def test_reject_duplicate_ray():
    doc = {"rank": 2, "rays": [[1, 0], [1, 0]], "cones": [[0, 1]]}
    with pytest.raises(ValidationError):
        fan_from_dict(doc)


def test_reject_non_simplicial_cone():
    doc = {"rank": 2, "rays": [[1, 0], [-1, 0]], "cones": [[0, 1]]}
    with pytest.raises(ValidationError):
        fan_from_dict(doc)


def test_reject_extra_outside_support():
    doc = {"rank": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 1]],
           "extra_vectors": [[-1, -1]]}
    with pytest.raises(ValidationError):
        fan_from_dict(doc)


def test_reject_sublattice():
    # rays span an index-2 sublattice of Z^2
    doc = {"rank": 2, "rays": [[1, 1], [1, -1]], "cones": [[0], [1]]}
    with pytest.raises(ValidationError):
        fan_from_dict(doc)


def test_reject_overlapping_cones():
    # two 2-dimensional cones sharing the facet (1,0) on the same side
    doc = {"rank": 2, "rays": [[1, 0], [0, 1], [1, 2]],
           "cones": [[0, 1], [0, 2]]}
    with pytest.raises(ValidationError):
        fan_from_dict(doc)


def test_parse_malformed_json():
    with pytest.raises(ValidationError):
        parse_stacky_fan("{not json")


# ---------------------------------------------------------------------------
# kernel data


def test_kernel_c3():
    data = kernel_data(load("c3"))
    assert data.r == 0
    assert data.gamma == []


def test_kernel_kp2():
    data = kernel_data(load("kp2"))
    assert data.gamma == [[-3, 1, 1, 1]]
    assert data.r_prime == 1


def test_kernel_conifold():
    data = kernel_data(load("conifold"))
    assert data.gamma == [[1, -1, -1, 1]]


def test_kernel_c3z3():
    data = kernel_data(load("c3z3"))
    # oriented so the effective generator has a nonnegative coordinate
    assert data.gamma == [[-1, -1, -1, 3]]
    assert data.r_prime == 0


def test_kernel_relation_property():
    for name in ("c3", "conifold", "kp2", "c3z3"):
        fan = load(name)
        data = kernel_data(fan)
        for g in data.gamma:
            for k in range(fan.rank):
                assert sum(g[i] * fan.column(i)[k]
                           for i in range(fan.m_prime)) == 0
        # saturation: the chosen vectors span the full SNF kernel
        cols = fan.columns()
        a = [[cols[j][i] for j in range(len(cols))] for i in range(fan.rank)]
        snf_kernel = linalg.integer_kernel_basis(a)
        assert len(snf_kernel) == len(data.gamma)


def test_user_basis_good():
    # supply the dual description of the kernel basis as explicit rows
    data = kernel_data(load("kp2"), basis_p=[[0, 1, 0, 0]])
    assert data.gamma == [[-3, 1, 1, 1]]
    assert data.basis_origin == "user"


def test_user_basis_not_unimodular():
    with pytest.raises(ValidationError):
        kernel_data(load("kp2"), basis_p=[[0, 2, 0, 0]])


# ---------------------------------------------------------------------------
# box elements


def test_box_c3_empty():
    boxes, age1 = box_elements(load("c3"))
    assert boxes == [] and age1 == []


def test_box_conifold_empty():
    boxes, _ = box_elements(load("conifold"))
    assert boxes == []


def test_box_c3z3():
    boxes, age1 = box_elements(load("c3z3"), cy_mode=True)
    assert [(b.vector, b.age) for b in boxes] == [
        ((0, 0, 1), F(1)), ((0, 0, 2), F(2))]
    assert boxes[0].coefficients == (F(1, 3), F(1, 3), F(1, 3))
    assert boxes[1].coefficients == (F(2, 3), F(2, 3), F(2, 3))
    assert [b.vector for b in age1] == [(0, 0, 1)]


def test_box_cy_mode_mismatch():
    doc = json.loads(fans.read("c3z3"))
    doc["extra_vectors"] = [[0, 0, 2]]  # age-2 box declared as extra
    fan = fan_from_dict(doc)
    with pytest.raises(ValidationError):
        box_elements(fan, cy_mode=True)


def brute_force_boxes(fan):
    """Scan integer points of the coefficient cube per cone (test oracle)."""
    out = {}
    for cone in fan.cones:
        rays = [fan.rays[i] for i in cone]
        n = fan.rank
        lo = [sum(min(0, r[k]) for r in rays) for k in range(n)]
        hi = [sum(max(0, r[k]) for r in rays) for k in range(n)]
        for pt in itertools.product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
            a = [[rays[j][i] for j in range(len(rays))] for i in range(n)]
            x = linalg.solve_rational(a, list(pt))
            if x is None:
                continue
            if all(0 <= c < 1 for c in x) and any(c > 0 for c in x):
                out[pt] = sum(x, F(0))
    return out


@pytest.mark.parametrize("name", ["c3", "conifold", "kp2", "c3z3",
                                  "kp2_bar", "c3z3_bar"])
def test_box_brute_force_equivalence(name):
    fan = load(name)
    boxes, _ = box_elements(fan)
    got = {b.vector: b.age for b in boxes}
    want = brute_force_boxes(fan)
    assert got == want


def test_box_soundness():
    fan = load("c3z3")
    boxes, _ = box_elements(fan)
    for b in boxes:
        for k in range(fan.rank):
            s = sum(F(fan.rays[i][k]) * c
                    for i, c in zip(b.cone, b.coefficients))
            assert s == b.vector[k]
        assert sum(b.coefficients, F(0)) == b.age
        assert all(0 <= c < 1 for c in b.coefficients)


# ---------------------------------------------------------------------------
# Calabi-Yau covector and semi-Fano certificate


def test_cy_c3():
    assert verify_calabi_yau(load("c3")) == [1, 1, 1]


def test_cy_kp2():
    assert verify_calabi_yau(load("kp2")) == [0, 0, 1]


def test_cy_infeasible():
    doc = {"rank": 2, "rays": [[1, 0], [-1, 0], [0, 1]],
           "cones": [[0, 2], [1, 2]]}
    fan = fan_from_dict(doc)
    assert calabi_yau_covector(fan) is None
    with pytest.raises(ValidationError):
        verify_calabi_yau(fan)


def test_semi_fano_c3():
    data = kernel_data(load("c3"))
    assert verify_semi_fano(data) == {(0, 1, 2): []}


def test_semi_fano_kp2():
    data = kernel_data(load("kp2"))
    w = verify_semi_fano(data)
    # divisor-class sum is zero, so every anticone certifies with zeros
    assert all(lam == [F(0)] for lam in w.values())
    assert len(w) == 3


def test_semi_fano_weighted_chart():
    # all heights 1 so the CY covector exists; the feasibility solver decides
    doc = {"rank": 3,
           "rays": [[0, 0, 1], [1, 0, 1], [0, 1, 1], [-1, -2, 1]],
           "cones": [[0, 1, 2], [0, 2, 3], [0, 1, 3]]}
    fan = fan_from_dict(doc)
    assert calabi_yau_covector(fan) == [0, 0, 1]
    data = kernel_data(fan, cy_mode=False)
    assert data.gamma == [[-4, 1, 2, 1]]
    w = verify_semi_fano(data)
    assert len(w) == 3


# ---------------------------------------------------------------------------
# dual classes


def test_dual_class_c3z3():
    data = kernel_data(load("c3z3"))
    v = data.dual_class_pairings(3)
    assert v == [F(-1, 3), F(-1, 3), F(-1, 3), F(1)]


def test_dual_class_extra_on_ray():
    # extra vector equal to a ray: dual pairings 1 at itself, -1 at the ray
    doc = {"rank": 2, "rays": [[1, 0], [0, 1]], "cones": [[0, 1]],
           "extra_vectors": [[1, 0]]}
    fan = fan_from_dict(doc)
    data = kernel_data(fan, cy_mode=False)
    assert data.dual_class_pairings(2) == [F(-1), F(0), F(1)]


def test_dual_class_bad_index():
    data = kernel_data(load("c3z3"))
    with pytest.raises(ValidationError):
        data.dual_class_pairings(1)


# ---------------------------------------------------------------------------
# compactification


def test_compactify_kp2():
    cd = validate_compactification(load("kp2"), load("kp2_bar"), ("ray", 0))
    assert cd.bar.gamma == [[-3, 1, 1, 1, 0], [1, 0, 0, 0, 1]]
    assert cd.beta_bar == [1, 0, 0, 0, 1]
    assert cd.beta_bar[cd.infinity_ray] == 1
    assert cd.complete_certificate["facets_paired"] is True
    assert cd.complete_certificate["covers_ray_negatives"] is True


def test_compactify_c3():
    cd = validate_compactification(load("c3"), load("c3_bar"), ("ray", 2))
    assert cd.bar.gamma == [[0, 0, 1, 1]]
    assert cd.d_infinity == [0, 0, 1, 1]
    # a chart compactified by one opposite ray covers only a half-space
    assert cd.complete_certificate["facets_paired"] is False


def test_compactify_c3z3():
    cd = validate_compactification(load("c3z3"), load("c3z3_bar"), ("box", 3))
    # columns: rays 0,1,2, added ray, extra vector
    assert cd.bar.gamma == [[-1, -1, -1, 0, 3], [0, 0, 0, 1, 1]]
    assert cd.d_infinity == [0, 0, 0, 1, 1]
    assert cd.beta_bar == [F(1, 3), F(1, 3), F(1, 3), F(1), F(0)]
    assert cd.complete_certificate["facets_paired"] is True


def test_compactify_missing_infinity_cone():
    doc = json.loads(fans.read("kp2_bar"))
    doc["cones"] = [c for c in doc["cones"] if 4 not in c]
    bar = fan_from_dict(doc)
    with pytest.raises(ValidationError, match="incomplete"):
        validate_compactification(load("kp2"), bar, ("ray", 0))


def test_compactify_missing_ray():
    with pytest.raises(ValidationError):
        validate_compactification(load("kp2"), load("kp2"), ("ray", 0))


def test_compactify_wrong_disk():
    # the added ray must be opposite the selected disk ray
    with pytest.raises(ValidationError):
        validate_compactification(load("kp2"), load("kp2_bar"), ("ray", 1))


# anticone family membership


def test_anticone_upward_closure():
    data = kernel_data(load("kp2"))
    minimal = [comp for _, comp in data.minimal_anticones()]
    assert sorted(minimal) == [(1,), (2,), (3,)]
    assert data.in_anticone_family((1, 2))
    assert data.in_anticone_family((3,))
    assert not data.in_anticone_family(())


def test_fan_with_listed_faces():
    # explicitly listed faces are tolerated and change nothing
    doc = json.loads(fans.read("kp2"))
    doc["cones"] += [[0, 1], [0], [1, 2]]
    fan = fan_from_dict(doc)
    data = kernel_data(fan)
    assert data.gamma == [[-3, 1, 1, 1]]
    assert len(data.max_cones) == 3
    boxes, _ = box_elements(fan)
    assert boxes == []


def test_fan_face_of_orbifold_cone():
    doc = json.loads(fans.read("c3z3"))
    doc["cones"] += [[0, 1]]
    fan = fan_from_dict(doc)
    boxes, age1 = box_elements(fan, cy_mode=True)
    assert [b.vector for b in boxes] == [(0, 0, 1), (0, 0, 2)]
