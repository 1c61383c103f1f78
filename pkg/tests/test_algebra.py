from math import comb

import numpy as np
import pytest

from lefschetz_lab.algebra import (
    Instance,
    build,
    critical_degree,
    duality_pairing,
    is_regular_sequence,
    koszul_hf,
    mult_map,
    socle_degree,
    symmetry_check,
    symmetry_matrix,
)
from lefschetz_lab.errors import MalformedInputError, PresentationError, UnsupportedError
from lefschetz_lab.inverse import common_zero_scan
from lefschetz_lab.lefschetz import random_linear
from lefschetz_lab.linalg import FieldSpec, Matrix, rank
from lefschetz_lab.poly import Poly, power
from lefschetz_lab.reports import generate
from lefschetz_lab.seeding import stream

from oracles import koszul_series, rank_fraction, squarefree

P = 65521
F = FieldSpec.prime(P)
Q = FieldSpec.rational()


def x(i, n=5, field=F):
    return Poly.variable(field, n, i)


def coords(A, k, rng):
    return np.array(A.field.random_elements(rng, A.hf(k)), dtype=A.field.dtype).reshape(-1, 1)


class TestDegrees:
    def test_socle_and_critical(self):
        assert socle_degree(4, 2) == 5 and critical_degree(4, 2) == 2
        assert socle_degree(3, 3) == 8 and critical_degree(3, 3) == 3
        assert critical_degree(2, 2) == 1

    def test_koszul_examples(self):
        assert [koszul_hf(4, 2, k) for k in range(6)] == [1, 5, 10, 10, 5, 1]
        assert koszul_hf(4, 2, 6) == 0
        for m in range(1, 7):
            assert [koszul_hf(m, 2, k) for k in range(m + 3)] == [comb(m + 1, k) for k in range(m + 3)]

    @pytest.mark.parametrize("m,d", [(1, 2), (2, 3), (3, 3), (4, 2), (2, 5), (5, 3)])
    def test_koszul_against_series(self, m, d):
        M = socle_degree(m, d)
        series = koszul_series(m, d, M + 3)
        assert [koszul_hf(m, d, k) for k in range(M + 4)] == series
        assert all(series[k] == series[M - k] for k in range(M + 1))


class TestBuild:
    def test_monomial_squarefree(self):
        A = build(Instance.monomial(4, 2, F))
        assert A.hilbert_function == (1, 5, 10, 10, 5, 1, 0)
        for k in range(6):
            assert sorted(A.standard_monomials(k)) == sorted(squarefree(5, k))

    def test_random_m2_d2(self):
        A = build(generate(2, 2, F, 1).instance)
        assert A.hilbert_function[:4] == (1, 3, 3, 1)

    def test_random_m2_d3_matches_series(self):
        A = build(generate(2, 3, F, 2).instance)
        assert list(A.hilbert_function) == koszul_series(2, 3, 7)
        assert A.hilbert_function[:7] == (1, 3, 6, 7, 6, 3, 1)

    def test_hf_is_complement_of_ideal(self):
        A = build(generate(3, 2, F, 3).instance)
        for k in range(A.up_to + 1):
            assert A.hf(k) == comb(A.m + k, k) - A.piece(k).ideal.dim

    def test_projector_normal_form(self):
        A = build(Instance.monomial(2, 2, F))
        # x0^2 is in I, x0*x1 is standard
        assert not any(A.element(x(0, 3) * x(0, 3)).coords)
        e = A.element(x(0, 3) * x(1, 3))
        assert A.lift(e) == x(0, 3) * x(1, 3)

    def test_rational_backend(self):
        A = build(generate(2, 2, Q, 4).instance)
        assert A.hilbert_function == (1, 3, 3, 1, 0)


class TestRegularity:
    def test_monomial(self):
        assert is_regular_sequence(Instance.monomial(4, 2, F)).regular

    def test_constructed_common_zero(self):
        inst = Instance.from_texts(4, 2, F, ["x0^2", "x1^2", "x2^2", "x3^2", "x0*x4"])
        verdict = is_regular_sequence(inst)
        assert not verdict.regular and str(verdict) == "not_regular(3)"

    def test_random_quadrics_regular(self):
        for i in range(100):
            inst = Instance.random(4, 2, F, stream(7, "regular", i))
            assert is_regular_sequence(inst).regular

    def test_consistent_with_scan_over_small_field(self):
        # a rational point over F_q is a common zero, so it rules out regularity
        small = FieldSpec.prime(31)
        for i in range(5):
            inst = Instance.random(4, 2, small, stream(8, "scan", i))
            hit = common_zero_scan(inst, 31)
            if hit is not None:
                assert not is_regular_sequence(inst).regular
            else:
                assert is_regular_sequence(inst).regular

    def test_binary_quadrics(self):
        # regular iff the two binary quadrics share no root
        shared = Instance.from_texts(1, 2, Q, ["x0^2 - x1^2", "x0^2 - x0*x1"])
        assert not is_regular_sequence(shared).regular
        coprime = Instance.from_texts(1, 2, Q, ["x0^2 - x1^2", "x0*x1"])
        assert is_regular_sequence(coprime).regular


class TestInstance:
    def test_round_trip(self):
        for field in (F, Q):
            inst = generate(3, 2, field, 5).instance
            text = inst.dumps()
            again = Instance.loads(text)
            assert again == inst and again.dumps() == text and again.digest() == inst.digest()

    def test_fraction_coefficients_round_trip(self):
        inst = Instance.from_texts(1, 2, Q, ["1/2*x0^2 - 3/7*x1^2", "x0*x1"])
        assert Instance.loads(inst.dumps()) == inst
        assert '"1/2"' in inst.dumps()

    def test_dependent_generators(self):
        with pytest.raises(PresentationError):
            Instance.from_texts(1, 2, Q, ["x0^2", "2*x0^2"])

    def test_wrong_shapes(self):
        with pytest.raises(PresentationError):
            Instance.from_texts(2, 2, F, ["x0^2", "x1^2"])
        with pytest.raises(PresentationError):
            Instance.monomial(4, 2, FieldSpec.prime(5))  # p must exceed M = 5
        with pytest.raises(PresentationError):
            Instance.random(4, 2, FieldSpec.prime(5), stream(0, "small"))

    def test_malformed_files(self):
        for text in ["[]", "{", '{"m": 1, "d": 2}', '{"m": 1, "d": 2, "field": {"kind": "prime", "p": 7},'
                     ' "generators": [[{"exps": [2, 0], "coef": 1}], [{"exps": [0, 2], "coef": "1"}]]}']:
            with pytest.raises(MalformedInputError):
                Instance.loads(text)


class TestMultMap:
    def test_monomial_x0_rank(self, mono42):
        assert rank(mult_map(mono42, x(0), 2)) == comb(4, 2)

    def test_unit_is_identity(self, mono42):
        one = Poly.constant(F, 5)
        for k in range(6):
            assert mult_map(mono42, one, k) == Matrix.identity(F, mono42.hf(k))

    def test_random_L_full_rank_both_backends(self):
        inst_q = generate(4, 2, Q, 9).instance
        Aq = build(inst_q)
        L = random_linear(Aq, stream(9, "L"))
        Mq = mult_map(Aq, L, 2)
        assert Mq.shape == (10, 10)
        assert rank_fraction(Mq.tolist()) == 10
        inst_p = Instance.from_dict(inst_q.to_dict() | {"field": {"kind": "prime", "p": P}})
        Ap = build(inst_p)
        Lp = Poly(F, 5, 1, L.terms)
        assert rank(mult_map(Ap, Lp, 2)) == 10

    def test_functorial(self, rand42):
        A = rand42
        for i in range(5):
            rng = stream(10, "func", i)
            f, g = random_linear(A, rng), random_linear(A, rng) * random_linear(A, rng)
            for k in range(0, 3):
                assert mult_map(A, f * g, k) == mult_map(A, f, k + 2) @ mult_map(A, g, k)

    def test_linear_in_f(self, rand42):
        A = rand42
        rng = stream(11, "lin")
        L1, L2 = random_linear(A, rng), random_linear(A, rng)
        a, b = 3, 65000
        for k in range(5):
            lhs = mult_map(A, L1.scale(a) + L2.scale(b), k)
            assert lhs == mult_map(A, L1, k).scale(a) + mult_map(A, L2, k).scale(b)

    def test_injective_propagates_downward(self, rand42):
        A = rand42
        for i in range(5):
            L = random_linear(A, stream(12, "mono", i))
            inj = [rank(mult_map(A, L, k)) == A.hf(k) for k in range(A.M)]
            for k, ok in enumerate(inj):
                if ok:
                    assert all(inj[:k])


class TestDuality:
    def test_k0(self, mono42):
        D = duality_pairing(mono42, 0)
        assert D.shape == (1, 1) and not D.is_zero()

    def test_monomial_complementary(self, mono42):
        D = duality_pairing(mono42, 2)
        assert D.shape == (10, 10)
        assert all(sum(1 for v in row if v) == 1 for row in D.tolist())
        assert rank(D) == 10

    def test_random_m3_rational(self):
        A = build(generate(3, 2, Q, 13).instance)
        D = duality_pairing(A, 1)
        assert D.shape == (4, 4)
        assert rank_fraction(D.tolist()) == 4

    def test_perfect_for_all_k(self, rand42):
        for k in range(rand42.M + 1):
            assert rank(duality_pairing(rand42, k)) == rand42.hf(k)

    def test_adjunction(self, rand42):
        A = rand42
        for i in range(5):
            rng = stream(14, "adj", i)
            f = random_linear(A, rng)
            for k in range(A.M):
                j, other = 1, A.M - k - 1
                u, v = coords(A, k, rng), coords(A, other, rng)
                Du, Dk = duality_pairing(A, k + j).data, duality_pairing(A, k).data
                fu = mult_map(A, f, k).data @ u % P
                fv = mult_map(A, f, other).data @ v % P
                lhs = int((fu.T @ Du % P @ v % P)[0, 0])
                rhs = int((u.T @ Dk % P @ fv % P)[0, 0])
                assert lhs == rhs

    def test_non_regular_unsupported(self):
        inst = Instance.from_texts(4, 2, F, ["x0^2", "x1^2", "x2^2", "x3^2", "x0*x4"])
        with pytest.raises(UnsupportedError):
            duality_pairing(build(inst), 1)


class TestSymmetry:
    @pytest.mark.parametrize("m", [2, 4])
    def test_random_forms(self, m):
        A = build(generate(m, 2, F, 15).instance)
        for i in range(20):
            assert symmetry_check(A, random_linear(A, stream(15, "sym", m, i)))

    def test_zero_form(self, rand42):
        B = symmetry_matrix(rand42, Poly.zero(F, 5, 1))
        assert B.is_zero() and symmetry_check(rand42, Poly.zero(F, 5, 1))

    def test_even_socle_degree_unsupported(self):
        A = build(Instance.monomial(2, 3, F))  # M = 6
        with pytest.raises(UnsupportedError):
            symmetry_check(A, x(0, 3))

    def test_higher_power_symmetric_too(self, rand42):
        # the same bilinear form built from L^3 on A_1 x A_1
        L = random_linear(rand42, stream(16, "L3"))
        B = duality_pairing(rand42, 1) @ mult_map(rand42, power(L, 3), 1)
        assert B == B.T
