import pytest

from lefschetz_lab import lefschetz
from lefschetz_lab.algebra import Instance, build, koszul_hf, mult_map
from lefschetz_lab.errors import DegreeError, MalformedInputError, UnsupportedError
from lefschetz_lab.inverse import vertex_space
from lefschetz_lab.lefschetz import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    Q_of_z,
    Z_of_Q,
    vanishing_span_check,
    generic_rank,
    injectivity_lemma_check,
    kernel_pairs,
    pair_span_check,
    cokernel_duality_check,
    vertex_bound_check,
    kernel_inclusion_check,
    locus_scan,
    pair_product_probe,
    random_linear,
    slp_check,
    wlp_check,
)
from lefschetz_lab.linalg import FieldSpec, Subspace, rank
from lefschetz_lab.poly import Poly, monomial_basis, power
from lefschetz_lab.reports import generate
from lefschetz_lab.seeding import stream

from oracles import rank_fraction, rank_mod_p

P = 65521
F = FieldSpec.prime(P)
Q = FieldSpec.rational()
F101 = FieldSpec.prime(101)


def x(i, n=5, field=F):
    return Poly.variable(field, n, i)


def total(n, field=F):
    return Poly.linear(field, [1] * n)


def random_quadric(A, rng):
    monos = monomial_basis(A.nvars, 2)
    return Poly(A.field, A.nvars, 2, dict(zip(monos, A.field.random_elements(rng, len(monos)))))


class TestWLP:
    def test_monomial_sum_of_variables(self, mono42):
        L = total(5)
        for k in range(5):
            M = mult_map(mono42, L, k)
            assert rank_mod_p(M.tolist(), P) == min(mono42.hf(k), mono42.hf(k + 1))
        assert wlp_check(mono42, seed=1).verdict == PASS

    def test_random_m4_d2(self, rand42):
        rep = wlp_check(rand42, seed=2)
        assert rep.verdict == PASS
        rec = rep.record(2)
        assert (rec.source_dim, rec.target_dim, rec.best_rank) == (10, 10, 10)

    def test_random_m2_d2_injective_at_1(self):
        A = build(generate(2, 2, F, 40).instance)
        rep = wlp_check(A, seed=3)
        assert rep.verdict == PASS and rep.record(1).best_rank == A.hf(1) == 3

    @pytest.mark.parametrize("m,d", [(2, 3), (3, 3)])
    def test_monomial_cubics(self, m, d):
        assert wlp_check(build(Instance.monomial(m, d, F)), seed=4).verdict == PASS

    def test_all_regular_quadric_cases(self):
        for m in (1, 2, 3, 4):
            for seed in range(3):
                A = build(generate(m, 2, F, 100 + seed).instance)
                assert wlp_check(A, seed=seed).verdict == PASS

    def test_rational_backend_rank_against_oracle(self):
        A = build(generate(4, 2, Q, 41).instance)
        rep = wlp_check(A, trials=2, seed=5)
        assert rep.verdict == PASS
        L = random_linear(A, stream(5, "wlp", 0))
        assert rank_fraction(mult_map(A, L, 2).tolist()) == rep.record(2).first_rank == 10

    def test_best_never_exceeds_target(self, rand42):
        for rec in wlp_check(rand42, trials=3, seed=6).records:
            assert rec.best_rank <= rec.target_rank and rec.trials_used <= 3
            assert (rec.verdict == PASS) == (rec.best_rank == rec.target_rank)

    def test_monotone_injectivity(self, rand42):
        # injective at k forces injective below k, per sampled L
        for i in range(10):
            L = random_linear(rand42, stream(42, "mono", i))
            inj = [rank(mult_map(rand42, L, k)) == rand42.hf(k) for k in range(rand42.M)]
            for k in range(rand42.M):
                if inj[k]:
                    assert all(inj[:k])

    def test_reproducible(self, rand42):
        assert wlp_check(rand42, seed=7) == wlp_check(rand42, seed=7)

    def test_bad_trials(self, rand42):
        with pytest.raises(MalformedInputError):
            wlp_check(rand42, trials=0)

    def test_non_regular(self):
        A = build(Instance.from_texts(4, 2, F, ["x0^2", "x1^2", "x2^2", "x3^2", "x0*x4"]))
        with pytest.raises(UnsupportedError):
            wlp_check(A)


class TestVerdictSemantics:
    def test_sampled_miss_over_rationals_is_inconclusive(self, monkeypatch):
        # force the special form x0, whose map A_1 -> A_2 has rank 2 < 3
        A = build(Instance.monomial(2, 2, Q))
        monkeypatch.setattr(lefschetz, "random_linear", lambda A, rng: x(0, 3, Q))
        rep = wlp_check(A, trials=2, seed=0)
        rec = rep.record(1)
        assert rec.best_rank == 2 and rec.target_rank == 3
        assert rec.verdict == INCONCLUSIVE and rep.verdict == INCONCLUSIVE
        assert any("symbolic rank 3 of 3" in note for note in rep.notes)

    def test_symbolic_deficit_is_failure(self, monkeypatch):
        A = build(Instance.monomial(2, 2, Q))
        monkeypatch.setattr(lefschetz, "random_linear", lambda A, rng: x(0, 3, Q))
        monkeypatch.setattr(lefschetz, "generic_rank", lambda A, k, j=1: 2)
        assert wlp_check(A, trials=1).verdict == FAIL

    def test_prime_miss_is_inconclusive(self, monkeypatch):
        A = build(Instance.monomial(2, 2, F))
        monkeypatch.setattr(lefschetz, "random_linear", lambda A, rng: x(0, 3))
        assert wlp_check(A, trials=1).verdict == INCONCLUSIVE

    def test_generic_rank(self):
        A = build(Instance.monomial(2, 2, Q))
        assert [generic_rank(A, k) for k in range(3)] == [1, 3, 1]
        B = build(generate(2, 3, Q, 43).instance)
        assert generic_rank(B, 2) == 6 and generic_rank(B, 1, 2) == 3
        with pytest.raises(UnsupportedError):
            generic_rank(build(Instance.monomial(2, 2, F)), 1)


class TestSLP:
    def test_j1_matches_wlp(self, rand42):
        slp, wlp = slp_check(rand42, seed=8), wlp_check(rand42, seed=8)
        for rec in wlp.records:
            other = slp.record(rec.k, 1)
            assert (other.target_rank, other.verdict) == (rec.target_rank, rec.verdict)

    def test_monomial_top_power(self, mono42):
        M = mult_map(mono42, power(total(5), 5), 0)
        assert rank_mod_p(M.tolist(), P) == 1
        assert slp_check(mono42, seed=9).record(0, 5).best_rank == 1

    def test_monomial_m2_brute_force(self):
        A = build(Instance.monomial(2, 2, F))
        L = total(3)
        for j in range(1, 4):
            for k in range(0, 4 - j):
                M = mult_map(A, power(L, j), k)
                assert rank_mod_p(M.tolist(), P) == min(A.hf(k), A.hf(k + j))
        rep = slp_check(A, seed=10)
        assert rep.verdict == PASS and len(rep.records) == 6

    def test_pairs_cover_range(self, rand42):
        rep = slp_check(rand42, trials=2, seed=11)
        assert {(r.k, r.j) for r in rep.records} == {(k, j) for j in range(1, 6) for k in range(6 - j)}


class TestInjectivity:
    def test_m4_d2(self, rand42):
        rec = injectivity_lemma_check(rand42, seed=12)
        assert rec.k == 1 and rec.best_rank == 5 and rec.verdict == PASS

    def test_m3_d3(self):
        A = build(generate(3, 3, F, 44).instance)
        assert [koszul_hf(3, 3, k) for k in range(9)] == [1, 4, 10, 16, 19, 16, 10, 4, 1]
        rec = injectivity_lemma_check(A, seed=13)
        assert rec.k == 2 and rec.best_rank == 10 and rec.verdict == PASS

    def test_zero_form_excluded(self, rand42):
        for i in range(100):
            assert any(random_linear(rand42, stream(45, i)).terms.values())
        with pytest.raises(MalformedInputError):
            Q_of_z(rand42, Poly.zero(F, 5, 1))

    def test_all_small_cases(self):
        for m in (2, 3, 4):
            for d in (2, 3):
                if m == 4 and d == 3:
                    continue
                A = build(generate(m, d, F, 46).instance)
                assert injectivity_lemma_check(A, seed=14).verdict == PASS

    def test_binary_forms_cannot_be_injective(self):
        # m = 1: dim A_{d-1} = d exceeds dim A_d = d - 1
        for d in (2, 3):
            A = build(generate(1, d, F, 47).instance)
            assert A.hf(d - 1) == d and A.hf(d) == d - 1
            with pytest.raises(DegreeError):
                injectivity_lemma_check(A)


class TestKernels:
    def test_Q_of_z_random(self, rand42):
        for i in range(5):
            assert Q_of_z(rand42, random_linear(rand42, stream(47, i))).dim == 0

    def test_Q_of_z_monomial(self, mono42):
        K = Q_of_z(mono42, x(0))
        expected = [mono42.element(x(0) * x(i)).coords for i in range(1, 5)]
        assert K == Subspace.span(F, 10, expected)
        assert Q_of_z(mono42, x(0) + x(1)).contains(mono42.element(x(0) * x(1)).coords)

    def test_Z_of_Q(self, mono42, rand42):
        assert Z_of_Q(mono42, x(0) * x(1)) == Subspace.span(F, 5, [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0]])
        for i in range(5):
            assert Z_of_Q(rand42, random_quadric(rand42, stream(48, i))).dim == 0

    def test_Z_of_Q_matches_vertex_space(self):
        for seed in range(3):
            A = build(generate(4, 2, F101, 49 + seed).instance)
            scan = locus_scan(A, samples=3, seed=seed)
            for pair in scan.pairs:
                Q = A.lift(pair.Q)
                assert Z_of_Q(A, Q) == vertex_space(A, Q).space
            for i in range(5):
                q = random_quadric(A, stream(49, seed, i))
                assert Z_of_Q(A, q) == vertex_space(A, q).space

    def test_kernel_pairs_vanish(self, mono42):
        pairs = kernel_pairs(mono42, x(0))
        assert len(pairs) == 4
        for pr in pairs:
            assert mono42.multiply(pr.z, pr.Q).is_zero()
            assert pr.dimQz == 4 and pr.dimZQ == 2 and pr.epsilon == 3 and pr.delta == 1


class TestLocusScan:
    def test_monomial_whole_line(self):
        # (a x0 + b x1) x0 x1 lies in I for every a, b
        A = build(Instance.monomial(4, 2, F101))
        x0, x1 = x(0, field=F101), x(1, field=F101)
        for t in range(101):
            assert Q_of_z(A, x0 + x1.scale(t)).dim >= 1
        assert Q_of_z(A, x1).dim >= 1

    def test_random_line_bound(self):
        for seed in range(3):
            A = build(generate(4, 2, F101, 50 + seed).instance)
            scan = locus_scan(A, mode="line", samples=4, seed=seed)
            assert scan.square and scan.bound == 10 and scan.bound_respected()
            assert all(x.points == 102 and len(x.hits) <= 10 for x in scan.lines)
            for pr in scan.pairs:
                assert pr.dimQz >= 1 and pr.dimZQ >= 1

    def test_hits_are_kernel_points(self):
        A = build(generate(4, 2, F101, 53).instance)
        scan = locus_scan(A, samples=4, seed=1)
        for line in scan.lines:
            for h in line.hits:
                assert Q_of_z(A, Poly.linear(F101, h)).dim >= 1

    def test_plane_injectivity_mode_empty(self):
        for seed in range(2):
            A = build(generate(4, 2, F101, 54 + seed).instance)
            scan = locus_scan(A, mode="plane", samples=1, seed=seed, degree=1)
            assert scan.lines[0].points == 101 * 101 + 101 + 1
            assert scan.total_hits == 0 and scan.pairs == ()

    def test_sampled_plane(self, rand42):
        scan = locus_scan(rand42, mode="plane", samples=1, degree=1, lines_per_plane=2)
        assert scan.lines[0].points == 2 * (P + 1) and scan.total_hits == 0

    def test_deterministic(self):
        A = build(generate(4, 2, F101, 56).instance)
        assert locus_scan(A, samples=2, seed=3) == locus_scan(A, samples=2, seed=3)

    def test_errors(self, rand42):
        with pytest.raises(UnsupportedError):
            locus_scan(build(Instance.monomial(4, 2, Q)))
        with pytest.raises(MalformedInputError):
            locus_scan(rand42, mode="cube")
        with pytest.raises(DegreeError):
            locus_scan(rand42, degree=5)


def harvest(seeds, field=F101, samples=6):
    pairs = []
    for seed in seeds:
        A = build(generate(4, 2, field, seed).instance)
        pairs.append((A, locus_scan(A, samples=samples, seed=seed).pairs))
    return pairs


class TestStructuralChecks:
    def test_cokernel_monomial(self, mono42):
        chk = cokernel_duality_check(mono42, x(0) * x(1))
        assert rank(mult_map(mono42, x(0) * x(1), 2)) == 3
        assert (chk.coker, chk.kernel, chk.holds) == (2, 2, True)
        assert Z_of_Q(mono42, x(0) * x(1)).dim == 2

    def test_cokernel_random_and_general_degrees(self):
        for m, d in [(4, 2), (3, 2), (2, 3), (3, 3)]:
            A = build(generate(m, d, F, 57).instance)
            for i in range(3):
                rng = stream(57, m, d, i)
                q = random_linear(A, rng) * random_linear(A, rng)
                for k in range(A.M - 1):
                    assert cokernel_duality_check(A, q, k).holds
        A = build(generate(4, 2, F, 58).instance)
        chk = cokernel_duality_check(A, random_quadric(A, stream(58)))
        assert chk.coker == chk.kernel == 0

    def test_cokernel_zero_class(self, mono42):
        with pytest.raises(MalformedInputError):
            cokernel_duality_check(mono42, x(0) * x(0))

    def test_cokernel_on_harvested(self):
        for A, pairs in harvest([60, 61]):
            assert pairs
            for pr in pairs:
                assert cokernel_duality_check(A, A.lift(pr.Q)).holds

    def test_vertex_bound_monomial(self, mono42):
        chk = vertex_bound_check(mono42, kernel_pairs(mono42, x(0)))
        assert chk.holds and chk.checked == 4 and chk.max_dim == 2

    def test_vertex_bound_harvested(self):
        checked = 0
        for A, pairs in harvest(range(62, 67)):
            chk = vertex_bound_check(A, pairs)
            assert chk.holds
            for pr in pairs:
                assert pr.dimZQ in (1, 2)
            checked += chk.checked
        assert checked > 0

    def test_vertex_bound_vacuous(self, rand42):
        chk = vertex_bound_check(rand42, [])
        assert chk.holds and chk.vacuous
        with pytest.raises(UnsupportedError):
            vertex_bound_check(build(Instance.monomial(3, 2, F)), [])

    def test_inclusion_monomial(self, mono42):
        pair = next(p for p in kernel_pairs(mono42, x(0))
                    if p.Q == mono42.element(x(0) * x(1)))
        chk = kernel_inclusion_check(mono42, pair)
        assert chk.holds and chk.subspace_dim == 7 and chk.square_zero

    def test_inclusion_harvested(self):
        for A, pairs in harvest([67, 68]):
            assert pairs
            for pr in pairs:
                assert kernel_inclusion_check(A, pr).holds

    def test_pair_spans_monomial(self, mono42):
        rep = pair_span_check(mono42, samples=30, seed=1)
        first = rep.pairs[0]
        assert first.image_dim == 7 and first.intersection_dim == 2
        assert rep.holds and rep.min_image == 7 and rep.max_intersection == 2

    def test_pair_spans_random(self, rand42):
        rep = pair_span_check(rand42, samples=40, seed=2)
        assert rep.holds and rep.max_intersection <= 2
        randoms = rep.pairs[10:]
        assert all(p.image_dim == 9 and p.intersection_dim == 0 for p in randoms)

    def test_pair_spans_small_m(self):
        for m in (2, 3):
            A = build(generate(m, 2, F, 69).instance)
            rep = pair_span_check(A, samples=20)
            assert rep.holds and rep.bound == 2 * m - 1

    def test_va1_monomial(self, mono42):
        chk = vanishing_span_check(mono42, [1, 0, 0, 0, 0])
        assert chk.holds and chk.v_dim == 4 and chk.span_dim == 10

    def test_va1_sampled(self):
        for m in (3, 4):
            for i in range(10):
                A = build(generate(m, 2, F, 70 + i).instance)
                for j in range(5 if m == 4 else 2):
                    pt = F.random_elements(stream(70, m, i, j), m + 1)
                    assert vanishing_span_check(A, pt).holds

    def test_va1_errors(self, mono42):
        with pytest.raises(MalformedInputError):
            vanishing_span_check(mono42, [0] * 5)
        with pytest.raises(UnsupportedError):
            vanishing_span_check(build(Instance.monomial(2, 3, F)), [1, 0, 0])

    def test_pair_products(self, mono42, rand42):
        probe = pair_product_probe(mono42, x(0))
        assert len(probe) == 10 and all(e["zero"] for e in probe)
        assert pair_product_probe(rand42, random_linear(rand42, stream(71))) == []
