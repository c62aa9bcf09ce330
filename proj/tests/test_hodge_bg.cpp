#include <catch2/catch_amalgamated.hpp>

#include "dvrss/bg.hpp"
#include "dvrss/generators.hpp"
#include "dvrss/hodge.hpp"

using namespace dvrss;

namespace {

const PLocalIntegers ring5(5);

template <class R>
Matrix<R> grid(const R& ring, long long rows, long long cols, std::vector<std::string> entries)
{
    Matrix<R> m(rows, cols);
    for (long long i = 0; i < rows; ++i)
        for (long long j = 0; j < cols; ++j)
            m.at(i, j) = ring.parse(entries[static_cast<size_t>(i * cols + j)]);
    return m;
}

}  // namespace

TEST_CASE("threshold values")
{
    REQUIRE(threshold(11, 2).T == 4);
    REQUIRE(threshold(5, 1).T == 3);
    REQUIRE(threshold(3, 2).T == 0);
    REQUIRE(threshold(5, 2).T == 1);
    for (long long p : {3, 5, 7, 11, 13})
        for (long long e : {1, 2, 3}) {
            Threshold t = threshold(p, e);
            REQUIRE(t.T * e < p - 1);
            REQUIRE((t.T + 1) * e >= p - 1);
        }
}

TEST_CASE("hodge tables for the trivial filtration")
{
    auto C = make_complex(ring5, 0, {1, 2}, {grid(ring5, 2, 1, {"5", "0"})});
    auto fc = make_filtered(ring5, C, Orientation::decreasing, 0, {});
    auto data = filtered_data(ring5, fc);
    auto hd = hodge_data(ring5, data);
    HodgeTable vh = virtual_hodge_numbers(ring5, hd);
    HodgeTable rh = rational_hodge_numbers(ring5, data);
    // H^0 = 0, H^1 = R/pi ⊕ R: only the rank-1 free part shows up, at i = 0
    REQUIRE(vh.at(0, 1) == 1);
    REQUIRE(vh.row_sum(0) == 0);
    REQUIRE(vh == rh);
}

TEST_CASE("hodge tables for the stupid filtration of a zero-differential complex")
{
    auto C = make_complex(ring5, 0, {2, 1, 3},
                          {mat::zero<PLocalIntegers>(1, 2), mat::zero<PLocalIntegers>(3, 1)});
    std::vector<std::map<long long, Matrix<PLocalIntegers>>> steps;
    for (long long p = 1; p <= 2; ++p) {
        std::map<long long, Matrix<PLocalIntegers>> step;
        for (long long i = 0; i <= 2; ++i)
            step[i] = i >= p ? mat::identity(ring5, C.rank_at(i))
                             : mat::zero<PLocalIntegers>(C.rank_at(i), 0);
        steps.push_back(step);
    }
    auto fc = make_filtered(ring5, C, Orientation::decreasing, 0, steps);
    auto data = filtered_data(ring5, fc);
    HodgeTable rh = rational_hodge_numbers(ring5, data);
    HodgeTable vh = virtual_hodge_numbers(ring5, hodge_data(ring5, data));
    for (long long n = 0; n <= 2; ++n) {
        REQUIRE(rh.at(n, 0) == C.rank_at(n));
        REQUIRE(vh.at(n, 0) == C.rank_at(n));
        REQUIRE(rh.row_sum(n) == C.rank_at(n));
    }
}

TEST_CASE("zero complex has empty tables")
{
    auto C = make_complex(ring5, 0, {1, 1}, {grid(ring5, 1, 1, {"1"})});
    auto fc = make_filtered(ring5, C, Orientation::decreasing, 0, {});
    auto data = filtered_data(ring5, fc);
    auto rep = equality_theorem_check(ring5, data);
    REQUIRE(rep.virtual_numbers.entries.empty());
    REQUIRE(rep.rational_numbers.entries.empty());
    REQUIRE(rep.tables_equal);
}

TEST_CASE("row sums of the virtual table partition the torsion-free reduction")
{
    Rng rng(246810);
    int done = 0;
    for (int iter = 0; iter < 30 && done < 12; ++iter) {
        auto fc = gen::random_filtered_complex(rng, ring5, gen::FilteredFlavor::general);
        if (fc.orientation != Orientation::decreasing)
            continue;
        auto data = filtered_data(ring5, fc);
        auto vh = virtual_hodge_numbers(ring5, hodge_data(ring5, data));
        for (long long n = fc.ambient.lo; n <= fc.ambient.hi(); ++n)
            REQUIRE(vh.row_sum(n) == data.ambient_coh.module_at(ring5, n).free_rank);
        ++done;
    }
    REQUIRE(done == 12);
}

TEMPLATE_TEST_CASE("equality of tables on saturated instances, inequality on defective ones", "",
                   PLocalIntegers, RamifiedQuadratic)
{
    TestType ring(5);
    Rng rng(13579);
    int saturated_done = 0, defective_done = 0;
    for (int iter = 0; iter < 60 && (saturated_done < 8 || defective_done < 8); ++iter) {
        bool want_defect = iter % 2 == 1;
        auto fc = gen::random_filtered_complex(
            rng, ring, want_defect ? gen::FilteredFlavor::defective : gen::FilteredFlavor::saturated);
        if (fc.orientation != Orientation::decreasing)
            continue;
        auto data = filtered_data(ring, fc);
        auto rep = equality_theorem_check(ring, data);
        if (!want_defect) {
            REQUIRE((rep.level == "saturated" || rep.level == "split"));
            REQUIRE(rep.tables_equal);
            ++saturated_done;
        } else {
            REQUIRE(rep.level == "degenerate");
            REQUIRE(!rep.tables_equal);
            REQUIRE(!rep.mismatches.empty());
            // degeneracy alone still gives the subspace identification
            REQUIRE(rep.identification_ok.has_value());
            REQUIRE(*rep.identification_ok);
            ++defective_done;
        }
    }
    REQUIRE(saturated_done >= 8);
    REQUIRE(defective_done >= 8);
}

TEST_CASE("split instances satisfy every ledger condition")
{
    Rng rng(88211);
    int done = 0;
    for (int iter = 0; iter < 30 && done < 6; ++iter) {
        auto fc = gen::random_filtered_complex(rng, ring5, gen::FilteredFlavor::split);
        if (fc.orientation != Orientation::decreasing)
            continue;
        auto data = filtered_data(ring5, fc);
        DegeneracyFacts facts = degeneracy_facts(ring5, data);
        auto led = condition_ledger(facts, facts, 11, 2);
        REQUIRE(led.thr.T == 4);
        REQUIRE(led.c2 == Tri::yes);
        REQUIRE(led.c3 == Tri::yes);
        REQUIRE(led.c4 == Tri::yes);
        REQUIRE(led.c5 == Tri::yes);
        REQUIRE(led.c6 == Tri::yes);
        REQUIRE(led.c7 == Tri::yes);
        REQUIRE(led.c8 == Tri::yes);
        REQUIRE(led.implications_ok);
        REQUIRE(led.beta_consistent.value());
        ++done;
    }
    REQUIRE(done == 6);
}

TEST_CASE("window logic only asserts conditions up to the threshold")
{
    // a fixture that is saturated-but-not-split in degree 2: with p = 5 and
    // e = 2 the window [0, T-1] = [0, 0] never sees the degree-2 failure
    RamifiedQuadratic ring(5);
    auto C = make_complex(ring, 1, {1, 1}, [&] {
        Matrix<RamifiedQuadratic> d(1, 1);
        d.at(0, 0) = ring.pi_pow(2);
        return std::vector<Matrix<RamifiedQuadratic>>{d};
    }());
    std::map<long long, Matrix<RamifiedQuadratic>> step;
    step[1] = mat::identity(ring, 1);
    Matrix<RamifiedQuadratic> scaled(1, 1);
    scaled.at(0, 0) = ring.uniformizer();
    step[2] = scaled;
    auto fc = make_filtered(ring, C, Orientation::decreasing, 0, {step});
    auto data = filtered_data(ring, fc);
    DegeneracyFacts facts = degeneracy_facts(ring, data);
    REQUIRE(facts.split.has_value());
    REQUIRE(!facts.split.value());

    auto led = condition_ledger(facts, std::nullopt, 5, 2);
    REQUIRE(led.thr.T == 1);
    REQUIRE(led.c4 == Tri::yes);  // nothing fails in the window
    REQUIRE(led.c6 == Tri::no);   // the global condition still fails
    REQUIRE(led.implications_ok);
}

// ---------------------------------------------------------------------------
// the classifying-stack fixture
// ---------------------------------------------------------------------------

TEST_CASE("structure cohomology through the 2-periodic resolution")
{
    BgParams params;
    params.p = 5;
    params.max_degree = 6;
    auto h = bg_structure_cohomology(params);
    REQUIRE(h.size() == 7);
    REQUIRE(h[0] == FinModule::free(1));
    for (long long i = 1; i <= 6; ++i)
        REQUIRE(h[static_cast<size_t>(i)] == (i % 2 == 0 ? FinModule::cyclic(1) : FinModule{}));

    BgParams zero;
    zero.max_degree = 0;
    REQUIRE(bg_structure_cohomology(zero) == std::vector<FinModule>{FinModule::free(1)});

    BgParams p3;
    p3.p = 3;
    p3.max_degree = 6;
    auto h3 = bg_structure_cohomology(p3);
    for (long long i = 0; i <= 6; ++i)
        REQUIRE(h3[static_cast<size_t>(i)] == h[static_cast<size_t>(i)]);
}

TEST_CASE("hodge page enumeration")
{
    BgParams params;
    params.p = 5;
    params.max_degree = 8;
    auto page = bg_hodge_E1(params);

    REQUIRE(page.spots.at({2, 0}).front().label() == "beta");
    REQUIRE(page.spots.at({1, 1}).front().label() == "u");
    REQUIRE(page.spots.at({2, 2}).front().label() == "u^2");
    REQUIRE(page.spots.at({2, 1}).front().label() == "tau");
    REQUIRE(page.spots.at({0, 0}).front().label() == "1");

    // the case formula is exactly the monomial pattern
    for (long long i = 0; i <= 8; ++i)
        for (long long j = 0; j <= 8; ++j) {
            if (i + j > 8)
                continue;
            FinModule want = bg_case_formula(i, j);
            auto it = page.spots.find({i, j});
            FinModule got = it == page.spots.end()
                                ? FinModule{}
                                : (i == 0 && j == 0 ? FinModule::free(1) : FinModule::cyclic(1));
            REQUIRE(got == want);
        }

    BgParams tiny;
    tiny.max_degree = 0;
    auto only_unit = bg_hodge_E1(tiny);
    REQUIRE(only_unit.spots.size() == 1);
    REQUIRE(only_unit.spots.count({0, 0}) == 1);

    BgParams two;
    two.p = 2;
    REQUIRE_THROWS_AS(bg_hodge_E1(two), Error);
    two.p2_variant = true;
    REQUIRE(bg_hodge_E1(two).spots.count({2, 1}) == 1);
}

TEST_CASE("hodge page dimension counts match the monomial enumeration oracle")
{
    for (long long p : {3, 5, 7, 11}) {
        BgParams params;
        params.p = p;
        params.max_degree = 12;
        auto page = bg_hodge_E1(params);
        for (long long n = 0; n <= 12; ++n) {
            long long from_page = 0;
            for (const auto& [ij, monomials] : page.spots)
                if (ij.first + ij.second == n)
                    from_page += static_cast<long long>(monomials.size());
            long long oracle = 0;
            for (long long a = 0; 2 * a <= n; ++a)
                for (long long b = 0; 2 * a + 2 * b <= n; ++b)
                    for (long long eps = 0; eps <= 1; ++eps)
                        if (2 * a + 2 * b + 3 * eps == n)
                            ++oracle;
            REQUIRE(from_page == oracle);
        }
        // positive-degree entries are all residue-field lines (pi-torsion)
        for (const auto& [ij, monomials] : page.spots)
            if (ij.first + ij.second > 0)
                REQUIRE(bg_case_formula(ij.first, ij.second) == FinModule::cyclic(1));
    }
}

TEST_CASE("filtration-side run reproduces the stable table and abutment")
{
    BgParams params;
    params.p = 5;
    params.max_degree = 10;
    auto rep = bg_hdr_run(params);
    RamifiedQuadratic ring = params.ring();

    REQUIRE(rep.table_matches);
    REQUIRE(rep.abutment_consistent);
    REQUIRE(rep.mod_pi_dims_ok);
    REQUIRE(rep.first_failure_total_degree == 3);
    REQUIRE(rep.stabilized_at == 2);

    // stable page: O_K at (0,0), kappa * beta^n at (0,2n), kappa * beta^n u at (1,2n+1)
    REQUIRE(rep.stable.module_at(ring, {0, 0}) == FinModule::free(1));
    for (long long n = 1; 2 * n <= 10; ++n) {
        REQUIRE(rep.stable.module_at(ring, {0, 2 * n}) == FinModule::cyclic(1));
        REQUIRE(rep.stable.spots.at({0, 2 * n}).labels.front() ==
                (n == 1 ? "beta" : "beta^" + std::to_string(n)));
    }
    for (long long n = 0; 2 * n + 2 <= 10; ++n)
        REQUIRE(rep.stable.module_at(ring, {1, 2 * n + 1}) == FinModule::cyclic(1));
    // tau and u^{>=2} monomials die
    REQUIRE(rep.stable.module_at(ring, {1, 2}) == FinModule{});  // tau sat at (1,2)
    REQUIRE(rep.stable.module_at(ring, {2, 2}) == FinModule{});  // u^2

    REQUIRE(rep.degree2.has_value());
    REQUIRE(!rep.degree2->split);
    REQUIRE(rep.degree2->relation == "pi*beta' = u");

    for (long long n = 1; 2 * n <= 10; ++n)
        REQUIRE(rep.abutment.at(2 * n) == FinModule{0, {2}});
    REQUIRE(rep.abutment.at(3) == FinModule{});
}

TEST_CASE("conjugate-side run mirrors the filtration side")
{
    BgParams params;
    params.p = 5;
    params.max_degree = 10;
    auto rep = bg_ht_run(params);
    RamifiedQuadratic ring = params.ring();

    REQUIRE(rep.table_matches);
    REQUIRE(rep.abutment_consistent);
    REQUIRE(rep.first_failure_total_degree == 3);

    // survivors: u^b at (b,b), beta u^b at (b+2,b)
    for (long long b = 1; 2 * b <= 10; ++b)
        REQUIRE(rep.stable.module_at(ring, {b, b}) == FinModule::cyclic(1));
    for (long long b = 0; 2 * b + 2 <= 10; ++b)
        REQUIRE(rep.stable.module_at(ring, {b + 2, b}) == FinModule::cyclic(1));
    REQUIRE(rep.stable.module_at(ring, {4, 0}) == FinModule{});  // beta^2 dies
    REQUIRE(rep.stable.module_at(ring, {2, 1}) == FinModule{});  // tau dies

    REQUIRE(rep.degree2.has_value());
    REQUIRE(!rep.degree2->split);
    REQUIRE(rep.degree2->relation == "pi*u' = beta");

    // twist labels are bookkeeping only: invariants agree with the other side
    auto dr = bg_hdr_run(params);
    for (long long n = 0; n <= 10; ++n) {
        auto total_inv = [&](const BgRunReport& r) {
            std::vector<FinModule> pieces;
            for (const auto& [spot, entry] : r.stable.spots)
                if (spot.first + spot.second == n)
                    pieces.push_back(invariants(ring, entry.module));
            FinModule sum{0, {}};
            for (const auto& m : pieces)
                sum = FinModule::direct_sum(sum, m);
            return sum;
        };
        REQUIRE(total_inv(rep) == total_inv(dr));
        REQUIRE(rep.abutment.at(n) == dr.abutment.at(n));
    }
}

TEST_CASE("condition report across primes")
{
    {
        BgParams params;
        params.p = 11;
        params.max_degree = 10;
        auto rep = bg_condition_report(params);
        REQUIRE(rep.ledger.thr.T == 4);
        REQUIRE(rep.first_torsion_defect_degree == 3);
        REQUIRE(rep.ledger.c2 == Tri::no);
        REQUIRE(rep.ledger.c3 == Tri::no);
        REQUIRE(rep.ledger.c4 == Tri::no);
        REQUIRE(rep.ledger.c5 == Tri::no);
        REQUIRE(rep.ledger.c6 == Tri::no);
        REQUIRE(rep.ledger.c7 == Tri::no);
        REQUIRE(rep.ledger.c8 == Tri::unknown);
        REQUIRE(rep.ledger.c1 == Tri::no);
        REQUIRE(rep.ledger.implications_ok);
        REQUIRE(rep.ledger.beta_consistent.value());
    }
    {
        BgParams params;
        params.p = 5;
        params.max_degree = 10;
        auto rep = bg_condition_report(params);
        REQUIRE(rep.ledger.thr.T == 1);
        REQUIRE(rep.first_torsion_defect_degree == 3);  // defect exists but out of window
        REQUIRE(rep.ledger.c4 == Tri::yes);
        REQUIRE(rep.ledger.c5 == Tri::yes);
        REQUIRE(rep.ledger.c6 == Tri::no);
        bool window_note = false;
        for (const auto& note : rep.ledger.notes)
            if (note.find("first torsion length defect") != std::string::npos)
                window_note = true;
        REQUIRE(window_note);
    }
}

TEST_CASE("omega only moves units, never the module invariants")
{
    BgParams a, b;
    a.p = 5;
    a.max_degree = 6;
    b = a;
    b.omega = BigRat(2, 3);
    auto ha = bg_structure_cohomology(a);
    auto hb = bg_structure_cohomology(b);
    REQUIRE(ha == hb);
    auto ra = bg_hdr_run(a), rb = bg_hdr_run(b);
    REQUIRE(ra.table_matches);
    REQUIRE(rb.table_matches);
    REQUIRE(ra.abutment == rb.abutment);
}
