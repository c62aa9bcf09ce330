#include <catch2/catch_amalgamated.hpp>

#include "dvrss/complexes.hpp"
#include "dvrss/generators.hpp"

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

// [R --pi^k--> R] in degrees 0, 1
FreeComplex<PLocalIntegers> two_term(long long k)
{
    return make_complex(ring5, 0, {1, 1}, {grid(ring5, 1, 1, {ring5.format(ring5.pi_pow(k))})});
}

FreeComplex<PLocalIntegers> koszul_pi_pi()
{
    auto d0 = grid(ring5, 2, 1, {"5", "5"});
    auto d1 = grid(ring5, 1, 2, {"-5", "5"});
    return make_complex(ring5, 0, {1, 2, 1}, {d0, d1});
}

template <class R>
FreeComplex<R> from_built(const R& ring, const gen::BuiltComplex<R>& b)
{
    return make_complex(ring, b.lo, b.ranks, b.d);
}

}  // namespace

TEST_CASE("cohomology of pinned complexes")
{
    auto C = two_term(3);
    auto coh = cohomology(ring5, C);
    REQUIRE(coh.module_at(ring5, 0) == FinModule{});
    REQUIRE(coh.module_at(ring5, 1) == FinModule{0, {3}});

    auto Z = make_complex(ring5, 0, {1, 1}, {mat::zero<PLocalIntegers>(1, 1)});
    auto cz = cohomology(ring5, Z);
    REQUIRE(cz.module_at(ring5, 0) == FinModule::free(1));
    REQUIRE(cz.module_at(ring5, 1) == FinModule::free(1));

    auto K = koszul_pi_pi();
    auto ck = cohomology(ring5, K);
    REQUIRE(ck.module_at(ring5, 0) == FinModule{});
    REQUIRE(ck.module_at(ring5, 1) == FinModule{0, {1}});
    REQUIRE(ck.module_at(ring5, 2) == FinModule{0, {1}});
}

TEST_CASE("complex validation rejects non-complexes")
{
    auto d0 = grid(ring5, 1, 1, {"1"});
    auto d1 = grid(ring5, 1, 1, {"1"});
    REQUIRE_THROWS_AS(make_complex(ring5, 0, {1, 1, 1}, {d0, d1}), Error);
}

TEST_CASE("dualize pinned complexes")
{
    auto C = two_term(2);
    auto V = dualize(ring5, C);
    auto cv = cohomology(ring5, V);
    REQUIRE(cv.module_at(ring5, 0) == FinModule{0, {2}});
    REQUIRE(cv.module_at(ring5, -1) == FinModule{});

    auto pt = make_complex(ring5, 0, {1}, {});
    auto dpt = dualize(ring5, pt);
    REQUIRE(dpt.lo == 0);
    REQUIRE(cohomology(ring5, dpt).module_at(ring5, 0) == FinModule::free(1));
}

TEMPLATE_TEST_CASE("duality invariants on random perfect complexes", "", PLocalIntegers,
                   RamifiedQuadratic)
{
    TestType ring(5);
    Rng rng(2718);
    for (int iter = 0; iter < 40; ++iter) {
        auto rec = gen::random_complex_recipe(rng, rng.range(-1, 1), rng.range(1, 4), 2, 3);
        auto built = gen::conjugate_complex(rng, ring, gen::build_split_complex(ring, rec));
        auto U = from_built(ring, built);
        auto cu = cohomology(ring, U);
        auto V = dualize(ring, U);
        auto cv = cohomology(ring, V);
        for (long long i = U.lo - 1; i <= U.hi() + 1; ++i) {
            FinModule hu = cu.module_at(ring, i);
            // torsion pairing in complementary degree +1, free pairing in -i
            REQUIRE(cv.module_at(ring, -i + 1).torsion == hu.torsion);
            REQUIRE(cv.module_at(ring, -i).free_rank == hu.free_rank);
        }
        // double dual has the cohomology of the original
        auto W = dualize(ring, V);
        auto cw = cohomology(ring, W);
        for (long long i = U.lo; i <= U.hi(); ++i)
            REQUIRE(cw.module_at(ring, i) == cu.module_at(ring, i));
        // Euler characteristic bookkeeping
        long long chi_rank = 0, chi_h = 0;
        for (long long i = U.lo; i <= U.hi(); ++i) {
            long long sign = (i % 2 == 0) ? 1 : -1;
            chi_rank += sign * U.rank_at(i);
            chi_h += sign * cu.module_at(ring, i).free_rank;
        }
        REQUIRE(chi_rank == chi_h);
    }
}

TEST_CASE("random complexes match the split-model cohomology")
{
    Rng rng(1234);
    PLocalIntegers ring(3);
    for (int iter = 0; iter < 40; ++iter) {
        auto rec = gen::random_complex_recipe(rng, 0, rng.range(1, 4), 2, 4);
        auto expect = gen::expected_cohomology(rec);
        auto built = gen::conjugate_complex(rng, ring, gen::build_split_complex(ring, rec));
        auto C = from_built(ring, built);
        auto coh = cohomology(ring, C);
        for (long long i = C.lo; i <= C.hi(); ++i) {
            FinModule want = expect.count(i) ? expect[i] : FinModule{};
            REQUIRE(coh.module_at(ring, i) == want);
        }
    }
}

TEST_CASE("mod-pi comparison map")
{
    auto C = two_term(1);
    auto coh = cohomology(ring5, C);
    auto fpc = fp_cohomology(mod_pi(ring5, C), 5);
    REQUIRE(fpc.dim_at(0) == 1);
    REQUIRE(fpc.dim_at(1) == 1);
    auto hq1 = h_mod_pi(ring5, coh, 1);
    REQUIRE(hq1.dim == 1);
    FpMat cm = compare_map(ring5, coh, fpc, 1, hq1);
    REQUIRE(fp::rank(cm) == 1);

    // complex with free cohomology: comparison is an isomorphism everywhere
    auto Z = make_complex(ring5, 0, {2, 1}, {grid(ring5, 1, 2, {"0", "1"})});
    auto cz = cohomology(ring5, Z);
    auto fz = fp_cohomology(mod_pi(ring5, Z), 5);
    for (long long i = 0; i <= 1; ++i) {
        auto hq = h_mod_pi(ring5, cz, i);
        FpMat m = compare_map(ring5, cz, fz, i, hq);
        REQUIRE(fp::rank(m) == hq.dim);
        REQUIRE(hq.dim == fz.dim_at(i));
    }

    // Koszul: kappa-cohomology dims (1,2,1), comparison images (0,1,1)
    auto K = koszul_pi_pi();
    auto ck = cohomology(ring5, K);
    auto fk = fp_cohomology(mod_pi(ring5, K), 5);
    std::vector<long long> fp_dims, image_dims;
    for (long long i = 0; i <= 2; ++i) {
        fp_dims.push_back(fk.dim_at(i));
        auto hq = h_mod_pi(ring5, ck, i);
        FpMat m = compare_map(ring5, ck, fk, i, hq);
        image_dims.push_back(fp::rank(m));
        REQUIRE(fp::rank(m) == hq.dim);  // injectivity
    }
    REQUIRE(fp_dims == std::vector<long long>{1, 2, 1});
    REQUIRE(image_dims == std::vector<long long>{0, 1, 1});
}

TEST_CASE("identification and dimension lemmas on identity and zero maps")
{
    auto C = koszul_pi_pi();
    std::map<long long, Matrix<PLocalIntegers>> idf;
    for (long long i = 0; i <= 2; ++i)
        idf[i] = mat::identity(ring5, C.rank_at(i));
    auto idm = make_complex_map(ring5, C, C, idf);
    auto pd = pair_data(ring5, idm);
    for (long long n = 0; n <= 2; ++n)
        REQUIRE(identification_check(ring5, pd, n));

    auto [l2, r2] = dimension_equality(ring5, pd, 0);
    REQUIRE(l2 == r2);

    // U = 0
    auto Z = zero_complex<PLocalIntegers>();
    auto zmap = make_complex_map(ring5, Z, C, {});
    auto pz = pair_data(ring5, zmap);
    for (long long n = 0; n <= 2; ++n) {
        REQUIRE(identification_check(ring5, pz, n));
        auto [l, r] = dimension_equality(ring5, pz, n);
        REQUIRE(l == 0);
        REQUIRE(r == 0);
    }
}

TEST_CASE("identification lemma on a subcomplex with torsion interaction")
{
    // U = [R --pi^2--> R] included into V = [R --pi--> R] via (1, pi):
    // commuting since pi * pi^2 = pi^2 * pi... use (pi, 1) * d-compat check.
    auto V = two_term(1);
    auto U = two_term(3);
    // f0 = [pi], f1 = [1] commutes: pi * f0 = pi*pi = pi^2 ... d_V f0 = pi*pi = pi^2; f1 d_U = pi^3.
    // That fails, so pick f0 = [pi^2], f1 = [1]: d_V f0 = pi^3 = f1 d_U.
    std::map<long long, Matrix<PLocalIntegers>> f{{0, grid(ring5, 1, 1, {"25"})},
                                                  {1, grid(ring5, 1, 1, {"1"})}};
    auto cm = make_complex_map(ring5, U, V, f);
    auto pd = pair_data(ring5, cm);
    // H^1(U) = R/pi^3 -> H^1(V) = R/pi is surjective with kernel; H^2 = 0 injective
    REQUIRE(identification_check(ring5, pd, 1));
}

TEST_CASE("dimension lemma on random split instances")
{
    PLocalIntegers ring(5);
    Rng rng(909090);
    for (int iter = 0; iter < 30; ++iter) {
        // V = a split complex; U = a sub-sum of its pieces (a genuine
        // subcomplex with saturated image everywhere)
        auto rec = gen::random_complex_recipe(rng, 0, rng.range(2, 4), 2, 3);
        auto bV = gen::build_split_complex(ring, rec);
        auto V = from_built(ring, bV);
        // U: keep each free single / two-term piece with probability 1/2 by
        // zeroing columns of an identity inclusion
        std::map<long long, std::vector<long long>> keep;
        for (long long i = V.lo; i <= V.hi(); ++i)
            keep[i] = {};
        // decide piece by piece using the recipe layout: two-term pieces come
        // first in each degree, then free singles
        std::vector<std::map<long long, long long>> dummy;
        std::map<long long, long long> next_slot;
        for (long long i = V.lo; i <= V.hi(); ++i)
            next_slot[i] = 0;
        long long width = static_cast<long long>(rec.free_singles.size());
        for (long long k = 0; k + 1 < width; ++k)
            for (size_t t = 0; t < rec.two_term_exp[static_cast<size_t>(k)].size(); ++t) {
                long long src = next_slot[rec.lo + k]++;
                long long dst = next_slot[rec.lo + k + 1]++;
                if (rng.chance(1, 2)) {
                    keep[rec.lo + k].push_back(src);
                    keep[rec.lo + k + 1].push_back(dst);
                }
            }
        for (long long k = 0; k < width; ++k)
            for (long long s = 0; s < rec.free_singles[static_cast<size_t>(k)]; ++s) {
                long long slot = next_slot[rec.lo + k]++;
                if (rng.chance(1, 2))
                    keep[rec.lo + k].push_back(slot);
            }
        std::vector<long long> uranks;
        std::vector<Matrix<PLocalIntegers>> ud;
        std::map<long long, Matrix<PLocalIntegers>> incl;
        for (long long i = V.lo; i <= V.hi(); ++i) {
            auto& cols = keep[i];
            std::sort(cols.begin(), cols.end());
            uranks.push_back(static_cast<long long>(cols.size()));
            Matrix<PLocalIntegers> inc(V.rank_at(i), static_cast<long long>(cols.size()));
            for (size_t j = 0; j < cols.size(); ++j)
                inc.at(cols[j], static_cast<long long>(j)) = ring.one();
            incl[i] = inc;
        }
        for (long long i = V.lo; i < V.hi(); ++i) {
            // restriction of d to the kept columns
            auto big = mat::mul(ring, V.d_at(i), incl[i]);
            auto restricted = solve(ring, incl[i + 1], big);
            REQUIRE(restricted.has_value());
            ud.push_back(*restricted);
        }
        auto U = make_complex(ring, V.lo, uranks, ud);
        auto cm = make_complex_map(ring, U, V, incl);
        auto pd = pair_data(ring, cm);
        for (long long n = V.lo; n <= V.hi(); ++n) {
            auto [l, r] = dimension_equality(ring, pd, n);
            REQUIRE(l == r);
            REQUIRE(identification_check(ring, pd, n));
        }
    }
}
