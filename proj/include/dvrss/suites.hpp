#pragma once

// The seeded property suites behind `randcheck`: each runs `count` instances,
// records a canonical one-line digest per instance (so transcripts are
// byte-reproducible from the seed) and collects violations. The acceptance
// gate drives these with pinned seeds and counts.

#include <string>
#include <vector>

#include "dvrss/generators.hpp"
#include "dvrss/hodge.hpp"

namespace dvrss {

struct SuiteResult {
    std::string suite;
    uint64_t seed = 0;
    long long count = 0;
    long long violations = 0;
    std::vector<std::string> digests;   // one canonical line per instance
    std::vector<std::string> failures;  // human-readable violation records
};

namespace suites {

inline std::string fin_to_digest(const FinModule& m)
{
    std::string s = "f" + std::to_string(m.free_rank) + "t[";
    for (size_t i = 0; i < m.torsion.size(); ++i)
        s += (i ? "," : "") + std::to_string(m.torsion[i]);
    return s + "]";
}

template <class F>
void with_ring_kind(long long which, long long p, F&& body)
{
    switch (which % 3) {
    case 0: {
        PLocalIntegers ring(p);
        body(ring);
        break;
    }
    case 1: {
        LocalPolynomials ring(p);
        body(ring);
        break;
    }
    default: {
        RamifiedQuadratic ring(p);
        body(ring);
        break;
    }
    }
}

// --- snf: factorization, unimodularity, divisibility chain, kernels --------

inline SuiteResult snf_suite(uint64_t seed, long long count)
{
    SuiteResult res{"snf", seed, count, 0, {}, {}};
    Rng master(seed);
    for (long long k = 0; k < count; ++k) {
        uint64_t inst_seed = master.next();
        with_ring_kind(k, 5, [&](const auto& ring) {
            using R = std::decay_t<decltype(ring)>;
            Rng rng(inst_seed);
            long long rows = rng.range(1, 6), cols = rng.range(1, 6);
            Matrix<R> A = gen::random_matrix(rng, ring, rows, cols, 5);
            Snf<R> s = snf(ring, A);
            bool ok = mat::eq(ring, mat::mul(ring, mat::mul(ring, s.u, s.d), s.v), A);
            ok = ok && is_unimodular(ring, s.u) && is_unimodular(ring, s.v);
            for (size_t t = 1; t < s.exponents.size(); ++t)
                ok = ok && s.exponents[t - 1] <= s.exponents[t];
            Matrix<R> K = kernel_basis_from(ring, s);
            ok = ok && mat::is_zero(ring, mat::mul(ring, A, K));
            if (K.cols > 0) {
                Snf<R> ks = snf(ring, K);
                ok = ok && ks.rank == K.cols;
                for (long long e : ks.exponents)
                    ok = ok && e == 0;
            }
            // invariance of cokernel invariants under unimodular transforms
            auto inv = cokernel_invariants(ring, A);
            Matrix<R> P = gen::random_unimodular(rng, ring, rows);
            Matrix<R> Q = gen::random_unimodular(rng, ring, cols);
            auto inv2 = cokernel_invariants(ring, mat::mul(ring, mat::mul(ring, P, A), Q));
            ok = ok && inv.free_rank == inv2.free_rank && inv.exponents == inv2.exponents;

            std::string dig = std::string(R::kind) + " " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " exps[";
            for (size_t t = 0; t < s.exponents.size(); ++t)
                dig += (t ? "," : "") + std::to_string(s.exponents[t]);
            dig += "]";
            res.digests.push_back(dig);
            if (!ok) {
                ++res.violations;
                res.failures.push_back("instance " + std::to_string(k) + ": " + dig);
            }
        });
    }
    return res;
}

// --- split-criterion: polygon test vs retraction test ----------------------

inline SuiteResult split_criterion_suite(uint64_t seed, long long count)
{
    SuiteResult res{"split-criterion", seed, count, 0, {}, {}};
    Rng master(seed);
    for (long long k = 0; k < count; ++k) {
        uint64_t inst_seed = master.next();
        with_ring_kind(k, 5, [&](const auto& ring) {
            using R = std::decay_t<decltype(ring)>;
            Rng rng(inst_seed);
            ModuleMap<R> inc = gen::random_mod_pi_injective_inclusion(rng, ring, 4, 5);
            bool by_polygon = splits_polygon(ring, inc);
            bool by_retraction = splits_retraction(ring, inc);
            // the inequality direction always holds under the precondition
            FinModule M = invariants(ring, inc.dst);
            FinModule NQ = FinModule::direct_sum(invariants(ring, inc.src),
                                                 invariants(ring, cokernel_module(ring, inc)));
            bool leq = polygon_leq(char_polygon(M), char_polygon(NQ));
            std::string dig = std::string(R::kind) + " N=" + fin_to_digest(invariants(ring, inc.src)) +
                              " M=" + fin_to_digest(M) + " polygon=" +
                              (by_polygon ? "split" : "non-split");
            res.digests.push_back(dig);
            if (by_polygon != by_retraction || !leq) {
                ++res.violations;
                res.failures.push_back("instance " + std::to_string(k) + ": " + dig +
                                       " retraction=" + (by_retraction ? "split" : "non-split") +
                                       (leq ? "" : " inequality-violated"));
            }
        });
    }
    return res;
}

// --- duality: pairing of torsion and free parts across RHom(-, R) ----------

inline SuiteResult duality_suite(uint64_t seed, long long count)
{
    SuiteResult res{"duality", seed, count, 0, {}, {}};
    Rng master(seed);
    for (long long k = 0; k < count; ++k) {
        uint64_t inst_seed = master.next();
        with_ring_kind(k, 5, [&](const auto& ring) {
            using R = std::decay_t<decltype(ring)>;
            Rng rng(inst_seed);
            auto rec = gen::random_complex_recipe(rng, rng.range(-1, 1), rng.range(1, 3), 2, 3);
            auto built = gen::conjugate_complex(rng, ring, gen::build_split_complex(ring, rec));
            auto U = make_complex(ring, built.lo, built.ranks, built.d);
            auto cu = cohomology(ring, U);
            auto V = dualize(ring, U);
            auto cv = cohomology(ring, V);
            bool ok = true;
            std::string dig = std::string(R::kind) + " h[";
            for (long long i = U.lo - 1; i <= U.hi() + 1; ++i) {
                FinModule hu = cu.module_at(ring, i);
                ok = ok && cv.module_at(ring, -i + 1).torsion == hu.torsion;
                ok = ok && cv.module_at(ring, -i).free_rank == hu.free_rank;
                if (i >= U.lo && i <= U.hi())
                    dig += fin_to_digest(hu) + ";";
            }
            dig += "]";
            auto W = dualize(ring, V);
            auto cw = cohomology(ring, W);
            for (long long i = U.lo; i <= U.hi(); ++i)
                ok = ok && cw.module_at(ring, i) == cu.module_at(ring, i);
            res.digests.push_back(dig);
            if (!ok) {
                ++res.violations;
                res.failures.push_back("instance " + std::to_string(k) + ": " + dig);
            }
        });
    }
    return res;
}

// --- crosscheck: characterization of saturated/split degenerations ---------

inline SuiteResult crosscheck_suite(uint64_t seed, long long count)
{
    SuiteResult res{"crosscheck", seed, count, 0, {}, {}};
    Rng master(seed);
    for (long long k = 0; k < count; ++k) {
        uint64_t inst_seed = master.next();
        with_ring_kind(k, 5, [&](const auto& ring) {
            using R = std::decay_t<decltype(ring)>;
            Rng rng(inst_seed);
            auto fc = gen::random_filtered_complex(rng, ring, gen::FilteredFlavor::general, 3, 4, 3, 4);
            auto data = filtered_data(ring, fc);
            auto cc = criteria_crosscheck(ring, data);
            auto cls = classify(ring, data);
            std::string dig = std::string(R::kind) + " " + cls.verdict() +
                              (cc.applicable ? "" : " [skipped]");
            res.digests.push_back(dig);
            bool ok = cc.applicable && cc.discrepancies.empty();
            // implication chain is also part of the contract
            ok = ok && (!cls.split || cls.saturated) && (!cls.saturated || cls.degenerate);
            if (!ok) {
                ++res.violations;
                std::string msg = "instance " + std::to_string(k) + ": " + dig;
                for (const auto& d : cc.discrepancies)
                    msg += " | " + d;
                res.failures.push_back(msg);
            }
        });
    }
    return res;
}

// --- equality: number tables on saturated and on defective instances -------

inline SuiteResult equality_suite(uint64_t seed, long long count)
{
    SuiteResult res{"equality", seed, count, 0, {}, {}};
    Rng master(seed);
    long long defective_count = std::max<long long>(1, count / 4);
    for (long long k = 0; k < count + defective_count; ++k) {
        uint64_t inst_seed = master.next();
        bool want_defect = k >= count;
        with_ring_kind(k, 5, [&](const auto& ring) {
            using R = std::decay_t<decltype(ring)>;
            Rng rng(inst_seed);
            FilteredComplex<R> fc = gen::random_filtered_complex(
                rng, ring, want_defect ? gen::FilteredFlavor::defective : gen::FilteredFlavor::saturated);
            while (fc.orientation != Orientation::decreasing)
                fc = gen::random_filtered_complex(
                    rng, ring,
                    want_defect ? gen::FilteredFlavor::defective : gen::FilteredFlavor::saturated);
            auto data = filtered_data(ring, fc);
            auto rep = equality_theorem_check(ring, data);
            std::string dig = std::string(R::kind) + " level=" + rep.level +
                              (rep.tables_equal ? " equal" : " unequal");
            res.digests.push_back(dig);
            bool ok = want_defect ? (!rep.tables_equal && !rep.mismatches.empty())
                                  : ((rep.level == "saturated" || rep.level == "split") &&
                                     rep.tables_equal);
            if (!want_defect) {
                // row sums always partition the torsion-free reduction
                for (long long n = fc.ambient.lo; n <= fc.ambient.hi(); ++n)
                    ok = ok && rep.virtual_numbers.row_sum(n) ==
                                   data.ambient_coh.module_at(ring, n).free_rank;
            }
            if (!ok) {
                ++res.violations;
                res.failures.push_back("instance " + std::to_string(k) + ": " + dig);
            }
        });
    }
    res.count = count + defective_count;
    return res;
}

inline SuiteResult run_suite(const std::string& name, uint64_t seed, long long count)
{
    if (name == "snf")
        return snf_suite(seed, count);
    if (name == "split-criterion")
        return split_criterion_suite(seed, count);
    if (name == "duality")
        return duality_suite(seed, count);
    if (name == "crosscheck")
        return crosscheck_suite(seed, count);
    if (name == "equality")
        return equality_suite(seed, count);
    fail("invalid-argument", "unknown suite '" + name + "'");
}

}  // namespace suites

}  // namespace dvrss
