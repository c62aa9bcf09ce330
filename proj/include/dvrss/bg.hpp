#pragma once

// The order-p group scheme fixture: cohomology of the classifying stack's
// structure sheaf through the 2-periodic resolution, the bigraded Hodge page
// with generators beta (2,0), u (1,1), tau (2,1), and the two page runs
//   filtration side: d_1(tau) = u^2
//   conjugate side:  d_2(tau) = beta^2
// together with the degree-2 non-split witness sequences and the condition
// ledger. Only (pi, pi', omega) enter; no group-scheme machinery.
//
// Page coordinates: the filtration-side run uses (p, q) = (exterior power,
// cohomological degree); the conjugate-side run uses (p, q) = (cohomological
// degree, exterior power), which is the ordering that gives its differential
// the standard (r, 1-r) bidegree at r = 2.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dvrss/hodge.hpp"
#include "dvrss/spectral.hpp"

namespace dvrss {

struct BgParams {
    long long p = 5;
    long long max_degree = 10;       // total degree cap D
    BigRat omega = BigRat(1);        // the unit with pi * pi' = p * omega
    bool p2_variant = false;         // opt-in for p = 2 (tau^2 = beta u^2)

    RamifiedQuadratic ring() const { return RamifiedQuadratic(p, omega); }
};

inline void validate(const BgParams& params)
{
    require(params.p >= 2, "invalid-argument", "p must be a prime");
    if (params.p == 2)
        require(params.p2_variant, "p-2-variant-not-requested",
                "p = 2 needs the variant relation; pass the variant flag");
    require(params.max_degree >= 0, "invalid-argument", "max degree must be nonnegative");
}

inline QuadElem bg_pi_prime(const RamifiedQuadratic& ring, const BgParams& params)
{
    QuadElem num{ring.unit_multiplier * params.p, 0};  // p * omega
    return ring.divide(num, ring.uniformizer());
}

// ---------------------------------------------------------------------------
// structure cohomology via the 2-periodic resolution
// ---------------------------------------------------------------------------

// the resolution's multiplication maps evaluated at the identity section give
// the alternating differentials 0, -pi' on a rank-1 complex
inline std::vector<FinModule> bg_structure_cohomology(const BgParams& params)
{
    validate(params);
    RamifiedQuadratic ring = params.ring();
    QuadElem pi_prime = bg_pi_prime(ring, params);
    long long D = params.max_degree;
    std::vector<long long> ranks(static_cast<size_t>(D + 1), 1);
    std::vector<Matrix<RamifiedQuadratic>> d;
    for (long long i = 0; i < D; ++i) {
        Matrix<RamifiedQuadratic> m(1, 1);
        if (i % 2 == 1)
            m.at(0, 0) = ring.neg(pi_prime);
        d.push_back(std::move(m));
    }
    auto C = make_complex(ring, 0, std::move(ranks), std::move(d));
    auto coh = cohomology(ring, C);
    std::vector<FinModule> out;
    for (long long i = 0; i <= D; ++i)
        out.push_back(coh.module_at(ring, i));
    return out;
}

// ---------------------------------------------------------------------------
// the bigraded Hodge page
// ---------------------------------------------------------------------------

struct BgMonomial {
    long long a = 0, b = 0;  // beta^a u^b
    bool tau = false;

    long long coh_degree() const { return 2 * a + b + (tau ? 2 : 0); }
    long long ext_power() const { return b + (tau ? 1 : 0); }
    long long total() const { return coh_degree() + ext_power(); }

    std::string label() const
    {
        std::string s;
        auto piece = [&](const std::string& t) {
            if (!s.empty())
                s += "*";
            s += t;
        };
        if (a == 1)
            piece("beta");
        else if (a > 1)
            piece("beta^" + std::to_string(a));
        if (b == 1)
            piece("u");
        else if (b > 1)
            piece("u^" + std::to_string(b));
        if (tau)
            piece("tau");
        return s.empty() ? "1" : s;
    }
};

struct BgHodgePage {
    BgParams params;
    // keyed by (cohomological degree i, exterior power j)
    std::map<Spot, std::vector<BgMonomial>> spots;
};

// the case formula for H^i of the j-th exterior power: the full ring at
// (0,0), one residue-field line at (2m, 0) for m > 0 and whenever
// 0 < j <= i, zero elsewhere
inline FinModule bg_case_formula(long long i, long long j)
{
    if (i == 0 && j == 0)
        return FinModule::free(1);
    if (j == 0 && i > 0 && i % 2 == 0)
        return FinModule::cyclic(1);
    if (j > 0 && j <= i)
        return FinModule::cyclic(1);
    return FinModule{};
}

inline BgHodgePage bg_hodge_page(const BgParams& params, long long total_cap)
{
    validate(params);
    BgHodgePage page;
    page.params = params;
    for (long long a = 0; 2 * a <= total_cap; ++a)
        for (long long b = 0; 2 * a + 2 * b <= total_cap; ++b)
            for (int eps = 0; eps <= 1; ++eps) {
                BgMonomial m{a, b, eps == 1};
                if (m.total() > total_cap)
                    continue;
                page.spots[{m.coh_degree(), m.ext_power()}].push_back(m);
            }
    for (const auto& [spot, monomials] : page.spots)
        require(monomials.size() == 1, "internal", "hodge page spot is not one-dimensional");
    return page;
}

inline BgHodgePage bg_hodge_E1(const BgParams& params)
{
    return bg_hodge_page(params, params.max_degree);
}

// ---------------------------------------------------------------------------
// page runs
// ---------------------------------------------------------------------------

enum class BgSide { de_rham, hodge_tate };

struct BgSes {
    std::string sub_label, middle_label, quotient_label;
    std::string relation;
    bool split = true;
};

struct BgRunReport {
    BgParams params;
    BgSide side = BgSide::de_rham;
    Page<RamifiedQuadratic> start;
    Page<RamifiedQuadratic> stable;
    long long stabilized_at = 0;
    std::map<long long, FinModule> abutment;  // claimed H^n for n <= max_degree
    bool table_matches = false;               // stable page equals the expected survivors
    bool abutment_consistent = false;
    bool mod_pi_dims_ok = false;              // dim_kappa(H^n / pi) <= 1
    long long first_failure_total_degree = -1;
    std::optional<BgSes> degree2;
};

namespace detail_bg {

inline Spot run_spot(BgSide side, const BgMonomial& m)
{
    if (side == BgSide::de_rham)
        return {m.ext_power(), m.coh_degree()};
    return {m.coh_degree(), m.ext_power()};
}

inline Page<RamifiedQuadratic> start_page(const RamifiedQuadratic& ring, const BgHodgePage& hodge,
                                          BgSide side)
{
    Page<RamifiedQuadratic> page;
    page.r = side == BgSide::de_rham ? 1 : 2;
    for (const auto& [ij, monomials] : hodge.spots) {
        const BgMonomial& m = monomials.front();
        typename Page<RamifiedQuadratic>::Entry e;
        e.module = presented_from_invariants(ring, bg_case_formula(ij.first, ij.second));
        e.labels = {m.label()};
        if (side == BgSide::hodge_tate)
            e.twist = -ij.second;  // the Tate-twist bookkeeping label {-j}
        page.spots.emplace(run_spot(side, m), std::move(e));
    }
    return page;
}

inline std::map<long long, FinModule> claimed_abutment(const RamifiedQuadratic&, long long D)
{
    std::map<long long, FinModule> claimed;
    for (long long n = 0; n <= D; ++n) {
        if (n == 0)
            claimed[n] = FinModule::free(1);
        else if (n % 2 == 0)
            claimed[n] = FinModule{0, {2}};  // one cyclic piece killed by p = unit * pi^2
        else
            claimed[n] = FinModule{};
    }
    return claimed;
}

// survivors of the only differential: tau-free monomials with u-exponent
// (filtration side) or beta-exponent (conjugate side) at most 1
inline bool survives(BgSide side, const BgMonomial& m)
{
    if (m.tau)
        return false;
    return side == BgSide::de_rham ? m.b <= 1 : m.a <= 1;
}

}  // namespace detail_bg

inline BgRunReport bg_run(const BgParams& params, BgSide side)
{
    validate(params);
    RamifiedQuadratic ring = params.ring();
    long long D = params.max_degree;

    // build one total degree beyond the cap so that truncation cannot leave a
    // spurious survivor at the boundary
    BgHodgePage hodge = bg_hodge_page(params, D + 1);
    BgRunReport rep;
    rep.params = params;
    rep.side = side;
    rep.start = detail_bg::start_page(ring, hodge, side);

    long long r = rep.start.r;
    PageRule<RamifiedQuadratic> rule;
    rule.r = r;
    for (const auto& [ij, monomials] : hodge.spots) {
        const BgMonomial& m = monomials.front();
        if (!m.tau)
            continue;  // d(beta) = d(u) = 0; only tau moves
        BgMonomial target = side == BgSide::de_rham ? BgMonomial{m.a, m.b + 2, false}
                                                    : BgMonomial{m.a + 2, m.b, false};
        if (target.total() > D + 1)
            continue;
        Matrix<RamifiedQuadratic> one(1, 1);
        one.at(0, 0) = ring.one();  // "up to unit" normalized to 1
        rule.d[detail_bg::run_spot(side, m)] = std::move(one);
        if (rep.first_failure_total_degree < 0 || m.total() < rep.first_failure_total_degree)
            rep.first_failure_total_degree = m.total();
    }

    auto run = run_page_sequence(ring, rep.start, {rule}, r + 1);
    rep.stable = run.pages.back();
    rep.stabilized_at = run.stabilized_at;

    // compare against the expected survivor table (totals <= D only)
    bool match = true;
    for (const auto& [ij, monomials] : hodge.spots) {
        const BgMonomial& m = monomials.front();
        if (m.total() > D)
            continue;
        Spot s = detail_bg::run_spot(side, m);
        FinModule got = rep.stable.module_at(ring, s);
        FinModule want = detail_bg::survives(side, m) ? bg_case_formula(m.coh_degree(), m.ext_power())
                                                      : FinModule{};
        if (got != want)
            match = false;
        if (detail_bg::survives(side, m) && !want.is_zero()) {
            const auto& labels = rep.stable.spots.at(s).labels;
            if (labels.size() != 1 || labels.front() != m.label())
                match = false;
        }
    }
    // nothing unexpected at totals <= D either
    for (const auto& [spot, entry] : rep.stable.spots) {
        long long total = spot.first + spot.second;
        if (total > D)
            continue;
        BgMonomial probe = side == BgSide::de_rham ? BgMonomial{0, 0, false} : BgMonomial{};
        (void)probe;
        bool expected = false;
        for (const auto& [ij, monomials] : hodge.spots)
            if (detail_bg::run_spot(side, monomials.front()) == spot &&
                detail_bg::survives(side, monomials.front()))
                expected = true;
        if (!expected && !invariants(ring, entry.module).is_zero())
            match = false;
    }
    rep.table_matches = match;

    // the abutment: trim the infinite page to totals <= D before comparing
    rep.abutment = detail_bg::claimed_abutment(ring, D);
    Page<RamifiedQuadratic> trimmed;
    trimmed.r = rep.stable.r;
    for (const auto& [spot, entry] : rep.stable.spots)
        if (spot.first + spot.second <= D)
            trimmed.spots.emplace(spot, entry);
    rep.abutment_consistent = abutment_consistency(ring, trimmed, rep.abutment);

    rep.mod_pi_dims_ok = true;
    for (const auto& [n, m] : rep.abutment)
        if (m.mod_pi_dim() > 1)
            rep.mod_pi_dims_ok = false;

    if (D >= 2) {
        // the degree-2 filtration: one residue line inside a cyclic length-2
        // module; the inclusion is pi * (middle) and never splits
        Presented<RamifiedQuadratic> middle =
            presented_from_invariants(ring, FinModule{0, {2}});
        Matrix<RamifiedQuadratic> gen(1, 1);
        gen.at(0, 0) = ring.uniformizer();
        ModuleMap<RamifiedQuadratic> inc = submodule_inclusion(ring, middle, gen);
        BgSes ses;
        ses.split = splits_retraction(ring, inc);
        if (side == BgSide::de_rham) {
            ses.sub_label = "u";
            ses.middle_label = "beta'";
            ses.quotient_label = "beta";
            ses.relation = "pi*beta' = u";
        } else {
            ses.sub_label = "beta";
            ses.middle_label = "u'";
            ses.quotient_label = "u";
            ses.relation = "pi*u' = beta";
        }
        rep.degree2 = ses;
    }
    return rep;
}

inline BgRunReport bg_hdr_run(const BgParams& params) { return bg_run(params, BgSide::de_rham); }
inline BgRunReport bg_ht_run(const BgParams& params) { return bg_run(params, BgSide::hodge_tate); }

// ---------------------------------------------------------------------------
// condition report
// ---------------------------------------------------------------------------

struct BgConditionReport {
    BgRunReport hdr, ht;
    ConditionLedger ledger;
    long long first_torsion_defect_degree = -1;  // smallest degree with a length mismatch
};

// degeneracy facts as visible from a page run: start-page torsion versus the
// claimed abutment, with the global flags knowable only when a differential
// is nonzero (then nothing is degenerate)
inline DegeneracyFacts bg_degeneracy_facts(const RamifiedQuadratic& ring, const BgRunReport& run)
{
    DegeneracyFacts facts;
    long long D = run.params.max_degree;
    std::map<long long, std::vector<long long>> pooled;
    std::map<long long, long long> graded_len;
    std::map<long long, long long> graded_rank;
    for (const auto& [spot, entry] : run.start.spots) {
        long long n = spot.first + spot.second;
        if (n > D)
            continue;
        FinModule m = invariants(ring, entry.module);
        graded_len[n] += m.length();
        graded_rank[n] += m.free_rank;
        pooled[n].insert(pooled[n].end(), m.torsion.begin(), m.torsion.end());
    }
    for (long long n = 0; n <= D; ++n) {
        DegeneracyFacts::Degree row;
        FinModule claimed;
        if (auto it = run.abutment.find(n); it != run.abutment.end())
            claimed = it->second;
        row.rank_additive = claimed.free_rank == graded_rank[n];
        row.ambient_torsion_length = claimed.length();
        row.graded_torsion_length = graded_len[n];
        std::sort(pooled[n].begin(), pooled[n].end());
        row.torsion_multiset_match =
            row.ambient_torsion_length == row.graded_torsion_length && pooled[n] == claimed.torsion;
        facts.degrees.emplace(n, row);
    }
    if (run.first_failure_total_degree >= 0) {
        facts.degenerate = false;
        facts.saturated = false;
        facts.split = false;
    }
    return facts;
}

inline BgConditionReport bg_condition_report(const BgParams& params)
{
    validate(params);
    RamifiedQuadratic ring = params.ring();
    BgConditionReport rep{bg_hdr_run(params), bg_ht_run(params), {}, -1};
    DegeneracyFacts hdr = bg_degeneracy_facts(ring, rep.hdr);
    DegeneracyFacts ht = bg_degeneracy_facts(ring, rep.ht);
    // the lift obstruction is nonzero: recorded as an external datum
    rep.ledger = condition_ledger(hdr, ht, params.p, 2, false);
    rep.ledger.notes.push_back(
        "table equality (the last condition) is not computable from supplied pages alone");
    for (const auto& [i, row] : hdr.degrees)
        if (row.ambient_torsion_length != row.graded_torsion_length) {
            rep.first_torsion_defect_degree = i;
            break;
        }
    if (rep.first_torsion_defect_degree >= 0)
        rep.ledger.notes.push_back("first torsion length defect at degree " +
                                   std::to_string(rep.first_torsion_defect_degree));
    return rep;
}

}  // namespace dvrss
