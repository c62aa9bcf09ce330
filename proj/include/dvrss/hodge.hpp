#pragma once

// Virtual and rational Hodge numbers of a filtered complex, the equality
// checker, the ramification threshold, and the condition ledger.
//
// Virtual numbers follow the residue-level recipe: intersect the image of
// H^n(Fil^i mod pi) -> H^n(C mod pi) with H^n(C)/pi, then push into
// H^n(C)_tf/pi and take consecutive dimension drops. Rational numbers are
// the fraction-field ranks of the filtration images.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dvrss/spectral.hpp"

namespace dvrss {

struct HodgeTable {
    // keyed by (i, j); i is the user-facing filtration index, n = i + j
    std::map<std::pair<long long, long long>, long long> entries;

    struct Provenance {
        long long n = 0, i = 0;
        long long image_dim = 0;      // subspace attached to index i in degree n
    };
    std::vector<Provenance> provenance;

    long long at(long long i, long long j) const
    {
        auto it = entries.find({i, j});
        return it == entries.end() ? 0 : it->second;
    }
    long long row_sum(long long n) const
    {
        long long s = 0;
        for (const auto& [ij, v] : entries)
            if (ij.first + ij.second == n)
                s += v;
        return s;
    }
    friend bool operator==(const HodgeTable& a, const HodgeTable& b)
    {
        auto nonzero = [](const HodgeTable& t) {
            std::map<std::pair<long long, long long>, long long> m;
            for (const auto& [ij, v] : t.entries)
                if (v != 0)
                    m.emplace(ij, v);
            return m;
        };
        return nonzero(a) == nonzero(b);
    }
};

// fp cohomology of the ambient complex and each filtration step, cached
template <class R>
struct HodgeData {
    const FilteredData<R>* data;
    FpCohomology ambient_fp;
    std::vector<FpCohomology> step_fp;  // index p - p_min
};

template <class R>
HodgeData<R> hodge_data(const R& ring, const FilteredData<R>& data)
{
    HodgeData<R> hd{&data, fp_cohomology(mod_pi(ring, data.fc.ambient), ring.residue_char()), {}};
    for (long long p = data.fc.p_min; p <= data.fc.p_max(); ++p)
        hd.step_fp.push_back(
            fp_cohomology(mod_pi(ring, data.at(p).complex), ring.residue_char()));
    return hd;
}

// dimension of the index-i subspace of H^n(C)_tf/pi cut out by the
// residue-level filtration
template <class R>
long long virtual_filtration_dim(const R& ring, const HodgeData<R>& hd, long long n, long long p)
{
    const FilteredData<R>& data = *hd.data;
    long long fp_char = ring.residue_char();
    if (!data.ambient_coh.deg.count(n))
        return 0;
    const Presented<R>& H = data.ambient_coh.at(n).H;
    long long f_rank = H.gens - H.rel_rank();
    if (p <= data.fc.p_min)
        return f_rank;
    if (p > data.fc.p_max())
        return 0;

    fp::Quotient hq = mod_pi_quotient(ring, H);
    FpMat cm = compare_map(ring, data.ambient_coh, hd.ambient_fp, n, hq);

    PairData<R> pd{data.at(p).coh, data.ambient_coh,
                   hd.step_fp[static_cast<size_t>(p - data.fc.p_min)], hd.ambient_fp,
                   data.at(p).inclusion};
    FpMat dbl = double_image_subspace(ring, pd, n, hq, cm);

    FpMat tf_bar = mat::residue_reduce(ring, tf_projection(ring, H));
    FpMat push = fp::mul(tf_bar, hq.section);
    (void)fp_char;
    return fp::rank(fp::mul(push, dbl));
}

template <class R>
HodgeTable virtual_hodge_numbers(const R& ring, const HodgeData<R>& hd)
{
    const FilteredData<R>& data = *hd.data;
    require(data.fc.orientation == Orientation::decreasing, "invalid-input",
            "virtual numbers are defined for decreasing filtrations");
    HodgeTable table;
    const auto& C = data.fc.ambient;
    for (long long n = C.lo; n <= C.hi(); ++n) {
        std::map<long long, long long> dims;
        for (long long p = data.fc.p_min; p <= data.fc.p_max() + 1; ++p) {
            dims[p] = virtual_filtration_dim(ring, hd, n, p);
            table.provenance.push_back({n, data.fc.user_index(p), dims[p]});
        }
        for (long long p = data.fc.p_min; p <= data.fc.p_max(); ++p) {
            long long v = dims[p] - dims[p + 1];
            if (v != 0)
                table.entries[{data.fc.user_index(p), n - data.fc.user_index(p)}] = v;
        }
    }
    return table;
}

template <class R>
long long rational_filtration_dim(const R& ring, const FilteredData<R>& data, long long n,
                                  long long p)
{
    if (!data.ambient_coh.deg.count(n))
        return 0;
    const Presented<R>& H = data.ambient_coh.at(n).H;
    if (p <= data.fc.p_min)
        return H.gens - H.rel_rank();
    if (p > data.fc.p_max())
        return 0;
    ModuleMap<R> ind = fil_to_ambient(ring, data, n, p);
    return rank_K(ring, mat::mul(ring, tf_projection(ring, H), ind.f));
}

template <class R>
HodgeTable rational_hodge_numbers(const R& ring, const FilteredData<R>& data)
{
    HodgeTable table;
    const auto& C = data.fc.ambient;
    for (long long n = C.lo; n <= C.hi(); ++n)
        for (long long p = data.fc.p_min; p <= data.fc.p_max(); ++p) {
            long long v = rational_filtration_dim(ring, data, n, p) -
                          rational_filtration_dim(ring, data, n, p + 1);
            if (v != 0)
                table.entries[{data.fc.user_index(p), n - data.fc.user_index(p)}] = v;
        }
    return table;
}

// ---------------------------------------------------------------------------
// the equality checker
// ---------------------------------------------------------------------------

struct EqualityReport {
    std::string level;  // "split" / "saturated" / "degenerate" / "none"
    HodgeTable virtual_numbers, rational_numbers;
    bool tables_equal = false;
    std::vector<std::pair<long long, long long>> mismatches;  // (i, j) spots
    std::optional<bool> identification_ok;  // filled when degenerate
};

template <class R>
EqualityReport equality_theorem_check(const R& ring, const FilteredData<R>& data)
{
    DegeneracyReport cls = classify(ring, data);
    EqualityReport rep;
    rep.level = cls.split ? "split" : cls.saturated ? "saturated" : cls.degenerate ? "degenerate" : "none";

    HodgeData<R> hd = hodge_data(ring, data);
    rep.virtual_numbers = virtual_hodge_numbers(ring, hd);
    rep.rational_numbers = rational_hodge_numbers(ring, data);
    rep.tables_equal = rep.virtual_numbers == rep.rational_numbers;
    if (!rep.tables_equal) {
        std::map<std::pair<long long, long long>, bool> spots;
        for (const auto& [ij, v] : rep.virtual_numbers.entries)
            if (rep.rational_numbers.at(ij.first, ij.second) != v)
                spots[ij] = true;
        for (const auto& [ij, v] : rep.rational_numbers.entries)
            if (rep.virtual_numbers.at(ij.first, ij.second) != v)
                spots[ij] = true;
        for (const auto& [ij, _] : spots)
            rep.mismatches.push_back(ij);
    }

    if (cls.degenerate) {
        bool ok = true;
        for (long long n = data.fc.ambient.lo; n <= data.fc.ambient.hi(); ++n)
            for (long long p = data.fc.p_min + 1; p <= data.fc.p_max(); ++p) {
                PairData<R> pd{data.at(p).coh, data.ambient_coh,
                               hd.step_fp[static_cast<size_t>(p - data.fc.p_min)], hd.ambient_fp,
                               data.at(p).inclusion};
                ok = ok && identification_check(ring, pd, n);
            }
        rep.identification_ok = ok;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// ramification threshold
// ---------------------------------------------------------------------------

struct Threshold {
    long long p = 0, e = 1, T = 0;
};

inline Threshold threshold(long long p, long long e)
{
    require(p >= 2 && e >= 1, "invalid-argument", "threshold needs a prime and e >= 1");
    Threshold t{p, e, 0};
    while ((t.T + 1) * e < p - 1)
        ++t.T;
    require(t.T * e < p - 1, "internal", "threshold maximization failed");
    return t;
}

// ---------------------------------------------------------------------------
// condition ledger
// ---------------------------------------------------------------------------

enum class Tri { yes, no, unknown };

inline const char* tri_name(Tri t)
{
    switch (t) {
    case Tri::yes: return "true";
    case Tri::no: return "false";
    default: return "unknown";
    }
}

// everything the ledger needs, producible from a filtered complex or from an
// explicitly supplied page run
struct DegeneracyFacts {
    struct Degree {
        bool rank_additive = false;
        long long ambient_torsion_length = 0;
        long long graded_torsion_length = 0;
        bool torsion_multiset_match = false;
    };
    std::map<long long, Degree> degrees;
    std::optional<bool> degenerate, saturated, split;  // global, when known
    std::optional<bool> hodge_equal;                   // entrywise table equality, when known
};

template <class R>
DegeneracyFacts degeneracy_facts(const R& ring, const FilteredData<R>& data)
{
    DegeneracyFacts facts;
    const auto& C = data.fc.ambient;
    for (long long i = C.lo; i <= C.hi(); ++i) {
        DegeneracyFacts::Degree row;
        row.rank_additive = rank_additive(ring, data, i);
        FinModule H = data.ambient_coh.module_at(ring, i);
        row.ambient_torsion_length = H.length();
        std::vector<long long> pooled;
        for (long long p = data.fc.p_min; p <= data.fc.p_max(); ++p) {
            FinModule g = gr_module(ring, data, i, p);
            row.graded_torsion_length += g.length();
            pooled.insert(pooled.end(), g.torsion.begin(), g.torsion.end());
        }
        std::sort(pooled.begin(), pooled.end());
        row.torsion_multiset_match =
            row.ambient_torsion_length == row.graded_torsion_length && pooled == H.torsion;
        facts.degrees.emplace(i, row);
    }
    DegeneracyReport cls = classify(ring, data);
    facts.degenerate = cls.degenerate;
    facts.saturated = cls.saturated;
    facts.split = cls.split;
    if (data.fc.orientation == Orientation::decreasing) {
        EqualityReport eq = equality_theorem_check(ring, data);
        facts.hodge_equal = eq.tables_equal;
    }
    return facts;
}

struct ConditionLedger {
    Threshold thr;
    Tri c1 = Tri::unknown;  // supplied externally, never computed
    Tri c2 = Tri::unknown, c3 = Tri::unknown;  // conjugate-side torsion degeneracy up to T-1
    Tri c4 = Tri::unknown, c5 = Tri::unknown;  // filtration-side torsion degeneracy up to T-1
    Tri c6 = Tri::unknown, c7 = Tri::unknown;  // split / saturated degeneration, all degrees
    Tri c8 = Tri::unknown;                     // equality of the number tables
    std::vector<long long> window;             // degrees actually checked for c2-c5
    std::vector<std::string> notes;
    bool implications_ok = true;
    std::optional<bool> beta_consistent;       // c2 vs c4 and c3 vs c5 when both known
};

namespace detail_ledger {

// torsion degeneracy of the supplied facts over degrees [0, cutoff]
inline std::pair<Tri, Tri> windowed_torsion(const DegeneracyFacts& facts, long long cutoff,
                                            std::vector<std::string>& notes, const char* side)
{
    bool saturated = true, split = true, any_unknown = false;
    for (const auto& [i, row] : facts.degrees) {
        if (i < 0 || i > cutoff)
            continue;
        if (!row.rank_additive) {
            notes.push_back(std::string(side) + ": rank additivity fails in degree " +
                            std::to_string(i) + "; torsion conditions undefined there");
            any_unknown = true;
            continue;
        }
        if (row.ambient_torsion_length != row.graded_torsion_length)
            saturated = false;
        if (!row.torsion_multiset_match)
            split = false;
    }
    if (any_unknown)
        return {Tri::unknown, Tri::unknown};
    return {split ? Tri::yes : Tri::no, saturated ? Tri::yes : Tri::no};
}

inline Tri from_opt(const std::optional<bool>& v)
{
    if (!v)
        return Tri::unknown;
    return *v ? Tri::yes : Tri::no;
}

}  // namespace detail_ledger

inline ConditionLedger condition_ledger(const DegeneracyFacts& hdr,
                                        const std::optional<DegeneracyFacts>& ht, long long p,
                                        long long e, std::optional<bool> c1_external = std::nullopt)
{
    ConditionLedger led;
    led.thr = threshold(p, e);
    long long cutoff = led.thr.T - 1;
    for (const auto& [i, _] : hdr.degrees)
        if (i >= 0 && i <= cutoff)
            led.window.push_back(i);
    long long covered = hdr.degrees.empty() ? -1 : hdr.degrees.rbegin()->first;
    if (covered < cutoff)
        led.notes.push_back("window truncated: degrees above " + std::to_string(covered) +
                            " not supplied, threshold window ends at " + std::to_string(cutoff));

    led.c1 = detail_ledger::from_opt(c1_external);
    auto [c4, c5] = detail_ledger::windowed_torsion(hdr, cutoff, led.notes, "hodge-de-rham");
    led.c4 = c4;
    led.c5 = c5;
    if (ht) {
        auto [c2, c3] = detail_ledger::windowed_torsion(*ht, cutoff, led.notes, "hodge-tate");
        led.c2 = c2;
        led.c3 = c3;
    }
    led.c6 = detail_ledger::from_opt(hdr.split);
    led.c7 = detail_ledger::from_opt(hdr.saturated);
    led.c8 = detail_ledger::from_opt(hdr.hodge_equal);

    auto implies = [&](Tri a, Tri b, const char* what) {
        if (a == Tri::yes && b == Tri::no) {
            led.implications_ok = false;
            led.notes.push_back(std::string("implication violated: ") + what);
        }
    };
    implies(led.c2, led.c3, "split torsion => saturated torsion (conjugate side)");
    implies(led.c4, led.c5, "split torsion => saturated torsion");
    implies(led.c6, led.c7, "split degenerate => saturated degenerate");
    implies(led.c7, led.c8, "saturated degenerate => equality of number tables");

    if (ht && led.c2 != Tri::unknown && led.c4 != Tri::unknown)
        led.beta_consistent = (led.c2 == led.c4) &&
                              (led.c3 == Tri::unknown || led.c5 == Tri::unknown || led.c3 == led.c5);
    return led;
}

}  // namespace dvrss
