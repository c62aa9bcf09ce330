#pragma once

// Finitely generated modules over the DVR, presented as coker(rel) with the
// Smith form cached: torsion decomposition, lengths, characteristic polygons
// and their order, saturation tests, retraction-based splitting, and the
// cyclic-extension classifier.

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dvrss/fp.hpp"
#include "dvrss/matrix.hpp"

namespace dvrss {

// isomorphism class of a finitely generated module: free rank plus the
// ascending torsion exponents (invariant factors)
struct FinModule {
    long long free_rank = 0;
    std::vector<long long> torsion;

    long long length() const
    {
        return std::accumulate(torsion.begin(), torsion.end(), 0ll);
    }
    bool is_torsion() const { return free_rank == 0; }
    bool is_zero() const { return free_rank == 0 && torsion.empty(); }
    long long mod_pi_dim() const
    {
        return free_rank + static_cast<long long>(torsion.size());
    }
    friend bool operator==(const FinModule&, const FinModule&) = default;

    static FinModule free(long long r) { return FinModule{r, {}}; }
    static FinModule cyclic(long long e)
    {
        return e > 0 ? FinModule{0, {e}} : FinModule{0, {}};
    }
    static FinModule direct_sum(const FinModule& a, const FinModule& b)
    {
        FinModule s{a.free_rank + b.free_rank, a.torsion};
        s.torsion.insert(s.torsion.end(), b.torsion.begin(), b.torsion.end());
        std::sort(s.torsion.begin(), s.torsion.end());
        return s;
    }
};

inline std::string to_string(const FinModule& m)
{
    std::string s = "free " + std::to_string(m.free_rank) + ", torsion [";
    for (size_t i = 0; i < m.torsion.size(); ++i)
        s += (i ? "," : "") + std::to_string(m.torsion[i]);
    return s + "]";
}

// M = R^gens / column span of rel, with the Smith form of rel cached.
// In the basis given by the columns of rel_snf.u, the module is
// ⊕_{k<rank} R/pi^{e_k} ⊕ R^{gens-rank}; slot bookkeeping below leans on that.
template <class R>
struct Presented {
    long long gens = 0;
    Matrix<R> rel;
    std::shared_ptr<const Snf<R>> nf;

    const Snf<R>& normal() const { return *nf; }
    long long rel_rank() const { return nf->rank; }
    long long tf_rank() const { return gens - nf->rank; }
};

template <class R>
Presented<R> make_presented(const R& ring, long long gens, Matrix<R> rel)
{
    require(rel.rows == gens, "dimension-mismatch", "relation matrix must have one row per generator");
    Presented<R> p;
    p.gens = gens;
    p.rel = std::move(rel);
    p.nf = std::make_shared<Snf<R>>(snf(ring, p.rel));
    return p;
}

template <class R>
Presented<R> presented_free(const R& ring, long long n)
{
    return make_presented(ring, n, mat::zero<R>(n, 0));
}

// ⊕ R/pi^{e_i} ⊕ R^{free} with the diagonal presentation
template <class R>
Presented<R> presented_from_invariants(const R& ring, const FinModule& m)
{
    long long t = static_cast<long long>(m.torsion.size());
    Matrix<R> rel(t + m.free_rank, t);
    for (long long i = 0; i < t; ++i)
        rel.at(i, i) = ring.pi_pow(m.torsion[static_cast<size_t>(i)]);
    return make_presented(ring, t + m.free_rank, std::move(rel));
}

template <class R>
FinModule invariants(const R&, const Presented<R>& p)
{
    FinModule m;
    m.free_rank = p.gens - p.nf->rank;
    for (long long e : p.nf->exponents)
        if (e > 0)
            m.torsion.push_back(e);
    std::sort(m.torsion.begin(), m.torsion.end());
    return m;
}

// does v (a column vector over R^gens) lie in the span of the relations?
template <class R>
bool in_relations(const R& ring, const Presented<R>& p, const Matrix<R>& v)
{
    return solve_with(ring, p.normal(), v).has_value();
}

template <class R>
bool is_zero_in(const R& ring, const Presented<R>& p, const Matrix<R>& v)
{
    return in_relations(ring, p, v);
}

// projection R^gens -> R^{tf_rank} onto torsion-free coordinates
template <class R>
Matrix<R> tf_projection(const R&, const Presented<R>& p)
{
    return mat::take_rows(p.nf->u_inv, p.nf->rank, p.gens - p.nf->rank);
}

// section R^{tf_rank} -> R^gens (basis of a complement of the torsion part)
template <class R>
Matrix<R> tf_section(const R&, const Presented<R>& p)
{
    return mat::take_columns(p.nf->u, p.nf->rank, p.gens - p.nf->rank);
}

// generators (inside R^gens) of the torsion submodule
template <class R>
Matrix<R> torsion_gens(const R&, const Presented<R>& p)
{
    std::vector<long long> slots;
    for (long long k = 0; k < p.nf->rank; ++k)
        if (p.nf->exponents[static_cast<size_t>(k)] > 0)
            slots.push_back(k);
    Matrix<R> T(p.gens, static_cast<long long>(slots.size()));
    for (size_t j = 0; j < slots.size(); ++j)
        for (long long i = 0; i < p.gens; ++i)
            T.at(i, static_cast<long long>(j)) = p.nf->u.at(i, slots[j]);
    return T;
}

// mod-pi coordinates of a presented module: kappa^gens / (rel mod pi)
template <class R>
fp::Quotient mod_pi_quotient(const R& ring, const Presented<R>& p)
{
    return fp::quotient_map(mat::residue_reduce(ring, p.rel));
}

// ---------------------------------------------------------------------------
// maps of presented modules
// ---------------------------------------------------------------------------

template <class R>
struct ModuleMap {
    Presented<R> src, dst;
    Matrix<R> f;  // dst.gens x src.gens, on generators
};

template <class R>
ModuleMap<R> make_module_map(const R& ring, Presented<R> src, Presented<R> dst, Matrix<R> f)
{
    require(f.rows == dst.gens && f.cols == src.gens, "dimension-mismatch",
            "map matrix shape mismatch");
    // well-definedness: relations of the source land in relations of the target
    Matrix<R> carried = mat::mul(ring, f, src.rel);
    require(solve_with(ring, dst.normal(), carried).has_value(), "ill-defined-map",
            "matrix does not carry source relations into target relations");
    return ModuleMap<R>{std::move(src), std::move(dst), std::move(f)};
}

template <class R>
ModuleMap<R> compose(const R& ring, const ModuleMap<R>& g, const ModuleMap<R>& f)
{
    return make_module_map(ring, f.src, g.dst, mat::mul(ring, g.f, f.f));
}

// generators (inside R^{src.gens}) of ker(f)
template <class R>
Matrix<R> kernel_gens(const R& ring, const ModuleMap<R>& m)
{
    return preimage_gens(ring, m.f, m.dst.rel);
}

template <class R>
bool is_injective(const R& ring, const ModuleMap<R>& m)
{
    Matrix<R> K = kernel_gens(ring, m);
    for (long long j = 0; j < K.cols; ++j)
        if (!in_relations(ring, m.src, mat::take_columns(K, j, 1)))
            return false;
    return true;
}

// induced matrix on torsion-free coordinates
template <class R>
Matrix<R> tf_matrix(const R& ring, const ModuleMap<R>& m)
{
    return mat::mul(ring, mat::mul(ring, tf_projection(ring, m.dst), m.f),
                    tf_section(ring, m.src));
}

// quotient dst / im(f) as a presented module
template <class R>
Presented<R> cokernel_module(const R& ring, const ModuleMap<R>& m)
{
    return make_presented(ring, m.dst.gens, mat::hstack(m.dst.rel, m.f));
}

// the submodule of `target` spanned by columns of gens (in R^{target.gens}),
// as a presented module together with its inclusion map
template <class R>
ModuleMap<R> submodule_inclusion(const R& ring, const Presented<R>& target, const Matrix<R>& gens)
{
    Matrix<R> full = mat::hstack(gens, target.rel);
    Matrix<R> basis = image_basis(ring, full);
    auto rel = solve(ring, basis, target.rel);
    require(rel.has_value(), "internal", "submodule relation computation failed");
    Presented<R> sub = make_presented(ring, basis.cols, *rel);
    return make_module_map(ring, sub, target, basis);
}

// subquotient span(num_gens)/span(den_gens) of `target`; den must lie in num
template <class R>
Presented<R> subquotient_module(const R& ring, const Presented<R>& target,
                                const Matrix<R>& num_gens, const Matrix<R>& den_gens)
{
    Matrix<R> full = mat::hstack(num_gens, target.rel);
    Matrix<R> basis = image_basis(ring, full);
    auto rel = solve(ring, basis, mat::hstack(den_gens, target.rel));
    require(rel.has_value(), "invalid-filtration", "denominator does not lie in numerator span");
    return make_presented(ring, basis.cols, *rel);
}

// ---------------------------------------------------------------------------
// characteristic polygons
// ---------------------------------------------------------------------------

struct CharPolygon {
    std::vector<long long> exponents;  // ascending

    long long width() const { return static_cast<long long>(exponents.size()); }
    long long height() const
    {
        return std::accumulate(exponents.begin(), exponents.end(), 0ll);
    }
    // value of the piecewise-linear function at integer x, extended as a
    // constant past the last vertex
    long long value_at(long long x) const
    {
        long long y = 0;
        for (long long k = 0; k < std::min<long long>(x, width()); ++k)
            y += exponents[static_cast<size_t>(k)];
        return y;
    }
    std::vector<std::pair<long long, long long>> vertices() const
    {
        std::vector<std::pair<long long, long long>> v{{0, 0}};
        long long y = 0;
        for (long long k = 0; k < width(); ++k) {
            y += exponents[static_cast<size_t>(k)];
            v.emplace_back(k + 1, y);
        }
        return v;
    }
};

inline CharPolygon char_polygon(const FinModule& m)
{
    require(m.is_torsion(), "not-torsion", "characteristic polygon of a non-torsion module");
    return CharPolygon{m.torsion};
}

struct PolygonOrder {
    bool leq = false;
    bool geq = false;
    bool equal = false;
};

// pointwise order on the polygon functions; vertices sit at integers, so
// comparing there is exact. Both sides are extended as constants past their
// own width, which only ever kicks in for the wider-versus-narrower overhang.
inline PolygonOrder polygon_compare(const CharPolygon& P, const CharPolygon& Q)
{
    require(P.height() == Q.height(), "length-mismatch",
            "polygon comparison requires equal total lengths");
    PolygonOrder ord;
    ord.leq = ord.geq = true;
    long long w = std::max(P.width(), Q.width());
    for (long long x = 0; x <= w; ++x) {
        long long a = P.value_at(x), b = Q.value_at(x);
        if (a > b)
            ord.leq = false;
        if (a < b)
            ord.geq = false;
    }
    ord.equal = P.exponents == Q.exponents;
    return ord;
}

inline bool polygon_leq(const CharPolygon& P, const CharPolygon& Q)
{
    return polygon_compare(P, Q).leq;
}

// ---------------------------------------------------------------------------
// splitting of injections
// ---------------------------------------------------------------------------

// Does an injection f: N -> M admit a retraction r with r∘f = id? Decided by
// exact solvability of the linear system for r on generators:
//   X * rel_M = rel_N * Y        (well-definedness)
//   X * F     = I + rel_N * Z    (retraction on generators)
template <class R>
bool splits_retraction(const R& ring, const ModuleMap<R>& m)
{
    require(is_injective(ring, m), "not-injective", "splits_retraction needs an injection");
    long long gn = m.src.gens, gm = m.dst.gens;
    long long kn = m.src.rel.cols, km = m.dst.rel.cols;

    long long n_x = gn * gm, n_y = kn * km, n_z = kn * gn;
    long long rows_1 = gn * km, rows_2 = gn * gn;
    Matrix<R> sys(rows_1 + rows_2, n_x + n_y + n_z);
    Matrix<R> rhs(rows_1 + rows_2, 1);

    auto xid = [&](long long i, long long j) { return i * gm + j; };          // X[i][j], i<gn
    auto yid = [&](long long i, long long j) { return n_x + i * km + j; };    // Y[i][j], i<kn
    auto zid = [&](long long i, long long j) { return n_x + n_y + i * gn + j; };

    // block 1: (X * rel_M)[i][c] - (rel_N * Y)[i][c] = 0
    for (long long i = 0; i < gn; ++i)
        for (long long c = 0; c < km; ++c) {
            long long row = i * km + c;
            for (long long t = 0; t < gm; ++t)
                sys.at(row, xid(i, t)) = m.dst.rel.at(t, c);
            for (long long t = 0; t < kn; ++t)
                sys.at(row, yid(t, c)) = ring.neg(m.src.rel.at(i, t));
        }
    // block 2: (X * F)[i][c] - (rel_N * Z)[i][c] = delta_{ic}
    for (long long i = 0; i < gn; ++i)
        for (long long c = 0; c < gn; ++c) {
            long long row = rows_1 + i * gn + c;
            for (long long t = 0; t < gm; ++t)
                sys.at(row, xid(i, t)) = m.f.at(t, c);
            for (long long t = 0; t < kn; ++t)
                sys.at(row, zid(t, c)) = ring.neg(m.src.rel.at(i, t));
            if (i == c)
                rhs.at(row, 0) = ring.one();
        }
    return solve(ring, sys, rhs).has_value();
}

// induced map N/pi -> M/pi, on mod-pi quotient coordinates
template <class R>
FpMat mod_pi_induced(const R& ring, const ModuleMap<R>& m, const fp::Quotient& qsrc,
                     const fp::Quotient& qdst)
{
    return fp::mul(qdst.proj, fp::mul(mat::residue_reduce(ring, m.f), qsrc.section));
}

template <class R>
bool mod_pi_injective(const R& ring, const ModuleMap<R>& m)
{
    fp::Quotient qs = mod_pi_quotient(ring, m.src);
    fp::Quotient qd = mod_pi_quotient(ring, m.dst);
    FpMat ind = mod_pi_induced(ring, m, qs, qd);
    return fp::rank(ind) == qs.dim;
}

// polygon criterion for an injection of torsion modules with N/pi -> M/pi
// injective: split exactly when P_M equals P_{N ⊕ M/N}
template <class R>
bool splits_polygon(const R& ring, const ModuleMap<R>& m)
{
    FinModule M = invariants(ring, m.dst);
    require(M.is_torsion(), "not-torsion", "polygon splitting criterion needs a torsion module");
    require(is_injective(ring, m), "not-injective", "splits_polygon needs an injection");
    require(mod_pi_injective(ring, m), "mod-pi-not-injective",
            "N/pi -> M/pi is not injective; use splits_retraction");
    FinModule N = invariants(ring, m.src);
    FinModule Q = invariants(ring, cokernel_module(ring, m));
    FinModule NQ = FinModule::direct_sum(N, Q);
    return char_polygon(M).exponents == char_polygon(NQ).exponents;
}

// middle term of the extension of R/pi^m by R/pi^l with the given class
// parameter, via the 2x2 presentation [[pi^l, c], [0, pi^m]]
template <class R>
FinModule classify_cyclic_extension(const R& ring, long long l, long long m,
                                    const typename R::Elem& class_parameter)
{
    require(l >= 1 && m >= 1, "invalid-argument", "extension exponents must be >= 1");
    Matrix<R> rel(2, 2);
    rel.at(0, 0) = ring.pi_pow(l);
    rel.at(0, 1) = class_parameter;
    rel.at(1, 1) = ring.pi_pow(m);
    auto inv = cokernel_invariants(ring, rel);
    return FinModule{inv.free_rank, inv.exponents};
}

// ---------------------------------------------------------------------------
// saturation
// ---------------------------------------------------------------------------

// f: N -> M injective with both torsion-free; saturated iff coker is torsion-free
template <class R>
bool is_saturated_inclusion(const R& ring, const ModuleMap<R>& m)
{
    require(invariants(ring, m.src).torsion.empty() && invariants(ring, m.dst).torsion.empty(),
            "not-torsion-free", "saturation test is for inclusions of torsion-free modules");
    require(is_injective(ring, m), "not-injective", "saturation test needs an injection");
    return invariants(ring, cokernel_module(ring, m)).torsion.empty();
}

// is the span of S (columns in R^n) a saturated submodule of R^n?
template <class R>
bool span_is_saturated(const R& ring, const Matrix<R>& S)
{
    return cokernel_invariants(ring, S).exponents.empty();
}

struct SaturationDefect {
    long long tor_length = 0;   // length(M_tor)
    long long graded_sum = 0;   // sum of length(Gr^i_tor)
    bool all_steps_saturated = false;
};

// filtration: generator matrices of 0 ⊆ F^0 ⊆ F^1 ⊆ ... ⊆ F^{k-1}, with
// F^{k-1} required to exhaust M
template <class R>
SaturationDefect saturation_defect(const R& ring, const Presented<R>& M,
                                   const std::vector<Matrix<R>>& filtration)
{
    require(!filtration.empty(), "invalid-filtration", "empty filtration");
    for (const auto& S : filtration)
        require(S.rows == M.gens, "invalid-filtration", "filtration generators live in the wrong module");
    // chain condition
    for (size_t i = 0; i + 1 < filtration.size(); ++i) {
        Matrix<R> big = mat::hstack(filtration[i + 1], M.rel);
        require(solve(ring, big, filtration[i]).has_value(), "invalid-filtration",
                "filtration steps are not nested");
    }
    // exhaustive: the last step spans M
    {
        Matrix<R> big = mat::hstack(filtration.back(), M.rel);
        require(solve(ring, big, mat::identity(ring, M.gens)).has_value(), "invalid-filtration",
                "filtration does not exhaust the module");
    }

    SaturationDefect d;
    d.tor_length = invariants(ring, M).length();
    Matrix<R> prev = mat::zero<R>(M.gens, 0);
    for (const auto& S : filtration) {
        Presented<R> gr = subquotient_module(ring, M, S, prev);
        d.graded_sum += invariants(ring, gr).length();
        prev = S;
    }

    Matrix<R> proj = tf_projection(ring, M);
    d.all_steps_saturated = true;
    for (const auto& S : filtration)
        if (!span_is_saturated(ring, mat::mul(ring, proj, S)))
            d.all_steps_saturated = false;
    return d;
}

// all F^i are direct summands once M is abstractly the sum of its graded pieces
template <class R>
bool multifiltration_split_check(const R& ring, const Presented<R>& M,
                                 const std::vector<Matrix<R>>& filtration)
{
    FinModule Minv = invariants(ring, M);
    FinModule graded{0, {}};
    Matrix<R> prev = mat::zero<R>(M.gens, 0);
    for (const auto& S : filtration) {
        Presented<R> gr = subquotient_module(ring, M, S, prev);
        graded = FinModule::direct_sum(graded, invariants(ring, gr));
        prev = S;
    }
    require(Minv == graded, "hypothesis-fails",
            "module is not abstractly isomorphic to the sum of its graded pieces");
    for (const auto& S : filtration) {
        ModuleMap<R> inc = submodule_inclusion(ring, M, S);
        if (!splits_retraction(ring, inc))
            return false;
    }
    return true;
}

// dim_K N[1/pi] versus dim_kappa Im(N/pi -> M_tf/pi) for a saturated pair
template <class R>
std::pair<long long, long long> dim_reading(const R& ring, const ModuleMap<R>& m)
{
    require(is_injective(ring, m), "not-injective", "dim_reading needs an injection");
    Matrix<R> tfm = mat::mul(ring, tf_projection(ring, m.dst), m.f);
    require(span_is_saturated(ring, tfm), "not-saturated",
            "N_tf is not saturated inside M_tf");
    long long lhs = invariants(ring, m.src).free_rank;
    long long rhs = fp::rank(mat::residue_reduce(ring, tfm));
    return {lhs, rhs};
}

}  // namespace dvrss
