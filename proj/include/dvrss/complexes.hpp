#pragma once

// Bounded cochain complexes of finite free modules: cohomology with cocycle
// witnesses, maps of complexes and their induced maps, RHom(-, R) duality,
// mod-pi reduction and the comparison map H(C)/pi -> H(C/pi).

#include <map>
#include <vector>

#include "dvrss/modules.hpp"

namespace dvrss {

template <class R>
struct FreeComplex {
    long long lo = 0;                // lowest degree carrying a module
    std::vector<long long> ranks;    // ranks[k] = rank in degree lo + k
    std::vector<Matrix<R>> d;        // d[k]: degree lo+k -> lo+k+1, shape ranks[k+1] x ranks[k]

    long long hi() const { return lo + static_cast<long long>(ranks.size()) - 1; }
    bool in_window(long long i) const { return i >= lo && i <= hi(); }
    long long rank_at(long long i) const
    {
        return in_window(i) ? ranks[static_cast<size_t>(i - lo)] : 0;
    }
    Matrix<R> d_at(long long i) const
    {
        if (in_window(i) && in_window(i + 1))
            return d[static_cast<size_t>(i - lo)];
        return mat::zero<R>(rank_at(i + 1), rank_at(i));
    }
};

template <class R>
FreeComplex<R> make_complex(const R& ring, long long lo, std::vector<long long> ranks,
                            std::vector<Matrix<R>> d)
{
    require(ranks.size() == d.size() + 1 || (ranks.size() <= 1 && d.empty()), "not-a-complex",
            "need one differential per consecutive pair of degrees");
    FreeComplex<R> C{lo, std::move(ranks), std::move(d)};
    for (size_t k = 0; k < C.d.size(); ++k) {
        require(C.d[k].rows == C.ranks[k + 1] && C.d[k].cols == C.ranks[k], "not-a-complex",
                "differential " + std::to_string(lo + static_cast<long long>(k)) +
                    " has the wrong shape");
        if (k > 0) {
            Matrix<R> dd = mat::mul(ring, C.d[k], C.d[k - 1]);
            require(mat::is_zero(ring, dd), "not-a-complex",
                    "d∘d is nonzero between degrees " +
                        std::to_string(lo + static_cast<long long>(k) - 1) + " and " +
                        std::to_string(lo + static_cast<long long>(k) + 1));
        }
    }
    return C;
}

template <class R>
FreeComplex<R> zero_complex()
{
    return FreeComplex<R>{0, {}, {}};
}

// per-degree matrices commuting with the differentials
template <class R>
struct ComplexMap {
    FreeComplex<R> src, dst;
    std::map<long long, Matrix<R>> f;

    Matrix<R> f_at(long long i) const
    {
        auto it = f.find(i);
        if (it != f.end())
            return it->second;
        return mat::zero<R>(dst.rank_at(i), src.rank_at(i));
    }
};

template <class R>
ComplexMap<R> make_complex_map(const R& ring, FreeComplex<R> src, FreeComplex<R> dst,
                               std::map<long long, Matrix<R>> f)
{
    ComplexMap<R> m{std::move(src), std::move(dst), std::move(f)};
    long long lo = std::min(m.src.lo, m.dst.lo);
    long long hi = std::max(m.src.hi(), m.dst.hi());
    for (long long i = lo; i <= hi; ++i) {
        Matrix<R> fi = m.f_at(i);
        require(fi.rows == m.dst.rank_at(i) && fi.cols == m.src.rank_at(i), "not-a-chain-map",
                "component in degree " + std::to_string(i) + " has the wrong shape");
        Matrix<R> a = mat::mul(ring, m.f_at(i + 1), m.src.d_at(i));
        Matrix<R> b = mat::mul(ring, m.dst.d_at(i), fi);
        require(mat::eq(ring, a, b), "not-a-chain-map",
                "components do not commute with differentials in degree " + std::to_string(i));
    }
    return m;
}

// ---------------------------------------------------------------------------
// cohomology with witnesses
// ---------------------------------------------------------------------------

// Per degree: cocycles = span of the columns of K (a saturated basis of
// ker d^i), and H^i presented on those generators with relations expressing
// im d^{i-1}. class_of turns a cocycle into generator coordinates.
template <class R>
struct Cohomology {
    FreeComplex<R> C;

    struct Degree {
        Matrix<R> cocycles;        // rank_i x z_i
        std::shared_ptr<const Snf<R>> cocycle_snf;
        Presented<R> H;
    };
    std::map<long long, Degree> deg;

    const Degree& at(long long i) const
    {
        static const Degree empty{};
        auto it = deg.find(i);
        return it == deg.end() ? empty : it->second;
    }
    FinModule module_at(const R& ring, long long i) const
    {
        auto it = deg.find(i);
        if (it == deg.end())
            return FinModule{};
        return invariants(ring, it->second.H);
    }
};

template <class R>
Cohomology<R> cohomology(const R& ring, const FreeComplex<R>& C)
{
    Cohomology<R> coh;
    coh.C = C;
    for (long long i = C.lo; i <= C.hi(); ++i) {
        typename Cohomology<R>::Degree dg;
        dg.cocycles = kernel_basis(ring, C.d_at(i));
        dg.cocycle_snf = std::make_shared<Snf<R>>(snf(ring, dg.cocycles));
        auto rel = solve_with(ring, *dg.cocycle_snf, C.d_at(i - 1));
        require(rel.has_value(), "internal", "boundaries do not lie among cocycles");
        dg.H = make_presented(ring, dg.cocycles.cols, *rel);
        coh.deg.emplace(i, std::move(dg));
    }
    return coh;
}

// coordinates of a cocycle (column in C^i) on the generators of H^i
template <class R>
Matrix<R> class_of(const R& ring, const Cohomology<R>& coh, long long i, const Matrix<R>& v)
{
    const auto& dg = coh.deg.at(i);
    auto w = solve_with(ring, *dg.cocycle_snf, v);
    require(w.has_value(), "internal", "vector is not a cocycle");
    return *w;
}

// induced map H^i(U) -> H^i(V) of a map of complexes
template <class R>
ModuleMap<R> induced_map(const R& ring, const Cohomology<R>& cohU, const Cohomology<R>& cohV,
                         const ComplexMap<R>& f, long long i)
{
    Presented<R> HU = cohU.deg.count(i) ? cohU.at(i).H : presented_free(ring, 0);
    Presented<R> HV = cohV.deg.count(i) ? cohV.at(i).H : presented_free(ring, 0);
    Matrix<R> W(HV.gens, HU.gens);
    if (HU.gens > 0 && HV.gens > 0) {
        Matrix<R> images = mat::mul(ring, f.f_at(i), cohU.at(i).cocycles);
        W = class_of(ring, cohV, i, images);
    }
    return make_module_map(ring, HU, HV, W);
}

// ---------------------------------------------------------------------------
// duality
// ---------------------------------------------------------------------------

// RHom(-, R): degree i of the dual has the rank of degree -i, with
// differentials the transposes, signed by (-1)^{i+1}
template <class R>
FreeComplex<R> dualize(const R& ring, const FreeComplex<R>& C)
{
    long long lo = -C.hi();
    std::vector<long long> ranks;
    std::vector<Matrix<R>> d;
    for (long long i = lo; i <= -C.lo; ++i)
        ranks.push_back(C.rank_at(-i));
    for (long long i = lo; i < -C.lo; ++i) {
        Matrix<R> t = mat::transpose(C.d_at(-i - 1));
        if ((i + 1) % 2 != 0)
            t = mat::neg(ring, t);
        d.push_back(std::move(t));
    }
    return make_complex(ring, lo, std::move(ranks), std::move(d));
}

// ---------------------------------------------------------------------------
// mod-pi reduction
// ---------------------------------------------------------------------------

struct FpComplex {
    long long lo = 0;
    std::vector<long long> ranks;
    std::vector<FpMat> d;

    long long hi() const { return lo + static_cast<long long>(ranks.size()) - 1; }
    bool in_window(long long i) const { return i >= lo && i <= hi(); }
    long long rank_at(long long i) const
    {
        return in_window(i) ? ranks[static_cast<size_t>(i - lo)] : 0;
    }
    FpMat d_at(long long p, long long i) const
    {
        if (in_window(i) && in_window(i + 1))
            return d[static_cast<size_t>(i - lo)];
        return FpMat(p, rank_at(i + 1), rank_at(i));
    }
};

template <class R>
FpComplex mod_pi(const R& ring, const FreeComplex<R>& C)
{
    FpComplex F;
    F.lo = C.lo;
    F.ranks = C.ranks;
    for (const auto& m : C.d)
        F.d.push_back(mat::residue_reduce(ring, m));
    return F;
}

// cohomology of an F_p complex, with coordinates: basis of cocycles plus the
// quotient by coboundaries
struct FpCohomology {
    FpComplex C;
    long long p = 2;

    struct Degree {
        FpMat cocycles;      // basis of ker d^i
        fp::Quotient by_im;  // quotient of cocycle coordinates by boundaries
    };
    std::map<long long, Degree> deg;

    long long dim_at(long long i) const
    {
        auto it = deg.find(i);
        return it == deg.end() ? 0 : it->second.by_im.dim;
    }
    // coordinates of a cocycle column (in kappa^{rank_i}) on H^i
    FpMat class_of(long long i, const FpMat& v) const
    {
        const auto& dg = deg.at(i);
        auto w = fp::solve(dg.cocycles, v);
        require(w.has_value(), "internal", "vector is not a cocycle mod pi");
        return fp::mul(dg.by_im.proj, *w);
    }
};

inline FpCohomology fp_cohomology(const FpComplex& C, long long p)
{
    FpCohomology coh;
    coh.C = C;
    coh.p = p;
    for (long long i = C.lo; i <= C.hi(); ++i) {
        FpCohomology::Degree dg;
        dg.cocycles = fp::kernel_basis(C.d_at(p, i));
        FpMat bd = C.d_at(p, i - 1);
        auto coords = fp::solve(dg.cocycles, bd);
        require(coords.has_value(), "internal", "boundaries do not lie among cocycles mod pi");
        dg.by_im = fp::quotient_map(*coords);
        coh.deg.emplace(i, std::move(dg));
    }
    return coh;
}

// H^i(C)/pi on quotient coordinates of the generators of H^i(C)
template <class R>
fp::Quotient h_mod_pi(const R& ring, const Cohomology<R>& coh, long long i)
{
    if (!coh.deg.count(i))
        return fp::quotient_map(FpMat(ring.residue_char(), 0, 0));
    return mod_pi_quotient(ring, coh.at(i).H);
}

// the comparison map H^i(C)/pi -> H^i(C mod pi); injective for bounded free
// complexes, and asserted to be so
template <class R>
FpMat compare_map(const R& ring, const Cohomology<R>& coh, const FpCohomology& fcoh, long long i,
                  const fp::Quotient& hq)
{
    long long p = ring.residue_char();
    if (!coh.deg.count(i) || coh.at(i).H.gens == 0)
        return FpMat(p, fcoh.dim_at(i), hq.dim);
    FpMat gens_classes = fcoh.class_of(i, mat::residue_reduce(ring, coh.at(i).cocycles));
    FpMat cm = fp::mul(gens_classes, hq.section);
    require(fp::rank(cm) == hq.dim, "internal",
            "comparison map H/pi -> H(C/pi) failed to be injective");
    return cm;
}

// ---------------------------------------------------------------------------
// the two subspace lemmas for a map of complexes
// ---------------------------------------------------------------------------

// Everything both lemmas need about U -> V in one bundle.
template <class R>
struct PairData {
    Cohomology<R> cohU, cohV;
    FpCohomology fpU, fpV;
    ComplexMap<R> map;
};

template <class R>
PairData<R> pair_data(const R& ring, const ComplexMap<R>& f)
{
    PairData<R> pd{cohomology(ring, f.src), cohomology(ring, f.dst),
                   fp_cohomology(mod_pi(ring, f.src), ring.residue_char()),
                   fp_cohomology(mod_pi(ring, f.dst), ring.residue_char()), f};
    return pd;
}

// Im(H^n(U)/pi -> H^n(V)/pi) inside H^n(V)/pi, as a subspace on quotient
// coordinates
template <class R>
FpMat image_mod_pi(const R& ring, const PairData<R>& pd, long long n, const fp::Quotient& hqV)
{
    ModuleMap<R> ind = induced_map(ring, pd.cohU, pd.cohV, pd.map, n);
    FpMat W = mat::residue_reduce(ring, ind.f);
    return fp::column_space_basis(fp::mul(hqV.proj, W));
}

// Im(H^n(U/pi) -> H^n(V/pi)) ∩ H^n(V)/pi, pulled back to quotient coordinates
// of H^n(V)/pi through the (injective) comparison map
template <class R>
FpMat double_image_subspace(const R& ring, const PairData<R>& pd, long long n,
                            const fp::Quotient& hqV, const FpMat& cmV)
{
    long long p = ring.residue_char();
    long long nu = pd.fpU.C.rank_at(n);
    FpMat img(p, pd.fpV.dim_at(n), 0);
    if (nu > 0 && pd.fpU.deg.count(n)) {
        FpMat cocyclesU = pd.fpU.deg.at(n).cocycles;
        FpMat mapped = fp::mul(mat::residue_reduce(ring, pd.map.f_at(n)), cocyclesU);
        img = fp::column_space_basis(pd.fpV.class_of(n, mapped));
    }
    FpMat inter = fp::intersect(img, fp::column_space_basis(cmV));
    auto pulled = fp::solve(cmV, inter);
    require(pulled.has_value(), "internal", "intersection failed to pull back");
    return fp::column_space_basis(*pulled);
}

// identification of subspaces of H^n(V)/pi, assuming H^{n+1}(U) -> H^{n+1}(V)
// is injective
template <class R>
bool identification_check(const R& ring, const PairData<R>& pd, long long n)
{
    ModuleMap<R> next = induced_map(ring, pd.cohU, pd.cohV, pd.map, n + 1);
    require(is_injective(ring, next), "precondition-fails",
            "H^{n+1}(U) -> H^{n+1}(V) is not injective");
    fp::Quotient hqV = h_mod_pi(ring, pd.cohV, n);
    FpMat cmV = compare_map(ring, pd.cohV, pd.fpV, n, hqV);
    FpMat lhs = image_mod_pi(ring, pd, n, hqV);
    FpMat rhs = double_image_subspace(ring, pd, n, hqV, cmV);
    return fp::subspace_eq(lhs, rhs);
}

// dim_K of the rational image versus the kappa-dimension of the double-image
// subspace pushed into H^n(V)_tf/pi; preconditions: the image of
// H^n(U) -> H^n(V)_tf is saturated and H^{n+1}(U) -> H^{n+1}(V) is injective
template <class R>
std::pair<long long, long long> dimension_equality(const R& ring, const PairData<R>& pd,
                                                   long long n)
{
    ModuleMap<R> next = induced_map(ring, pd.cohU, pd.cohV, pd.map, n + 1);
    require(is_injective(ring, next), "precondition-fails",
            "H^{n+1}(U) -> H^{n+1}(V) is not injective");
    ModuleMap<R> ind = induced_map(ring, pd.cohU, pd.cohV, pd.map, n);
    Matrix<R> tf_image = mat::mul(ring, tf_projection(ring, ind.dst), ind.f);
    require(span_is_saturated(ring, tf_image), "precondition-fails",
            "image of H^n(U) in H^n(V)_tf is not saturated");

    long long lhs = rank_K(ring, tf_image);

    fp::Quotient hqV = h_mod_pi(ring, pd.cohV, n);
    FpMat cmV = compare_map(ring, pd.cohV, pd.fpV, n, hqV);
    FpMat dbl = double_image_subspace(ring, pd, n, hqV, cmV);
    // push H^n(V)/pi onto H^n(V)_tf/pi
    FpMat tf_bar = mat::residue_reduce(ring, tf_projection(ring, ind.dst));
    FpMat push = fp::mul(tf_bar, hqV.section);
    long long rhs = fp::rank(fp::mul(push, dbl));
    return {lhs, rhs};
}

}  // namespace dvrss
