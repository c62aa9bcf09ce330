#pragma once

// Seeded random instances: elements, matrices, unimodular transforms, and
// (further down) modules, complexes and filtered complexes for the property
// suites. Everything is driven by the deterministic Rng so identical seeds
// reproduce identical instances on any platform.

#include <map>
#include <vector>

#include "dvrss/matrix.hpp"
#include "dvrss/modules.hpp"
#include "dvrss/rings.hpp"
#include "dvrss/rng.hpp"
#include "dvrss/spectral.hpp"

namespace dvrss::gen {

// random unit of the ring (valuation exactly 0)
inline BigRat random_p_unit(Rng& rng, long long p)
{
    long long num = rng.range(1, 9);
    while (num % p == 0)
        ++num;
    long long den = rng.range(1, 9);
    while (den % p == 0)
        ++den;
    BigRat u(num, den);
    return rng.chance(1, 2) ? BigRat(-u) : u;
}

inline typename PLocalIntegers::Elem random_unit(Rng& rng, const PLocalIntegers& ring)
{
    return random_p_unit(rng, ring.p);
}

inline typename LocalPolynomials::Elem random_unit(Rng& rng, const LocalPolynomials& ring)
{
    FpPoly num, den;
    num.c = {rng.range(1, ring.p - 1)};
    for (int k = 1; k <= 2; ++k)
        if (rng.chance(1, 2))
            num.c.push_back(rng.range(0, ring.p - 1));
    den.c = {rng.range(1, ring.p - 1)};
    if (rng.chance(1, 3))
        den.c.push_back(rng.range(0, ring.p - 1));
    return ring.normalize(fppoly::trim(num), fppoly::trim(den));
}

inline typename RamifiedQuadratic::Elem random_unit(Rng& rng, const RamifiedQuadratic& ring)
{
    QuadElem e{random_p_unit(rng, ring.p), 0};
    if (rng.chance(1, 2))
        e.b = random_p_unit(rng, ring.p) * ring.p;  // keeps valuation at 0
    if (rng.chance(1, 3))
        e.b = random_p_unit(rng, ring.p);
    return e;
}

// random element with valuation in [0, max_val], or zero
template <class R>
typename R::Elem random_element(Rng& rng, const R& ring, long long max_val, bool allow_zero = true)
{
    if (allow_zero && rng.chance(1, 5))
        return ring.zero();
    long long v = rng.range(0, max_val);
    return ring.mul(ring.pi_pow(v), random_unit(rng, ring));
}

template <class R>
Matrix<R> random_matrix(Rng& rng, const R& ring, long long rows, long long cols, long long max_val)
{
    Matrix<R> A(rows, cols);
    for (long long i = 0; i < rows; ++i)
        for (long long j = 0; j < cols; ++j)
            A.at(i, j) = random_element(rng, ring, max_val);
    return A;
}

// random unimodular matrix built from elementary operations
template <class R>
Matrix<R> random_unimodular(Rng& rng, const R& ring, long long n, long long ops = -1)
{
    Matrix<R> M = mat::identity(ring, n);
    if (n <= 1) {
        if (n == 1)
            M.at(0, 0) = random_unit(rng, ring);
        return M;
    }
    if (ops < 0)
        ops = 2 * n + 2;
    for (long long k = 0; k < ops; ++k) {
        long long i = rng.range(0, n - 1);
        long long j = rng.range(0, n - 1);
        switch (rng.below(3)) {
        case 0: {  // row_i += c * row_j
            if (i == j)
                break;
            auto c = random_element(rng, ring, 2, false);
            for (long long t = 0; t < n; ++t)
                M.at(i, t) = ring.add(M.at(i, t), ring.mul(c, M.at(j, t)));
            break;
        }
        case 1: {  // swap rows
            if (i == j)
                break;
            for (long long t = 0; t < n; ++t)
                std::swap(M.at(i, t), M.at(j, t));
            break;
        }
        default: {  // scale a row by a unit
            auto u = random_unit(rng, ring);
            for (long long t = 0; t < n; ++t)
                M.at(i, t) = ring.mul(u, M.at(i, t));
            break;
        }
        }
    }
    return M;
}

// ---------------------------------------------------------------------------
// random perfect complexes with known cohomology
// ---------------------------------------------------------------------------

// Split model: a direct sum of two-term pieces [R --pi^e--> R] and free
// one-term summands, then conjugated degreewise by unimodular automorphisms.
// The conjugated complex is isomorphic to the split model, so the expected
// cohomology below is exact.
struct ComplexRecipe {
    long long lo = 0;
    std::vector<long long> free_singles;               // per degree offset
    std::vector<std::vector<long long>> two_term_exp;  // pieces between k and k+1
};

inline ComplexRecipe random_complex_recipe(Rng& rng, long long lo, long long width,
                                           long long max_pieces, long long max_exp)
{
    ComplexRecipe rec;
    rec.lo = lo;
    rec.free_singles.assign(static_cast<size_t>(width), 0);
    rec.two_term_exp.assign(static_cast<size_t>(width > 0 ? width - 1 : 0), {});
    for (long long k = 0; k < width; ++k)
        rec.free_singles[static_cast<size_t>(k)] = rng.range(0, 1);
    for (long long k = 0; k + 1 < width; ++k) {
        long long n = rng.range(0, max_pieces);
        for (long long t = 0; t < n; ++t)
            rec.two_term_exp[static_cast<size_t>(k)].push_back(rng.range(0, max_exp));
    }
    return rec;
}

inline std::map<long long, FinModule> expected_cohomology(const ComplexRecipe& rec)
{
    std::map<long long, FinModule> h;
    long long width = static_cast<long long>(rec.free_singles.size());
    for (long long k = 0; k < width; ++k) {
        FinModule m = FinModule::free(rec.free_singles[static_cast<size_t>(k)]);
        if (k > 0)
            for (long long e : rec.two_term_exp[static_cast<size_t>(k - 1)])
                if (e > 0)
                    m.torsion.push_back(e);
        std::sort(m.torsion.begin(), m.torsion.end());
        if (!m.is_zero())
            h[rec.lo + k] = m;
    }
    return h;
}

struct Piece {  // first use of degree slots when laying out the split model
    long long src_index, dst_index, exp;
};

template <class R>
struct BuiltComplex {
    long long lo = 0;
    std::vector<long long> ranks;
    std::vector<Matrix<R>> d;
};

template <class R>
BuiltComplex<R> build_split_complex(const R& ring, const ComplexRecipe& rec)
{
    long long width = static_cast<long long>(rec.free_singles.size());
    BuiltComplex<R> b;
    b.lo = rec.lo;
    b.ranks.assign(static_cast<size_t>(width), 0);
    std::vector<std::vector<Piece>> pieces(static_cast<size_t>(width > 0 ? width - 1 : 0));
    for (long long k = 0; k + 1 < width; ++k)
        for (long long e : rec.two_term_exp[static_cast<size_t>(k)]) {
            Piece pc;
            pc.src_index = b.ranks[static_cast<size_t>(k)]++;
            pc.dst_index = b.ranks[static_cast<size_t>(k + 1)]++;
            pc.exp = e;
            pieces[static_cast<size_t>(k)].push_back(pc);
        }
    for (long long k = 0; k < width; ++k)
        b.ranks[static_cast<size_t>(k)] += rec.free_singles[static_cast<size_t>(k)];
    for (long long k = 0; k + 1 < width; ++k) {
        Matrix<R> m(b.ranks[static_cast<size_t>(k + 1)], b.ranks[static_cast<size_t>(k)]);
        for (const Piece& pc : pieces[static_cast<size_t>(k)])
            m.at(pc.dst_index, pc.src_index) = ring.pi_pow(pc.exp);
        b.d.push_back(std::move(m));
    }
    return b;
}

// degreewise unimodular change of basis: d'_k = P_{k+1} d_k P_k^{-1}
template <class R>
BuiltComplex<R> conjugate_complex(Rng& rng, const R& ring, const BuiltComplex<R>& b)
{
    long long width = static_cast<long long>(b.ranks.size());
    std::vector<Matrix<R>> P, Pinv;
    for (long long k = 0; k < width; ++k) {
        Matrix<R> m = random_unimodular(rng, ring, b.ranks[static_cast<size_t>(k)]);
        Pinv.push_back(inverse_unimodular(ring, m));
        P.push_back(std::move(m));
    }
    BuiltComplex<R> c;
    c.lo = b.lo;
    c.ranks = b.ranks;
    for (long long k = 0; k + 1 < width; ++k)
        c.d.push_back(mat::mul(ring, mat::mul(ring, P[static_cast<size_t>(k + 1)],
                                              b.d[static_cast<size_t>(k)]),
                               Pinv[static_cast<size_t>(k)]));
    return c;
}

// ---------------------------------------------------------------------------
// random filtered complexes with guaranteed rank additivity
// ---------------------------------------------------------------------------

// Construction: independent split layers (one per filtration index), summed
// into the ambient complex; Fil^p spans the layers with index >= p, with each
// slot scaled by a power of pi. Scale exponents are nondecreasing in p, zero
// at p = 0, and staircase bumps on a two-term piece never exceed the piece's
// differential exponent, so every step is a genuine subcomplex. Over the
// fraction field the scalings disappear and the filtration is split, making
// rank additivity automatic while the integral behavior ranges over all four
// degeneracy classes:
//   split:     all scales zero
//   saturated: staircase bumps on two-term pieces only
//   defective: bumps on free one-term slots only (degenerate, unsaturated)
//   general:   any mixture, including non-degenerate whole-piece bumps
enum class FilteredFlavor { split, saturated, defective, general };

template <class R>
FilteredComplex<R> random_filtered_complex(Rng& rng, const R& ring, FilteredFlavor flavor,
                                           long long max_layers = 3, long long degree_width = 4,
                                           long long max_rank = 3, long long max_exp = 4)
{
    long long layers = rng.range(2, std::max<long long>(2, max_layers));
    long long width = rng.range(2, std::max<long long>(2, degree_width));

    struct Slot {
        long long degree;
        long long layer;
        long long piece = -1;  // two-term piece id, -1 for free singles
        bool is_source = false;
    };
    struct TwoTerm {
        long long degree;  // source degree
        long long layer;
        long long exp;
        long long src_slot = -1, dst_slot = -1;
    };
    std::vector<Slot> slots;
    std::vector<TwoTerm> pieces;
    std::vector<long long> rank_at(static_cast<size_t>(width), 0);

    auto add_slot = [&](long long degree, long long layer, long long piece, bool is_source) {
        slots.push_back(Slot{degree, layer, piece, is_source});
        ++rank_at[static_cast<size_t>(degree)];
        return static_cast<long long>(slots.size()) - 1;
    };

    for (long long j = 0; j < layers; ++j) {
        for (long long k = 0; k + 1 < width; ++k) {
            if (!rng.chance(1, 2))
                continue;
            if (rank_at[static_cast<size_t>(k)] >= max_rank ||
                rank_at[static_cast<size_t>(k + 1)] >= max_rank)
                continue;
            TwoTerm piece{k, j, rng.range(1, max_exp), -1, -1};
            long long id = static_cast<long long>(pieces.size());
            piece.src_slot = add_slot(k, j, id, true);
            piece.dst_slot = add_slot(k + 1, j, id, false);
            pieces.push_back(piece);
        }
        for (long long k = 0; k < width; ++k)
            if (rng.chance(1, 3) && rank_at[static_cast<size_t>(k)] < max_rank)
                add_slot(k, j, -1, false);
    }
    // at least one slot total
    if (slots.empty())
        add_slot(0, 0, -1, false);

    // position of each slot within its degree
    std::vector<long long> pos(slots.size(), 0);
    {
        std::vector<long long> next(static_cast<size_t>(width), 0);
        for (size_t s = 0; s < slots.size(); ++s)
            pos[s] = next[static_cast<size_t>(slots[s].degree)]++;
    }

    std::vector<Matrix<R>> d;
    for (long long k = 0; k + 1 < width; ++k)
        d.push_back(mat::zero<R>(rank_at[static_cast<size_t>(k + 1)], rank_at[static_cast<size_t>(k)]));
    for (const auto& piece : pieces)
        d[static_cast<size_t>(piece.degree)].at(pos[static_cast<size_t>(piece.dst_slot)],
                                                pos[static_cast<size_t>(piece.src_slot)]) =
            ring.pi_pow(piece.exp);

    FreeComplex<R> ambient = make_complex(ring, 0, rank_at, d);

    // scale exponents per (step p, slot), nondecreasing in p
    std::vector<std::vector<long long>> scale(static_cast<size_t>(layers),
                                              std::vector<long long>(slots.size(), 0));
    auto bump = [&](long long p, size_t s, long long by) {
        for (long long pp = p; pp < layers; ++pp)
            scale[static_cast<size_t>(pp)][s] += by;
    };
    for (long long p = 1; p < layers; ++p) {
        for (const auto& piece : pieces) {
            if (piece.layer < p)
                continue;
            bool allow_whole = flavor == FilteredFlavor::general;
            bool allow_stair =
                flavor == FilteredFlavor::general || flavor == FilteredFlavor::saturated;
            if (allow_whole && rng.chance(1, 4)) {
                long long by = rng.range(1, 2);
                bump(p, static_cast<size_t>(piece.src_slot), by);
                bump(p, static_cast<size_t>(piece.dst_slot), by);
            }
            if (allow_stair && rng.chance(1, 3)) {
                long long src_scale = scale[static_cast<size_t>(p)][static_cast<size_t>(piece.src_slot)];
                long long dst_scale = scale[static_cast<size_t>(p)][static_cast<size_t>(piece.dst_slot)];
                long long room = src_scale + piece.exp - dst_scale;
                if (room > 0)
                    bump(p, static_cast<size_t>(piece.dst_slot), rng.range(1, std::min<long long>(room, 2)));
            }
        }
        for (size_t s = 0; s < slots.size(); ++s) {
            if (slots[s].piece >= 0 || slots[s].layer < p)
                continue;
            bool allow_free =
                flavor == FilteredFlavor::general || flavor == FilteredFlavor::defective;
            if (allow_free && rng.chance(1, 3))
                bump(p, s, rng.range(1, 2));
        }
    }
    // the defective flavor must actually carry a defect on a surviving lane
    if (flavor == FilteredFlavor::defective) {
        std::vector<size_t> singles;
        for (size_t s = 0; s < slots.size(); ++s)
            if (slots[s].piece < 0 && slots[s].layer >= 1)
                singles.push_back(s);
        if (singles.empty()) {
            long long deg = rng.range(0, width - 1);
            // grow the complex by one free slot in the deepest layer
            std::vector<long long> ranks2 = rank_at;
            ++ranks2[static_cast<size_t>(deg)];
            std::vector<Matrix<R>> d2;
            for (long long k = 0; k + 1 < width; ++k) {
                Matrix<R> m = mat::zero<R>(ranks2[static_cast<size_t>(k + 1)],
                                           ranks2[static_cast<size_t>(k)]);
                const Matrix<R>& old = ambient.d[static_cast<size_t>(k)];
                for (long long i = 0; i < old.rows; ++i)
                    for (long long jj = 0; jj < old.cols; ++jj)
                        m.at(i, jj) = old.at(i, jj);
                d2.push_back(std::move(m));
            }
            slots.push_back(Slot{deg, layers - 1, -1, false});
            pos.push_back(rank_at[static_cast<size_t>(deg)]);
            rank_at = ranks2;
            for (auto& sc : scale)
                sc.push_back(0);
            ambient = make_complex(ring, 0, rank_at, d2);
            singles.push_back(slots.size() - 1);
        }
        size_t chosen = singles[rng.below(singles.size())];
        long long enter = std::max<long long>(1, std::min<long long>(slots[chosen].layer, layers - 1));
        if (scale[static_cast<size_t>(layers - 1)][chosen] == 0)
            bump(enter, chosen, rng.range(1, 2));
    }

    // assemble the steps: Fil^p spans slots of layer >= p, scaled
    std::vector<std::map<long long, Matrix<R>>> steps;
    for (long long p = 1; p < layers; ++p) {
        std::map<long long, Matrix<R>> step;
        for (long long k = 0; k < width; ++k) {
            std::vector<size_t> members;
            for (size_t s = 0; s < slots.size(); ++s)
                if (slots[s].degree == k && slots[s].layer >= p)
                    members.push_back(s);
            Matrix<R> m(rank_at[static_cast<size_t>(k)], static_cast<long long>(members.size()));
            for (size_t c = 0; c < members.size(); ++c)
                m.at(pos[members[c]], static_cast<long long>(c)) =
                    ring.pi_pow(scale[static_cast<size_t>(p)][members[c]]);
            step[k] = std::move(m);
        }
        steps.push_back(std::move(step));
    }

    // hide the splitting with a chain automorphism id + dh + hd, h divisible
    // by pi so the map stays unimodular
    std::vector<Matrix<R>> h;  // h[k]: degree k -> k-1
    for (long long k = 0; k < width; ++k) {
        Matrix<R> m(k > 0 ? rank_at[static_cast<size_t>(k - 1)] : 0, rank_at[static_cast<size_t>(k)]);
        for (long long i = 0; i < m.rows; ++i)
            for (long long j = 0; j < m.cols; ++j)
                if (rng.chance(1, 3))
                    m.at(i, j) = ring.mul(ring.uniformizer(), random_element(rng, ring, 1, false));
        h.push_back(std::move(m));
    }
    auto h_at = [&](long long k) -> Matrix<R> {
        if (k >= 0 && k < width)
            return h[static_cast<size_t>(k)];
        return mat::zero<R>(ambient.rank_at(k - 1), ambient.rank_at(k));
    };
    std::vector<Matrix<R>> phi;
    for (long long k = 0; k < width; ++k) {
        Matrix<R> m = mat::identity(ring, rank_at[static_cast<size_t>(k)]);
        m = mat::add(ring, m, mat::mul(ring, ambient.d_at(k - 1), h_at(k)));
        m = mat::add(ring, m, mat::mul(ring, h_at(k + 1), ambient.d_at(k)));
        phi.push_back(std::move(m));
    }
    for (auto& step : steps)
        for (auto& [k, m] : step)
            m = mat::mul(ring, phi[static_cast<size_t>(k)], m);

    Orientation orientation = rng.chance(1, 4) ? Orientation::increasing : Orientation::decreasing;
    return make_filtered(ring, std::move(ambient), orientation, 0, std::move(steps));
}

// random submodule inclusion N ⊆ M with M torsion; retries until the mod-pi
// map N/pi -> M/pi is injective (needed by the polygon criterion)
template <class R>
ModuleMap<R> random_mod_pi_injective_inclusion(Rng& rng, const R& ring, long long max_rank = 4,
                                               long long max_exp = 5)
{
    while (true) {
        FinModule shape{0, {}};
        long long parts = rng.range(1, max_rank);
        for (long long k = 0; k < parts; ++k)
            shape.torsion.push_back(rng.range(1, max_exp));
        std::sort(shape.torsion.begin(), shape.torsion.end());
        Presented<R> M = presented_from_invariants(ring, shape);
        Matrix<R> gens(M.gens, rng.range(1, max_rank));
        for (long long i = 0; i < M.gens; ++i)
            for (long long j = 0; j < gens.cols; ++j)
                gens.at(i, j) = random_element(rng, ring, max_exp);
        ModuleMap<R> inc = submodule_inclusion(ring, M, gens);
        if (inc.src.gens == 0)
            continue;
        if (!mod_pi_injective(ring, inc))
            continue;
        return inc;
    }
}

}  // namespace dvrss::gen
