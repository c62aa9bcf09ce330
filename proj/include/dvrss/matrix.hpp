#pragma once

// Exact matrix algebra over a DVR: Smith normal form by valuation pivoting,
// kernels, images, solving, saturation, intersections and preimages.
//
// Pivoting rule: the entry of minimal valuation in the remaining submatrix,
// ties broken by lowest row then lowest column. In a DVR such an entry
// divides every other entry, so one pivot clears its row and column and the
// diagonal valuations come out nondecreasing.

#include <optional>
#include <vector>

#include "dvrss/error.hpp"
#include "dvrss/fp.hpp"
#include "dvrss/rings.hpp"

namespace dvrss {

template <class R>
struct Matrix {
    using Elem = typename R::Elem;

    long long rows = 0, cols = 0;
    std::vector<Elem> a;

    Matrix() = default;
    Matrix(long long r, long long c) : rows(r), cols(c), a(static_cast<size_t>(r * c)) {}

    Elem& at(long long i, long long j) { return a[static_cast<size_t>(i * cols + j)]; }
    const Elem& at(long long i, long long j) const { return a[static_cast<size_t>(i * cols + j)]; }
};

namespace mat {

template <class R>
Matrix<R> identity(const R& ring, long long n)
{
    Matrix<R> m(n, n);
    for (long long i = 0; i < n; ++i)
        m.at(i, i) = ring.one();
    return m;
}

template <class R>
Matrix<R> zero(long long r, long long c)
{
    return Matrix<R>(r, c);
}

template <class R>
bool is_zero(const R& ring, const Matrix<R>& A)
{
    for (const auto& x : A.a)
        if (!ring.is_zero(x))
            return false;
    return true;
}

template <class R>
bool eq(const R& ring, const Matrix<R>& A, const Matrix<R>& B)
{
    if (A.rows != B.rows || A.cols != B.cols)
        return false;
    for (size_t i = 0; i < A.a.size(); ++i)
        if (!ring.eq(A.a[i], B.a[i]))
            return false;
    return true;
}

template <class R>
Matrix<R> mul(const R& ring, const Matrix<R>& A, const Matrix<R>& B)
{
    require(A.cols == B.rows, "dimension-mismatch", "matrix product shape mismatch");
    Matrix<R> C(A.rows, B.cols);
    for (long long i = 0; i < A.rows; ++i)
        for (long long k = 0; k < A.cols; ++k) {
            if (ring.is_zero(A.at(i, k)))
                continue;
            for (long long j = 0; j < B.cols; ++j)
                C.at(i, j) = ring.add(C.at(i, j), ring.mul(A.at(i, k), B.at(k, j)));
        }
    return C;
}

template <class R>
Matrix<R> add(const R& ring, const Matrix<R>& A, const Matrix<R>& B)
{
    require(A.rows == B.rows && A.cols == B.cols, "dimension-mismatch", "matrix sum shape mismatch");
    Matrix<R> C(A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i)
        C.a[i] = ring.add(A.a[i], B.a[i]);
    return C;
}

template <class R>
Matrix<R> neg(const R& ring, const Matrix<R>& A)
{
    Matrix<R> C(A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i)
        C.a[i] = ring.neg(A.a[i]);
    return C;
}

template <class R>
Matrix<R> scale(const R& ring, const typename R::Elem& c, const Matrix<R>& A)
{
    Matrix<R> C(A.rows, A.cols);
    for (size_t i = 0; i < A.a.size(); ++i)
        C.a[i] = ring.mul(c, A.a[i]);
    return C;
}

template <class R>
Matrix<R> transpose(const Matrix<R>& A)
{
    Matrix<R> T(A.cols, A.rows);
    for (long long i = 0; i < A.rows; ++i)
        for (long long j = 0; j < A.cols; ++j)
            T.at(j, i) = A.at(i, j);
    return T;
}

template <class R>
Matrix<R> hstack(const Matrix<R>& A, const Matrix<R>& B)
{
    require(A.rows == B.rows, "dimension-mismatch", "hstack shape mismatch");
    Matrix<R> C(A.rows, A.cols + B.cols);
    for (long long i = 0; i < A.rows; ++i) {
        for (long long j = 0; j < A.cols; ++j)
            C.at(i, j) = A.at(i, j);
        for (long long j = 0; j < B.cols; ++j)
            C.at(i, A.cols + j) = B.at(i, j);
    }
    return C;
}

template <class R>
Matrix<R> vstack(const Matrix<R>& A, const Matrix<R>& B)
{
    require(A.cols == B.cols, "dimension-mismatch", "vstack shape mismatch");
    Matrix<R> C(A.rows + B.rows, A.cols);
    for (long long i = 0; i < A.rows; ++i)
        for (long long j = 0; j < A.cols; ++j)
            C.at(i, j) = A.at(i, j);
    for (long long i = 0; i < B.rows; ++i)
        for (long long j = 0; j < A.cols; ++j)
            C.at(A.rows + i, j) = B.at(i, j);
    return C;
}

template <class R>
Matrix<R> take_columns(const Matrix<R>& A, long long from, long long count)
{
    Matrix<R> C(A.rows, count);
    for (long long i = 0; i < A.rows; ++i)
        for (long long j = 0; j < count; ++j)
            C.at(i, j) = A.at(i, from + j);
    return C;
}

template <class R>
Matrix<R> take_rows(const Matrix<R>& A, long long from, long long count)
{
    Matrix<R> C(count, A.cols);
    for (long long i = 0; i < count; ++i)
        for (long long j = 0; j < A.cols; ++j)
            C.at(i, j) = A.at(from + i, j);
    return C;
}

template <class R>
FpMat residue_reduce(const R& ring, const Matrix<R>& A)
{
    FpMat M(ring.residue_char(), A.rows, A.cols);
    for (long long i = 0; i < A.rows; ++i)
        for (long long j = 0; j < A.cols; ++j)
            M.at(i, j) = ring.residue(A.at(i, j));
    return M;
}

}  // namespace mat

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

// A = U * D * V with U, V unimodular over the ring and D diagonal with
// entries pi^{exponents[k]} (exponents nondecreasing, one per nonzero
// diagonal slot). u_inv and v_inv are maintained alongside so kernels,
// solving and saturations fall out without extra inversions.
template <class R>
struct Snf {
    Matrix<R> u, u_inv, d, v, v_inv;
    std::vector<long long> exponents;
    long long rank = 0;
};

template <class R>
Snf<R> snf(const R& ring, const Matrix<R>& A)
{
    using Elem = typename R::Elem;
    Snf<R> s;
    s.d = A;
    s.u = mat::identity(ring, A.rows);
    s.u_inv = mat::identity(ring, A.rows);
    s.v = mat::identity(ring, A.cols);
    s.v_inv = mat::identity(ring, A.cols);
    Matrix<R>&D = s.d, &U = s.u, &Ui = s.u_inv, &V = s.v, &Vi = s.v_inv;

    long long steps = std::min(A.rows, A.cols);
    for (long long t = 0; t < steps; ++t) {
        // pivot: minimal valuation in D[t.., t..], ties by row then column
        Val best = Val::inf();
        long long pi_ = -1, pj_ = -1;
        for (long long i = t; i < A.rows; ++i)
            for (long long j = t; j < A.cols; ++j) {
                Val v = ring.valuation(D.at(i, j));
                if (v < best) {
                    best = v;
                    pi_ = i;
                    pj_ = j;
                }
            }
        if (pi_ < 0)
            break;  // remaining block is zero

        if (pi_ != t) {  // row swap: D <- P D, U <- U P, Ui <- P Ui
            for (long long j = 0; j < A.cols; ++j)
                std::swap(D.at(t, j), D.at(pi_, j));
            for (long long i = 0; i < A.rows; ++i)
                std::swap(U.at(i, t), U.at(i, pi_));
            for (long long j = 0; j < A.rows; ++j)
                std::swap(Ui.at(t, j), Ui.at(pi_, j));
        }
        if (pj_ != t) {  // column swap: D <- D P, V <- P V, Vi <- Vi P
            for (long long i = 0; i < A.rows; ++i)
                std::swap(D.at(i, t), D.at(i, pj_));
            for (long long j = 0; j < A.cols; ++j)
                std::swap(V.at(t, j), V.at(pj_, j));
            for (long long i = 0; i < A.cols; ++i)
                std::swap(Vi.at(i, t), Vi.at(i, pj_));
        }

        // normalize the pivot to an exact power of the uniformizer
        long long e = best.v;
        Elem pival = ring.pi_pow(e);
        Elem unit = ring.divide(D.at(t, t), pival);
        Elem unit_inv = ring.unit_inverse(unit);
        for (long long j = t; j < A.cols; ++j)
            D.at(t, j) = ring.mul(unit_inv, D.at(t, j));
        for (long long i = 0; i < A.rows; ++i)
            U.at(i, t) = ring.mul(U.at(i, t), unit);
        for (long long j = 0; j < A.rows; ++j)
            Ui.at(t, j) = ring.mul(unit_inv, Ui.at(t, j));

        // clear the pivot column (quotients are integral: pivot divides all)
        for (long long i = t + 1; i < A.rows; ++i) {
            if (ring.is_zero(D.at(i, t)))
                continue;
            Elem q = ring.divide(D.at(i, t), pival);
            for (long long j = t; j < A.cols; ++j)
                D.at(i, j) = ring.sub(D.at(i, j), ring.mul(q, D.at(t, j)));
            for (long long r = 0; r < A.rows; ++r)
                U.at(r, t) = ring.add(U.at(r, t), ring.mul(q, U.at(r, i)));
            for (long long j = 0; j < A.rows; ++j)
                Ui.at(i, j) = ring.sub(Ui.at(i, j), ring.mul(q, Ui.at(t, j)));
        }
        // clear the pivot row
        for (long long j = t + 1; j < A.cols; ++j) {
            if (ring.is_zero(D.at(t, j)))
                continue;
            Elem q = ring.divide(D.at(t, j), pival);
            for (long long i = t; i < A.rows; ++i)
                D.at(i, j) = ring.sub(D.at(i, j), ring.mul(q, D.at(i, t)));
            for (long long c = 0; c < A.cols; ++c)
                V.at(t, c) = ring.add(V.at(t, c), ring.mul(q, V.at(j, c)));
            for (long long i = 0; i < A.cols; ++i)
                Vi.at(i, j) = ring.sub(Vi.at(i, j), ring.mul(q, Vi.at(i, t)));
        }

        s.exponents.push_back(e);
        ++s.rank;
    }
    return s;
}

// invariants of coker(A : R^cols -> R^rows): free rank and the nonzero
// torsion exponents, ascending
struct CokerInvariants {
    long long free_rank = 0;
    std::vector<long long> exponents;
};

template <class R>
CokerInvariants cokernel_invariants(const R& ring, const Matrix<R>& A)
{
    Snf<R> s = snf(ring, A);
    CokerInvariants inv;
    inv.free_rank = A.rows - s.rank;
    for (long long e : s.exponents)
        if (e > 0)
            inv.exponents.push_back(e);
    std::sort(inv.exponents.begin(), inv.exponents.end());
    return inv;
}

// columns freely generate ker(A : R^cols -> R^rows); the span is saturated
template <class R>
Matrix<R> kernel_basis_from(const R&, const Snf<R>& s)
{
    return mat::take_columns(s.v_inv, s.rank, s.v_inv.cols - s.rank);
}

template <class R>
Matrix<R> kernel_basis(const R& ring, const Matrix<R>& A)
{
    Snf<R> s = snf(ring, A);
    return kernel_basis_from(ring, s);
}

// solve A X = B over the ring, if possible
template <class R>
std::optional<Matrix<R>> solve_with(const R& ring, const Snf<R>& s, const Matrix<R>& B)
{
    require(s.u_inv.cols == B.rows, "dimension-mismatch", "solve shape mismatch");
    Matrix<R> C = mat::mul(ring, s.u_inv, B);
    Matrix<R> Y(s.v.rows, B.cols);
    for (long long i = 0; i < C.rows; ++i)
        for (long long j = 0; j < B.cols; ++j) {
            const auto& c = C.at(i, j);
            if (i < s.rank) {
                if (ring.is_zero(c))
                    continue;
                if (ring.valuation(c).v < s.exponents[static_cast<size_t>(i)] &&
                    ring.valuation(c).finite)
                    return std::nullopt;
                Y.at(i, j) = ring.divide(c, ring.pi_pow(s.exponents[static_cast<size_t>(i)]));
            } else if (!ring.is_zero(c)) {
                return std::nullopt;
            }
        }
    return mat::mul(ring, s.v_inv, Y);
}

template <class R>
std::optional<Matrix<R>> solve(const R& ring, const Matrix<R>& A, const Matrix<R>& B)
{
    Snf<R> s = snf(ring, A);
    return solve_with(ring, s, B);
}

// basis of the column span of A (free module): columns pi^{e_k} * u_k
template <class R>
Matrix<R> image_basis_from(const R& ring, const Snf<R>& s)
{
    Matrix<R> B(s.u.rows, s.rank);
    for (long long k = 0; k < s.rank; ++k) {
        auto pk = ring.pi_pow(s.exponents[static_cast<size_t>(k)]);
        for (long long i = 0; i < s.u.rows; ++i)
            B.at(i, k) = ring.mul(pk, s.u.at(i, k));
    }
    return B;
}

template <class R>
Matrix<R> image_basis(const R& ring, const Matrix<R>& A)
{
    Snf<R> s = snf(ring, A);
    return image_basis_from(ring, s);
}

// basis of the saturation span_K(A) ∩ R^rows: columns u_k, k < rank
template <class R>
Matrix<R> saturation_basis(const R& ring, const Matrix<R>& A)
{
    Snf<R> s = snf(ring, A);
    return mat::take_columns(s.u, 0, s.rank);
}

// generators of { x : A x ∈ span(S) }
template <class R>
Matrix<R> preimage_gens(const R& ring, const Matrix<R>& A, const Matrix<R>& S)
{
    require(A.rows == S.rows, "dimension-mismatch", "preimage shape mismatch");
    Matrix<R> K = kernel_basis(ring, mat::hstack(A, mat::neg(ring, S)));
    return mat::take_rows(K, 0, A.cols);
}

// generators of span(B1) ∩ span(B2) inside the same free module
template <class R>
Matrix<R> intersect_submodules(const R& ring, const Matrix<R>& B1, const Matrix<R>& B2)
{
    require(B1.rows == B2.rows, "dimension-mismatch",
            "intersection of submodules of different free modules");
    Matrix<R> K = kernel_basis(ring, mat::hstack(B1, mat::neg(ring, B2)));
    Matrix<R> top = mat::take_rows(K, 0, B1.cols);
    return mat::mul(ring, B1, top);
}

template <class R>
bool is_unimodular(const R& ring, const Matrix<R>& A)
{
    if (A.rows != A.cols)
        return false;
    Snf<R> s = snf(ring, A);
    if (s.rank != A.rows)
        return false;
    for (long long e : s.exponents)
        if (e != 0)
            return false;
    return true;
}

// rank over the fraction field
template <class R>
long long rank_K(const R& ring, const Matrix<R>& A)
{
    return snf(ring, A).rank;
}

// inverse of a unimodular matrix
template <class R>
Matrix<R> inverse_unimodular(const R& ring, const Matrix<R>& A)
{
    Snf<R> s = snf(ring, A);
    require(s.rank == A.rows && s.rank == A.cols, "singular", "matrix is not unimodular");
    for (long long e : s.exponents)
        require(e == 0, "singular", "matrix is not unimodular");
    return mat::mul(ring, s.v_inv, s.u_inv);
}

}  // namespace dvrss
