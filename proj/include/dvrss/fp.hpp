#pragma once

// Dense linear algebra over the residue field F_p: row reduction, kernels,
// subspace intersections and quotient coordinates. All the "mod pi" subspace
// computations land here.

#include <optional>
#include <vector>

#include "dvrss/error.hpp"
#include "dvrss/rings.hpp"

namespace dvrss {

struct FpMat {
    long long p = 2;
    long long rows = 0, cols = 0;
    std::vector<long long> a;  // row-major, entries in [0, p)

    FpMat() = default;
    FpMat(long long pp, long long r, long long c)
        : p(pp), rows(r), cols(c), a(static_cast<size_t>(r * c), 0)
    {
    }

    long long& at(long long i, long long j) { return a[static_cast<size_t>(i * cols + j)]; }
    long long at(long long i, long long j) const { return a[static_cast<size_t>(i * cols + j)]; }

    static FpMat identity(long long p, long long n)
    {
        FpMat m(p, n, n);
        for (long long i = 0; i < n; ++i)
            m.at(i, i) = 1;
        return m;
    }
};

namespace fp {

inline FpMat mul(const FpMat& A, const FpMat& B)
{
    require(A.cols == B.rows, "dimension-mismatch", "fp matrix product shape mismatch");
    FpMat C(A.p, A.rows, B.cols);
    for (long long i = 0; i < A.rows; ++i)
        for (long long k = 0; k < A.cols; ++k) {
            long long v = A.at(i, k);
            if (v == 0)
                continue;
            for (long long j = 0; j < B.cols; ++j)
                C.at(i, j) = (C.at(i, j) + v * B.at(k, j)) % A.p;
        }
    return C;
}

inline FpMat hstack(const FpMat& A, const FpMat& B)
{
    require(A.rows == B.rows, "dimension-mismatch", "fp hstack shape mismatch");
    FpMat C(A.p, A.rows, A.cols + B.cols);
    for (long long i = 0; i < A.rows; ++i) {
        for (long long j = 0; j < A.cols; ++j)
            C.at(i, j) = A.at(i, j);
        for (long long j = 0; j < B.cols; ++j)
            C.at(i, A.cols + j) = B.at(i, j);
    }
    return C;
}

inline FpMat columns(const FpMat& A, const std::vector<long long>& idx)
{
    FpMat C(A.p, A.rows, static_cast<long long>(idx.size()));
    for (long long i = 0; i < A.rows; ++i)
        for (size_t j = 0; j < idx.size(); ++j)
            C.at(i, static_cast<long long>(j)) = A.at(i, idx[j]);
    return C;
}

inline bool is_zero(const FpMat& A)
{
    for (long long v : A.a)
        if (v != 0)
            return false;
    return true;
}

// in-place reduced row echelon form; returns pivot column indices
inline std::vector<long long> rref(FpMat& A)
{
    std::vector<long long> pivots;
    long long row = 0;
    for (long long col = 0; col < A.cols && row < A.rows; ++col) {
        long long sel = -1;
        for (long long i = row; i < A.rows; ++i)
            if (A.at(i, col) != 0) {
                sel = i;
                break;
            }
        if (sel < 0)
            continue;
        if (sel != row)
            for (long long j = 0; j < A.cols; ++j)
                std::swap(A.at(sel, j), A.at(row, j));
        long long inv = mod_inverse(A.at(row, col), A.p);
        for (long long j = 0; j < A.cols; ++j)
            A.at(row, j) = A.at(row, j) * inv % A.p;
        for (long long i = 0; i < A.rows; ++i) {
            if (i == row || A.at(i, col) == 0)
                continue;
            long long f = A.at(i, col);
            for (long long j = 0; j < A.cols; ++j)
                A.at(i, j) = ((A.at(i, j) - f * A.at(row, j)) % A.p + A.p) % A.p;
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline long long rank(FpMat A) { return static_cast<long long>(rref(A).size()); }

// columns form a basis of ker(A)
inline FpMat kernel_basis(FpMat A)
{
    long long n = A.cols;
    std::vector<long long> pivots = rref(A);
    std::vector<bool> is_pivot(n, false);
    for (long long c : pivots)
        is_pivot[static_cast<size_t>(c)] = true;
    std::vector<long long> free_cols;
    for (long long j = 0; j < n; ++j)
        if (!is_pivot[static_cast<size_t>(j)])
            free_cols.push_back(j);
    FpMat K(A.p, n, static_cast<long long>(free_cols.size()));
    for (size_t k = 0; k < free_cols.size(); ++k) {
        long long fc = free_cols[k];
        K.at(fc, static_cast<long long>(k)) = 1;
        for (size_t r = 0; r < pivots.size(); ++r) {
            long long v = A.at(static_cast<long long>(r), fc);
            K.at(pivots[r], static_cast<long long>(k)) = (A.p - v) % A.p;
        }
    }
    return K;
}

// solve A X = B; returns nullopt if inconsistent
inline std::optional<FpMat> solve(const FpMat& A, const FpMat& B)
{
    require(A.rows == B.rows, "dimension-mismatch", "fp solve shape mismatch");
    FpMat M = hstack(A, B);
    std::vector<long long> pivots = rref(M);
    for (long long c : pivots)
        if (c >= A.cols)
            return std::nullopt;
    FpMat X(A.p, A.cols, B.cols);
    for (size_t r = 0; r < pivots.size(); ++r)
        for (long long j = 0; j < B.cols; ++j)
            X.at(pivots[r], j) = M.at(static_cast<long long>(r), A.cols + j);
    return X;
}

// basis of the column space
inline FpMat column_space_basis(const FpMat& A)
{
    FpMat R = A;
    std::vector<long long> pivots = rref(R);
    return columns(A, pivots);
}

// basis of col(A) ∩ col(B)
inline FpMat intersect(const FpMat& A, const FpMat& B)
{
    require(A.rows == B.rows, "dimension-mismatch", "fp intersect shape mismatch");
    FpMat K = kernel_basis(hstack(A, B));
    FpMat top(A.p, A.cols, K.cols);
    for (long long i = 0; i < A.cols; ++i)
        for (long long j = 0; j < K.cols; ++j)
            top.at(i, j) = K.at(i, j);
    return column_space_basis(mul(A, top));
}

inline bool subspace_contains(const FpMat& big, const FpMat& small)
{
    return solve(big, small).has_value();
}

inline bool subspace_eq(const FpMat& A, const FpMat& B)
{
    return subspace_contains(A, B) && subspace_contains(B, A);
}

inline FpMat inverse(const FpMat& A)
{
    require(A.rows == A.cols, "dimension-mismatch", "fp inverse of non-square matrix");
    FpMat M = hstack(A, FpMat::identity(A.p, A.rows));
    std::vector<long long> pivots = rref(M);
    require(static_cast<long long>(pivots.size()) == A.rows, "singular", "fp matrix not invertible");
    FpMat X(A.p, A.rows, A.rows);
    for (long long i = 0; i < A.rows; ++i)
        for (long long j = 0; j < A.rows; ++j)
            X.at(i, j) = M.at(i, A.cols + j);
    return X;
}

// Coordinates on the quotient space F_p^g / col(W): proj has kernel exactly
// col(W); section picks coset representatives (proj * section = id).
struct Quotient {
    long long dim = 0;
    FpMat proj;     // (g - w) x g
    FpMat section;  // g x (g - w)
};

inline Quotient quotient_map(const FpMat& W)
{
    long long g = W.rows;
    FpMat Wb = column_space_basis(W);
    long long w = Wb.cols;
    // complete the basis of col(W) with standard vectors
    FpMat B(W.p, g, g);
    for (long long i = 0; i < g; ++i)
        for (long long j = 0; j < w; ++j)
            B.at(i, j) = Wb.at(i, j);
    long long filled = w;
    for (long long e = 0; e < g && filled < g; ++e) {
        FpMat cand = B;
        cand.at(e, filled) = 1;
        FpMat probe = columns(cand, [&] {
            std::vector<long long> idx(static_cast<size_t>(filled + 1));
            for (long long j = 0; j <= filled; ++j)
                idx[static_cast<size_t>(j)] = j;
            return idx;
        }());
        if (rank(probe) == filled + 1) {
            B = cand;
            ++filled;
        }
    }
    require(filled == g, "internal", "basis completion failed");
    FpMat Binv = inverse(B);
    Quotient q;
    q.dim = g - w;
    q.proj = FpMat(W.p, g - w, g);
    for (long long i = 0; i < g - w; ++i)
        for (long long j = 0; j < g; ++j)
            q.proj.at(i, j) = Binv.at(w + i, j);
    q.section = FpMat(W.p, g, g - w);
    for (long long i = 0; i < g; ++i)
        for (long long j = 0; j < g - w; ++j)
            q.section.at(i, j) = B.at(i, w + j);
    return q;
}

}  // namespace fp

}  // namespace dvrss
