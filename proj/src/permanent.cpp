#include "bunchlab/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "bunchlab/matcore.hpp"
#include "bunchlab/parallel.hpp"

namespace bunchlab {

namespace {

constexpr Index kMaxNaive = 9;
constexpr Index kMaxRyser = 30;
constexpr Index kMaxFMatrix = 16;
constexpr Index kMaxMinc = 6;

void require_square_ref(const Eigen::Ref<const CMat>& A, const char* who) {
    if (A.rows() != A.cols()) {
        throw DimensionError(std::string(who) + ": matrix must be square");
    }
}

Complex ryser_value(const Eigen::Ref<const CMat>& A) {
    const Index n = A.rows();
    if (n == 0) return Complex(1.0);
    // perm(A) = (-1)^n sum over nonempty column subsets S of
    //           (-1)^{|S|} prod_i sum_{j in S} A_ij
    CVec rowsum = CVec::Zero(n);
    Complex total(0.0);
    Complex comp(0.0);
    std::uint64_t gray = 0;
    int sign = 1;  // (-1)^{|S|}, flips every Gray step
    const std::uint64_t count = std::uint64_t(1) << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const int j = std::countr_zero(k);
        const std::uint64_t bit = std::uint64_t(1) << j;
        gray ^= bit;
        if (gray & bit) {
            rowsum += A.col(j);
        } else {
            rowsum -= A.col(j);
        }
        sign = -sign;
        const Complex term = sign > 0 ? rowsum.prod() : -rowsum.prod();
        const Complex y = term - comp;
        const Complex t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    return (n % 2 == 0) ? total : -total;
}

}  // namespace

PermanentValue permanent_naive(const Eigen::Ref<const CMat>& A) {
    require_square_ref(A, "permanent_naive");
    const Index n = A.rows();
    if (n > kMaxNaive) {
        throw SizeCapError("permanent_naive: order exceeds cap of 9");
    }
    if (n == 0) return {Complex(1.0), PermAlgorithm::Naive, 0};
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index(0));
    Complex total(0.0);
    do {
        Complex prod(1.0);
        for (Index i = 0; i < n; ++i) prod *= A(i, perm[i]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {total, PermAlgorithm::Naive, n};
}

PermanentValue permanent_ryser(const Eigen::Ref<const CMat>& A) {
    require_square_ref(A, "permanent_ryser");
    const Index n = A.rows();
    if (n > kMaxRyser) {
        throw SizeCapError("permanent_ryser: order exceeds cap of 30");
    }
    return {ryser_value(A), PermAlgorithm::Ryser, n};
}

Complex permanent_minor(const Eigen::Ref<const CMat>& A, Index i, Index j) {
    require_square_ref(A, "permanent_minor");
    const Index n = A.rows();
    if (i < 0 || i >= n || j < 0 || j >= n) {
        throw IndexError("permanent_minor: index out of range");
    }
    CMat sub(n - 1, n - 1);
    for (Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Index c = 0, cc = 0; c < n; ++c) {
            if (c == j) continue;
            sub(rr, cc) = A(r, c);
            ++cc;
        }
        ++rr;
    }
    if (sub.rows() > kMaxRyser) {
        throw SizeCapError("permanent_minor: order exceeds cap of 30");
    }
    return ryser_value(sub);
}

FMatrix f_matrix(const CMat& A, const Tolerances& tol) {
    require_psd(A, tol, "f_matrix");
    const Index n = A.rows();
    if (n > kMaxFMatrix) {
        throw SizeCapError("f_matrix: order exceeds cap of 16");
    }
    FMatrix out;
    out.F.resize(n, n);
    parallel_for(n * n, [&](Index flat) {
        const Index i = flat / n;
        const Index j = flat % n;
        out.F(i, j) = A(i, j) * permanent_minor(A, i, j);
    });
    out.source_perm = ryser_value(A);
    return out;
}

Complex minc_sum_expansion(const Eigen::Ref<const CMat>& A, const Eigen::Ref<const CMat>& B) {
    require_square_ref(A, "minc_sum_expansion");
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw DimensionError("minc_sum_expansion: shape mismatch");
    }
    const Index n = A.rows();
    if (n > kMaxMinc) {
        throw SizeCapError("minc_sum_expansion: order exceeds cap of 6");
    }
    const auto pick = [n](const Eigen::Ref<const CMat>& M, std::uint32_t row_mask,
                          std::uint32_t col_mask) {
        CMat sub(std::popcount(row_mask), std::popcount(col_mask));
        Index rr = 0;
        for (Index r = 0; r < n; ++r) {
            if (!(row_mask & (std::uint32_t(1) << r))) continue;
            Index cc = 0;
            for (Index c = 0; c < n; ++c) {
                if (!(col_mask & (std::uint32_t(1) << c))) continue;
                sub(rr, cc) = M(r, c);
                ++cc;
            }
            ++rr;
        }
        return sub;
    };
    const std::uint32_t full = (std::uint32_t(1) << n) - 1;
    Complex total(0.0);
    for (std::uint32_t alpha = 0; alpha <= full; ++alpha) {
        const int r = std::popcount(alpha);
        for (std::uint32_t beta = 0; beta <= full; ++beta) {
            if (std::popcount(beta) != r) continue;
            const Complex perm_a = ryser_value(pick(A, alpha, beta));
            const Complex perm_b = ryser_value(pick(B, full & ~alpha, full & ~beta));
            total += perm_a * perm_b;
        }
    }
    return total;
}

}  // namespace bunchlab
