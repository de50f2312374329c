#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gossip::linalg {

/// Raised when a numerical routine cannot produce a trustworthy result
/// (non-symmetric input, indefinite matrix, no convergence).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major dense matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> entries() const noexcept { return data_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    DenseMatrix transpose() const;
    /// Largest absolute entry; 0 for an empty matrix.
    double max_abs() const noexcept;
    bool is_symmetric(double tol) const noexcept;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator-=(const DenseMatrix& other);
    DenseMatrix& operator*=(double s) noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator*(DenseMatrix lhs, double s);
DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs);
std::vector<double> operator*(const DenseMatrix& m, std::span<const double> v);

/// Max-norm of the entrywise difference. Dimensions must agree.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// Eigenvalues ascending; column j of `eigenvectors` pairs with eigenvalues[j].
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    DenseMatrix eigenvectors;

    /// Q diag(f(lambda)) Q^T for an arbitrary spectral map.
    template <class F>
    DenseMatrix reconstruct(F&& f) const
    {
        const std::size_t n = eigenvalues.size();
        DenseMatrix out(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            const double w = f(eigenvalues[k]);
            if (w == 0.0)
                continue;
            for (std::size_t i = 0; i < n; ++i) {
                const double qi = eigenvectors(i, k) * w;
                if (qi == 0.0)
                    continue;
                for (std::size_t j = 0; j < n; ++j)
                    out(i, j) += qi * eigenvectors(j, k);
            }
        }
        return out;
    }
};

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kZeroCutoffFactor = 1e-12;
inline constexpr double kNegativeTolerance = 1e-8;

/// Eigenvalues at or below this threshold are treated as exact zeros:
/// 1e-12 * max(lambda_max, 1).
double zero_cutoff(std::span<const double> eigenvalues) noexcept;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// Throws NumericalError for non-symmetric input or if the sweep cap is hit.
EigenDecomposition sym_eigen(const DenseMatrix& m);

/// Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix.
DenseMatrix pinv_psd(const DenseMatrix& m);

/// Inverse of a symmetric positive definite matrix via Cholesky.
/// Throws NumericalError if a pivot is not positive.
DenseMatrix inverse_spd(const DenseMatrix& m);

/// Smallest eigenvalue above the zero cutoff.
double lambda_min_plus(const DenseMatrix& m);
double lambda_min_plus(const EigenDecomposition& eig);

} // namespace gossip::linalg
