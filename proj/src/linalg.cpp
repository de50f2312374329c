#include "gossip/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gossip::linalg {

namespace {

    constexpr int kMaxSweeps = 100;

    void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what)
    {
        if (a.rows() != b.rows() || a.cols() != b.cols())
            throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }

    double off_diagonal_norm(const DenseMatrix& a)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                if (i != j)
                    s += a(i, j) * a(i, j);
        return std::sqrt(s);
    }

    double frobenius_norm(const DenseMatrix& a)
    {
        double s = 0.0;
        for (double v : a.entries())
            s += v * v;
        return std::sqrt(s);
    }

    // Two-sided Jacobi rotation zeroing a(p, q); v accumulates the rotations.
    void rotate(DenseMatrix& a, DenseMatrix& v, std::size_t p, std::size_t q)
    {
        const std::size_t n = a.rows();
        const double apq = a(p, q);
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150)
            t = 0.5 / theta;
        else
            t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
            if (k == p || k == q)
                continue;
            const double akp = a(k, p);
            const double akq = a(k, q);
            const double np = c * akp - s * akq;
            const double nq = s * akp + c * akq;
            a(k, p) = a(p, k) = np;
            a(k, q) = a(q, k) = nq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;

        for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
        }
    }

    void require_not_indefinite(std::span<const double> eigenvalues)
    {
        if (eigenvalues.empty())
            return;
        const double scale = std::max(1.0, std::abs(eigenvalues.back()));
        if (eigenvalues.front() < -kNegativeTolerance * scale)
            throw NumericalError("matrix is not positive semidefinite (eigenvalue "
                                 + std::to_string(eigenvalues.front()) + ")");
    }

} // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
    if (data_.size() != rows_ * cols_)
        throw std::invalid_argument("DenseMatrix: entry count " + std::to_string(data_.size())
                                    + " does not match " + std::to_string(rows_) + "x"
                                    + std::to_string(cols_));
}

DenseMatrix DenseMatrix::identity(std::size_t n)
{
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values)
{
    DenseMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        m(i, i) = values[i];
    return m;
}

DenseMatrix DenseMatrix::transpose() const
{
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

double DenseMatrix::max_abs() const noexcept
{
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::abs(v));
    return m;
}

bool DenseMatrix::is_symmetric(double tol) const noexcept
{
    if (!is_square())
        return false;
    const double scale = std::max(1.0, max_abs());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol * scale)
                return false;
    return true;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other)
{
    require_same_shape(*this, other, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other)
{
    require_same_shape(*this, other, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] -= other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) noexcept
{
    for (double& v : data_)
        v *= s;
    return *this;
}

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs += rhs; }
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs -= rhs; }
DenseMatrix operator*(DenseMatrix lhs, double s) { return lhs *= s; }

DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs)
{
    if (lhs.cols() != rhs.rows())
        throw std::invalid_argument("matrix product: inner dimensions differ");
    DenseMatrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double a = lhs(i, k);
            if (a == 0.0)
                continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j)
                out(i, j) += a * rhs(k, j);
        }
    }
    return out;
}

std::vector<double> operator*(const DenseMatrix& m, std::span<const double> v)
{
    if (m.cols() != v.size())
        throw std::invalid_argument("matrix-vector product: dimension mismatch");
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        out[i] = std::inner_product(r.begin(), r.end(), v.begin(), 0.0);
    }
    return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b)
{
    require_same_shape(a, b, "max_abs_diff");
    double d = 0.0;
    const auto ea = a.entries();
    const auto eb = b.entries();
    for (std::size_t i = 0; i < ea.size(); ++i)
        d = std::max(d, std::abs(ea[i] - eb[i]));
    return d;
}

double zero_cutoff(std::span<const double> eigenvalues) noexcept
{
    double top = 0.0;
    for (double l : eigenvalues)
        top = std::max(top, l);
    return kZeroCutoffFactor * std::max(top, 1.0);
}

EigenDecomposition sym_eigen(const DenseMatrix& m)
{
    if (!m.is_square())
        throw NumericalError("sym_eigen: matrix is not square");
    if (!m.is_symmetric(kSymmetryTolerance))
        throw NumericalError("sym_eigen: matrix is not symmetric");

    const std::size_t n = m.rows();
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = 0.5 * (m(i, j) + m(j, i));
    DenseMatrix v = DenseMatrix::identity(n);

    const double norm = frobenius_norm(a);
    bool converged = n <= 1 || norm == 0.0;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        const double off = off_diagonal_norm(a);
        if (off <= 1e-15 * norm) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                // Once the sweep is well underway, drop entries that can no
                // longer change either diagonal element in double precision.
                const double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p))
                    && std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                rotate(a, v, p, q);
            }
        }
    }
    if (!converged && off_diagonal_norm(a) > 1e-15 * norm)
        throw NumericalError("sym_eigen: Jacobi iteration did not converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i)
            out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

DenseMatrix pinv_psd(const DenseMatrix& m)
{
    const EigenDecomposition eig = sym_eigen(m);
    require_not_indefinite(eig.eigenvalues);
    const double cut = zero_cutoff(eig.eigenvalues);
    DenseMatrix out = eig.reconstruct([cut](double l) { return l > cut ? 1.0 / l : 0.0; });
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = i + 1; j < out.cols(); ++j)
            out(i, j) = out(j, i) = 0.5 * (out(i, j) + out(j, i));
    return out;
}

DenseMatrix inverse_spd(const DenseMatrix& m)
{
    if (!m.is_square())
        throw NumericalError("inverse_spd: matrix is not square");
    const std::size_t n = m.rows();
    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k)
            d -= l(j, k) * l(j, k);
        if (!(d > 0.0))
            throw NumericalError("inverse_spd: matrix is not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    // Solve L L^T X = I column by column.
    DenseMatrix inv(n, n);
    std::vector<double> z(n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = (i == col) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k)
                s -= l(i, k) * z[k];
            z[i] = s / l(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = z[i];
            for (std::size_t k = i + 1; k < n; ++k)
                s -= l(k, i) * inv(k, col);
            inv(i, col) = s / l(i, i);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            inv(i, j) = inv(j, i) = 0.5 * (inv(i, j) + inv(j, i));
    return inv;
}

double lambda_min_plus(const EigenDecomposition& eig)
{
    require_not_indefinite(eig.eigenvalues);
    const double cut = zero_cutoff(eig.eigenvalues);
    for (double l : eig.eigenvalues)
        if (l > cut)
            return l;
    throw NumericalError("lambda_min_plus: all eigenvalues are zero");
}

double lambda_min_plus(const DenseMatrix& m) { return lambda_min_plus(sym_eigen(m)); }

} // namespace gossip::linalg
