#include "ris/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ris/simd.hpp"

namespace ris {

namespace {

void check_finite(const std::vector<cplx>& v, const char* what) {
    for (const cplx& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw Error(std::string(what) + ": non-finite entry");
}

using EMat = Eigen::MatrixXcd;

EMat to_eigen(const CMatrix& a) {
    EMat m(a.rows(), a.cols());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    return m;
}

CMatrix from_eigen(const EMat& m) {
    CMatrix a(m.rows(), m.cols());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t j = 0; j < a.cols(); ++j) a(i, j) = m(i, j);
    return a;
}

}  // namespace

CMatrix::CMatrix(index_t rows, index_t cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {
    if (rows < 1 || cols < 1) throw Error("CMatrix: dimensions must be positive");
}

CMatrix::CMatrix(index_t rows, index_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows < 1 || cols < 1) throw Error("CMatrix: dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(rows * cols))
        throw DimensionMismatch("CMatrix: entry count does not match shape");
    check_finite(data_, "CMatrix");
}

CMatrix CMatrix::identity(index_t n) {
    CMatrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diag(const CVector& d) {
    CMatrix m(d.len(), d.len());
    for (index_t i = 0; i < d.len(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (index_t i = 0; i < rows_; ++i)
        for (index_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMatrix CMatrix::transpose() const {
    CMatrix r(cols_, rows_);
    for (index_t i = 0; i < rows_; ++i)
        for (index_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

CMatrix CMatrix::conjugate() const {
    CMatrix r(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = std::conj(data_[i]);
    return r;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw DimensionMismatch("CMatrix +=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw DimensionMismatch("CMatrix -=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    simd::active_kernels().scale(data_.size(), s, data_.data());
    return *this;
}

bool CMatrix::all_finite() const {
    for (const cplx& x : data_)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

CVector::CVector(index_t len) : len_(len), data_(static_cast<std::size_t>(len)) {
    if (len < 1) throw Error("CVector: length must be positive");
}

CVector::CVector(std::vector<cplx> entries)
    : len_(static_cast<index_t>(entries.size())), data_(std::move(entries)) {
    if (len_ < 1) throw Error("CVector: length must be positive");
    check_finite(data_, "CVector");
}

CVector::CVector(std::initializer_list<cplx> entries)
    : CVector(std::vector<cplx>(entries)) {}

CVector CVector::ones(index_t n) {
    CVector v(n);
    for (index_t i = 0; i < n; ++i) v[i] = 1.0;
    return v;
}

CVector CVector::conjugate() const {
    CVector r(len_);
    for (index_t i = 0; i < len_; ++i) r[i] = std::conj(data_[i]);
    return r;
}

CVector& CVector::operator+=(const CVector& o) {
    if (len_ != o.len_) throw DimensionMismatch("CVector +=: length mismatch");
    for (index_t i = 0; i < len_; ++i) data_[i] += o.data_[i];
    return *this;
}

CVector& CVector::operator-=(const CVector& o) {
    if (len_ != o.len_) throw DimensionMismatch("CVector -=: length mismatch");
    for (index_t i = 0; i < len_; ++i) data_[i] -= o.data_[i];
    return *this;
}

CVector& CVector::operator*=(cplx s) {
    simd::active_kernels().scale(data_.size(), s, data_.data());
    return *this;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionMismatch("matmul: inner dimensions differ");
    CMatrix c(a.rows(), b.cols());
    const auto& k = simd::active_kernels();
    // c.row(i) += a(i,l) * b.row(l): contiguous axpy over b's rows
    for (index_t i = 0; i < a.rows(); ++i) {
        cplx* ci = c.row(i);
        for (index_t l = 0; l < a.cols(); ++l) {
            const cplx ail = a(i, l);
            if (ail == cplx{}) continue;
            k.axpy(static_cast<std::size_t>(b.cols()), ail, b.row(l), ci);
        }
    }
    return c;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) { return matmul(a, b); }

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CVector operator*(const CMatrix& a, const CVector& x) {
    if (a.cols() != x.len())
        throw DimensionMismatch("matvec: dimension mismatch");
    CVector y(a.rows());
    for (index_t j = 0; j < a.cols(); ++j) {
        const cplx xj = x[j];
        if (xj == cplx{}) continue;
        for (index_t i = 0; i < a.rows(); ++i) y[i] += a(i, j) * xj;
    }
    return y;
}

CVector operator+(CVector a, const CVector& b) { return a += b; }
CVector operator-(CVector a, const CVector& b) { return a -= b; }
CVector operator*(cplx s, CVector a) { return a *= s; }

cplx dotc(const CVector& a, const CVector& b) {
    if (a.len() != b.len()) throw DimensionMismatch("dotc: length mismatch");
    return simd::active_kernels().dotc(static_cast<std::size_t>(a.len()),
                                       a.data(), b.data());
}

CMatrix hadamard(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("hadamard: shape mismatch");
    CMatrix c(a.rows(), a.cols());
    simd::active_kernels().hadamard(a.size(), a.data(), b.data(), c.data());
    return c;
}

CVector hadamard(const CVector& a, const CVector& b) {
    if (a.len() != b.len()) throw DimensionMismatch("hadamard: length mismatch");
    CVector c(a.len());
    simd::active_kernels().hadamard(static_cast<std::size_t>(a.len()), a.data(),
                                    b.data(), c.data());
    return c;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (index_t p = 0; p < b.rows(); ++p)
                for (index_t q = 0; q < b.cols(); ++q)
                    c(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return c;
}

CMatrix outer(const CVector& a, const CVector& b) {
    CMatrix c(a.len(), b.len());
    for (index_t i = 0; i < a.len(); ++i)
        for (index_t j = 0; j < b.len(); ++j) c(i, j) = a[i] * std::conj(b[j]);
    return c;
}

CVector vec(const CMatrix& a) {
    CVector v(a.rows() * a.cols());
    index_t n = 0;
    for (index_t j = 0; j < a.cols(); ++j)
        for (index_t i = 0; i < a.rows(); ++i) v[n++] = a(i, j);
    return v;
}

CMatrix unvec(const CVector& v, index_t rows, index_t cols) {
    if (v.len() != rows * cols)
        throw DimensionMismatch("unvec: length does not match shape");
    CMatrix a(rows, cols);
    index_t n = 0;
    for (index_t j = 0; j < cols; ++j)
        for (index_t i = 0; i < rows; ++i) a(i, j) = v[n++];
    return a;
}

CVector diag_of(const CMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("diag_of: not square");
    CVector v(a.rows());
    for (index_t i = 0; i < a.rows(); ++i) v[i] = a(i, i);
    return v;
}

CVector diag_of_h(const CMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("diag_of_h: not square");
    CVector v(a.rows());
    for (index_t i = 0; i < a.rows(); ++i) v[i] = std::conj(a(i, i));
    return v;
}

CMatrix diag_from(const CVector& v) { return CMatrix::diag(v); }

CMatrix diag_from_h(const CVector& v) { return CMatrix::diag(v.conjugate()); }

double frobenius_norm_sq(const CMatrix& a) {
    return simd::active_kernels().norm2sq(a.size(), a.data());
}

double frobenius_norm(const CMatrix& a) { return std::sqrt(frobenius_norm_sq(a)); }

double norm2_sq(const CVector& a) {
    return simd::active_kernels().norm2sq(static_cast<std::size_t>(a.len()),
                                          a.data());
}

double norm2(const CVector& a) { return std::sqrt(norm2_sq(a)); }

double max_abs(const CMatrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i]));
    return m;
}

double max_abs(const CVector& a) {
    double m = 0.0;
    for (index_t i = 0; i < a.len(); ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

namespace {

double one_norm(const CMatrix& a) {
    double best = 0.0;
    for (index_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (index_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

// LU with partial pivoting; returns false on exact singularity.
bool lu_factor(CMatrix& a, std::vector<index_t>& perm) {
    const index_t n = a.rows();
    perm.resize(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), index_t{0});
    for (index_t col = 0; col < n; ++col) {
        index_t piv = col;
        double best = std::abs(a(col, col));
        for (index_t i = col + 1; i < n; ++i) {
            const double v = std::abs(a(i, col));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) return false;
        if (piv != col) {
            for (index_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(perm[static_cast<std::size_t>(col)],
                      perm[static_cast<std::size_t>(piv)]);
        }
        const cplx d = a(col, col);
        for (index_t i = col + 1; i < n; ++i) {
            const cplx f = a(i, col) / d;
            a(i, col) = f;
            if (f == cplx{}) continue;
            simd::active_kernels().axpy(static_cast<std::size_t>(n - col - 1),
                                        -f, a.row(col) + col + 1,
                                        a.row(i) + col + 1);
        }
    }
    return true;
}

CMatrix lu_solve(const CMatrix& lu, const std::vector<index_t>& perm,
                 const CMatrix& b) {
    const index_t n = lu.rows();
    CMatrix x(n, b.cols());
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < b.cols(); ++j)
            x(i, j) = b(perm[static_cast<std::size_t>(i)], j);
    // forward substitution (unit lower)
    for (index_t i = 1; i < n; ++i)
        for (index_t l = 0; l < i; ++l) {
            const cplx f = lu(i, l);
            if (f == cplx{}) continue;
            simd::active_kernels().axpy(static_cast<std::size_t>(x.cols()), -f,
                                        x.row(l), x.row(i));
        }
    // back substitution
    for (index_t i = n - 1; i >= 0; --i) {
        const cplx d = lu(i, i);
        for (index_t j = 0; j < x.cols(); ++j) x(i, j) /= d;
        for (index_t l = 0; l < i; ++l) {
            const cplx f = lu(l, i);
            if (f == cplx{}) continue;
            simd::active_kernels().axpy(static_cast<std::size_t>(x.cols()), -f,
                                        x.row(i), x.row(l));
        }
    }
    return x;
}

}  // namespace

CMatrix inverse(const CMatrix& a, const InverseOptions& opts) {
    if (a.rows() != a.cols()) throw DimensionMismatch("inverse: not square");
    CMatrix lu = a;
    std::vector<index_t> perm;
    if (!lu_factor(lu, perm))
        throw SingularMatrix("inverse: exactly singular matrix",
                             std::numeric_limits<double>::infinity());
    const CMatrix inv = lu_solve(lu, perm, CMatrix::identity(a.rows()));
    const double cond = one_norm(a) * one_norm(inv);
    if (!inv.all_finite() || cond > opts.condition_bound)
        throw SingularMatrix("inverse: condition estimate " +
                                 std::to_string(cond) + " exceeds bound",
                             cond);
    return inv;
}

CMatrix solve(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols()) throw DimensionMismatch("solve: not square");
    if (a.rows() != b.rows()) throw DimensionMismatch("solve: rhs mismatch");
    CMatrix lu = a;
    std::vector<index_t> perm;
    if (!lu_factor(lu, perm))
        throw SingularMatrix("solve: exactly singular matrix",
                             std::numeric_limits<double>::infinity());
    CMatrix x = lu_solve(lu, perm, b);
    if (!x.all_finite())
        throw SingularMatrix("solve: non-finite solution",
                             std::numeric_limits<double>::infinity());
    return x;
}

CVector solve(const CMatrix& a, const CVector& b) {
    CMatrix rhs(b.len(), 1);
    for (index_t i = 0; i < b.len(); ++i) rhs(i, 0) = b[i];
    const CMatrix x = solve(a, rhs);
    CVector out(b.len());
    for (index_t i = 0; i < b.len(); ++i) out[i] = x(i, 0);
    return out;
}

HermitianEig hermitian_eig(const CMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("hermitian_eig: not square");
    Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(a));
    if (es.info() != Eigen::Success)
        throw Error("hermitian_eig: eigendecomposition failed");
    HermitianEig out{std::vector<double>(es.eigenvalues().data(),
                                         es.eigenvalues().data() + a.rows()),
                     from_eigen(es.eigenvectors())};
    return out;
}

CMatrix psd_factor(const CMatrix& a, const PsdFactorOptions& opts) {
    if (a.rows() != a.cols()) throw DimensionMismatch("psd_factor: not square");
    const double scale = frobenius_norm(a);
    const CMatrix asym = a - a.adjoint();
    if (frobenius_norm(asym) > 2.0 * opts.hermitian_tol * std::max(scale, 1e-300) &&
        scale > 0.0)
        throw Error("psd_factor: input is not Hermitian within tolerance");
    if (scale == 0.0) return CMatrix::zero(a.rows(), a.cols());

    const HermitianEig eig = hermitian_eig(a);
    const double lmax = std::abs(eig.values.back());
    CMatrix k(a.rows(), a.cols());
    // K = V sqrt(clip(L)) V^H
    for (index_t j = 0; j < a.cols(); ++j) {
        double lam = eig.values[static_cast<std::size_t>(j)];
        if (lam < 0.0) {
            if (lam < -opts.clip_threshold * lmax)
                throw Error("psd_factor: significantly negative eigenvalue");
            lam = 0.0;
        }
        const double s = std::sqrt(lam);
        for (index_t i = 0; i < a.rows(); ++i)
            for (index_t l = 0; l < a.rows(); ++l)
                k(i, l) += s * eig.vectors(i, j) * std::conj(eig.vectors(l, j));
    }
    return k;
}

std::vector<cplx> eigenvalues(const CMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("eigenvalues: not square");
    Eigen::ComplexEigenSolver<EMat> es(to_eigen(a), /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw Error("eigenvalues: decomposition failed");
    return {es.eigenvalues().data(), es.eigenvalues().data() + a.rows()};
}

double spectral_radius(const CMatrix& a, const SpectralRadiusOptions& opts) {
    if (a.rows() != a.cols())
        throw DimensionMismatch("spectral_radius: not square");
    const index_t n = a.rows();
    // deterministic start with incommensurate entries so no eigenvector is
    // exactly orthogonal to it in common structured cases
    CVector v(n);
    for (index_t i = 0; i < n; ++i)
        v[i] = cplx(1.0 + 0.25 * std::sin(1.0 + static_cast<double>(i)),
                    0.5 * std::cos(2.0 + 0.7 * static_cast<double>(i)));
    double nv = norm2(v);
    v *= cplx(1.0 / nv, 0.0);
    double prev = -1.0;
    int settled = 0;
    for (int it = 0; it < opts.max_iters; ++it) {
        CVector w = a * v;
        const double nw = norm2(w);
        if (nw < 1e-300) return 0.0;  // start vector annihilated: nilpotent-like
        const double est = nw;        // ||A v||, v unit
        if (prev >= 0.0 && std::abs(est - prev) <= opts.tol * std::max(est, 1.0)) {
            if (++settled >= 3) return est;
        } else {
            settled = 0;
        }
        prev = est;
        w *= cplx(1.0 / nw, 0.0);
        v = std::move(w);
    }
    // stagnation (e.g. tied dominant moduli): full spectrum
    double r = 0.0;
    for (const cplx& l : eigenvalues(a)) r = std::max(r, std::abs(l));
    return r;
}

}  // namespace ris
