#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ris/errors.hpp"

namespace ris {

using cplx = std::complex<double>;
using index_t = std::ptrdiff_t;

class CVector;

// Dense complex matrix, row-major. Entries are validated finite on
// construction from data; dimensions are strictly positive.
class CMatrix {
  public:
    CMatrix() : rows_(0), cols_(0) {}     // empty placeholder
    CMatrix(index_t rows, index_t cols);  // zero-initialized
    CMatrix(index_t rows, index_t cols, std::vector<cplx> entries);

    static CMatrix identity(index_t n);
    static CMatrix zero(index_t rows, index_t cols) { return {rows, cols}; }
    static CMatrix diag(const CVector& d);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    cplx& operator()(index_t i, index_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(index_t i, index_t j) const {
        return data_[i * cols_ + j];
    }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    cplx* row(index_t i) { return data_.data() + i * cols_; }
    const cplx* row(index_t i) const { return data_.data() + i * cols_; }
    std::size_t size() const { return data_.size(); }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix conjugate() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    bool all_finite() const;

  private:
    index_t rows_, cols_;
    std::vector<cplx> data_;
};

class CVector {
  public:
    CVector() : len_(0) {}          // empty placeholder
    explicit CVector(index_t len);  // zero-initialized
    explicit CVector(std::vector<cplx> entries);
    CVector(std::initializer_list<cplx> entries);

    static CVector ones(index_t n);

    index_t len() const { return len_; }
    cplx& operator[](index_t i) { return data_[i]; }
    const cplx& operator[](index_t i) const { return data_[i]; }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    CVector conjugate() const;
    CVector& operator+=(const CVector& o);
    CVector& operator-=(const CVector& o);
    CVector& operator*=(cplx s);

  private:
    index_t len_;
    std::vector<cplx> data_;
};

// --- arithmetic -----------------------------------------------------------

CMatrix matmul(const CMatrix& a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CVector operator*(const CMatrix& a, const CVector& x);
CVector operator+(CVector a, const CVector& b);
CVector operator-(CVector a, const CVector& b);
CVector operator*(cplx s, CVector a);

// a^H * b over vectors
cplx dotc(const CVector& a, const CVector& b);

CMatrix hadamard(const CMatrix& a, const CMatrix& b);
CVector hadamard(const CVector& a, const CVector& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

// outer product a * b^H
CMatrix outer(const CVector& a, const CVector& b);

// --- reshaping ------------------------------------------------------------

// column-stacking vectorization
CVector vec(const CMatrix& a);
CMatrix unvec(const CVector& v, index_t rows, index_t cols);

// diag_of(a)   = main diagonal of a             (plain)
// diag_of_h(a) = diag(a^H), i.e. conjugated diagonal (the paper-side
//                convention psi_l = diag(Psi_l^H))
CVector diag_of(const CMatrix& a);
CVector diag_of_h(const CMatrix& a);
// diag_from(v)   = Diag(v); diag_from_h(v) builds Diag(conj(v)), the inverse
// of diag_of_h.
CMatrix diag_from(const CVector& v);
CMatrix diag_from_h(const CVector& v);

// --- norms ----------------------------------------------------------------

double frobenius_norm(const CMatrix& a);
double frobenius_norm_sq(const CMatrix& a);
double norm2(const CVector& a);
double norm2_sq(const CVector& a);
// max |entry|
double max_abs(const CMatrix& a);
double max_abs(const CVector& a);

// --- factorizations and spectra -------------------------------------------

struct InverseOptions {
    double condition_bound = 1e12;
};

// LU-based inverse with a 1-norm condition estimate. Throws SingularMatrix
// when the estimate exceeds the configured bound.
CMatrix inverse(const CMatrix& a, const InverseOptions& opts = {});

// solve a * x = b
CMatrix solve(const CMatrix& a, const CMatrix& b);
CVector solve(const CMatrix& a, const CVector& b);

struct PsdFactorOptions {
    double hermitian_tol = 1e-10;   // relative to ||a||_F
    double clip_threshold = 1e-10;  // eigenvalues below -clip*||a||_2 reject
};

// Hermitian PSD square root: returns Hermitian K with K*K^H == a. Roundoff
// negative eigenvalues are clipped to zero.
CMatrix psd_factor(const CMatrix& a, const PsdFactorOptions& opts = {});

struct SpectralRadiusOptions {
    double tol = 1e-10;
    int max_iters = 5000;
};

// max |eigenvalue| via power iteration with deterministic start; falls back
// to a full eigendecomposition when the iteration stagnates.
double spectral_radius(const CMatrix& a, const SpectralRadiusOptions& opts = {});

// all eigenvalues (general square complex matrix)
std::vector<cplx> eigenvalues(const CMatrix& a);

// Hermitian eigendecomposition: ascending eigenvalues and matching
// eigenvector columns.
struct HermitianEig {
    std::vector<double> values;
    CMatrix vectors;
};
HermitianEig hermitian_eig(const CMatrix& a);

}  // namespace ris
