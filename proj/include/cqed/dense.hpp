#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Dense complex linear algebra used by the exact Lindblad oracle. The hot
// kernel (matmul) exists in a serial reference version and an OpenMP
// version; the parallel one splits over output rows, so both produce
// bit-identical results and the serial one stays around as the test oracle.

namespace cqed {

using cplx = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * n) {}

  static ComplexMatrix identity(int n);

  int dim() const { return n_; }
  cplx& at(int i, int j) { return d_[static_cast<std::size_t>(i) * n_ + j]; }
  const cplx& at(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
  cplx* data() { return d_.data(); }
  const cplx* data() const { return d_.data(); }

  ComplexMatrix adjoint() const;
  cplx trace() const;
  double norm_inf() const;      // max |entry|
  double hermiticity_error() const;  // max |A - A^dag| entry
  bool finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

 private:
  int n_ = 0;
  std::vector<cplx> d_;
};

/// out = a * b (serial reference kernel)
void matmul_serial(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out);
/// out = a * b (OpenMP over output rows; bitwise identical to serial)
void matmul_parallel(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out);
/// Dispatches to the parallel kernel for dimensions where it pays off.
void matmul(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out);

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, const ComplexMatrix& a);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

/// y += s * x
void add_scaled(ComplexMatrix& y, cplx s, const ComplexMatrix& x);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// tr(a * b) without forming the product.
cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Eigenvalues of a hermitian matrix by cyclic complex Jacobi rotations,
/// ascending. Intended for validation on the oracle's small dimensions.
std::vector<double> hermitian_eigenvalues(ComplexMatrix a, double tol = 1e-13,
                                          int max_sweeps = 60);

/// Compressed-row view of a (physically very sparse) operator matrix. The
/// Liouvillian hot loop is sparse * dense and dense * sparse; both kernels
/// split over output rows, so the OpenMP versions match the serial ones bit
/// for bit.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  static SparseMatrix from_dense(const ComplexMatrix& m, double drop_tol = 0.0);

  int dim() const { return n_; }
  std::size_t nnz() const { return vals_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<cplx>& vals() const { return vals_; }

 private:
  int n_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<cplx> vals_;
};

/// out = s * d
void sparse_dense_mul_serial(const SparseMatrix& s, const ComplexMatrix& d,
                             ComplexMatrix& out);
void sparse_dense_mul_parallel(const SparseMatrix& s, const ComplexMatrix& d,
                               ComplexMatrix& out);
void sparse_dense_mul(const SparseMatrix& s, const ComplexMatrix& d, ComplexMatrix& out);

/// out = d * s
void dense_sparse_mul_serial(const ComplexMatrix& d, const SparseMatrix& s,
                             ComplexMatrix& out);
void dense_sparse_mul_parallel(const ComplexMatrix& d, const SparseMatrix& s,
                               ComplexMatrix& out);
void dense_sparse_mul(const ComplexMatrix& d, const SparseMatrix& s, ComplexMatrix& out);

/// Global switch consulted by matmul(); mostly for the benchmark tool.
void set_parallel_kernels(bool enabled);
bool parallel_kernels_enabled();

}  // namespace cqed
