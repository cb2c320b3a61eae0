#include "cqed/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqed {

namespace {
bool g_parallel = true;
// Below these dimensions the OpenMP fork/join costs more than it saves
// (measured with cqed_bench; the sparse kernels are memory-bound and only
// profit from threads at larger sizes).
constexpr int kParallelThreshold = 48;
constexpr int kSparseParallelThreshold = 384;
}  // namespace

void set_parallel_kernels(bool enabled) { g_parallel = enabled; }
bool parallel_kernels_enabled() { return g_parallel; }

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m.at(j, i) = std::conj(at(i, j));
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0;
  for (int i = 0; i < n_; ++i) t += at(i, i);
  return t;
}

double ComplexMatrix::norm_inf() const {
  double m = 0;
  for (const auto& z : d_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::hermiticity_error() const {
  double m = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j)
      m = std::max(m, std::abs(at(i, j) - std::conj(at(j, i))));
  return m;
}

bool ComplexMatrix::finite() const {
  for (const auto& z : d_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : d_) z *= s;
  return *this;
}

namespace {

inline void matmul_row_range(const cplx* a, const cplx* b, cplx* out, int n, int r0,
                             int r1) {
  for (int i = r0; i < r1; ++i) {
    cplx* row_out = out + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) row_out[j] = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx aik = a[static_cast<std::size_t>(i) * n + k];
      if (aik == cplx(0.0)) continue;
      const cplx* row_b = b + static_cast<std::size_t>(k) * n;
      for (int j = 0; j < n; ++j) row_out[j] += aik * row_b[j];
    }
  }
}

}  // namespace

void matmul_serial(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out) {
  const int n = a.dim();
  if (b.dim() != n) throw std::invalid_argument("matmul: dimension mismatch");
  if (out.dim() != n) out = ComplexMatrix(n);
  matmul_row_range(a.data(), b.data(), out.data(), n, 0, n);
}

void matmul_parallel(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out) {
  const int n = a.dim();
  if (b.dim() != n) throw std::invalid_argument("matmul: dimension mismatch");
  if (out.dim() != n) out = ComplexMatrix(n);
  const cplx* pa = a.data();
  const cplx* pb = b.data();
  cplx* po = out.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) matmul_row_range(pa, pb, po, n, i, i + 1);
}

void matmul(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out) {
  if (g_parallel && a.dim() >= kParallelThreshold)
    matmul_parallel(a, b, out);
  else
    matmul_serial(a, b, out);
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.dim());
  matmul(a, b, out);
  return out;
}

ComplexMatrix operator*(cplx s, const ComplexMatrix& a) {
  ComplexMatrix out = a;
  out *= s;
  return out;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = a;
  out += b;
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = a;
  add_scaled(out, -1.0, b);
  return out;
}

void add_scaled(ComplexMatrix& y, cplx s, const ComplexMatrix& x) {
  if (y.dim() != x.dim()) throw std::invalid_argument("add_scaled: dimension mismatch");
  const std::size_t sz = static_cast<std::size_t>(y.dim()) * y.dim();
  cplx* py = y.data();
  const cplx* px = x.data();
  for (std::size_t i = 0; i < sz; ++i) py[i] += s * px[i];
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const int na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) {
      const cplx aij = a.at(i, j);
      if (aij == cplx(0.0)) continue;
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l) out.at(i * nb + k, j * nb + l) = aij * b.at(k, l);
    }
  return out;
}

cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const int n = a.dim();
  if (b.dim() != n) throw std::invalid_argument("trace_of_product: dimension mismatch");
  cplx t = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) t += a.at(i, k) * b.at(k, i);
  return t;
}

SparseMatrix SparseMatrix::from_dense(const ComplexMatrix& m, double drop_tol) {
  SparseMatrix s;
  s.n_ = m.dim();
  s.row_ptr_.assign(s.n_ + 1, 0);
  for (int i = 0; i < s.n_; ++i) {
    for (int j = 0; j < s.n_; ++j) {
      const cplx v = m.at(i, j);
      if (std::abs(v) > drop_tol) {
        s.cols_.push_back(j);
        s.vals_.push_back(v);
      }
    }
    s.row_ptr_[i + 1] = static_cast<int>(s.vals_.size());
  }
  return s;
}

namespace {

inline void spmm_rows(const SparseMatrix& s, const ComplexMatrix& d, ComplexMatrix& out,
                      int r0, int r1) {
  const int n = s.dim();
  const auto& rp = s.row_ptr();
  const auto& cols = s.cols();
  const auto& vals = s.vals();
  for (int i = r0; i < r1; ++i) {
    cplx* row_out = out.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) row_out[j] = 0.0;
    for (int e = rp[i]; e < rp[i + 1]; ++e) {
      const cplx v = vals[e];
      const cplx* row_d = d.data() + static_cast<std::size_t>(cols[e]) * n;
      for (int j = 0; j < n; ++j) row_out[j] += v * row_d[j];
    }
  }
}

inline void dsmm_rows(const ComplexMatrix& d, const SparseMatrix& s, ComplexMatrix& out,
                      int r0, int r1) {
  const int n = s.dim();
  const auto& rp = s.row_ptr();
  const auto& cols = s.cols();
  const auto& vals = s.vals();
  for (int i = r0; i < r1; ++i) {
    const cplx* row_d = d.data() + static_cast<std::size_t>(i) * n;
    cplx* row_out = out.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) row_out[j] = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx v = row_d[k];
      if (v == cplx(0.0)) continue;
      for (int e = rp[k]; e < rp[k + 1]; ++e) row_out[cols[e]] += v * vals[e];
    }
  }
}

void check_dims(int a, int b) {
  if (a != b) throw std::invalid_argument("sparse kernel: dimension mismatch");
}

}  // namespace

void sparse_dense_mul_serial(const SparseMatrix& s, const ComplexMatrix& d,
                             ComplexMatrix& out) {
  check_dims(s.dim(), d.dim());
  if (out.dim() != d.dim()) out = ComplexMatrix(d.dim());
  spmm_rows(s, d, out, 0, s.dim());
}

void sparse_dense_mul_parallel(const SparseMatrix& s, const ComplexMatrix& d,
                               ComplexMatrix& out) {
  check_dims(s.dim(), d.dim());
  if (out.dim() != d.dim()) out = ComplexMatrix(d.dim());
  const int n = s.dim();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) spmm_rows(s, d, out, i, i + 1);
}

void sparse_dense_mul(const SparseMatrix& s, const ComplexMatrix& d, ComplexMatrix& out) {
  if (g_parallel && s.dim() >= kSparseParallelThreshold)
    sparse_dense_mul_parallel(s, d, out);
  else
    sparse_dense_mul_serial(s, d, out);
}

void dense_sparse_mul_serial(const ComplexMatrix& d, const SparseMatrix& s,
                             ComplexMatrix& out) {
  check_dims(s.dim(), d.dim());
  if (out.dim() != d.dim()) out = ComplexMatrix(d.dim());
  dsmm_rows(d, s, out, 0, s.dim());
}

void dense_sparse_mul_parallel(const ComplexMatrix& d, const SparseMatrix& s,
                               ComplexMatrix& out) {
  check_dims(s.dim(), d.dim());
  if (out.dim() != d.dim()) out = ComplexMatrix(d.dim());
  const int n = s.dim();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) dsmm_rows(d, s, out, i, i + 1);
}

void dense_sparse_mul(const ComplexMatrix& d, const SparseMatrix& s, ComplexMatrix& out) {
  if (g_parallel && s.dim() >= kSparseParallelThreshold)
    dense_sparse_mul_parallel(d, s, out);
  else
    dense_sparse_mul_serial(d, s, out);
}

std::vector<double> hermitian_eigenvalues(ComplexMatrix a, double tol, int max_sweeps) {
  const int n = a.dim();
  if (a.hermiticity_error() > 1e-10 * std::max(1.0, a.norm_inf()))
    throw std::invalid_argument("hermitian_eigenvalues: matrix not hermitian");
  // Cyclic Jacobi with complex Givens rotations.
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a.at(p, q)));
    if (off <= tol * std::max(1.0, a.norm_inf())) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = a.at(p, q);
        if (std::abs(apq) == 0.0) continue;
        const double app = a.at(p, p).real();
        const double aqq = a.at(q, q).real();
        // Diagonalize the 2x2 hermitian block [[app, apq], [apq*, aqq]].
        const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), aqq - app);
        const double c = std::cos(theta);
        const cplx phase = apq / std::abs(apq);
        const cplx s = std::sin(theta) * phase;
        for (int k = 0; k < n; ++k) {
          const cplx akp = a.at(k, p);
          const cplx akq = a.at(k, q);
          a.at(k, p) = c * akp - std::conj(s) * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const cplx apk = a.at(p, k);
          const cplx aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = std::conj(s) * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a.at(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace cqed
