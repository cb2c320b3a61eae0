#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/dense.hpp"
#include "cqed/integrator.hpp"
#include "cqed/model.hpp"

// Exact density-matrix simulation of the driven spin-resonator master
// equation for a handful of spins and a truncated Fock space. This is the
// ground truth the cumulant closure is validated against; it never runs at
// ensemble scale.

namespace cqed {

struct HilbertLayout {
  int n_spins = 1;      // 1..4 exact spins
  int fock_cutoff = 2;  // highest Fock level kept

  static constexpr int kMaxDim = 2048;

  int dim() const { return (fock_cutoff + 1) << n_spins; }
  void validate() const;

  // Basis index = fock_level * 2^n_spins + spin_bits, bit (n_spins-1-j) of
  // spin_bits set when spin j (0-based) occupies the upper level.
  int index(int fock_level, int spin_bits) const {
    return (fock_level << n_spins) + spin_bits;
  }
};

/// Photon annihilation operator on the joint space.
ComplexMatrix annihilation_op(const HilbertLayout& l);
/// sigma_j^{mn} = |m><n| on spin j (0-based), m, n in {1, 2}.
ComplexMatrix spin_op(const HilbertLayout& l, int j, int m, int n);
/// Collective J_z = sum_j (sigma_j^22 - 1/2).
ComplexMatrix collective_jz_op(const HilbertLayout& l);
/// Collective J^2.
ComplexMatrix collective_jsq_op(const HilbertLayout& l);

class DensityMatrix {
 public:
  DensityMatrix(HilbertLayout layout, ComplexMatrix m);

  const HilbertLayout& layout() const { return layout_; }
  const ComplexMatrix& matrix() const { return m_; }
  ComplexMatrix& matrix() { return m_; }

  double purity() const;           // tr(rho^2)
  double tail_population() const;  // population of the top two Fock levels
  /// hermitian to 1e-12, trace 1 to 1e-10; with check_positivity also
  /// eigenvalues >= -1e-9 (costs an eigendecomposition).
  void validate(bool check_positivity = false) const;

 private:
  HilbertLayout layout_;
  ComplexMatrix m_;
};

DensityMatrix vacuum_ground_state(const HilbertLayout& l);
/// Product state: every spin diag(1-p, p), photon mode thermal with mean
/// occupation n_th (renormalized on the truncated space).
DensityMatrix product_state(const HilbertLayout& l, double p_upper, double n_th);
DensityMatrix pure_state(const HilbertLayout& l, std::span<const cplx> psi);
/// Symmetric two-spin Dicke state |J=1, M=0> with the photon mode in vacuum.
DensityMatrix dicke_triplet_state(const HilbertLayout& l);
DensityMatrix random_density_matrix(const HilbertLayout& l, unsigned long seed);

/// Generator of the rotating-frame master equation, kept as an effective
/// non-hermitian Hamiltonian plus rate-scaled jump operators. The operators
/// are a few diagonals at most, so the hot path runs on sparse kernels.
class Liouvillian {
 public:
  struct Workspace {
    ComplexMatrix t1, t2;
  };

  Liouvillian(HilbertLayout layout, ComplexMatrix h_nh, std::vector<ComplexMatrix> jumps);

  const HilbertLayout& layout() const { return layout_; }

  /// out = h_nh rho + rho h_nh^dag + sum_k L_k rho L_k^dag
  void apply(const ComplexMatrix& rho, ComplexMatrix& out, Workspace& ws) const;

  /// d<o>/dt for the current generator: tr(L(rho) o).
  cplx moment_derivative(const ComplexMatrix& rho, const ComplexMatrix& o,
                         Workspace& ws) const;

 private:
  HilbertLayout layout_;
  SparseMatrix h_nh_;      // -iH - (1/2) sum L^dag L
  SparseMatrix h_nh_adj_;
  std::vector<SparseMatrix> jumps_;      // sqrt(rate) * L
  std::vector<SparseMatrix> jumps_adj_;
};

/// Rotating-frame Hamiltonian Delta_c a^dag a + Delta_s sum sigma^22
/// + g (a^dag sum sigma^12 + h.c.) + drive*sqrt(kappa_1) (a + a^dag), with
/// cavity thermal, spin thermal, cooling and dephasing dissipators.
Liouvillian build_liouvillian(const SystemParams& params, const HilbertLayout& layout,
                              double drive_amplitude);

/// All twelve cumulant slots read off exactly (spins 0 and 1 as the
/// representative pair) plus the exact collective-spin expectations.
struct ExactMoments {
  CumulantState cumulants;
  double j_sq = 0;
  double j_z = 0;
};

/// Precomputed slot operators for one layout; building them dominates the
/// cost of moment extraction along a trajectory.
class MomentCache {
 public:
  explicit MomentCache(const HilbertLayout& layout);
  const HilbertLayout& layout() const { return layout_; }
  ExactMoments extract(const ComplexMatrix& rho) const;

 private:
  HilbertLayout layout_;
  std::array<ComplexMatrix, slot::count> ops_;
  ComplexMatrix jz_, jsq_;
};

ExactMoments moments(const DensityMatrix& rho);

/// RK 5(4) evolution of the vectorized master equation, sampled on t_grid.
std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Liouvillian& l,
                                  std::span<const double> t_grid,
                                  const IntegrationConfig& config);

struct OracleRun {
  HilbertLayout layout;            // layout that met the tail criterion
  std::vector<double> times;
  std::vector<ExactMoments> moments;
  std::optional<DensityMatrix> final_state;
  double max_tail_population = 0;
  double max_trace_error = 0;
  double max_purity = 0;
  int cutoff_retries = 0;
};

/// Evolves with the smallest tried Fock cutoff whose tail population stays
/// below tail_tol, doubling the cutoff and retrying otherwise (dimension
/// guard still applies). initial_state is rebuilt per layout.
OracleRun run_oracle(const SystemParams& params, double drive_amplitude,
                     std::span<const double> t_grid, const IntegrationConfig& config,
                     const std::function<DensityMatrix(const HilbertLayout&)>& initial_state,
                     int n_spins, int start_cutoff, double tail_tol = 1e-8);

}  // namespace cqed
