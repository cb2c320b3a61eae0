#include "cqed/lindblad.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "cqed/detail/dopri5.hpp"

namespace cqed {

void HilbertLayout::validate() const {
  if (n_spins < 1 || n_spins > 4)
    throw std::invalid_argument("HilbertLayout: n_spins must be 1..4");
  if (fock_cutoff < 2)
    throw std::invalid_argument("HilbertLayout: fock_cutoff must be >= 2");
  if (dim() > kMaxDim)
    throw std::invalid_argument("HilbertLayout: dimension exceeds guard of 2048");
}

namespace {

ComplexMatrix fock_annihilation(int cutoff) {
  ComplexMatrix a(cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a.at(n - 1, n) = std::sqrt(double(n));
  return a;
}

ComplexMatrix spin_single(int m, int n) {
  // basis index 0 = lower level |1>, index 1 = upper level |2>
  ComplexMatrix s(2);
  s.at(m - 1, n - 1) = 1.0;
  return s;
}

}  // namespace

ComplexMatrix annihilation_op(const HilbertLayout& l) {
  l.validate();
  return kron(fock_annihilation(l.fock_cutoff), ComplexMatrix::identity(1 << l.n_spins));
}

ComplexMatrix spin_op(const HilbertLayout& l, int j, int m, int n) {
  l.validate();
  if (j < 0 || j >= l.n_spins) throw std::invalid_argument("spin_op: bad spin index");
  if (m < 1 || m > 2 || n < 1 || n > 2)
    throw std::invalid_argument("spin_op: levels are 1 or 2");
  ComplexMatrix sp = ComplexMatrix::identity(1);
  for (int k = 0; k < l.n_spins; ++k)
    sp = kron(sp, k == j ? spin_single(m, n) : ComplexMatrix::identity(2));
  return kron(ComplexMatrix::identity(l.fock_cutoff + 1), sp);
}

ComplexMatrix collective_jz_op(const HilbertLayout& l) {
  ComplexMatrix jz(l.dim());
  for (int j = 0; j < l.n_spins; ++j) jz += spin_op(l, j, 2, 2);
  add_scaled(jz, -0.5 * l.n_spins, ComplexMatrix::identity(l.dim()));
  return jz;
}

ComplexMatrix collective_jsq_op(const HilbertLayout& l) {
  ComplexMatrix jp(l.dim()), jm(l.dim());
  for (int j = 0; j < l.n_spins; ++j) {
    jp += spin_op(l, j, 2, 1);
    jm += spin_op(l, j, 1, 2);
  }
  const ComplexMatrix jz = collective_jz_op(l);
  ComplexMatrix jsq = 0.5 * (jp * jm + jm * jp);
  jsq += jz * jz;
  return jsq;
}

DensityMatrix::DensityMatrix(HilbertLayout layout, ComplexMatrix m)
    : layout_(layout), m_(std::move(m)) {
  layout_.validate();
  if (m_.dim() != layout_.dim())
    throw std::invalid_argument("DensityMatrix: matrix does not match layout");
}

double DensityMatrix::purity() const {
  double p = 0;
  const int d = m_.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) p += std::norm(m_.at(i, j));
  return p;
}

double DensityMatrix::tail_population() const {
  double pop = 0;
  const int spin_dim = 1 << layout_.n_spins;
  for (int f = std::max(0, layout_.fock_cutoff - 1); f <= layout_.fock_cutoff; ++f)
    for (int s = 0; s < spin_dim; ++s) {
      const int i = layout_.index(f, s);
      pop += m_.at(i, i).real();
    }
  return pop;
}

void DensityMatrix::validate(bool check_positivity) const {
  const double scale = std::max(1.0, m_.norm_inf());
  if (!m_.finite()) throw std::runtime_error("DensityMatrix: non-finite entries");
  if (m_.hermiticity_error() > 1e-12 * scale)
    throw std::runtime_error("DensityMatrix: not hermitian");
  if (std::abs(m_.trace() - 1.0) > 1e-10)
    throw std::runtime_error("DensityMatrix: trace deviates from 1");
  if (check_positivity) {
    const auto ev = hermitian_eigenvalues(m_);
    if (!ev.empty() && ev.front() < -1e-9)
      throw std::runtime_error("DensityMatrix: negative eigenvalue");
  }
}

DensityMatrix vacuum_ground_state(const HilbertLayout& l) {
  ComplexMatrix m(l.dim());
  m.at(0, 0) = 1.0;
  return {l, std::move(m)};
}

DensityMatrix product_state(const HilbertLayout& l, double p_upper, double n_th) {
  if (p_upper < 0 || p_upper > 1)
    throw std::invalid_argument("product_state: p outside [0, 1]");
  if (n_th < 0) throw std::invalid_argument("product_state: negative n_th");
  ComplexMatrix fock(l.fock_cutoff + 1);
  const double r = n_th / (1.0 + n_th);
  double w = 1.0, sum = 0;
  for (int n = 0; n <= l.fock_cutoff; ++n, w *= r) {
    fock.at(n, n) = w;
    sum += w;
  }
  for (int n = 0; n <= l.fock_cutoff; ++n) fock.at(n, n) /= sum;

  ComplexMatrix spin(2);
  spin.at(0, 0) = 1.0 - p_upper;
  spin.at(1, 1) = p_upper;
  ComplexMatrix all = fock;
  for (int j = 0; j < l.n_spins; ++j) all = kron(all, spin);
  return {l, std::move(all)};
}

DensityMatrix pure_state(const HilbertLayout& l, std::span<const cplx> psi) {
  if (static_cast<int>(psi.size()) != l.dim())
    throw std::invalid_argument("pure_state: wrong length");
  double nrm = 0;
  for (const auto& c : psi) nrm += std::norm(c);
  if (nrm <= 0) throw std::invalid_argument("pure_state: zero vector");
  ComplexMatrix m(l.dim());
  for (int i = 0; i < l.dim(); ++i)
    for (int j = 0; j < l.dim(); ++j) m.at(i, j) = psi[i] * std::conj(psi[j]) / nrm;
  return {l, std::move(m)};
}

DensityMatrix dicke_triplet_state(const HilbertLayout& l) {
  if (l.n_spins != 2)
    throw std::invalid_argument("dicke_triplet_state: needs exactly 2 spins");
  std::vector<cplx> psi(l.dim());
  const double isq2 = 1.0 / std::sqrt(2.0);
  psi[l.index(0, 0b01)] = isq2;
  psi[l.index(0, 0b10)] = isq2;
  return pure_state(l, psi);
}

DensityMatrix random_density_matrix(const HilbertLayout& l, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = l.dim();
  ComplexMatrix g(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g.at(i, j) = cplx(gauss(rng), gauss(rng));
  ComplexMatrix m = g * g.adjoint();
  m *= 1.0 / m.trace().real();
  return {l, std::move(m)};
}

Liouvillian::Liouvillian(HilbertLayout layout, ComplexMatrix h_nh,
                         std::vector<ComplexMatrix> jumps)
    : layout_(layout) {
  h_nh_adj_ = SparseMatrix::from_dense(h_nh.adjoint());
  h_nh_ = SparseMatrix::from_dense(h_nh);
  jumps_.reserve(jumps.size());
  jumps_adj_.reserve(jumps.size());
  for (const auto& j : jumps) {
    jumps_.push_back(SparseMatrix::from_dense(j));
    jumps_adj_.push_back(SparseMatrix::from_dense(j.adjoint()));
  }
}

void Liouvillian::apply(const ComplexMatrix& rho, ComplexMatrix& out,
                        Workspace& ws) const {
  sparse_dense_mul(h_nh_, rho, out);
  dense_sparse_mul(rho, h_nh_adj_, ws.t1);
  out += ws.t1;
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    sparse_dense_mul(jumps_[k], rho, ws.t1);
    dense_sparse_mul(ws.t1, jumps_adj_[k], ws.t2);
    out += ws.t2;
  }
}

cplx Liouvillian::moment_derivative(const ComplexMatrix& rho, const ComplexMatrix& o,
                                    Workspace& ws) const {
  ComplexMatrix drho(rho.dim());
  apply(rho, drho, ws);
  return trace_of_product(drho, o);
}

Liouvillian build_liouvillian(const SystemParams& params, const HilbertLayout& layout,
                              double drive_amplitude) {
  params.validate();
  layout.validate();
  const auto occ = ThermalOccupancies::from_params(params);

  const ComplexMatrix a = annihilation_op(layout);
  const ComplexMatrix ad = a.adjoint();

  ComplexMatrix sm_sum(layout.dim()), pe_sum(layout.dim());
  for (int j = 0; j < layout.n_spins; ++j) {
    sm_sum += spin_op(layout, j, 1, 2);
    pe_sum += spin_op(layout, j, 2, 2);
  }

  ComplexMatrix h = params.delta_c() * (ad * a);
  add_scaled(h, params.delta_s(), pe_sum);
  const ComplexMatrix coupling = ad * sm_sum;
  add_scaled(h, params.g_s, coupling);
  add_scaled(h, params.g_s, coupling.adjoint());
  const double w = drive_amplitude * std::sqrt(params.kappa_1);
  add_scaled(h, w, a);
  add_scaled(h, w, ad);

  std::vector<ComplexMatrix> jumps;
  auto add_jump = [&](double rate, const ComplexMatrix& op) {
    if (rate <= 0) return;
    ComplexMatrix j = op;
    j *= std::sqrt(rate);
    jumps.push_back(std::move(j));
  };
  add_jump(params.kappa_c * (1.0 + occ.n_c_th), a);
  add_jump(params.kappa_c * occ.n_c_th, ad);
  for (int j = 0; j < layout.n_spins; ++j) {
    add_jump(params.gamma_s * (1.0 + occ.n_s_th) + params.eta_s, spin_op(layout, j, 1, 2));
    add_jump(params.gamma_s * occ.n_s_th, spin_op(layout, j, 2, 1));
    add_jump(2.0 * params.chi_s, spin_op(layout, j, 2, 2));
  }

  ComplexMatrix h_nh = cplx(0.0, -1.0) * h;
  for (const auto& l : jumps) {
    const ComplexMatrix ll = l.adjoint() * l;
    add_scaled(h_nh, -0.5, ll);
  }
  return {layout, std::move(h_nh), std::move(jumps)};
}

MomentCache::MomentCache(const HilbertLayout& layout) : layout_(layout) {
  layout_.validate();
  const ComplexMatrix a = annihilation_op(layout_);
  const ComplexMatrix ad = a.adjoint();
  const ComplexMatrix s12 = spin_op(layout_, 0, 1, 2);
  const ComplexMatrix s22 = spin_op(layout_, 0, 2, 2);
  ops_[slot::a] = a;
  ops_[slot::sm] = s12;
  ops_[slot::pe] = s22;
  ops_[slot::n] = ad * a;
  ops_[slot::aa] = a * a;
  ops_[slot::ad_sm] = ad * s12;
  ops_[slot::ad_pe] = ad * s22;
  ops_[slot::a_sm] = a * s12;
  if (layout_.n_spins >= 2) {
    const ComplexMatrix s21_1 = spin_op(layout_, 0, 2, 1);
    const ComplexMatrix s12_2 = spin_op(layout_, 1, 1, 2);
    const ComplexMatrix s21_2 = spin_op(layout_, 1, 2, 1);
    const ComplexMatrix s22_2 = spin_op(layout_, 1, 2, 2);
    ops_[slot::sp_sm] = s21_1 * s12_2;
    ops_[slot::pe_sp] = s22 * s21_2;
    ops_[slot::sm_sm] = s12 * s12_2;
    ops_[slot::pe_pe] = s22 * s22_2;
  } else {
    const ComplexMatrix zero(layout_.dim());
    ops_[slot::sp_sm] = zero;
    ops_[slot::pe_sp] = zero;
    ops_[slot::sm_sm] = zero;
    ops_[slot::pe_pe] = zero;
  }
  jz_ = collective_jz_op(layout_);
  jsq_ = collective_jsq_op(layout_);
}

ExactMoments MomentCache::extract(const ComplexMatrix& rho) const {
  ExactMoments out;
  for (int k = 0; k < slot::count; ++k)
    out.cumulants.v[k] = trace_of_product(rho, ops_[k]);
  out.j_z = trace_of_product(rho, jz_).real();
  out.j_sq = trace_of_product(rho, jsq_).real();
  return out;
}

ExactMoments moments(const DensityMatrix& rho) {
  return MomentCache(rho.layout()).extract(rho.matrix());
}

namespace {

detail::Dopri5Options oracle_options(const IntegrationConfig& c) {
  return {c.rel_tol, c.abs_tol, c.max_step, c.initial_step, c.max_steps};
}

}  // namespace

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Liouvillian& l,
                                  std::span<const double> t_grid,
                                  const IntegrationConfig& config) {
  config.validate();
  rho0.validate();
  if (rho0.layout().dim() != l.layout().dim())
    throw std::invalid_argument("evolve: layout mismatch");
  const int d = rho0.layout().dim();
  const std::size_t sz = static_cast<std::size_t>(d) * d;

  std::vector<cplx> y(rho0.matrix().data(), rho0.matrix().data() + sz);
  Liouvillian::Workspace ws;
  ComplexMatrix rho(d), drho(d);

  auto rhs = [&](double, const std::vector<cplx>& yy, std::vector<cplx>& dy) {
    std::copy(yy.begin(), yy.end(), rho.data());
    l.apply(rho, drho, ws);
    std::copy(drho.data(), drho.data() + sz, dy.begin());
  };

  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  auto on_sample = [&](double, const std::vector<cplx>& yy) {
    ComplexMatrix m(d);
    std::copy(yy.begin(), yy.end(), m.data());
    out.emplace_back(rho0.layout(), std::move(m));
    return true;
  };

  const double t_end = t_grid.empty() ? 0.0 : t_grid.back();
  auto res = detail::dopri5_integrate(rhs, 0.0, t_end, y, oracle_options(config), t_grid,
                                      on_sample);
  if (res.status != detail::StepStatus::ok)
    throw std::runtime_error(std::string("evolve: integration failed: ") + res.message);
  return out;
}

OracleRun run_oracle(const SystemParams& params, double drive_amplitude,
                     std::span<const double> t_grid, const IntegrationConfig& config,
                     const std::function<DensityMatrix(const HilbertLayout&)>& initial_state,
                     int n_spins, int start_cutoff, double tail_tol) {
  config.validate();
  int cutoff = std::max(2, start_cutoff);
  int retries = 0;
  while (true) {
    HilbertLayout layout{n_spins, cutoff};
    layout.validate();
    const Liouvillian l = build_liouvillian(params, layout, drive_amplitude);
    const DensityMatrix rho0 = initial_state(layout);

    const int d = layout.dim();
    const std::size_t sz = static_cast<std::size_t>(d) * d;
    std::vector<cplx> y(rho0.matrix().data(), rho0.matrix().data() + sz);
    Liouvillian::Workspace ws;
    ComplexMatrix rho(d), drho(d);
    auto rhs = [&](double, const std::vector<cplx>& yy, std::vector<cplx>& dy) {
      std::copy(yy.begin(), yy.end(), rho.data());
      l.apply(rho, drho, ws);
      std::copy(drho.data(), drho.data() + sz, dy.begin());
    };

    OracleRun run;
    run.layout = layout;
    run.cutoff_retries = retries;
    const MomentCache cache(layout);
    ComplexMatrix sample(d);
    bool tail_blown = false;
    auto on_sample = [&](double t, const std::vector<cplx>& yy) {
      std::copy(yy.begin(), yy.end(), sample.data());
      DensityMatrix dm(layout, sample);
      run.times.push_back(t);
      run.moments.push_back(cache.extract(dm.matrix()));
      run.max_tail_population = std::max(run.max_tail_population, dm.tail_population());
      run.max_trace_error =
          std::max(run.max_trace_error, std::abs(dm.matrix().trace().real() - 1.0));
      run.max_purity = std::max(run.max_purity, dm.purity());
      if (run.max_tail_population >= tail_tol) {
        tail_blown = true;
        return false;  // truncation is biased; stop early and retry bigger
      }
      return true;
    };

    const double t_end = t_grid.empty() ? 0.0 : t_grid.back();
    auto res = detail::dopri5_integrate(rhs, 0.0, t_end, y, oracle_options(config),
                                        t_grid, on_sample);
    if (!tail_blown && res.status != detail::StepStatus::ok)
      throw std::runtime_error(std::string("run_oracle: integration failed: ") +
                               res.message);
    if (!tail_blown) {
      ComplexMatrix fin(d);
      std::copy(y.begin(), y.end(), fin.data());
      run.final_state = DensityMatrix(layout, std::move(fin));
      return run;
    }
    cutoff *= 2;
    ++retries;
    HilbertLayout next{n_spins, cutoff};
    if (next.dim() > HilbertLayout::kMaxDim)
      throw std::runtime_error(
          "run_oracle: Fock tail will not fit under the dimension guard");
  }
}

}  // namespace cqed
