#include "kinklab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kinklab/linalg.hpp"
#include "kinklab/parallel.hpp"

namespace kink {

double BridgeSpec::kernel(double s, double sp) const {
  const double L = params.half_length();
  const double t = s + L, tp = sp + L;
  return params.epsilon * (std::min(t, tp) - t * tp / (2.0 * L));
}

PLPath sample_bridge(const BridgeSpec& spec, RngStream& rng) {
  const ScaleParams& par = spec.params;
  const int n = par.n_nodes();
  const double delta = par.mesh();
  const double sq_eps = std::sqrt(par.epsilon);
  const double sq_delta = std::sqrt(delta);

  std::vector<double> walk(n, 0.0);
  for (int k = 1; k < n; ++k) walk[k] = walk[k - 1] + sq_delta * rng.normal();

  PLPath u = zero_path(par, Boundary::FixedPlusMinus);
  const double end = walk[n - 1];
  for (int k = 1; k < n - 1; ++k) {
    const double bridge = walk[k] - end * static_cast<double>(k) / (n - 1);
    u.values[k] = spec.mean(par.node(k)) + sq_eps * bridge;
  }
  return u;
}

namespace {

double log_gauss_kernel(double d, double var) {
  return -0.5 * d * d / var - 0.5 * std::log(2.0 * M_PI * var);
}

// stiffness matrix of the zero-boundary PL space, scaled by `scale`
Tridiag stiffness(const ScaleParams& par, double scale) {
  const int n = 2 * par.N - 1;
  const double delta = par.mesh();
  Tridiag K;
  K.diag.assign(n, scale * 2.0 / delta);
  K.off.assign(n - 1, -scale / delta);
  return K;
}

Tridiag mass_plus_stiffness(const ScaleParams& par, double scale) {
  const int n = 2 * par.N - 1;
  const double delta = par.mesh();
  Tridiag A;
  A.diag.assign(n, scale * (2.0 / delta + 4.0 * delta / 6.0));
  A.off.assign(n - 1, scale * (-1.0 / delta + delta / 6.0));
  return A;
}

}  // namespace

double log_density(const BridgeSpec& spec, const PLPath& u) {
  if (u.boundary != Boundary::FixedPlusMinus)
    throw std::domain_error("log_density: boundary values must be -1/+1");
  const ScaleParams& par = spec.params;
  const double delta = par.mesh();
  const double eps = par.epsilon;
  double lp = 0.0;
  for (int k = 0; k + 1 < par.n_nodes(); ++k)
    lp += log_gauss_kernel(u.values[k + 1] - u.values[k], eps * delta);
  lp -= log_gauss_kernel(2.0, eps * 2.0 * par.half_length());
  return lp;
}

double log_density_normalizer_product(const BridgeSpec& spec) {
  const ScaleParams& par = spec.params;
  const double eps = par.epsilon, delta = par.mesh(), L = par.half_length();
  return -par.N * std::log(2.0 * M_PI * eps * delta) +
         0.5 * std::log(2.0 * M_PI * eps * 2.0 * L) + 1.0 / (eps * L);
}

double log_density_normalizer_determinant(const BridgeSpec& spec) {
  const ScaleParams& par = spec.params;
  const int n = 2 * par.N - 1;
  const double eps = par.epsilon, L = par.half_length();
  const Tridiag K = stiffness(par, 1.0 / eps);
  return -0.5 * n * std::log(2.0 * M_PI) + 1.0 / (eps * L) + 0.5 * tridiag_logdet(K);
}

std::vector<double> refine(const BridgeSpec& spec, const PLPath& u, int cell, int M,
                           RngStream& rng) {
  const ScaleParams& par = spec.params;
  if (cell < 0 || cell >= 2 * par.N) throw std::invalid_argument("refine: bad cell index");
  if (M < 0) throw std::invalid_argument("refine: M must be nonnegative");
  const double delta = par.mesh();
  const double h = delta / (M + 1);
  const double sq = std::sqrt(par.epsilon * h);

  std::vector<double> walk(M + 2, 0.0);
  for (int j = 1; j <= M + 1; ++j) walk[j] = walk[j - 1] + sq * rng.normal();
  std::vector<double> out(M);
  const double y0 = u.values[cell], y1 = u.values[cell + 1];
  for (int j = 1; j <= M; ++j) {
    const double t = static_cast<double>(j) / (M + 1);
    const double dev = walk[j] - t * walk[M + 1];
    out[j - 1] = y0 + (y1 - y0) * t + dev;
  }
  return out;
}

bool ConcentrationReport::dominated(double z) const {
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double se = binomial_se(empirical_p[i], n_samples);
    if (empirical_p[i] > theoretical_p[i] + z * se) return false;
  }
  return true;
}

namespace {

struct TailAccum {
  std::vector<long> exceed_l2, exceed_cell, exceed_inf;
  RunningStats l2, l2_sq, cell, cell_sq, inf, inf_sq;
  long n = 0;

  explicit TailAccum(std::size_t nr)
      : exceed_l2(nr, 0), exceed_cell(nr, 0), exceed_inf(nr, 0) {}

  void merge(const TailAccum& o) {
    for (std::size_t i = 0; i < exceed_l2.size(); ++i) {
      exceed_l2[i] += o.exceed_l2[i];
      exceed_cell[i] += o.exceed_cell[i];
      exceed_inf[i] += o.exceed_inf[i];
    }
    l2.merge(o.l2);
    l2_sq.merge(o.l2_sq);
    cell.merge(o.cell);
    cell_sq.merge(o.cell_sq);
    inf.merge(o.inf);
    inf_sq.merge(o.inf_sq);
    n += o.n;
  }
};

}  // namespace

RGrids default_r_grids(const ScaleParams& params, int n_points) {
  const double eps = params.epsilon, L = params.half_length();
  const double eps12 = eps * L * L;
  RGrids g;
  for (int i = 0; i < n_points; ++i) {
    const double lp = std::log(0.8) + (std::log(1e-4) - std::log(0.8)) * i / (n_points - 1);
    g.l2.push_back(std::sqrt(-lp * eps12 / (M_PI * M_PI * params.N * params.N)));
    g.cell.push_back(g.l2.back());
    // invert 4N exp(-r^2 N / (8 eps L)) = p
    const double arg = std::log(4.0 * params.N) - lp;
    g.linf.push_back(std::sqrt(std::max(0.0, arg) * 8.0 * eps * L / params.N));
  }
  return g;
}

std::array<ConcentrationReport, 3> discretization_tails(const BridgeSpec& spec,
                                                        long n_samples, int M,
                                                        const RGrids& r_grids,
                                                        RngStream rng, int workers) {
  if (M < 8) throw std::invalid_argument("discretization_tails: need M >= 8 per cell");
  const ScaleParams& par = spec.params;
  const double eps = par.epsilon, delta = par.mesh(), L = par.half_length();
  const double h = delta / (M + 1);
  // trapezoid of the sampled squares plus the unbiasing conditional term
  const double var_correction = eps * delta * delta / (6.0 * (M + 1) * (M + 1));
  const int mid_cell = par.N;  // the cell [0, delta]
  const std::size_t nr = r_grids.l2.size();
  if (r_grids.cell.size() != nr || r_grids.linf.size() != nr)
    throw std::invalid_argument("discretization_tails: r grids must share a length");

  const int n_tasks = hardware_workers(workers);
  std::vector<TailAccum> acc(n_tasks, TailAccum(nr));
  const long per = (n_samples + n_tasks - 1) / n_tasks;

  const double center_l2 = std::sqrt(eps * L * L / (3.0 * par.N));
  const double center_cell = std::sqrt(eps * L * L / (6.0 * par.N * par.N));

  parallel_tasks(n_tasks, n_tasks, [&](int task) {
    TailAccum& a = acc[task];
    const long lo = task * per, hi = std::min<long>(n_samples, lo + per);
    std::vector<double> walk(M + 2);
    for (long rep = lo; rep < hi; ++rep) {
      RngStream rs = rng.derive(static_cast<std::uint64_t>(rep));
      double sum_sq = 0.0, cell_sq = 0.0, sup = 0.0;
      for (int cell = 0; cell < 2 * par.N; ++cell) {
        RngStream rc = rs.derive(static_cast<std::uint64_t>(cell));
        const double sq = std::sqrt(eps * h);
        walk[0] = 0.0;
        for (int j = 1; j <= M + 1; ++j) walk[j] = walk[j - 1] + sq * rc.normal();
        double cell_trap = 0.0;
        for (int j = 1; j <= M; ++j) {
          const double dev = walk[j] - walk[M + 1] * static_cast<double>(j) / (M + 1);
          cell_trap += dev * dev;
          sup = std::max(sup, std::abs(dev));
        }
        const double cell_val = h * cell_trap + var_correction;
        sum_sq += cell_val;
        if (cell == mid_cell) cell_sq = cell_val;
      }
      const double norm_l2 = std::sqrt(sum_sq);
      const double norm_cell = std::sqrt(cell_sq);
      a.l2.add(norm_l2);
      a.l2_sq.add(sum_sq);
      a.cell.add(norm_cell);
      a.cell_sq.add(cell_sq);
      a.inf.add(sup);
      a.inf_sq.add(sup * sup);
      ++a.n;
      for (std::size_t i = 0; i < nr; ++i) {
        if (norm_l2 >= center_l2 + r_grids.l2[i]) ++a.exceed_l2[i];
        if (norm_cell >= center_cell + r_grids.cell[i]) ++a.exceed_cell[i];
        if (sup >= r_grids.linf[i]) ++a.exceed_inf[i];
      }
    }
  });
  TailAccum total(nr);
  for (const auto& a : acc) total.merge(a);

  std::array<ConcentrationReport, 3> out;
  const double eps12 = eps * L * L;  // eps^{1-2gamma}
  out[0].bound_name = "whole-line-L2";
  out[0].centering = center_l2;
  out[0].r_grid = r_grids.l2;
  out[1].bound_name = "short-interval-L2";
  out[1].centering = center_cell;
  out[1].r_grid = r_grids.cell;
  out[2].bound_name = "whole-line-Linf";
  out[2].centering = 0.0;
  out[2].r_grid = r_grids.linf;
  for (auto& rep : out) rep.n_samples = total.n;
  out[0].stat = total.l2;
  out[0].stat_sq = total.l2_sq;
  out[1].stat = total.cell;
  out[1].stat_sq = total.cell_sq;
  out[2].stat = total.inf;
  out[2].stat_sq = total.inf_sq;
  for (std::size_t i = 0; i < nr; ++i) {
    const double r2 = r_grids.l2[i], rc = r_grids.cell[i], ri = r_grids.linf[i];
    out[0].empirical_p.push_back(static_cast<double>(total.exceed_l2[i]) / total.n);
    out[0].theoretical_p.push_back(
        std::min(1.0, std::exp(-r2 * r2 * M_PI * M_PI * par.N * par.N / eps12)));
    out[1].empirical_p.push_back(static_cast<double>(total.exceed_cell[i]) / total.n);
    out[1].theoretical_p.push_back(
        std::min(1.0, std::exp(-rc * rc * M_PI * M_PI * par.N * par.N / eps12)));
    out[2].empirical_p.push_back(static_cast<double>(total.exceed_inf[i]) / total.n);
    out[2].theoretical_p.push_back(
        std::min(1.0, 4.0 * par.N * std::exp(-ri * ri * par.N / (8.0 * eps * L))));
  }
  return out;
}

ConcentrationReport node_vector_tail(const BridgeSpec& spec, long n_samples,
                                     const std::vector<double>& r_grid, RngStream rng,
                                     int workers) {
  const ScaleParams& par = spec.params;
  const int n = 2 * par.N - 1;

  // covariance matrix of the free nodes; trace and spectral radius
  std::vector<double> cov(static_cast<std::size_t>(n) * n);
  double trace = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      cov[i * n + j] = spec.kernel(par.node(i + 1), par.node(j + 1));
    trace += cov[i * n + i];
  }
  std::vector<double> v(n, 1.0), w(n);
  double lam = 0.0;
  for (int iter = 0; iter < 400; ++iter) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += cov[i * n + j] * v[j];
      w[i] = s;
    }
    double nrm = std::sqrt(dot(w, w));
    for (int i = 0; i < n; ++i) v[i] = w[i] / nrm;
    if (std::abs(nrm - lam) < 1e-13 * nrm && iter > 8) {
      lam = nrm;
      break;
    }
    lam = nrm;
  }

  const int n_tasks = hardware_workers(workers);
  std::vector<std::vector<long>> exceed(n_tasks, std::vector<long>(r_grid.size(), 0));
  std::vector<long> counts(n_tasks, 0);
  const long per = (n_samples + n_tasks - 1) / n_tasks;
  const double center = std::sqrt(trace);
  parallel_tasks(n_tasks, n_tasks, [&](int task) {
    const long lo = task * per, hi = std::min<long>(n_samples, lo + per);
    for (long rep = lo; rep < hi; ++rep) {
      RngStream rs = rng.derive(static_cast<std::uint64_t>(rep));
      const PLPath u = sample_bridge(spec, rs);
      double sq = 0.0;
      for (int k = 1; k < par.n_nodes() - 1; ++k) {
        const double c = u.values[k] - spec.mean(par.node(k));
        sq += c * c;
      }
      const double nrm = std::sqrt(sq);
      ++counts[task];
      for (std::size_t i = 0; i < r_grid.size(); ++i)
        if (nrm >= center + r_grid[i]) ++exceed[task][i];
    }
  });

  ConcentrationReport rep;
  rep.bound_name = "node-vector-GCII";
  rep.r_grid = r_grid;
  rep.centering = center;
  for (int t = 0; t < n_tasks; ++t) rep.n_samples += counts[t];
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    long e = 0;
    for (int t = 0; t < n_tasks; ++t) e += exceed[t][i];
    rep.empirical_p.push_back(static_cast<double>(e) / rep.n_samples);
    rep.theoretical_p.push_back(
        std::min(1.0, std::exp(-r_grid[i] * r_grid[i] / (2.0 * lam))));
  }
  return rep;
}

PLPath sample_massive_field(const MassiveFieldSpec& spec, RngStream& rng) {
  const ScaleParams& par = spec.params;
  const Tridiag P = mass_plus_stiffness(par, spec.kappa / par.epsilon);
  const TridiagFactor f = tridiag_factor(P);
  const int n = static_cast<int>(P.n());

  // precision sampling: x = L^{-T} D^{-1/2} z
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.normal() / std::sqrt(f.d[i]);
  for (int i = n - 2; i >= 0; --i) x[i] -= f.l[i] * x[i + 1];

  PLPath u = zero_path(par, Boundary::Zero);
  for (int i = 0; i < n; ++i) u.values[i + 1] = x[i];
  return u;
}

double h1_form(const PLPath& u) {
  const double delta = u.params.mesh();
  double mass = 0.0, stiff = 0.0;
  for (int k = 0; k + 1 < u.n_nodes(); ++k) {
    const double a = u.values[k], b = u.values[k + 1];
    mass += delta / 6.0 * (2 * a * a + 2 * a * b + 2 * b * b);
    stiff += (b - a) * (b - a) / delta;
  }
  return mass + stiff;
}

ConcentrationReport massive_h1_tail(const MassiveFieldSpec& spec, long n_samples,
                                    const std::vector<double>& r_grid, RngStream rng,
                                    int workers) {
  const ScaleParams& par = spec.params;
  const int n = 2 * par.N - 1;
  const double center = n * par.epsilon / spec.kappa;

  const int n_tasks = hardware_workers(workers);
  std::vector<std::vector<long>> exceed(n_tasks, std::vector<long>(r_grid.size(), 0));
  std::vector<RunningStats> stats(n_tasks);
  const long per = (n_samples + n_tasks - 1) / n_tasks;
  parallel_tasks(n_tasks, n_tasks, [&](int task) {
    const long lo = task * per, hi = std::min<long>(n_samples, lo + per);
    for (long rep = lo; rep < hi; ++rep) {
      RngStream rs = rng.derive(static_cast<std::uint64_t>(rep));
      const PLPath u = sample_massive_field(spec, rs);
      const double s = h1_form(u);
      stats[task].add(s);
      for (std::size_t i = 0; i < r_grid.size(); ++i)
        if (s >= center + r_grid[i]) ++exceed[task][i];
    }
  });

  ConcentrationReport rep;
  rep.bound_name = "massive-H1";
  rep.r_grid = r_grid;
  rep.centering = center;
  for (const auto& s : stats) rep.stat.merge(s);
  rep.n_samples = rep.stat.n;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    long e = 0;
    for (int t = 0; t < n_tasks; ++t) e += exceed[t][i];
    rep.empirical_p.push_back(static_cast<double>(e) / rep.n_samples);
    rep.theoretical_p.push_back(std::min(
        1.0, std::exp(-spec.kappa * r_grid[i] * r_grid[i] / (2.0 * par.epsilon))));
  }
  return rep;
}

ZRatios z_ratios(const ScaleParams& params, double kappa) {
  if (params.N > 64)
    throw std::invalid_argument("z_ratios: dense determinant regime needs N <= 64");
  const int n = 2 * params.N - 1;
  const double eps = params.epsilon, L = params.half_length();
  const Tridiag K = stiffness(params, 1.0);
  const Tridiag KM = mass_plus_stiffness(params, 1.0);
  const double logdet_k = tridiag_logdet(K);
  const double logdet_km = tridiag_logdet(KM);

  ZRatios z;
  z.log_z1 = -1.0 / (eps * L) + 0.5 * n * std::log(2.0 * M_PI) -
             0.5 * (logdet_k - n * std::log(eps));
  z.log_z2 = 0.5 * n * std::log(2.0 * M_PI) -
             0.5 * (n * std::log(kappa / eps) + logdet_km);
  z.det_ratio_log = logdet_km - logdet_k;
  z.poincare_lo = 0.0;
  z.poincare_hi = 2.0 * params.N * std::log1p(2.0 * L / M_PI);
  z.poincare_ok = z.det_ratio_log >= z.poincare_lo && z.det_ratio_log <= z.poincare_hi;
  z.ratio_log = -0.5 * n * std::log(kappa) - 0.5 * z.det_ratio_log;

  BridgeSpec bridge{params};
  z.log_z1_norm_product = log_density_normalizer_product(bridge);
  z.log_z1_norm_determinant = log_density_normalizer_determinant(bridge);

  // kinetic action without the 1/eps scale: pure determinant scaling plus
  // the shifted boundary terms
  const double min_with = 1.0 / (eps * L), min_without = 1.0 / L;
  z.log_z3_minus_z1 = (min_with - min_without) + 0.5 * n * std::log(1.0 / eps);
  return z;
}

}  // namespace kink
