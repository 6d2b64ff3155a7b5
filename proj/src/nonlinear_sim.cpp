#include "chanstab/nonlinear_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "chanstab/errors.hpp"

namespace chanstab {

// ---------------------------------------------------------------------------
// Configuration and state

double SimConfig::resolved_horizon() const { return horizon > 0.0 ? horizon : 10.0 / std::sqrt(nu); }

void SimConfig::validate() const {
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  const auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!positive(nu) || !positive(mu)) throw InvalidArgument("nu and mu must be positive");
  if (K < 1) throw InvalidArgument("K must be >= 1");
  if (n < 8 || n % 2 != 0) throw InvalidArgument("n must be even and >= 8");
  if (!nonneg(dt) || !nonneg(horizon)) throw InvalidArgument("dt and horizon must be >= 0");
  if (dt > 0.0 && !(resolved_horizon() > dt)) throw InvalidArgument("horizon must exceed dt");
  if (!nonneg(c0) || !nonneg(c1)) throw InvalidArgument("c0 and c1 must be >= 0");
  if (!nonneg(sobolev_s)) throw InvalidArgument("sobolev_s must be >= 0");
  if (ledger_every < 0) throw InvalidArgument("ledger_every must be >= 0");
}

PerturbationState::PerturbationState(int K, ChebyshevGrid grid)
    : K_(K),
      grid_(std::move(grid)),
      omega_(2 * K + 1, CVector::Zero(grid_.size())),
      theta_(2 * K + 1, CVector::Zero(grid_.size())),
      u1_mean_(RVector::Zero(grid_.size())) {
  if (K < 0) throw InvalidArgument("PerturbationState: K must be >= 0");
}

void PerturbationState::normalize() {
  const int last = grid_.degree();
  for (int k = 1; k <= K_; ++k) {
    omega(k)(0) = omega(k)(last) = 0.0;
    theta(k)(0) = theta(k)(last) = 0.0;
    omega(-k) = omega(k).conjugate();
    theta(-k) = theta(k).conjugate();
  }
  theta(0) = theta(0).real().cast<Complex>();
  theta(0)(0) = theta(0)(last) = 0.0;
  omega(0) = (grid_.d1() * u1_mean_).cast<Complex>();
}

double PerturbationState::reality_defect() const {
  double d = 0.0;
  for (int k = 0; k <= K_; ++k) {
    d = std::max(d, (omega(-k) - omega(k).conjugate()).cwiseAbs().maxCoeff());
    d = std::max(d, (theta(-k) - theta(k).conjugate()).cwiseAbs().maxCoeff());
  }
  return d;
}

double PerturbationState::boundary_defect() const {
  const int last = grid_.degree();
  double d = 0.0;
  for (int k = -K_; k <= K_; ++k) {
    if (k != 0) d = std::max({d, std::abs(omega(k)(0)), std::abs(omega(k)(last))});
    d = std::max({d, std::abs(theta(k)(0)), std::abs(theta(k)(last))});
  }
  return d;
}

bool PerturbationState::all_finite() const {
  for (const auto& v : omega_) {
    if (!v.allFinite()) return false;
  }
  for (const auto& v : theta_) {
    if (!v.allFinite()) return false;
  }
  return u1_mean_.allFinite();
}

VelocityMap::VelocityMap(const ChebyshevGrid& grid, int K) : grid_(grid), K_(K) {
  inverse_.reserve(K + 1);
  for (int k = 0; k <= K; ++k) inverse_.push_back(HelmholtzSolver(grid, k).inverse());
}

Velocity VelocityMap::operator()(const PerturbationState& s, int k) const {
  if (std::abs(k) > K_) throw InvalidArgument("VelocityMap: wavenumber out of range");
  Velocity v;
  if (k == 0) {
    v.u1 = {0, s.u1_mean().cast<Complex>()};
    v.u2 = {0, CVector::Zero(grid_.size())};
    return v;
  }
  CVector w = s.omega(k);
  w(0) = w(grid_.degree()) = 0.0;
  const CVector phi = inverse_[std::abs(k)] * w;
  v.u1 = {k, grid_.d1() * phi};
  v.u2 = {k, Complex(0.0, -k) * phi};
  return v;
}

// ---------------------------------------------------------------------------
// Initial data and norms

namespace {

double sq(double x) { return x * x; }

CVector sine_mode(const ChebyshevGrid& grid, int m) {
  const RVector& y = grid.nodes();
  CVector v(grid.size());
  for (int j = 0; j < grid.size(); ++j) v(j) = std::sin(m * std::numbers::pi * (y(j) + 1.0) / 2.0);
  v(0) = v(grid.degree()) = 0.0;
  return v;
}

}  // namespace

double velocity_proxy(const PerturbationState& s, double sobolev_s) {
  const VelocityMap velocity(s.grid(), s.K());
  double total = 0.0;
  for (int k = -s.K(); k <= s.K(); ++k) {
    const Velocity u = velocity(s, k);
    total += std::pow(1.0 + k * k, sobolev_s) *
             (sq(l2_norm(u.u1.values, s.grid())) + sq(l2_norm(u.u2.values, s.grid())));
  }
  return std::sqrt(total);
}

double temperature_proxy(const PerturbationState& s) {
  const ChebyshevGrid& grid = s.grid();
  double total = 0.0;
  for (int k = -s.K(); k <= s.K(); ++k) {
    const CVector& th = s.theta(k);
    const double n0 = sq(l2_norm(th, grid));
    const double n1 = sq(l2_norm(grid.d1() * th, grid));
    total += (1.0 + std::pow(std::abs(k), 0.25)) * (n0 + n1 + k * k * n0);
  }
  return std::sqrt(total);
}

PerturbationState make_initial_data(const SimConfig& config, const InitialShape& shape) {
  const double m = std::min(config.nu, config.mu);
  return make_initial_data(config, shape, config.c0 * std::pow(m, 2.0 / 3.0),
                           config.c1 * std::pow(m, 31.0 / 24.0));
}

PerturbationState make_initial_data(const SimConfig& config, const InitialShape& shape,
                                    double velocity_amplitude, double temperature_amplitude) {
  config.validate();
  if (!(velocity_amplitude >= 0.0) || !(temperature_amplitude >= 0.0)) {
    throw InvalidArgument("make_initial_data: amplitudes must be >= 0");
  }
  PerturbationState s(config.K, build_grid(config.n));
  const ChebyshevGrid& grid = s.grid();

  if (shape.kind == InitialShape::Kind::single_mode) {
    const int k = std::abs(shape.k);
    if (k < 1 || k > config.K) throw InvalidArgument("make_initial_data: mode out of range");
    s.omega(k) = sine_mode(grid, 1);
    s.theta(k) = sine_mode(grid, 1);
  } else {
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal;
    const int band = std::max(1, config.K / 2);
    for (int k = 1; k <= band; ++k) {
      for (int p = 1; p <= 4; ++p) {
        const double decay = 1.0 / (p * p);
        s.omega(k) += decay * Complex(normal(rng), normal(rng)) * sine_mode(grid, p);
        s.theta(k) += decay * Complex(normal(rng), normal(rng)) * sine_mode(grid, p);
      }
    }
  }
  s.normalize();

  const double pu = velocity_proxy(s, config.sobolev_s);
  const double pt = temperature_proxy(s);
  const double su = (pu > 0.0 && velocity_amplitude > 0.0) ? velocity_amplitude / pu : 0.0;
  const double st = (pt > 0.0 && temperature_amplitude > 0.0) ? temperature_amplitude / pt : 0.0;
  for (int k = -config.K; k <= config.K; ++k) {
    s.omega(k) *= su;
    s.theta(k) *= st;
  }
  s.normalize();
  return s;
}

std::vector<ModeNorms> mode_norms(const PerturbationState& s, const VelocityMap& velocity) {
  const ChebyshevGrid& grid = s.grid();
  std::vector<ModeNorms> out(2 * s.K() + 1);
  for (int k = -s.K(); k <= s.K(); ++k) {
    ModeNorms& m = out[k + s.K()];
    m.omega = l2_norm(s.omega(k), grid);
    m.theta = l2_norm(s.theta(k), grid);
    const Velocity u = velocity(s, k);
    m.velocity = std::hypot(l2_norm(u.u1.values, grid), l2_norm(u.u2.values, grid));
  }
  return out;
}

double InitialNorms::E_total() const {
  double t = 0.0;
  for (double v : E) t += v;
  return t;
}

double InitialNorms::H_total() const {
  double t = 0.0;
  for (double v : H) t += v;
  return t;
}

InitialNorms initial_norms(const PerturbationState& s, double sobolev_s) {
  const ChebyshevGrid& grid = s.grid();
  InitialNorms out;
  for (int k = -s.K(); k <= s.K(); ++k) {
    if (k == 0) {
      out.E.push_back(l2_norm(s.omega(0), grid));
      out.H.push_back(l2_norm(s.theta(0), grid));
    } else {
      const CVector lap = grid.d2() * s.omega(k) - static_cast<double>(k * k) * s.omega(k);
      out.E.push_back(l2_norm(lap, grid));
      out.H.push_back(std::pow(std::abs(k), 0.125) * l2_norm(s.theta(k), grid));
    }
  }
  out.velocity_proxy = velocity_proxy(s, sobolev_s);
  out.temperature_proxy = temperature_proxy(s);
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear terms

NonlinearTerms nonlinear_terms(const PerturbationState& s) {
  return nonlinear_terms(s, VelocityMap(s.grid(), s.K()));
}

NonlinearTerms nonlinear_terms(const PerturbationState& s, const VelocityMap& velocity) {
  const int K = s.K();
  const ChebyshevGrid& grid = s.grid();
  const int ny = grid.size();
  int M = 4;
  while (M < 3 * K + 1) M *= 2;

  std::vector<Velocity> vel;
  vel.reserve(2 * K + 1);
  for (int k = -K; k <= K; ++k) vel.push_back(velocity(s, k));

  NonlinearTerms out;
  for (auto* f : {&out.f1, &out.f2, &out.g1, &out.g2}) f->assign(2 * K + 1, CVector::Zero(ny));

  const RVector& y = grid.nodes();
  Eigen::FFT<double> fft;
  std::vector<Complex> su1(M), su2(M), sw(M), st(M);
  std::vector<Complex> pu1, pu2, pw, pt;
  std::vector<Complex> prod(M), coeff;
  auto to_physical = [&](std::vector<Complex>& spectrum, std::vector<Complex>& physical) {
    fft.inv(physical, spectrum);
    for (auto& v : physical) v *= static_cast<double>(M);
  };
  auto to_modes = [&](const std::vector<Complex>& a, const std::vector<Complex>& b,
                      std::vector<CVector>& dest, int j) {
    for (int i = 0; i < M; ++i) prod[i] = a[i] * b[i];
    fft.fwd(coeff, prod);
    for (int k = -K; k <= K; ++k) dest[k + K](j) = coeff[(k + M) % M] / static_cast<double>(M);
  };

  for (int j = 0; j < ny; ++j) {
    std::fill(su1.begin(), su1.end(), Complex(0.0));
    std::fill(su2.begin(), su2.end(), Complex(0.0));
    std::fill(sw.begin(), sw.end(), Complex(0.0));
    std::fill(st.begin(), st.end(), Complex(0.0));
    for (int k = -K; k <= K; ++k) {
      const int slot = (k + M) % M;
      su1[slot] = vel[k + K].u1.values(j);
      su2[slot] = vel[k + K].u2.values(j);
      sw[slot] = s.omega(k)(j);
      st[slot] = s.theta(k)(j);
    }
    to_physical(su1, pu1);
    to_physical(su2, pu2);
    to_physical(sw, pw);
    to_physical(st, pt);
    to_modes(pu1, pw, out.f1, j);
    to_modes(pu2, pw, out.f2, j);
    to_modes(pu1, pt, out.g1, j);
    to_modes(pu2, pt, out.g2, j);

    double h = std::numeric_limits<double>::infinity();
    if (j > 0) h = std::min(h, y(j - 1) - y(j));
    if (j + 1 < ny) h = std::min(h, y(j) - y(j + 1));
    double max_u1 = 0.0, max_u2 = 0.0;
    for (int i = 0; i < M; ++i) {
      max_u1 = std::max(max_u1, std::abs(pu1[i]));
      max_u2 = std::max(max_u2, std::abs(pu2[i]));
    }
    out.advection_rate = std::max(out.advection_rate, K * max_u1 + max_u2 / h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time stepping

namespace {

// e^{-hA}, h phi_1(-hA), h phi_2(-hA) and the half-step pair e^{-hA/2}, (h/2) phi_1(-hA/2).
struct EtdTables {
  CMatrix e, p1, p2;
  CMatrix e_half, p1_half;
};

EtdTables etd_tables(const CMatrix& a, double h) {
  const Eigen::Index m = a.rows();
  // exp(t G) with G = [[-A, I, 0], [0, 0, I], [0, 0, 0]] carries
  // e^{-tA}, t phi_1(-tA) and t^2 phi_2(-tA) in its first block row.
  CMatrix g = CMatrix::Zero(3 * m, 3 * m);
  g.block(0, 0, m, m) = -a;
  g.block(0, m, m, m).setIdentity();
  g.block(m, 2 * m, m, m).setIdentity();
  const CMatrix half = (0.5 * h * g).exp();
  const CMatrix full = half * half;
  EtdTables t;
  t.e_half = half.block(0, 0, m, m);
  t.p1_half = half.block(0, m, m, m);
  t.e = full.block(0, 0, m, m);
  t.p1 = full.block(0, m, m, m);
  t.p2 = full.block(0, 2 * m, m, m) / h;
  return t;
}

// Boundary values of a Neumann profile in terms of its interior values.
RMatrix neumann_boundary_map(const ChebyshevGrid& grid) {
  const int n = grid.degree();
  const int m = grid.interior_size();
  const RMatrix& d1 = grid.d1();
  Eigen::Matrix2d b;
  b << d1(0, 0), d1(0, n), d1(n, 0), d1(n, n);
  RMatrix r(2, m);
  r.row(0) = -d1.row(0).segment(1, m);
  r.row(1) = -d1.row(n).segment(1, m);
  return b.inverse() * r;
}

}  // namespace

struct Stepper::Tables {
  int m = 0;
  RMatrix neumann;                // 2 x m
  std::vector<EtdTables> omega;   // index k = 0..K; k = 0 acts on ubar
  std::vector<EtdTables> theta;
};

namespace {

std::shared_ptr<const Stepper::Tables> build_tables(const SimConfig& c) {
  auto t = std::make_shared<Stepper::Tables>();
  const ChebyshevGrid grid = build_grid(c.n);
  const int m = grid.interior_size();
  const int n = grid.degree();
  t->m = m;
  t->neumann = neumann_boundary_map(grid);

  const RMatrix& d2 = grid.d2();
  const RMatrix d2_dirichlet = d2.block(1, 1, m, m);
  const RMatrix d2_neumann = d2_dirichlet + d2.col(0).segment(1, m) * t->neumann.row(0) +
                             d2.col(n).segment(1, m) * t->neumann.row(1);
  t->omega.push_back(etd_tables((-c.nu * d2_neumann).cast<Complex>(), c.dt));
  t->theta.push_back(etd_tables((-c.mu * d2_dirichlet).cast<Complex>(), c.dt));
  for (int k = 1; k <= c.K; ++k) {
    t->omega.push_back(etd_tables(assemble_L(c.nu, k, grid).interior(), c.dt));
    t->theta.push_back(etd_tables(assemble_H(c.mu, k, grid).interior(), c.dt));
  }
  return t;
}

// Tables depend only on (nu, mu, K, n, dt); threshold bisection reuses them.
std::shared_ptr<const Stepper::Tables> cached_tables(const SimConfig& c) {
  using Key = std::tuple<double, double, int, int, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const Stepper::Tables>> cache;
  const Key key{c.nu, c.mu, c.K, c.n, c.dt};
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (cache.size() >= 8) cache.clear();
  auto t = build_tables(c);
  cache.emplace(key, t);
  return t;
}

// Interior right-hand sides N_w, N_th for k = 0..K (k = 0: ubar and th_0).
void explicit_terms(const PerturbationState& s, const VelocityMap& velocity,
                    std::vector<CVector>& nw, std::vector<CVector>& nt, double& rate) {
  const int K = s.K();
  const ChebyshevGrid& grid = s.grid();
  const int m = grid.interior_size();
  const NonlinearTerms nl = nonlinear_terms(s, velocity);
  rate = nl.advection_rate;
  nw.resize(K + 1);
  nt.resize(K + 1);
  nw[0] = (-nl.f2[K].real()).segment(1, m).cast<Complex>();
  nt[0] = (-(grid.d1() * nl.g2[K]).real()).segment(1, m).cast<Complex>();
  for (int k = 1; k <= K; ++k) {
    const Complex ik(0.0, k);
    const CVector w = -ik * nl.f1[k + K] - grid.d1() * nl.f2[k + K] - ik * s.theta(k);
    const CVector t = -ik * nl.g1[k + K] - grid.d1() * nl.g2[k + K];
    nw[k] = w.segment(1, m);
    nt[k] = t.segment(1, m);
  }
}

CVector unknown_w(const PerturbationState& s, int k, int m) {
  return k == 0 ? CVector(s.u1_mean().segment(1, m).cast<Complex>()) : CVector(s.omega(k).segment(1, m));
}

void store(PerturbationState& s, const Stepper::Tables& t, int k, const CVector& w, const CVector& th) {
  const int m = t.m;
  if (k == 0) {
    RVector& u = s.u1_mean();
    u.segment(1, m) = w.real();
    const Eigen::Vector2d b = t.neumann * u.segment(1, m);
    u(0) = b(0);
    u(m + 1) = b(1);
  } else {
    s.omega(k).segment(1, m) = w;
  }
  s.theta(k).segment(1, m) = th;
}

}  // namespace

Stepper::Stepper(const SimConfig& config)
    : config_(config), dt_(config.dt), velocity_(build_grid(config.n), config.K) {
  config_.validate();
  if (!(dt_ > 0.0)) throw InvalidArgument("Stepper: dt must be positive");
  // Shear CFL: dt * max|k| * max(1 - y^2) <= 0.5.
  if (dt_ * config_.K > 0.5 + 1e-12) {
    throw InvalidArgument("Stepper: dt * K exceeds the shear CFL limit 0.5");
  }
  tables_ = cached_tables(config_);
}

void Stepper::half_step_pair(PerturbationState& s, const std::vector<CVector>& n0w,
                             const std::vector<CVector>& n0t) {
  const Tables& t = *tables_;
  for (int k = 0; k <= config_.K; ++k) {
    const CVector w = t.omega[k].e_half * unknown_w(s, k, t.m) + t.omega[k].p1_half * n0w[k];
    const CVector th =
        t.theta[k].e_half * s.theta(k).segment(1, t.m) + t.theta[k].p1_half * n0t[k];
    store(s, t, k, w, th);
  }
  s.normalize();
  std::vector<CVector> nw, nt;
  double rate = 0.0;
  explicit_terms(s, velocity_, nw, nt, rate);
  for (int k = 0; k <= config_.K; ++k) {
    const CVector w = t.omega[k].e_half * unknown_w(s, k, t.m) + t.omega[k].p1_half * nw[k];
    const CVector th =
        t.theta[k].e_half * s.theta(k).segment(1, t.m) + t.theta[k].p1_half * nt[k];
    store(s, t, k, w, th);
  }
}

void Stepper::step(PerturbationState& s) {
  if (s.K() != config_.K || s.grid().degree() != config_.n) {
    throw InvalidArgument("Stepper::step: state does not match the configuration");
  }
  std::vector<CVector> nw, nt;
  double rate = 0.0;
  explicit_terms(s, velocity_, nw, nt, rate);
  if (dt_ * rate > 0.5) {
    if (steps_ == 0) throw InvalidArgument("Stepper::step: advective CFL limit exceeded");
    throw Diverged(s.t, "advective CFL limit exceeded");
  }

  const Tables& t = *tables_;
  if (steps_ == 0) {
    half_step_pair(s, nw, nt);
  } else {
    for (int k = 0; k <= config_.K; ++k) {
      const CVector w = t.omega[k].e * unknown_w(s, k, t.m) + t.omega[k].p1 * nw[k] +
                        t.omega[k].p2 * (nw[k] - prev_w_[k]);
      const CVector th = t.theta[k].e * s.theta(k).segment(1, t.m) + t.theta[k].p1 * nt[k] +
                         t.theta[k].p2 * (nt[k] - prev_t_[k]);
      store(s, t, k, w, th);
    }
  }
  prev_w_ = std::move(nw);
  prev_t_ = std::move(nt);
  ++steps_;
  s.t += dt_;
  s.normalize();
  if (!s.all_finite()) throw Diverged(s.t, "non-finite state");
}

PerturbationState step(const PerturbationState& s, const SimConfig& config) {
  SimConfig c = config;
  if (c.dt == 0.0) c.dt = auto_dt(c, s);
  Stepper stepper(c);
  PerturbationState next = s;
  stepper.step(next);
  return next;
}

double auto_dt(const SimConfig& config, const PerturbationState& initial) {
  const double rate = nonlinear_terms(initial).advection_rate;
  double dt = 0.5 / config.K;
  if (rate > 0.0) dt = std::min(dt, 0.25 / rate);
  return dt;
}

// ---------------------------------------------------------------------------
// Runs

double RunResult::E_total() const {
  double t = 0.0;
  for (double v : ledger.E_all()) t += v;
  return t;
}

double RunResult::H_total() const {
  double t = 0.0;
  for (double v : ledger.H_all()) t += v;
  return t;
}

double RunResult::growth_ratio() const {
  const double num = E_total() + H_total();
  const double den = initial.E_total() + initial.H_total();
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

RunResult run(const SimConfig& config, const PerturbationState& initial) {
  config.validate();
  if (initial.K() != config.K || initial.grid().degree() != config.n) {
    throw InvalidArgument("run: initial state does not match the configuration");
  }
  SimConfig c = config;
  c.horizon = config.resolved_horizon();
  const double dt0 = c.dt > 0.0 ? c.dt : auto_dt(c, initial);
  const int steps = std::max(1, static_cast<int>(std::ceil(c.horizon / dt0 - 1e-9)));
  c.dt = c.horizon / steps;

  Stepper stepper(c);
  RunResult r{initial, EnergyLedger(c.K, c.nu, c.mu), {}, initial_norms(initial, c.sobolev_s),
              c.dt, 0, false, 0.0, {}};
  PerturbationState& s = r.final_state;
  s.t = 0.0;
  r.ledger.record(0.0, mode_norms(s, stepper.velocity_map()));
  r.history.push_back(r.ledger);
  const int every = c.ledger_every > 0 ? c.ledger_every : std::max(1, steps / 200);

  for (int i = 1; i <= steps; ++i) {
    try {
      stepper.step(s);
    } catch (const Diverged& e) {
      r.diverged = true;
      r.diverged_at = e.time();
      r.message = e.what();
      break;
    }
    r.steps = i;
    r.ledger.record(s.t, mode_norms(s, stepper.velocity_map()));
    if (i % every == 0 || i == steps) r.history.push_back(r.ledger);
  }
  if (r.diverged && r.history.back().time() != r.ledger.time()) r.history.push_back(r.ledger);
  return r;
}

}  // namespace chanstab
