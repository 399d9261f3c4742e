#include "ned/identify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ned/errors.hpp"

namespace ned::ident {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mean(std::span<const double> v, std::size_t b, std::size_t e) {
  double s = 0.0;
  for (std::size_t i = b; i < e; ++i) s += v[i];
  return s / static_cast<double>(e - b);
}

// One regression channel extracted from a log: input u drives the candidate
// model, y is the measured response it must reproduce.
struct FitSignals {
  std::vector<double> u;
  std::vector<double> y;
  std::vector<double> du;  // derivative of u, used by the cable model
  double dt = traj::kSamplePeriod;
};

FitSignals extract_signals(const plant::SensorLog& log, Domain domain, double lever_m) {
  const std::size_t n = log.size();
  const std::size_t onset = motion_onset(log);
  if (onset >= n) throw InsufficientExcitation();

  const std::size_t b0 = onset > 100 ? onset - 100 : 0;
  const std::size_t b1 = std::max<std::size_t>(onset, b0 + 1);

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = log.f1_n[i] - log.f2_n[i];
  const double diff_base = mean(diff, b0, b1);
  const double xmeas_base = mean(log.x_meas_mm, b0, b1);
  const double xcmd_base = mean(log.x_cmd_mm, b0, b1);

  FitSignals s;
  s.dt = log.dt;
  s.u.resize(n);
  s.y.resize(n);
  if (domain == Domain::joint) {
    for (std::size_t i = 0; i < n; ++i) {
      s.u[i] = (diff[i] - diff_base) * lever_m;                       // torque, N*m
      s.y[i] = (log.x_meas_mm[i] - xmeas_base) * 1e-3 / lever_m;      // angle, rad
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      s.u[i] = (log.x_cmd_mm[i] - xcmd_base) * 1e-3;  // displacement, m
      s.y[i] = diff[i] - diff_base;                   // force, N
    }
    s.du.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) s.du[i] = (s.u[i + 1] - s.u[i - 1]) / (2.0 * s.dt);
    if (n >= 2) {
      s.du[0] = (s.u[1] - s.u[0]) / s.dt;
      s.du[n - 1] = (s.u[n - 1] - s.u[n - 2]) / s.dt;
    }
  }
  return s;
}

// Lerp between samples for the RK4 half steps.
struct SampleInterp {
  std::span<const double> v;
  double operator()(double idx) const {
    if (idx <= 0.0) return v.front();
    const double last = static_cast<double>(v.size() - 1);
    if (idx >= last) return v.back();
    const auto i = static_cast<std::size_t>(idx);
    const double f = idx - static_cast<double>(i);
    return v[i] * (1.0 - f) + v[i + 1] * f;
  }
};

// Simulates the candidate model over one log and appends the output error.
// Joint: I th'' + B th' + K th = u, output th.
// Cable: M x'' = K (u - x) + B (u' - x'), output the elastic force.
void candidate_residuals(const FitSignals& s, Domain domain, double m, double b, double k,
                         std::vector<double>* resid, std::vector<double>* yhat_out) {
  const std::size_t n = s.u.size();
  const double dt = s.dt;
  SampleInterp ui{s.u};
  SampleInterp dui{s.du.empty() ? std::span<const double>(s.u) : std::span<const double>(s.du)};

  double x = 0.0, v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double yhat;
    if (domain == Domain::joint) {
      yhat = x;
    } else {
      yhat = k * (s.u[i] - x) + b * (s.du[i] - v);
    }
    if (resid) resid->push_back(s.y[i] - yhat);
    if (yhat_out) yhat_out->push_back(yhat);
    if (i + 1 == n) break;

    auto acc = [&](double idx, double xs, double vs) {
      if (domain == Domain::joint) return (ui(idx) - b * vs - k * xs) / m;
      return (k * (ui(idx) - xs) + b * (dui(idx) - vs)) / m;
    };
    const double fi = static_cast<double>(i);
    const double k1x = v, k1v = acc(fi, x, v);
    const double k2x = v + 0.5 * dt * k1v, k2v = acc(fi + 0.5, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v);
    const double k3x = v + 0.5 * dt * k2v, k3v = acc(fi + 0.5, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v);
    const double k4x = v + dt * k3v, k4v = acc(fi + 1.0, x + dt * k3x, v + dt * k3v);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!std::isfinite(x) || !std::isfinite(v)) {
      // Leave the remaining residuals at the raw measurement; the optimizer
      // sees a large cost and backs off.
      for (std::size_t j = i + 1; j < n; ++j) {
        if (resid) resid->push_back(1e12);
        if (yhat_out) yhat_out->push_back(0.0);
      }
      return;
    }
  }
}

double total_cost(const std::vector<FitSignals>& sigs, Domain domain, const std::array<double, 3>& p,
                  std::vector<double>* resid = nullptr) {
  std::vector<double> local;
  std::vector<double>& r = resid ? *resid : local;
  r.clear();
  for (const auto& s : sigs) candidate_residuals(s, domain, p[0], p[1], p[2], &r, nullptr);
  double c = 0.0;
  for (double e : r) c += e * e;
  return c;
}

bool solve3(const double a[3][3], const double rhs[3], double out[3]) {
  double m[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = a[i][j];
    m[i][3] = rhs[i];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-300) return false;
    std::swap(m[piv], m[col]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
    }
  }
  for (int i = 0; i < 3; ++i) out[i] = m[i][3] / m[i][i];
  return true;
}

}  // namespace

std::size_t motion_onset(const plant::SensorLog& log) {
  const auto& x = log.x_cmd_mm;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - x[0]) > 1e-9) return i;
  }
  return x.size();
}

double nrmse(std::span<const double> measured, std::span<const double> modeled) {
  if (measured.size() != modeled.size()) throw std::invalid_argument("length mismatch");
  if (measured.size() < 2) throw std::invalid_argument("need at least two samples");
  double m = 0.0;
  for (double v : measured) m += v;
  m /= static_cast<double>(measured.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    num += (measured[i] - modeled[i]) * (measured[i] - modeled[i]);
    den += (measured[i] - m) * (measured[i] - m);
  }
  if (den <= 0.0) throw UndefinedReference();
  return 100.0 * (1.0 - std::sqrt(num) / std::sqrt(den));
}

ImpedanceEstimate fit_second_order(const std::vector<plant::SensorLog>& logs, double initial_mass,
                                   Domain domain, double lever_m) {
  if (logs.empty()) throw std::invalid_argument("need at least one log");
  if (!(std::isfinite(initial_mass) && initial_mass > 0.0)) {
    throw std::invalid_argument("initial mass must be > 0");
  }
  if (domain == Domain::joint && !(lever_m > 0.0)) {
    throw std::invalid_argument("joint fits need a positive lever");
  }
  const double dt0 = logs.front().dt;
  for (const auto& l : logs) {
    if (std::abs(l.dt - dt0) > 1e-12) throw std::invalid_argument("logs must share dt");
  }

  std::vector<FitSignals> sigs;
  sigs.reserve(logs.size());
  for (const auto& l : logs) sigs.push_back(extract_signals(l, domain, lever_m));

  // Multistart over viscosity/stiffness; the known mass seeds all starts.
  std::array<double, 3> best{initial_mass, 50.0, 500.0};
  double best_cost = std::numeric_limits<double>::infinity();
  for (double b0 : {5.0, 60.0}) {
    for (double k0 : {150.0, 800.0, 3000.0}) {
      const std::array<double, 3> p{initial_mass, b0, k0};
      const double c = total_cost(sigs, domain, p);
      if (std::isfinite(c) && c < best_cost) {
        best_cost = c;
        best = p;
      }
    }
  }

  // Damped Gauss-Newton (Levenberg-Marquardt) on log-parameters, which keeps
  // every iterate strictly positive.
  std::array<double, 3> lp{std::log(best[0]), std::log(best[1]), std::log(best[2])};
  std::vector<double> resid;
  double cost = total_cost(sigs, domain, {std::exp(lp[0]), std::exp(lp[1]), std::exp(lp[2])}, &resid);
  if (!std::isfinite(cost)) throw OptimizerDivergence("initial residual is not finite");

  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  const int max_iter = 200;
  std::vector<double> jac[3];
  for (; iter < max_iter; ++iter) {
    const std::size_t nr = resid.size();
    // Forward-difference Jacobian in log-space.
    for (int j = 0; j < 3; ++j) {
      std::array<double, 3> lpj = lp;
      const double h = 1e-6;
      lpj[j] += h;
      std::vector<double> rj;
      total_cost(sigs, domain, {std::exp(lpj[0]), std::exp(lpj[1]), std::exp(lpj[2])}, &rj);
      jac[j].resize(nr);
      for (std::size_t i = 0; i < nr; ++i) jac[j][i] = (rj[i] - resid[i]) / h;
    }
    double jtj[3][3], jtr[3];
    for (int a = 0; a < 3; ++a) {
      jtr[a] = 0.0;
      for (std::size_t i = 0; i < nr; ++i) jtr[a] -= jac[a][i] * resid[i];
      for (int b = a; b < 3; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < nr; ++i) s += jac[a][i] * jac[b][i];
        jtj[a][b] = jtj[b][a] = s;
      }
    }

    bool stepped = false;
    for (int tries = 0; tries < 12 && !stepped; ++tries) {
      double damped[3][3];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          damped[a][b] = jtj[a][b] + (a == b ? lambda * (jtj[a][a] > 0 ? jtj[a][a] : 1.0) : 0.0);
      double step[3];
      if (!solve3(damped, jtr, step)) {
        lambda *= 10.0;
        continue;
      }
      std::array<double, 3> lp_new{lp[0] + step[0], lp[1] + step[1], lp[2] + step[2]};
      for (double& v : lp_new) v = std::clamp(v, -46.0, 46.0);
      std::vector<double> resid_new;
      const double cost_new = total_cost(
          sigs, domain, {std::exp(lp_new[0]), std::exp(lp_new[1]), std::exp(lp_new[2])}, &resid_new);
      if (std::isfinite(cost_new) && cost_new <= cost) {
        const double rel = cost > 0.0 ? (cost - cost_new) / cost : 0.0;
        lp = lp_new;
        resid.swap(resid_new);
        const bool done = rel < 1e-9;
        cost = cost_new;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (done) {
          converged = true;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (converged || !stepped) {
      converged = converged || stepped;
      break;
    }
  }
  if (!std::isfinite(cost)) throw OptimizerDivergence("residual became non-finite");

  ImpedanceEstimate est;
  est.domain = domain;
  est.inertia_or_mass = std::exp(lp[0]);
  est.viscosity = std::exp(lp[1]);
  est.stiffness = std::exp(lp[2]);
  est.converged = converged;
  est.iterations = iter;

  // NRMSE over the concatenated fit.
  std::vector<double> meas, modeled;
  for (const auto& s : sigs) {
    std::vector<double> yh;
    candidate_residuals(s, domain, est.inertia_or_mass, est.viscosity, est.stiffness, nullptr, &yh);
    meas.insert(meas.end(), s.y.begin(), s.y.end());
    modeled.insert(modeled.end(), yh.begin(), yh.end());
  }
  est.nrmse_percent = nrmse(meas, modeled);
  return est;
}

std::vector<ImpedanceEstimate> fit_per_trial(const std::vector<plant::SensorLog>& logs,
                                             double initial_mass, Domain domain, double lever_m) {
  std::vector<ImpedanceEstimate> out;
  out.reserve(logs.size());
  for (const auto& l : logs) {
    out.push_back(fit_second_order({l}, initial_mass, domain, lever_m));
  }
  return out;
}

double plateau_stiffness(const plant::SensorLog& log, double t_start_ms, double t_end_ms,
                         double lever_m, Domain domain) {
  const std::size_t n = log.size();
  if (!(t_end_ms > t_start_ms) || t_start_ms < 0.0) throw InvalidWindow("empty plateau window");
  const auto i0 = static_cast<std::size_t>(std::lround(t_start_ms * 1e-3 / log.dt));
  const auto i1 = static_cast<std::size_t>(std::lround(t_end_ms * 1e-3 / log.dt));
  if (i1 > n || i0 >= i1) throw InvalidWindow("window outside the log");
  for (std::size_t i = i0; i < i1; ++i) {
    if (std::abs(log.x_cmd_mm[i] - log.x_cmd_mm[i0]) > 1e-9) {
      throw InvalidWindow("commanded motion is not constant over the window");
    }
  }
  const std::size_t onset = motion_onset(log);
  if (onset >= n || onset >= i0) {
    if (onset >= n) throw InsufficientExcitation();
    throw InvalidWindow("window precedes the perturbation");
  }
  const std::size_t b0 = onset > 100 ? onset - 100 : 0;
  const std::size_t b1 = std::max<std::size_t>(onset, b0 + 1);

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = log.f1_n[i] - log.f2_n[i];
  const double d_force = mean(diff, i0, i1) - mean(diff, b0, b1);
  const double d_x_mm = mean(log.x_meas_mm, i0, i1) - mean(log.x_meas_mm, b0, b1);

  const double quantum = log.ground_truth.sensors.quantum_cable_mm;
  if (std::abs(d_x_mm) < quantum) throw ResolutionLimited();

  if (domain == Domain::joint) {
    if (!(lever_m > 0.0)) throw std::invalid_argument("joint stiffness needs a positive lever");
    const double d_tau = d_force * lever_m;
    const double d_theta = d_x_mm * 1e-3 / lever_m;
    return d_tau / d_theta;
  }
  return d_force / (d_x_mm * 1e-3);
}

PoleSet poles(const ImpedanceEstimate& est) {
  const double m = est.inertia_or_mass, b = est.viscosity, k = est.stiffness;
  if (!(m > 0.0) || !(k > 0.0) || b < 0.0) throw std::invalid_argument("estimate is not physical");
  PoleSet ps;
  const double disc = b * b - 4.0 * m * k;
  const double scale = b * b + 4.0 * m * k;
  if (std::abs(disc) <= 1e-12 * scale) {
    const double f = b / (2.0 * m) / kTwoPi;
    ps.pole_frequencies_hz = {f, f};
    ps.classification = PoleSet::Damping::critical;
  } else if (disc > 0.0) {
    const double root = std::sqrt(disc);
    const double s1 = (b - root) / (2.0 * m);
    const double s2 = (b + root) / (2.0 * m);
    ps.pole_frequencies_hz = {s1 / kTwoPi, s2 / kTwoPi};
    ps.classification = PoleSet::Damping::overdamped;
  } else {
    const double f = std::sqrt(k / m) / kTwoPi;
    ps.pole_frequencies_hz = {f, f};
    ps.classification = PoleSet::Damping::underdamped;
  }
  return ps;
}

}  // namespace ned::ident
