#include "idmbdf/experiment.hpp"

#include "idmbdf/mittag_leffler.hpp"
#include "idmbdf/noise.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace idmbdf {

namespace {

constexpr int kMaxFineL = 24;
constexpr std::size_t kMaxCoarseSteps = 8192;
constexpr std::size_t kMaxModes = 4096;
constexpr double kMaxWorkerBytes = 2.0e9;
constexpr double kMaxResultBytes = 4.0e9;

template <typename F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

NoiseSpec noise_spec(const ExperimentConfig& cfg, std::uint64_t trajectory) {
  NoiseSpec ns;
  ns.l = cfg.l;
  ns.sigma_exponent = cfg.sigma_exponent;
  ns.fine_steps = cfg.fine_steps();
  ns.T = cfg.T;
  ns.seed = cfg.seed;
  ns.trajectory = trajectory;
  return ns;
}

unsigned worker_count(const ExperimentConfig& cfg, std::size_t jobs) {
  unsigned w = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(jobs, 1)));
}

// Runs job(t) for t in [0, count) on a bounded pool. Results must be written
// to per-index slots by the job, so scheduling never affects them.
template <typename Job>
void parallel_for(std::size_t count, unsigned workers, Job&& job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= count) return;
      try {
        job(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

struct InitialData {
  ModeField upsilon;
  ModeField velocity;
};

InitialData initial_data(const ExperimentConfig& cfg) {
  InitialData d;
  d.upsilon = cfg.upsilon ? *cfg.upsilon : project(reference_upsilon, cfg.J);
  d.velocity = cfg.velocity ? *cfg.velocity : project(reference_velocity, cfg.J);
  return d;
}

// Samples, folds and restricts one trajectory's noise to every N in N_list.
std::vector<FoldedNoise> folded_trajectory(const ExperimentConfig& cfg, const SchemeSpec& scheme,
                                           std::uint64_t trajectory, int modes) {
  const NoiseSpec ns = noise_spec(cfg, trajectory);
  std::vector<FoldedNoise> out;
  out.reserve(cfg.N_list.size());
  for (std::size_t N : cfg.N_list) out.emplace_back(static_cast<std::size_t>(modes), N);
  for (int j = 1; j <= modes; ++j) {
    const auto increments = sample_mode_increments(ns, j);
    const auto fine = fold_fine(increments, ns.sigma(j), scheme.m, scheme.k, ns.fine_step());
    for (std::size_t p = 0; p < cfg.N_list.size(); ++p) {
      const std::size_t N = cfg.N_list[p];
      const std::size_t stride = ns.fine_steps / N;
      for (std::size_t n = 0; n <= N; ++n) out[p].at(n, static_cast<std::size_t>(j - 1)) = fine[n * stride];
    }
  }
  return out;
}

double squared_distance(const ModeField& a, const ModeField& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.modes(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return acc;
}

ModeField terminal_u(const Stepper& stepper, const ProblemSpec& problem, const FoldedNoise* g) {
  ModeField u = stepper.terminal(problem, g);
  for (std::size_t j = 0; j < u.modes(); ++j) u[j] += problem.upsilon[j] + problem.T * problem.b[j];
  return u;
}

struct MomentPair {
  double mean = 0.0;
  double std_err = 0.0;
};

// Mean and standard error of samples[offset + t * stride], t ascending.
MomentPair moments(const std::vector<double>& samples, std::size_t count, std::size_t offset, std::size_t stride) {
  MomentPair m;
  double sum = 0.0;
  for (std::size_t t = 0; t < count; ++t) sum += samples[offset + t * stride];
  m.mean = sum / static_cast<double>(count);
  if (count > 1) {
    double ss = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
      const double d = samples[offset + t * stride] - m.mean;
      ss += d * d;
    }
    m.std_err = std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count));
  }
  return m;
}

}  // namespace

double reference_upsilon(double x) { return std::sin(x) * std::sqrt(1.0 - x * x); }
double reference_velocity(double x) { return std::cos(x) * std::sqrt(1.0 - x * x); }

void ExperimentConfig::validate() const {
  if (N_list.size() < 2) throw ConfigError("N_list needs at least two step counts");
  if (fine_L < 1 || fine_L > 30) throw ConfigError("fine_L must lie in [1, 30]");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] == 0) throw ConfigError("step counts must be positive");
    if (i > 0 && N_list[i] != 2 * N_list[i - 1]) throw ConfigError("N_list must increase by factors of two");
    if (fine_steps() % N_list[i] != 0) {
      throw ConfigError("N = " + std::to_string(N_list[i]) + " does not divide 2^fine_L = " +
                        std::to_string(fine_steps()));
    }
  }
  if (trajectories < 1) throw ConfigError("trajectory count must be >= 1");
  if (J < 1) throw ConfigError("mode count J must be >= 1");
  if (l < 1 || static_cast<std::size_t>(l) > J) throw ConfigError("noise truncation l must lie in [1, J]");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (alpha_list.empty() || gamma_list.empty()) throw ConfigError("alpha and gamma lists must be non-empty");
  as_config_error([&] {
    for (double a : alpha_list) {
      for (double g : gamma_list) {
        const SchemeSpec s = SchemeSpec::make(scheme, a, g);
        if (N_list.front() < static_cast<std::size_t>(s.k)) throw ConfigError("N_list entries must be >= k");
      }
    }
    if (!zero_noise) noise_spec(*this, 0).validate();
    return 0;
  });
  if (upsilon && upsilon->modes() != J) throw ConfigError("upsilon must have J modes");
  if (velocity && velocity->modes() != J) throw ConfigError("velocity must have J modes");
}

void ExperimentConfig::check_resources() const {
  if (fine_L > kMaxFineL) throw ResourceError("fine_L above " + std::to_string(kMaxFineL));
  if (N_list.back() > kMaxCoarseSteps) throw ResourceError("N above " + std::to_string(kMaxCoarseSteps));
  if (J > kMaxModes) throw ResourceError("J above " + std::to_string(kMaxModes));
  double coarse_nodes = 0.0;
  for (std::size_t N : N_list) coarse_nodes += static_cast<double>(N + 1);
  const double per_worker = 8.0 * (2.0 * static_cast<double>(fine_steps()) +
                                   coarse_nodes * static_cast<double>(l) +
                                   3.0 * static_cast<double>(N_list.back() + 1) * static_cast<double>(J));
  if (per_worker > kMaxWorkerBytes) throw ResourceError("per-worker memory estimate exceeds 2 GB");
  const double results = 8.0 * static_cast<double>(trajectories) * static_cast<double>(alpha_list.size()) *
                         static_cast<double>(gamma_list.size()) * static_cast<double>(N_list.size());
  if (results > kMaxResultBytes) throw ResourceError("result buffer estimate exceeds 4 GB");
}

ExperimentConfig paper_scale(ExperimentConfig cfg) {
  cfg.trajectories = 1000;
  cfg.fine_L = 20;
  cfg.l = 100;
  return cfg;
}

double CellResult::mean_finest_rates(std::size_t count) const {
  double sum = 0.0;
  std::size_t used = 0;
  for (auto it = rates.rbegin(); it != rates.rend() && used < count; ++it) {
    if (*it) {
      sum += **it;
      ++used;
    }
  }
  return used == 0 ? std::nan("") : sum / static_cast<double>(used);
}

const CellResult& ConvergenceReport::cell(double alpha, double gamma) const {
  for (const auto& c : cells) {
    if (c.alpha == alpha && c.gamma == gamma) return c;
  }
  throw std::out_of_range("no cell for the requested (alpha, gamma)");
}

std::vector<std::optional<double>> convergence_rates(const std::vector<double>& errors) {
  std::vector<std::optional<double>> rates(errors.size());
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i - 1] > 0.0 && errors[i] > 0.0) rates[i] = std::log2(errors[i - 1] / errors[i]);
  }
  return rates;
}

ConvergenceReport run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  cfg.check_resources();
  const auto start = std::chrono::steady_clock::now();

  std::vector<SchemeSpec> schemes;
  for (double a : cfg.alpha_list) {
    for (double g : cfg.gamma_list) schemes.push_back(SchemeSpec::make(cfg.scheme, a, g));
  }
  const std::size_t levels = cfg.N_list.size();
  const std::size_t pairs = levels - 1;

  std::vector<std::vector<Stepper>> steppers(schemes.size());
  for (std::size_t c = 0; c < schemes.size(); ++c) {
    for (std::size_t N : cfg.N_list) steppers[c].emplace_back(schemes[c], N);
  }
  const InitialData data = initial_data(cfg);
  std::vector<ProblemSpec> problems;
  for (std::size_t N : cfg.N_list) problems.push_back({data.upsilon, data.velocity, cfg.T, N});

  const std::size_t M = cfg.trajectories;
  const std::size_t per_traj = schemes.size() * pairs;
  std::vector<double> samples(M * per_traj, 0.0);

  parallel_for(M, worker_count(cfg, M), [&](std::size_t t) {
    std::vector<FoldedNoise> noise;
    if (!cfg.zero_noise) noise = folded_trajectory(cfg, schemes.front(), t, cfg.l);
    for (std::size_t c = 0; c < schemes.size(); ++c) {
      ModeField previous;
      for (std::size_t p = 0; p < levels; ++p) {
        const FoldedNoise* g = cfg.zero_noise ? nullptr : &noise[p];
        ModeField u = terminal_u(steppers[c][p], problems[p], g);
        if (p > 0) samples[t * per_traj + c * pairs + (p - 1)] = squared_distance(previous, u);
        previous = std::move(u);
      }
    }
  });

  ConvergenceReport report;
  report.scheme = cfg.scheme;
  report.seed = cfg.seed;
  report.trajectories = M;
  report.l = cfg.l;
  report.J = cfg.J;
  report.fine_L = cfg.fine_L;
  report.zero_noise = cfg.zero_noise;
  for (std::size_t c = 0; c < schemes.size(); ++c) {
    CellResult cell;
    cell.alpha = schemes[c].alpha;
    cell.gamma = schemes[c].gamma;
    cell.stability_warning = schemes[c].stability_warning;
    for (std::size_t p = 0; p < pairs; ++p) {
      const MomentPair mp = moments(samples, M, c * pairs + p, per_traj);
      cell.N.push_back(cfg.N_list[p + 1]);
      cell.mean_sq.push_back(mp.mean);
      cell.std_err_sq.push_back(mp.std_err);
      cell.errors.push_back(std::sqrt(mp.mean));
    }
    cell.rates = convergence_rates(cell.errors);
    report.cells.push_back(std::move(cell));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::nan("");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

TruncationReport truncation_study(const ExperimentConfig& cfg, const std::vector<int>& l_list) {
  cfg.validate();
  cfg.check_resources();
  for (int l : l_list) {
    if (l < 1 || l > cfg.l) throw ConfigError("truncation levels must lie in [1, l_ref]");
  }
  if (cfg.zero_noise) throw ConfigError("truncation study needs noise");

  const SchemeSpec scheme = SchemeSpec::make(cfg.scheme, cfg.alpha_list.front(), cfg.gamma_list.front());
  const std::size_t N = cfg.N_list.back();
  ExperimentConfig single = cfg;
  single.N_list = {N};
  const Stepper stepper(scheme, N);
  const InitialData data = initial_data(cfg);
  const ProblemSpec problem{data.upsilon, data.velocity, cfg.T, N};

  const std::size_t M = cfg.trajectories;
  const std::size_t per_traj = l_list.size();
  std::vector<double> samples(M * per_traj, 0.0);

  parallel_for(M, worker_count(cfg, M), [&](std::size_t t) {
    const FoldedNoise full = folded_trajectory(single, scheme, t, cfg.l).front();
    const ModeField u_ref = terminal_u(stepper, problem, &full);
    for (std::size_t i = 0; i < l_list.size(); ++i) {
      const auto l = static_cast<std::size_t>(l_list[i]);
      FoldedNoise truncated(l, N);
      for (std::size_t n = 0; n <= N; ++n) {
        for (std::size_t j = 0; j < l; ++j) truncated.at(n, j) = full.at(n, j);
      }
      const ModeField u_l = terminal_u(stepper, problem, &truncated);
      samples[t * per_traj + i] = squared_distance(u_l, u_ref);
    }
  });

  TruncationReport rep;
  rep.alpha = scheme.alpha;
  rep.gamma = scheme.gamma;
  rep.N = N;
  rep.l_ref = cfg.l;
  rep.trajectories = M;
  rep.l = l_list;
  for (std::size_t i = 0; i < l_list.size(); ++i) {
    const MomentPair mp = moments(samples, M, i, per_traj);
    rep.mean_sq.push_back(mp.mean);
    rep.std_err_sq.push_back(mp.std_err);
  }
  std::vector<double> lx(l_list.begin(), l_list.end());
  rep.fitted_slope = loglog_slope(lx, rep.mean_sq);
  return rep;
}

DeterministicOrderReport deterministic_order(SchemeKind kind, double alpha, const std::vector<std::size_t>& N_list,
                                             double upsilon_coeff, double b_coeff, double T) {
  const SchemeSpec scheme = SchemeSpec::make(kind, alpha, 0.5);
  const double lambda = eigenvalue(1);
  const double z = -lambda * std::pow(T, alpha);
  DeterministicOrderReport rep;
  rep.scheme = kind;
  rep.alpha = alpha;
  rep.oracle = mittag_leffler(alpha, 1.0, z) * upsilon_coeff + T * mittag_leffler(alpha, 2.0, z) * b_coeff;
  for (std::size_t N : N_list) {
    const ProblemSpec problem{ModeField(std::vector<double>{upsilon_coeff}), ModeField(std::vector<double>{b_coeff}),
                              T, N};
    const Stepper stepper(scheme, N);
    const ModeField u = terminal_u(stepper, problem, nullptr);
    rep.N.push_back(N);
    rep.errors.push_back(std::abs(u[0] - rep.oracle));
  }
  rep.rates = convergence_rates(rep.errors);
  return rep;
}

}  // namespace idmbdf
