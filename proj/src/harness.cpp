#include "rmtlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "rmtlab/dbm.hpp"
#include "rmtlab/dpp.hpp"
#include "rmtlab/kernels.hpp"
#include "rmtlab/localham.hpp"

namespace rmtlab {

using nlohmann::json;

namespace {

constexpr std::uint64_t kBootstrapTag = 0xB0075754ULL << 32;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t sample_group(std::size_t ensemble_index, int N) {
  return (static_cast<std::uint64_t>(ensemble_index) << 40) | static_cast<std::uint64_t>(N);
}

std::uint64_t bootstrap_group(std::size_t ensemble_index, int N) {
  return kBootstrapTag ^ sample_group(ensemble_index, N);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key()))
      throw std::invalid_argument(std::string(where) + ": unknown key '" + item.key() + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Independence gap of a dense table (row-major, dim x dim).
double dense_gap(const std::vector<double>& T, int dim) {
  double total = std::accumulate(T.begin(), T.end(), 0.0);
  if (total <= 0.0) return 0.0;
  std::vector<double> p1(static_cast<std::size_t>(dim), 0.0), p2(static_cast<std::size_t>(dim), 0.0);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const double p = T[static_cast<std::size_t>(a * dim + b)] / total;
      p1[static_cast<std::size_t>(a)] += p;
      p2[static_cast<std::size_t>(b)] += p;
    }
  double gap = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      gap += std::abs(T[static_cast<std::size_t>(a * dim + b)] / total -
                      p1[static_cast<std::size_t>(a)] * p2[static_cast<std::size_t>(b)]);
  return 0.5 * gap;
}

std::string diagonal_name(DiagonalVariance d) {
  return d == DiagonalVariance::kWigner ? "wigner" : "unitary";
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

DiagonalVariance EnsembleConfig::diagonal_variance() const noexcept {
  if (diagonal) return *diagonal;
  return kind == Kind::kGue ? DiagonalVariance::kUnitary : DiagonalVariance::kWigner;
}

std::string EnsembleConfig::name() const {
  std::string s = kind == Kind::kGue ? "gue" : "wigner-three-point";
  if (t) s += "-t" + format_double(*t);
  return s;
}

EnsembleConfig EnsembleConfig::from_json(const json& j) {
  check_keys(j, {"kind", "m4", "N", "t", "diagonal"}, "ensemble");
  EnsembleConfig e;
  const auto kind = get_or<std::string>(j, "kind", "gue");
  if (kind == "gue")
    e.kind = Kind::kGue;
  else if (kind == "wigner-three-point")
    e.kind = Kind::kWignerThreePoint;
  else
    throw std::invalid_argument("ensemble: unknown kind '" + kind + "'");
  e.m4 = get_or<double>(j, "m4", 3.0);
  if (j.contains("t") && !j.at("t").is_null()) e.t = j.at("t").get<double>();
  if (j.contains("diagonal")) {
    const auto d = j.at("diagonal").get<std::string>();
    if (d == "wigner")
      e.diagonal = DiagonalVariance::kWigner;
    else if (d == "unitary")
      e.diagonal = DiagonalVariance::kUnitary;
    else
      throw std::invalid_argument("ensemble: diagonal must be 'wigner' or 'unitary'");
  }
  if (e.t && !(*e.t >= 0.0 && *e.t <= 1.0)) throw std::invalid_argument("ensemble: t must lie in [0, 1]");
  if (e.kind == Kind::kWignerThreePoint && !(e.m4 >= 1.0))
    throw std::invalid_argument("ensemble: m4 must be >= 1");
  return e;
}

json EnsembleConfig::to_json() const {
  json j{{"kind", kind == Kind::kGue ? "gue" : "wigner-three-point"},
         {"m4", m4},
         {"diagonal", diagonal_name(diagonal_variance())}};
  j["t"] = t ? json(*t) : json(nullptr);
  return j;
}

HermitianMatrix sample_ensemble(const EnsembleConfig& ens, int N, Engine& rng) {
  const auto dv = ens.diagonal_variance();
  auto base = [&]() {
    if (ens.kind == EnsembleConfig::Kind::kGue) return sample_gue(N, rng, dv);
    const auto law = three_point_matching(ens.m4);
    return sample_wigner(law, law, N, rng, dv);
  };
  HermitianMatrix W = base();
  if (!ens.t) return W;
  HermitianMatrix U = sample_gue(N, rng);
  return interpolate(W, U, *ens.t);
}

Spectrum sample_ensemble_spectrum(const EnsembleConfig& ens, int N, Engine& rng) {
  if (ens.kind == EnsembleConfig::Kind::kGue && !ens.t &&
      ens.diagonal_variance() == DiagonalVariance::kUnitary)
    return gue_tridiagonal_spectrum(N, rng);
  return eigenvalues(sample_ensemble(ens, N, rng));
}

Window WindowSpec::at(int N, std::optional<double> energy) const {
  const double E0 = energy.value_or(E);
  if (c) return {E0, *c, N};
  return Window::rescaled(E0, rescaled_length.value_or(1.0), N);
}

WindowSpec WindowSpec::from_json(const json& j) {
  check_keys(j, {"E", "c", "rescaled_length"}, "window");
  WindowSpec w;
  w.E = j.at("E").get<double>();
  if (j.contains("c")) w.c = j.at("c").get<double>();
  if (j.contains("rescaled_length")) w.rescaled_length = j.at("rescaled_length").get<double>();
  if (w.c && w.rescaled_length)
    throw std::invalid_argument("window: give either c or rescaled_length, not both");
  if (!(std::abs(w.E) < 2.0)) throw std::invalid_argument("window: E must lie in (-2, 2)");
  return w;
}

json WindowSpec::to_json() const {
  json j{{"E", E}};
  if (c) j["c"] = *c;
  if (rescaled_length) j["rescaled_length"] = *rescaled_length;
  return j;
}

void ExperimentConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("config: samples must be >= 1");
  if (N_list.empty()) throw std::invalid_argument("config: N_list is empty");
  for (int N : N_list)
    if (N < 8) throw std::invalid_argument("config: every N must be >= 8");
  if (statistic != "count") throw std::invalid_argument("config: unknown statistic '" + statistic + "'");
  if (bootstrap < 0) throw std::invalid_argument("config: bootstrap must be >= 0");
  if (l_max < 0) throw std::invalid_argument("config: l_max must be >= 0");
  if (kernel_q < 2) throw std::invalid_argument("config: kernel_q must be >= 2");
  if (!averaging.empty() && averaging.size() != 2)
    throw std::invalid_argument("config: averaging needs one interval per window");
  if (!averaging.empty() && grid < 1) throw std::invalid_argument("config: grid must be >= 1");
  for (const auto& a : averaging) {
    if (!(a.eps > 0.0)) throw std::invalid_argument("config: averaging eps must be positive");
    if (!(a.a - a.eps > -2.0 && a.a + a.eps < 2.0))
      throw std::invalid_argument("config: averaging interval must lie in the bulk");
  }
  for (int N : N_list) {
    const Window w1 = windows[0].at(N), w2 = windows[1].at(N);
    if (!(w1.hi() < w2.lo() || w2.hi() < w1.lo()))
      throw std::invalid_argument("config: windows overlap at N = " + std::to_string(N));
    if (!averaging.empty()) {
      // Union of all windows anchored on each averaging interval.
      double lo[2], hi[2];
      for (int i = 0; i < 2; ++i) {
        const auto& av = averaging[static_cast<std::size_t>(i)];
        lo[i] = std::numeric_limits<double>::infinity();
        hi[i] = -lo[i];
        for (double u : energy_grid(av.a, av.eps, grid)) {
          const Window w = windows[static_cast<std::size_t>(i)].at(N, u);
          lo[i] = std::min(lo[i], w.lo());
          hi[i] = std::max(hi[i], w.hi());
        }
      }
      if (!(hi[0] < lo[1] || hi[1] < lo[0]))
        throw std::invalid_argument("config: averaged windows overlap at N = " + std::to_string(N));
    }
  }
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  check_keys(j,
             {"ensemble", "ensembles", "N_list", "samples", "windows", "averaging", "grid",
              "statistic", "seed", "output_dir", "bootstrap", "l_max", "kernel_q", "threads"},
             "experiment");
  ExperimentConfig c;
  if (j.contains("ensemble")) c.ensemble = EnsembleConfig::from_json(j.at("ensemble"));
  if (j.contains("ensembles"))
    for (const auto& e : j.at("ensembles")) c.ensembles.push_back(EnsembleConfig::from_json(e));
  if (j.contains("N_list")) c.N_list = j.at("N_list").get<std::vector<int>>();
  c.samples = get_or<long>(j, "samples", c.samples);
  if (j.contains("windows")) {
    const auto& w = j.at("windows");
    if (!w.is_array() || w.size() != 2) throw std::invalid_argument("config: exactly two windows required");
    c.windows = {WindowSpec::from_json(w[0]), WindowSpec::from_json(w[1])};
  } else {
    c.windows = {WindowSpec{-1.0, std::nullopt, 1.0}, WindowSpec{1.0, std::nullopt, 1.0}};
  }
  if (j.contains("averaging")) {
    for (const auto& a : j.at("averaging")) {
      check_keys(a, {"a", "eps"}, "averaging");
      c.averaging.push_back({a.at("a").get<double>(), a.at("eps").get<double>()});
    }
  }
  c.grid = get_or<int>(j, "grid", c.grid);
  c.statistic = get_or<std::string>(j, "statistic", c.statistic);
  c.seed = get_or<Seed>(j, "seed", c.seed);
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  c.bootstrap = get_or<int>(j, "bootstrap", c.bootstrap);
  c.l_max = get_or<int>(j, "l_max", c.l_max);
  c.kernel_q = get_or<int>(j, "kernel_q", c.kernel_q);
  c.threads = get_or<int>(j, "threads", c.threads);
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["ensemble"] = ensemble.to_json();
  j["ensembles"] = json::array();
  for (const auto& e : ensembles) j["ensembles"].push_back(e.to_json());
  j["N_list"] = N_list;
  j["samples"] = samples;
  j["windows"] = json::array({windows[0].to_json(), windows[1].to_json()});
  j["averaging"] = json::array();
  for (const auto& a : averaging) j["averaging"].push_back({{"a", a.a}, {"eps", a.eps}});
  j["grid"] = grid;
  j["statistic"] = statistic;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["bootstrap"] = bootstrap;
  j["l_max"] = l_max;
  j["kernel_q"] = kernel_q;
  j["threads"] = threads;
  return j;
}

// ---------------------------------------------------------------------------
// Parallel Monte Carlo

void for_each_sample(const EnsembleConfig& ens, int N, long M, Seed seed, std::uint64_t group,
                     const std::function<void(std::size_t, const Spectrum&)>& fn, Execution exec) {
  if (M < 0) throw std::invalid_argument("for_each_sample: negative sample count");
  for_each_index(
      static_cast<std::size_t>(M),
      [&](std::size_t i) {
        auto rng = make_engine(seed, group, i);
        fn(i, sample_ensemble_spectrum(ens, N, rng));
      },
      exec);
}

std::vector<Spectrum> sample_spectra(const EnsembleConfig& ens, int N, long M, Seed seed,
                                     std::uint64_t group, Execution exec) {
  std::vector<Spectrum> out(static_cast<std::size_t>(std::max(0L, M)));
  for_each_sample(ens, N, M, seed, group, [&](std::size_t i, const Spectrum& s) { out[i] = s; }, exec);
  return out;
}

double Estimate::z() const noexcept { return se > 0.0 ? (value - predicted) / se : kNaN; }

// ---------------------------------------------------------------------------
// Pipeline

namespace {

// Per-sample marginal count histograms over the energy grid (weight W per
// window; W = 1 for fixed windows).
struct SampleTally {
  std::vector<int> h1, h2;
};

void bump(std::vector<int>& h, int count) {
  if (static_cast<int>(h.size()) <= count) h.resize(static_cast<std::size_t>(count) + 1, 0);
  ++h[static_cast<std::size_t>(count)];
}

std::vector<double> averaged_law(const Kernel& K, const WindowSpec& spec, int N,
                                 const std::vector<double>& energies, int l_max, int q) {
  std::vector<double> acc(static_cast<std::size_t>(l_max) + 1, 0.0);
  for (double u : energies) {
    const auto law = count_distribution(K, spec.at(N, u).interval(), l_max, {q, 8, 1e-3});
    for (int l = 0; l <= l_max; ++l) acc[static_cast<std::size_t>(l)] += law.probs[static_cast<std::size_t>(l)];
  }
  for (auto& a : acc) a /= static_cast<double>(energies.size());
  return acc;
}

VariantResult summarize_variant(const std::string& name, const std::vector<SampleTally>& tallies,
                                long weight, const std::array<std::vector<double>, 2>& predicted,
                                int l_max, int bootstrap, Seed seed, std::uint64_t boot_group,
                                Execution exec) {
  VariantResult v;
  v.name = name;
  v.samples = static_cast<long>(tallies.size());
  const auto M = tallies.size();
  int dim = l_max + 1;
  for (const auto& t : tallies) dim = std::max({dim, static_cast<int>(t.h1.size()), static_cast<int>(t.h2.size())});

  // Joint histogram with integer weights h1(a) h2(b).
  for (const auto& t : tallies)
    for (std::size_t a = 0; a < t.h1.size(); ++a)
      for (std::size_t b = 0; b < t.h2.size(); ++b)
        if (t.h1[a] && t.h2[b]) v.histogram.add(static_cast<int>(a), static_cast<int>(b), static_cast<long>(t.h1[a]) * t.h2[b]);
  v.gap = independence_gap(v.histogram);

  const double W = static_cast<double>(weight);
  auto cell = [](const std::vector<int>& h, int l) {
    return l < static_cast<int>(h.size()) ? static_cast<double>(h[static_cast<std::size_t>(l)]) : 0.0;
  };
  std::vector<double> f(M);
  for (int w = 0; w < 2; ++w) {
    for (int l = 0; l <= l_max; ++l) {
      for (std::size_t s = 0; s < M; ++s) f[s] = cell(w == 0 ? tallies[s].h1 : tallies[s].h2, l) / W;
      v.marginals[static_cast<std::size_t>(w)].push_back(
          {mean_of(f), sd_of(f) / std::sqrt(static_cast<double>(M)), predicted[static_cast<std::size_t>(w)][static_cast<std::size_t>(l)]});
    }
  }
  v.joint.assign(static_cast<std::size_t>(l_max) + 1, {});
  for (int a = 0; a <= l_max; ++a) {
    for (int b = 0; b <= l_max; ++b) {
      for (std::size_t s = 0; s < M; ++s) f[s] = cell(tallies[s].h1, a) * cell(tallies[s].h2, b) / (W * W);
      v.joint[static_cast<std::size_t>(a)].push_back(
          {mean_of(f), sd_of(f) / std::sqrt(static_cast<double>(M)),
           predicted[0][static_cast<std::size_t>(a)] * predicted[1][static_cast<std::size_t>(b)]});
    }
  }

  // Bootstrap over samples; resample b uses its own substream.
  if (bootstrap >= 2 && M > 0) {
    std::vector<double> gaps(static_cast<std::size_t>(bootstrap));
    for_each_index(
        static_cast<std::size_t>(bootstrap),
        [&](std::size_t b) {
          auto rng = make_engine(seed, boot_group, b);
          std::uniform_int_distribution<std::size_t> pick(0, M - 1);
          std::vector<double> T(static_cast<std::size_t>(dim * dim), 0.0);
          for (std::size_t r = 0; r < M; ++r) {
            const auto& t = tallies[pick(rng)];
            for (std::size_t a = 0; a < t.h1.size(); ++a) {
              if (!t.h1[a]) continue;
              for (std::size_t c = 0; c < t.h2.size(); ++c)
                T[a * static_cast<std::size_t>(dim) + c] += static_cast<double>(t.h1[a]) * t.h2[c];
            }
          }
          gaps[b] = dense_gap(T, dim);
        },
        exec);
    v.gap_se = sd_of(gaps);
  }
  return v;
}

double kernel_independence_gap(const Eigen::MatrixXd& P) {
  const auto dim = static_cast<int>(P.rows());
  std::vector<double> T(static_cast<std::size_t>(dim * dim));
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) T[static_cast<std::size_t>(a * dim + b)] = std::max(0.0, P(a, b));
  return dense_gap(T, dim);
}

}  // namespace

EnsembleRun run_ensemble_pipeline(const ExperimentConfig& cfg, const EnsembleConfig& ens,
                                  std::size_t ensemble_index, int N, Execution exec) {
  EnsembleRun run;
  run.ensemble = ens;
  run.N = N;
  const Window w1 = cfg.windows[0].at(N), w2 = cfg.windows[1].at(N);
  const bool averaged = !cfg.averaging.empty();
  std::array<std::vector<double>, 2> grids;
  std::array<std::vector<Window>, 2> grid_windows;
  if (averaged) {
    for (int i = 0; i < 2; ++i) {
      const auto& av = cfg.averaging[static_cast<std::size_t>(i)];
      grids[static_cast<std::size_t>(i)] = energy_grid(av.a, av.eps, cfg.grid);
      for (double u : grids[static_cast<std::size_t>(i)])
        grid_windows[static_cast<std::size_t>(i)].push_back(cfg.windows[static_cast<std::size_t>(i)].at(N, u));
    }
  }

  const auto M = static_cast<std::size_t>(cfg.samples);
  std::vector<SampleTally> fixed(M), avg(averaged ? M : 0);
  std::vector<std::array<int, 2>> raw(M);
  for_each_sample(
      ens, N, cfg.samples, cfg.seed, sample_group(ensemble_index, N),
      [&](std::size_t i, const Spectrum& s) {
        const int c1 = count_in_window(s, w1), c2 = count_in_window(s, w2);
        raw[i] = {c1, c2};
        bump(fixed[i].h1, c1);
        bump(fixed[i].h2, c2);
        if (averaged) {
          for (const auto& w : grid_windows[0]) bump(avg[i].h1, count_in_window(s, w));
          for (const auto& w : grid_windows[1]) bump(avg[i].h2, count_in_window(s, w));
        }
      },
      exec);

  const Kernel K = Kernel::gue(N);
  const CountOptions opts{cfg.kernel_q, 8, 1e-3};
  const std::array<std::vector<double>, 2> fixed_pred{
      count_distribution(K, w1.interval(), cfg.l_max, opts).probs,
      count_distribution(K, w2.interval(), cfg.l_max, opts).probs};
  run.fixed = summarize_variant("fixed", fixed, 1, fixed_pred, cfg.l_max, cfg.bootstrap, cfg.seed,
                                bootstrap_group(ensemble_index, N), exec);

  // Exact finite-N joint law of the kernel, truncated well past l_max.
  constexpr int kJointMax = 10;
  const Eigen::MatrixXd P = joint_count_distribution(K, w1.interval(), w2.interval(), kJointMax, 30, 32);
  run.fixed.kernel_gap = kernel_independence_gap(P);

  if (averaged) {
    const std::array<std::vector<double>, 2> avg_pred{
        averaged_law(K, cfg.windows[0], N, grids[0], cfg.l_max, cfg.kernel_q),
        averaged_law(K, cfg.windows[1], N, grids[1], cfg.l_max, cfg.kernel_q)};
    run.averaged = summarize_variant("averaged", avg, cfg.grid, avg_pred, cfg.l_max, cfg.bootstrap,
                                     cfg.seed, bootstrap_group(ensemble_index, N) + 1, exec);
    run.averaged->kernel_gap = kNaN;
  }

  // Factorized-correlation residuals through binomial moments.
  for (int l1 = 1; l1 <= 2; ++l1) {
    for (int l2 = 1; l2 <= 2; ++l2) {
      std::vector<double> a(M), b(M);
      for (std::size_t s = 0; s < M; ++s) {
        a[s] = binomial(raw[s][0], l1);
        b[s] = binomial(raw[s][1], l2);
      }
      const double ma = mean_of(a), mb = mean_of(b);
      std::vector<double> prod(M);
      for (std::size_t s = 0; s < M; ++s) prod[s] = (a[s] - ma) * (b[s] - mb);
      const double cov = M > 1 ? std::accumulate(prod.begin(), prod.end(), 0.0) / static_cast<double>(M - 1) : 0.0;
      double e_ab = 0.0, e_a = 0.0, e_b = 0.0;
      for (int x = 0; x <= kJointMax; ++x)
        for (int y = 0; y <= kJointMax; ++y) {
          e_ab += P(x, y) * binomial(x, l1) * binomial(y, l2);
          e_a += P(x, y) * binomial(x, l1);
          e_b += P(x, y) * binomial(y, l2);
        }
      run.factorized_residual[static_cast<std::size_t>(l1 - 1)][static_cast<std::size_t>(l2 - 1)] = {
          cov, sd_of(prod) / std::sqrt(static_cast<double>(std::max<std::size_t>(M, 1))), e_ab - e_a * e_b};
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Manifest

json RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["version"] = version;
  j["config"] = config;
  j["seed"] = seed;
  j["seeds"] = seeds;
  j["workers"] = workers;
  j["wall_seconds"] = wall_seconds;
  j["outputs"] = json::array();
  json nan_files = json::array();
  for (const auto& o : outputs) {
    j["outputs"].push_back({{"path", std::filesystem::path(o.path).filename().string()},
                            {"sha256", o.sha256},
                            {"rows", o.rows},
                            {"has_nan", o.has_nan}});
    if (o.has_nan) nan_files.push_back(std::filesystem::path(o.path).filename().string());
  }
  j["nan_outputs"] = nan_files;
  j["extra"] = extra;
  return j;
}

void RunManifest::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / "manifest.json", std::ios::trunc);
  if (!f) throw std::runtime_error("manifest: cannot write " + (dir / "manifest.json").string());
  f << to_json().dump(2) << '\n';
}

namespace {

json seed_record(Seed seed, const std::vector<EnsembleConfig>& ensembles, const std::vector<int>& N_list) {
  json j;
  j["master"] = seed;
  j["rule"] =
      "draw i of (ensemble e, size N) uses mt19937_64(derive_substream(derive_substream(master, "
      "e << 40 | N), i)); bootstrap resample b uses group 0xB0075754 << 32 xor (e << 40 | N), "
      "+1 for the averaged variant";
  j["groups"] = json::array();
  for (std::size_t e = 0; e < ensembles.size(); ++e)
    for (int N : N_list)
      j["groups"].push_back({{"ensemble", ensembles[e].name()},
                             {"N", N},
                             {"group", sample_group(e, N)},
                             {"group_seed", derive_substream(seed, sample_group(e, N))}});
  return j;
}

std::string run_label(const EnsembleRun& r) { return r.ensemble.name() + "_N" + std::to_string(r.N); }

void emit_runs(const std::vector<EnsembleRun>& runs, const std::filesystem::path& out, int l_max,
               RunManifest& manifest) {
  Table summary{{"ensemble", "N", "variant", "samples", "gap", "gap_se", "kernel_gap"}, {}};
  Table marginals{{"ensemble", "N", "variant", "window", "l", "empirical", "se", "predicted", "z"}, {}};
  Table joint{{"ensemble", "N", "variant", "l1", "l2", "empirical", "se", "predicted_product", "z"}, {}};
  for (const auto& r : runs) {
    std::vector<const VariantResult*> variants{&r.fixed};
    if (r.averaged) variants.push_back(&*r.averaged);
    for (const auto* v : variants) {
      summary.add_row({r.ensemble.name(), std::int64_t{r.N}, v->name, std::int64_t{v->samples}, v->gap,
                       v->gap_se, v->kernel_gap});
      for (int w = 0; w < 2; ++w)
        for (int l = 0; l <= l_max; ++l) {
          const auto& e = v->marginals[static_cast<std::size_t>(w)][static_cast<std::size_t>(l)];
          marginals.add_row({r.ensemble.name(), std::int64_t{r.N}, v->name, std::int64_t{w + 1},
                             std::int64_t{l}, e.value, e.se, e.predicted, e.z()});
        }
      for (int a = 0; a <= l_max; ++a)
        for (int b = 0; b <= l_max; ++b) {
          const auto& e = v->joint[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
          joint.add_row({r.ensemble.name(), std::int64_t{r.N}, v->name, std::int64_t{a}, std::int64_t{b},
                         e.value, e.se, e.predicted, e.z()});
        }
      Table hist{{"l1", "l2", "count"}, {}};
      for (const auto& [c, n] : v->histogram.cells())
        hist.add_row({std::int64_t{c.first}, std::int64_t{c.second}, std::int64_t{n}});
      manifest.outputs.push_back(
          emit_table(hist, out / ("histogram_" + run_label(r) + "_" + v->name + ".csv")));
    }
  }
  manifest.outputs.push_back(emit_table(summary, out / "summary.csv"));
  manifest.outputs.push_back(emit_table(marginals, out / "marginals.csv"));
  manifest.outputs.push_back(emit_table(joint, out / "joint.csv"));
}

json window_record(const ExperimentConfig& cfg) {
  json j = json::array();
  for (int N : cfg.N_list) {
    for (int i = 0; i < 2; ++i) {
      const Window w = cfg.windows[static_cast<std::size_t>(i)].at(N);
      j.push_back({{"N", N}, {"window", i + 1}, {"lo", w.lo()}, {"hi", w.hi()}, {"c", w.c}});
    }
  }
  return j;
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ExperimentReport run_independence_experiment(const ExperimentConfig& cfg, Execution exec) {
  cfg.validate();
  set_worker_count(cfg.threads);
  ExperimentReport rep;
  rep.manifest.command = "independence";
  rep.manifest.seed = cfg.seed;
  rep.manifest.config = cfg.to_json();
  rep.manifest.workers = exec == Execution::kSerial ? 1 : worker_count();
  rep.manifest.seeds = seed_record(cfg.seed, {cfg.ensemble}, cfg.N_list);
  rep.manifest.wall_seconds = timed([&] {
    for (int N : cfg.N_list) rep.runs.push_back(run_ensemble_pipeline(cfg, cfg.ensemble, 0, N, exec));
    const std::filesystem::path out(cfg.output_dir);
    emit_runs(rep.runs, out, cfg.l_max, rep.manifest);
  });
  rep.manifest.extra["windows"] = window_record(cfg);
  rep.manifest.write(cfg.output_dir);
  return rep;
}

ExperimentReport run_universality_experiment(const ExperimentConfig& cfg, Execution exec) {
  cfg.validate();
  if (cfg.ensembles.size() != 2)
    throw std::invalid_argument("universality: config must list exactly two ensembles");
  set_worker_count(cfg.threads);
  ExperimentReport rep;
  rep.manifest.command = "universality";
  rep.manifest.seed = cfg.seed;
  rep.manifest.config = cfg.to_json();
  rep.manifest.workers = exec == Execution::kSerial ? 1 : worker_count();
  rep.manifest.seeds = seed_record(cfg.seed, cfg.ensembles, cfg.N_list);
  const std::filesystem::path out(cfg.output_dir);
  rep.manifest.wall_seconds = timed([&] {
    for (int N : cfg.N_list)
      for (std::size_t e = 0; e < 2; ++e)
        rep.runs.push_back(run_ensemble_pipeline(cfg, cfg.ensembles[e], e, N, exec));
    emit_runs(rep.runs, out, cfg.l_max, rep.manifest);

    Table paired{{"N", "variant", "window", "l", "p_a", "se_a", "p_b", "se_b", "z"}, {}};
    Table residual{{"ensemble", "N", "l1", "l2", "residual", "se", "predicted"}, {}};
    for (std::size_t i = 0; i + 1 < rep.runs.size(); i += 2) {
      const auto& A = rep.runs[i];
      const auto& B = rep.runs[i + 1];
      std::vector<std::pair<const VariantResult*, const VariantResult*>> vs{{&A.fixed, &B.fixed}};
      if (A.averaged && B.averaged) vs.push_back({&*A.averaged, &*B.averaged});
      for (const auto& [va, vb] : vs)
        for (int w = 0; w < 2; ++w)
          for (int l = 0; l <= cfg.l_max; ++l) {
            const auto& ea = va->marginals[static_cast<std::size_t>(w)][static_cast<std::size_t>(l)];
            const auto& eb = vb->marginals[static_cast<std::size_t>(w)][static_cast<std::size_t>(l)];
            const double se = std::hypot(ea.se, eb.se);
            paired.add_row({std::int64_t{A.N}, va->name, std::int64_t{w + 1}, std::int64_t{l}, ea.value,
                            ea.se, eb.value, eb.se, se > 0 ? (ea.value - eb.value) / se : kNaN});
          }
      for (const auto* r : {&A, &B})
        for (int l1 = 1; l1 <= 2; ++l1)
          for (int l2 = 1; l2 <= 2; ++l2) {
            const auto& e = r->factorized_residual[static_cast<std::size_t>(l1 - 1)][static_cast<std::size_t>(l2 - 1)];
            residual.add_row({r->ensemble.name(), std::int64_t{r->N}, std::int64_t{l1}, std::int64_t{l2},
                              e.value, e.se, e.predicted});
          }
    }
    rep.manifest.outputs.push_back(emit_table(paired, out / "paired_marginals.csv"));
    rep.manifest.outputs.push_back(emit_table(residual, out / "factorized_correlation.csv"));

    // Entry-level moments of each ensemble's off-diagonal real part.
    Table moments{{"ensemble", "k", "sample_moment", "se", "exact"}, {}};
    constexpr int kDraws = 100000;
    for (std::size_t e = 0; e < 2; ++e) {
      const auto& ens = cfg.ensembles[e];
      const auto law = ens.kind == EnsembleConfig::Kind::kGue ? EntryDistribution::standard_gaussian()
                                                               : three_point_matching(ens.m4);
      auto rng = make_engine(cfg.seed, 0xE7A1ULL << 32 | e);
      std::vector<double> draws(kDraws);
      for (auto& d : draws) d = law.draw(rng);
      for (int k = 1; k <= 4; ++k) {
        std::vector<double> pw(kDraws);
        for (int i = 0; i < kDraws; ++i) pw[static_cast<std::size_t>(i)] = std::pow(draws[static_cast<std::size_t>(i)], k);
        moments.add_row({ens.name(), std::int64_t{k}, mean_of(pw), sd_of(pw) / std::sqrt(double(kDraws)),
                         entry_moment(law, k)});
      }
    }
    rep.manifest.outputs.push_back(emit_table(moments, out / "entry_moments.csv"));
  });
  rep.manifest.extra["windows"] = window_record(cfg);
  rep.manifest.write(out);
  return rep;
}

// ---------------------------------------------------------------------------
// CLI commands

namespace {

RunManifest base_manifest(const std::string& command, const json& config, Seed seed) {
  RunManifest m;
  m.command = command;
  m.config = config;
  m.seed = seed;
  m.workers = worker_count();
  m.seeds = {{"master", seed}, {"rule", "item i uses mt19937_64(derive_substream(master, i))"}};
  return m;
}

RunManifest cmd_sample(const json& cfg, Seed seed, const std::filesystem::path& out) {
  check_keys(cfg, {"ensemble", "N", "samples", "seed", "threads"}, "sample");
  set_worker_count(get_or<int>(cfg, "threads", 0));
  const auto ens = cfg.contains("ensemble") ? EnsembleConfig::from_json(cfg.at("ensemble")) : EnsembleConfig{};
  const int N = get_or<int>(cfg, "N", 100);
  const long M = get_or<long>(cfg, "samples", 10);
  auto m = base_manifest("sample", cfg, seed);
  m.seeds["rule"] = "sample i uses mt19937_64(derive_substream(derive_substream(master, N), i))";
  m.wall_seconds = timed([&] {
    const auto spectra = sample_spectra(ens, N, M, seed, static_cast<std::uint64_t>(N));
    Table t{{"run_id", "sample_id", "index", "value"}, {}};
    const std::string run_id = ens.name() + "-N" + std::to_string(N);
    for (std::size_t s = 0; s < spectra.size(); ++s)
      for (int i = 0; i < spectra[s].size(); ++i)
        t.add_row({run_id, static_cast<std::int64_t>(s), std::int64_t{i}, spectra[s][i]});
    m.outputs.push_back(emit_table(t, out / "spectra.csv"));
  });
  return m;
}

RunManifest cmd_kernel(const json& cfg, Seed seed, const std::filesystem::path& out) {
  check_keys(cfg, {"kind", "N", "lo", "hi", "points", "seed", "threads"}, "kernel");
  set_worker_count(get_or<int>(cfg, "threads", 0));
  const auto kind = get_or<std::string>(cfg, "kind", "gue");
  const int N = get_or<int>(cfg, "N", 50);
  const double lo = get_or<double>(cfg, "lo", -2.5), hi = get_or<double>(cfg, "hi", 2.5);
  const int points = get_or<int>(cfg, "points", 101);
  if (points < 2 || !(hi > lo)) throw std::invalid_argument("kernel: need points >= 2 and hi > lo");
  if (kind != "gue" && kind != "sine") throw std::invalid_argument("kernel: kind must be 'gue' or 'sine'");
  const Kernel K = kind == "gue" ? Kernel::gue(N) : Kernel::sine();
  auto m = base_manifest("kernel", cfg, seed);
  m.wall_seconds = timed([&] {
    std::vector<double> x(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    const Eigen::MatrixXd G = K.matrix(x);
    Table t{{"x", "y", "value"}, {}};
    for (int i = 0; i < points; ++i)
      for (int j = 0; j < points; ++j) t.add_row({x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)], G(i, j)});
    m.outputs.push_back(emit_table(t, out / "kernel.csv"));
  });
  return m;
}

RunManifest cmd_gap(const json& cfg, Seed seed, const std::filesystem::path& out) {
  check_keys(cfg, {"kernel", "N", "E", "lengths", "l_max", "q", "seed", "threads"}, "gap");
  set_worker_count(get_or<int>(cfg, "threads", 0));
  const auto kind = get_or<std::string>(cfg, "kernel", "sine");
  if (kind != "gue" && kind != "sine") throw std::invalid_argument("gap: kernel must be 'gue' or 'sine'");
  const int N = get_or<int>(cfg, "N", 200);
  const double E = get_or<double>(cfg, "E", 0.0);
  const int l_max = get_or<int>(cfg, "l_max", 4);
  const int q = get_or<int>(cfg, "q", 40);
  std::vector<double> lengths = get_or<std::vector<double>>(cfg, "lengths", {0.25, 0.5, 1.0, 1.5, 2.0});
  const Kernel K = kind == "gue" ? Kernel::gue(N) : Kernel::sine();
  auto m = base_manifest("gap", cfg, seed);
  double route_gap = 0.0;
  m.wall_seconds = timed([&] {
    Table t{{"interval_length", "l", "prob"}, {}};
    for (double len : lengths) {
      // Lengths are in mean spacings: absolute for the sine kernel, rescaled
      // by N rho_sc(E) for the GUE kernel.
      const Interval iv = kind == "sine" ? Interval{E, E + len} : Window::rescaled(E, len, N).interval();
      const auto law = count_distribution(K, iv, l_max, {q, 8, 1e-3});
      const auto alt = count_distribution_generating(K, iv, l_max, q, 64);
      for (int l = 0; l <= l_max; ++l) {
        t.add_row({len, std::int64_t{l}, law.probs[static_cast<std::size_t>(l)]});
        route_gap = std::max(route_gap, std::abs(law.probs[static_cast<std::size_t>(l)] - alt.probs[static_cast<std::size_t>(l)]));
      }
    }
    m.outputs.push_back(emit_table(t, out / "gap.csv"));
  });
  m.extra["max_route_disagreement"] = route_gap;
  return m;
}

RunManifest cmd_dbm(const json& cfg, Seed seed, const std::filesystem::path& out) {
  check_keys(cfg, {"N", "paths", "T", "dt", "record_every", "initial", "initial_scale", "max_halvings", "seed", "threads"}, "dbm");
  set_worker_count(get_or<int>(cfg, "threads", 0));
  const int N = get_or<int>(cfg, "N", 50);
  const long paths = get_or<long>(cfg, "paths", 10);
  const double T = get_or<double>(cfg, "T", 0.5);
  const double dt = get_or<double>(cfg, "dt", 1e-3);
  const double every = get_or<double>(cfg, "record_every", 0.1);
  const double scale = get_or<double>(cfg, "initial_scale", 1.0);
  DbmOptions opts;
  opts.max_halvings = get_or<int>(cfg, "max_halvings", opts.max_halvings);
  if (opts.max_halvings < 0) throw std::invalid_argument("dbm: max_halvings must be >= 0");
  const auto ens = cfg.contains("initial") ? EnsembleConfig::from_json(cfg.at("initial")) : EnsembleConfig{};
  if (!(every > 0.0) || !(T >= 0.0)) throw std::invalid_argument("dbm: need record_every > 0, T >= 0");
  auto m = base_manifest("dbm", cfg, seed);
  m.wall_seconds = timed([&] {
    const auto records = static_cast<int>(std::floor(T / every + 1e-9));
    std::vector<std::vector<DbmState>> traj(static_cast<std::size_t>(paths));
    for_each_index(static_cast<std::size_t>(paths), [&](std::size_t p) {
      auto rng = make_engine(seed, p);
      HermitianMatrix W = sample_ensemble(ens, N, rng);
      const Spectrum ev = eigenvalues(W);
      std::vector<double> v(ev.values().begin(), ev.values().end());
      for (auto& x : v) x *= scale;
      DbmState st{Spectrum(v), 0.0};
      traj[p].push_back(st);
      for (int r = 1; r <= records; ++r) {
        st = dbm_evolve(st, r * every - st.t, dt, rng, opts);
        traj[p].push_back(st);
      }
    });
    Table t{{"path_id", "t", "index", "lambda"}, {}};
    for (std::size_t p = 0; p < traj.size(); ++p)
      for (const auto& st : traj[p])
        for (int i = 0; i < st.spec.size(); ++i)
          t.add_row({static_cast<std::int64_t>(p), st.t, std::int64_t{i}, st.spec[i]});
    m.outputs.push_back(emit_table(t, out / "dbm.csv"));
  });
  return m;
}

RunManifest cmd_hessian_audit(const json& cfg, Seed seed, const std::filesystem::path& out) {
  check_keys(cfg, {"N", "n", "trials", "seed", "threads"}, "hessian-audit");
  set_worker_count(get_or<int>(cfg, "threads", 0));
  const int N = get_or<int>(cfg, "N", 64);
  const int n = get_or<int>(cfg, "n", 4);
  const long trials = get_or<long>(cfg, "trials", 1000);
  auto m = base_manifest("hessian-audit", cfg, seed);
  long violations = 0;
  double min_rel_margin = std::numeric_limits<double>::infinity();
  m.wall_seconds = timed([&] {
    std::vector<QuadraticFormBound> res(static_cast<std::size_t>(trials));
    for_each_index(static_cast<std::size_t>(trials), [&](std::size_t i) {
      auto rng = make_engine(seed, i);
      const auto inst = random_instance(N, n, rng);
      std::normal_distribution<double> g;
      std::vector<double> v(static_cast<std::size_t>(2 * n));
      for (auto& x : v) x = g(rng);
      res[i] = quadratic_form_bound(inst, v);
    });
    Table t{{"trial", "lhs", "rhs", "margin"}, {}};
    for (std::size_t i = 0; i < res.size(); ++i) {
      t.add_row({static_cast<std::int64_t>(i), res[i].lhs, res[i].rhs, res[i].lhs - res[i].rhs});
      if (!res[i].holds()) ++violations;
      min_rel_margin = std::min(min_rel_margin, (res[i].lhs - res[i].rhs) / res[i].rhs);
    }
    m.outputs.push_back(emit_table(t, out / "hessian_audit.csv"));
  });
  m.extra["violations"] = violations;
  m.extra["min_relative_margin"] = min_rel_margin;
  return m;
}

RunManifest cmd_decouple_scan(const json& cfg, Seed seed, const std::filesystem::path& out) {
  check_keys(cfg, {"N_list", "n_list", "trials", "E1", "E2", "width_factor", "seed", "threads"}, "decouple-scan");
  set_worker_count(get_or<int>(cfg, "threads", 0));
  const auto N_list = get_or<std::vector<int>>(cfg, "N_list", {1000, 2000, 4000});
  const auto n_list = get_or<std::vector<int>>(cfg, "n_list", {2, 4, 8, 16});
  const int trials = get_or<int>(cfg, "trials", 100);
  ClusterGeometry geo{get_or<double>(cfg, "E1", -1.0), get_or<double>(cfg, "E2", 1.0),
                      get_or<double>(cfg, "width_factor", 2.0)};
  auto m = base_manifest("decouple-scan", cfg, seed);
  json fits = json::object();
  m.wall_seconds = timed([&] {
    Table t{{"n", "N", "fluctuation"}, {}};
    std::map<int, std::vector<double>> by_n;
    for (int N : N_list) {
      const auto est = remainder_fluctuation(N, n_list, geo, trials, derive_substream(seed, static_cast<std::uint64_t>(N)));
      std::vector<double> xs, ys;
      for (const auto& e : est) {
        t.add_row({std::int64_t{e.n}, std::int64_t{e.N}, e.fluctuation});
        xs.push_back(e.n);
        ys.push_back(e.fluctuation);
        by_n[e.n].push_back(e.fluctuation);
      }
      if (xs.size() >= 2) fits["n_exponent"][std::to_string(N)] = loglog_slope(xs, ys);
    }
    if (N_list.size() >= 2) {
      std::vector<double> Ns(N_list.begin(), N_list.end());
      for (const auto& [n, ys] : by_n) fits["N_exponent"][std::to_string(n)] = loglog_slope(Ns, ys);
    }
    m.outputs.push_back(emit_table(t, out / "decouple_scan.csv"));
  });
  m.extra["fits"] = fits;
  return m;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"sample", "kernel", "gap", "independence", "universality",
                                              "dbm", "hessian-audit", "decouple-scan"};
  return names;
}

RunManifest run_command(const std::string& command, const json& config, Seed seed,
                        const std::filesystem::path& out) {
  json cfg = config.is_null() ? json::object() : config;
  if (command == "independence" || command == "universality") {
    auto ec = ExperimentConfig::from_json(cfg);
    ec.seed = seed;
    ec.output_dir = out.string();
    return command == "independence" ? run_independence_experiment(ec).manifest
                                     : run_universality_experiment(ec).manifest;
  }
  RunManifest m;
  if (command == "sample")
    m = cmd_sample(cfg, seed, out);
  else if (command == "kernel")
    m = cmd_kernel(cfg, seed, out);
  else if (command == "gap")
    m = cmd_gap(cfg, seed, out);
  else if (command == "dbm")
    m = cmd_dbm(cfg, seed, out);
  else if (command == "hessian-audit")
    m = cmd_hessian_audit(cfg, seed, out);
  else if (command == "decouple-scan")
    m = cmd_decouple_scan(cfg, seed, out);
  else
    throw std::invalid_argument("unknown command '" + command + "'");
  m.write(out);
  return m;
}

}  // namespace rmtlab
