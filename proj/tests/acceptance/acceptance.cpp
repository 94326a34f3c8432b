// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <uwmmse_tools/commands.hpp>
#include <uwmmse_tools/config.hpp>

#include <uwmmse/distsim.hpp>
#include <uwmmse/io.hpp>
#include <uwmmse/model.hpp>
#include <uwmmse/netgen.hpp>
#include <uwmmse/rng.hpp>
#include <uwmmse/train.hpp>
#include <uwmmse/wmmse.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace uwmmse;
using tools::ExperimentConfig;

constexpr std::uint64_t kSuiteSeed = 0xACCE97;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ChannelState instance(int m, std::uint64_t stream, std::uint64_t k) {
  const std::uint64_t s = derive_seed(kSuiteSeed, stream, k);
  const NetworkTopology topo = sample_topology(m, derive_seed(s, 1));
  const std::uint64_t f = derive_seed(s, 2);
  return channel_state(topo, sample_fading(m, f), f);
}

ProblemConfig problem(double noise_std) {
  ProblemConfig c;
  c.noise_std = noise_std;
  return c;
}

wmmse::SolveOptions solve_options(double noise_std, int max_iter = 100) {
  wmmse::SolveOptions o;
  o.max_iter = max_iter;
  o.noise_std = noise_std;
  return o;
}

std::vector<Eigen::Index> permutation(int m, std::uint64_t seed) {
  std::vector<Eigen::Index> p(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 gen(seed);
  std::shuffle(p.begin(), p.end(), gen);
  return p;
}

Mat random_features(int m, int f, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Mat q(m, f);
  for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = n(gen);
  return q;
}

void reduction_identity() {
  double worst = 0.0;
  for (double sigma : {tools::kSigmaLow, tools::kSigmaHigh}) {
    for (std::uint64_t k = 0; k < 100; ++k) {
      const ChannelState h = instance(20, 1, k);
      const Vec p = model::forward_override(h, Vec::Ones(20), Vec::Zero(20), 4, problem(sigma)).p;
      const Vec ref = wmmse::solve_truncated(h, solve_options(sigma), 4).p;
      worst = std::max(worst, (p - ref).cwiseAbs().maxCoeff());
    }
  }
  report(1, worst < 1e-12, fmt("max |forward_override - solve_truncated| = %.3g over 200 instances", worst));
}

void equivariance() {
  double worst = 0.0;
  double parts[4] = {0, 0, 0, 0};
  for (std::uint64_t k = 0; k < 100; ++k) {
    const int m = 3 + static_cast<int>(k % 18);
    const ChannelState h = instance(m, 2, k);
    const auto perm = permutation(m, derive_seed(kSuiteSeed, 20, k));
    const ChannelState hp = h.permuted(perm);
    const Mat q = random_features(m, 3, derive_seed(kSuiteSeed, 21, k));
    const Mat qp = permute_rows(q, perm);
    const double sigma = (k % 2 == 0) ? tools::kSigmaLow : tools::kSigmaHigh;
    auto check = [&](int part, const Vec& base, const Vec& permuted) {
      const double d = (permute_vector(base, perm) - permuted).cwiseAbs().maxCoeff();
      parts[part] = std::max(parts[part], d);
      worst = std::max(worst, d);
    };
    for (auto variant : {model::PsiVariant::Gcn, model::PsiVariant::Regnn}) {
      const auto theta = model::init_params(derive_seed(kSuiteSeed, 22, k), 4, 3, 4, variant);
      const auto& psi = theta.layers.front().theta_a;
      const int v = variant == model::PsiVariant::Gcn ? 0 : 1;
      check(v, model::psi(h, q, psi), model::psi(hp, qp, psi));
      check(2, model::forward(h, q, theta, problem(sigma)).p, model::forward(hp, qp, theta, problem(sigma)).p);
    }
    check(3, wmmse::solve(h, solve_options(sigma)).p, wmmse::solve(hp, solve_options(sigma)).p);
  }
  report(2, worst < 1e-9,
         fmt("max deviation %.3g", worst) + fmt(" (Psi-GCN %.3g", parts[0]) + fmt(", Psi-REGNN %.3g", parts[1]) +
             fmt(", Phi %.3g", parts[2]) + fmt(", solve %.3g; 100 triples)", parts[3]));
}

void gradient_check() {
  const ProblemConfig cfg = problem(1.0);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const ChannelState h = instance(8, 3, k);
    const auto theta = model::init_params(derive_seed(kSuiteSeed, 30, k), 4, 1, 3);
    const std::vector<train::Sample> batch{{h, model::default_features(8)}};
    const grad::TapeFunction f = [&](grad::Tape& tape, const std::vector<grad::Var>& leaves) {
      return train::batch_loss(tape, model::split_params(theta, leaves), theta, batch, cfg);
    };
    std::vector<Mat> flat;
    for (const Mat* t : theta.tensors()) flat.push_back(*t);
    grad::FdOptions opts;
    opts.directions = 20;
    opts.seed = derive_seed(kSuiteSeed, 31, k);
    const auto r = grad::finite_diff_check(f, flat, opts);
    if (!r.conclusive) continue;
    report(3, r.max_rel_error < 1e-5,
           "relative error " + fmt("%.3g", r.max_rel_error) + " over " + std::to_string(r.checks) +
               " directions, kink distance " + fmt("%.3g", r.min_kink_distance) + " (instance " + std::to_string(k) + ")");
    return;
  }
  report(3, false, "no instance satisfied the kink-distance precondition");
}

void block_descent() {
  double worst_increase = -1e300;
  int steps = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const double sigma = (k % 2 == 0) ? tools::kSigmaLow : tools::kSigmaHigh;
    const auto r = wmmse::solve(instance(20, 4, k), solve_options(sigma));
    const auto& t = r.objective_trace;
    for (std::size_t i = 1; i < t.size(); ++i) {
      worst_increase = std::max(worst_increase, t[i] - t[i - 1]);
      ++steps;
    }
  }
  report(4, worst_increase <= 1e-10,
         fmt("largest per-step objective change = %.3g", worst_increase) + " over " + std::to_string(steps) + " steps");
}

// Share of 50 m=3 instances on which WMMSE(100) reaches 0.95 of the 21-level grid optimum.
int grid_oracle_hits(double sigma, double* worst) {
  int good = 0;
  const UtilityKind u = UtilityKind::sum_rate();
  for (std::uint64_t k = 0; k < 50; ++k) {
    const ChannelState h = instance(3, 5, k);
    double best = 0.0;
    Vec p(3);
    for (int a = 0; a <= 20; ++a) {
      for (int b = 0; b <= 20; ++b) {
        for (int c = 0; c <= 20; ++c) {
          p << a / 20.0, b / 20.0, c / 20.0;
          best = std::max(best, sum_utility(rates(p, h, sigma), u));
        }
      }
    }
    const double got = sum_utility(rates(wmmse::solve(h, solve_options(sigma)).p, h, sigma), u);
    *worst = std::min(*worst, got / best);
    if (got >= 0.95 * best) ++good;
  }
  return good;
}

void grid_oracle() {
  double worst = 1e300;
  double worst_high = 1e300;
  const int good = grid_oracle_hits(tools::kSigmaLow, &worst);
  const int good_high = grid_oracle_hits(tools::kSigmaHigh, &worst_high);
  report(5, good >= 45,
         std::to_string(good) + "/50 low-noise instances within 0.95 of the grid optimum (worst ratio " +
             fmt("%.4f", worst) + "); high-noise reference " + std::to_string(good_high) + "/50");
}

ExperimentConfig desk_config(const std::string& out) {
  ExperimentConfig c;
  c.m = 10;
  c.depth = 4;
  c.hidden = 4;
  c.noise = "low";
  c.test_samples = 512;
  c.train.max_steps = 5000;
  c.train.learning_rate = 3e-2;
  c.out = out;
  return c;
}

std::string desk_training(const std::string& root) {
  ExperimentConfig c = desk_config(root + "/desk");
  std::filesystem::create_directories(c.out);
  const auto report6 = tools::train_fixed(c, c.depth, c.hidden);
  const std::string ckpt = c.out + "/checkpoint.json";
  io::save_checkpoint(ckpt, tools::make_checkpoint(c, report6));
  c.checkpoint = ckpt;
  c.timing_samples = 16;
  const auto r = tools::cmd_compare(c);
  const double uw = r.summary["uwmmse"]["mean"].get<double>();
  const double tr = r.summary["tr_wmmse"]["mean"].get<double>();
  const double w = r.summary["wmmse"]["mean"].get<double>();
  report(6, uw >= 1.02 * tr && uw >= 0.95 * w,
         "UWMMSE " + fmt("%.3f", uw) + ", Tr-WMMSE(4) " + fmt("%.3f", tr) + ", WMMSE(100) " + fmt("%.3f", w) +
             "; ratios " + fmt("%.4f", uw / tr) + " / " + fmt("%.4f", uw / w) + " after " +
             std::to_string(report6.steps) + " steps");
  return ckpt;
}

void theorem1(const std::string& root) {
  bool exact = true;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const ChannelState h = instance(10, 7, k);
    wmmse::SolveOptions o = solve_options(1.0, 5000);
    o.tol = 1e-12;
    const auto fixed = wmmse::solve(h, o);
    const auto tr = model::forward_override(h, Vec::Ones(10), Vec::Zero(10), 5, problem(1.0)).trace;
    for (const Vec& r : model::theorem1_residual(tr, fixed, h)) exact = exact && (r.array() == 0.0).all();
  }
  ExperimentConfig c = desk_config(root + "/trace");
  c.depth = 5;
  c.trace_samples = 200;
  c.train.learning_rate = 1e-3;
  c.train_inline = true;
  const auto r = tools::cmd_trace_ab(c);
  const double share = r.summary["share_last_b_below_exceeds_first"].get<double>();
  const auto& layers = r.summary["per_layer"];
  report(7, exact && share >= 0.7,
         std::string("(a) zero-b residual exactly 0: ") + (exact ? "yes" : "no") + "; (b) share " + fmt("%.3f", share) +
             " of 200 samples (mean fraction b<0.1: layer 1 " +
             fmt("%.3f", layers.front()["fraction_b_below_0.1"].get<double>()) + ", layer 5 " +
             fmt("%.3f", layers.back()["fraction_b_below_0.1"].get<double>()) + ")");
}

void distributed() {
  double worst = 0.0;
  std::size_t violations = 0;
  bool counts = true;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const int m = 20;
    const ChannelState h = instance(m, 8, k);
    const double sigma = (k % 2 == 0) ? tools::kSigmaLow : tools::kSigmaHigh;
    const auto theta = model::init_params(derive_seed(kSuiteSeed, 80, k), 4, 1, 4);
    const Mat q = model::default_features(m);
    const auto d = distsim::run_distributed(h, q, theta, problem(sigma));
    worst = std::max(worst, (d.p - model::forward(h, q, theta, problem(sigma)).p).cwiseAbs().maxCoeff());
    violations += d.locality_violations;
    counts = counts && d.log.broadcasts() == static_cast<std::size_t>(3 * m * 4);
  }
  report(8, worst < 1e-9 && violations == 0 && counts,
         fmt("max deviation %.3g", worst) + ", locality violations " + std::to_string(violations) +
             ", broadcasts = 3mK: " + (counts ? "yes" : "no"));
}

void inference_cost(const std::string& ckpt_path) {
  const auto theta = io::load_checkpoint(ckpt_path).theta;
  const ProblemConfig cfg = problem(tools::kSigmaLow);
  const auto opts = solve_options(tools::kSigmaLow);
  using clock = std::chrono::steady_clock;
  double t_uw = 0.0;
  double t_w = 0.0;
  double sink = 0.0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const ChannelState h = instance(10, 9, k);
    const Mat q = model::default_features(10);
    auto t0 = clock::now();
    sink += model::forward(h, q, theta, cfg).p.sum();
    auto t1 = clock::now();
    sink += wmmse::solve(h, opts).p.sum();
    auto t2 = clock::now();
    t_uw += std::chrono::duration<double, std::milli>(t1 - t0).count();
    t_w += std::chrono::duration<double, std::milli>(t2 - t1).count();
  }
  report(9, t_uw < t_w && sink == sink,
         fmt("mean forward %.4f ms", t_uw / 1000) + fmt(" vs WMMSE(100) %.4f ms over 1000 instances", t_w / 1000));
}

void generalization(const std::string& root) {
  ExperimentConfig c = desk_config(root + "/generalize");
  c.train_inline = true;
  c.density_grid = {0.5, 0.75, 1.0, 2.0, 3.0, 4.0, 5.0};
  c.size_grid = {10, 15, 20, 25, 30};
  const auto r = tools::cmd_generalize(c);
  bool files = true;
  for (const char* f : {"generalize_density.csv", "generalize_size.csv", "generalize_summary.json"}) {
    files = files && std::filesystem::exists(c.out + "/" + f);
  }
  const std::string csv = io::read_file(c.out + "/generalize_density.csv");
  files = files && csv.find("# config: ") != std::string::npos;
  const auto& d5 = r.summary["density"].back();
  const auto& m30 = r.summary["size"].back();
  const bool pass = files && r.summary["density"].size() == 7 && r.summary["size"].size() == 5 &&
                    d5["ro_uwmmse"].get<double>() >= d5["uwmmse"].get<double>() &&
                    m30["ro_uwmmse"].get<double>() >= m30["uwmmse"].get<double>();
  report(10, pass,
         "d=5: Ro " + fmt("%.3f", d5["ro_uwmmse"].get<double>()) + " vs UWMMSE " + fmt("%.3f", d5["uwmmse"].get<double>()) +
             "; M=30: Ro " + fmt("%.3f", m30["ro_uwmmse"].get<double>()) + " vs UWMMSE " +
             fmt("%.3f", m30["uwmmse"].get<double>()) + (files ? "" : "; outputs missing"));
}

template <typename F>
void guarded(int id, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uwmmse acceptance suite"};
  std::string out = "acceptance_out";
  std::vector<int> only;
  app.add_option("--out", out, "directory for experiment artifacts");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);
  std::filesystem::create_directories(out);
  auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  std::string ckpt;
  if (want(1)) guarded(1, reduction_identity);
  if (want(2)) guarded(2, equivariance);
  if (want(3)) guarded(3, gradient_check);
  if (want(4)) guarded(4, block_descent);
  if (want(5)) guarded(5, grid_oracle);
  if (want(6) || want(9)) guarded(6, [&] { ckpt = desk_training(out); });
  if (want(7)) guarded(7, [&] { theorem1(out); });
  if (want(8)) guarded(8, distributed);
  if (want(9)) {
    if (ckpt.empty()) report(9, false, "no trained checkpoint");
    else guarded(9, [&] { inference_cost(ckpt); });
  }
  if (want(10)) guarded(10, [&] { generalization(out); });
  std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
