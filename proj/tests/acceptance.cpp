// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Usage: acceptance [--work DIR] [--only N]
// With --work the artifacts are kept in DIR; otherwise a temporary
// directory is used and removed afterwards.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccasgnn/baselines/linear.hpp"
#include "ccasgnn/cli/app.hpp"
#include "ccasgnn/data/synthetic.hpp"
#include "ccasgnn/model/ccasgnn.hpp"
#include "ccasgnn/model/layers.hpp"
#include "ccasgnn/trainer/report.hpp"
#include "ccasgnn/trainer/train.hpp"
#include "compare_outputs.hpp"
#include "oracles.hpp"

namespace {

using namespace ccasgnn;
namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(compare::slurp(p)); }

// Runs the command-line tool in-process; its chatter goes to a log file.
int ccasgnn_cmd(const std::vector<std::string>& args, const fs::path& log) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  std::ofstream(log, std::ios::app) << "$ ccasgnn";
  for (const auto& a : args) std::ofstream(log, std::ios::app) << ' ' << a;
  std::ofstream(log, std::ios::app) << '\n' << out.str() << err.str() << "exit " << code << "\n\n";
  if (code != 0) std::cerr << "  command failed (" << code << "): " << args.front() << ": " << err.str();
  return code;
}

MatrixXd gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  MatrixXd m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = g(rng);
  return m;
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::vector<data::Edge> random_edges(int n, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(0.4);
  std::vector<data::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (keep(rng)) edges.push_back({i, j});
    }
  }
  return edges;
}

std::vector<int> positions(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

// ------------------------------------------------------------------ 1

Outcome gradient_fidelity(const fs::path& work) {
  const fs::path out = work / "gradcheck";
  const auto start = Clock::now();
  const int code = ccasgnn_cmd({"gradcheck", "--seed", "1", "--out", out.string()}, work / "commands.log");
  const double wall = seconds_since(start);
  if (code != 0) return {false, "gradcheck exited with " + std::to_string(code)};
  const json r = read_json(out / "gradcheck.json");
  const bool pass = r.at("passed").get<bool>() && wall < 30.0;
  return {pass, std::to_string(r.at("groups").size()) + " parameter groups on a 6-node cascade, max rel err " +
                    sci(r.at("worst_relative").get<double>()) + " (tol 1e-4), " + fixed(wall, 1) + " s (limit 30 s)"};
}

// ------------------------------------------------------------------ 2

Outcome equation_oracles() {
  std::mt19937_64 rng(2024);
  const int trials = 25;
  double gcn = 0, gat = 0, att = 0, pe = 0, msle = 0;
  for (int t = 0; t < trials; ++t) {
    const int n = uniform(rng, 1, 6);
    const int din = uniform(rng, 1, 4);
    const int dout = uniform(rng, 1, 5);
    const int dp = 2 * uniform(rng, 0, 3);
    const auto edges = random_edges(n, rng);
    const MatrixXd h = gaussian(n, din, rng);
    std::vector<int> pos = positions(n);
    std::shuffle(pos.begin(), pos.end(), rng);
    const MatrixXd enc = model::positional_encoding(pos, dp == 0 ? 2 : dp).leftCols(dp);
    const oracle::Grid enc_grid = dp ? oracle::to_grid(enc) : oracle::Grid{};
    numcore::Tape tape;
    std::optional<numcore::NodeRef> pe_ref;
    if (dp > 0) pe_ref = tape.constant(enc);

    {
      const MatrixXd w = gaussian(dout, din + dp, rng), b = gaussian(1, dout, rng);
      const auto lib = model::gcn_layer<double>(tape.constant(h), pe_ref,
                                                tape.constant(model::normalized_laplacian(edges, n)),
                                                tape.constant(w), tape.constant(b), model::Activation::kRelu);
      const auto ref = oracle::gcn_layer(oracle::to_grid(h), enc_grid, oracle::laplacian(edges, n),
                                         oracle::to_grid(w), oracle::to_grid(b)[0], 0);
      gcn = std::max(gcn, oracle::max_abs_diff(ref, lib.value()));
    }
    {
      const MatrixXd w = gaussian(din + dp, dout, rng), a = gaussian(2 * dout, 1, rng);
      const auto lib = model::gat_layer<double>(tape.constant(h), pe_ref, model::attention_neighborhood(edges, n),
                                                tape.constant(w), tape.constant(a), 0.2, model::Activation::kElu);
      const auto ref = oracle::gat_layer(oracle::to_grid(h), enc_grid, edges, oracle::to_grid(w),
                                         std::vector<double>(a.data(), a.data() + a.size()), 0.2, 1);
      gat = std::max({gat, oracle::max_abs_diff(ref.hidden, lib.hidden.value()),
                      oracle::max_abs_diff(ref.alpha, lib.attention.value())});
    }
    {
      const int heads = uniform(rng, 1, 4), d = uniform(rng, 1, 4);
      std::vector<model::AttentionHead<double>> lib_heads;
      std::vector<oracle::Head> ref_heads;
      for (int k = 0; k < heads; ++k) {
        const MatrixXd q = gaussian(din, d, rng), kk = gaussian(din, d, rng), v = gaussian(din, d, rng);
        lib_heads.push_back({tape.constant(q), tape.constant(kk), tape.constant(v)});
        ref_heads.push_back({oracle::to_grid(q), oracle::to_grid(kk), oracle::to_grid(v)});
      }
      const auto lib = model::multi_head_attention<double>(tape.constant(h), lib_heads);
      const auto ref = oracle::multi_head_attention(oracle::to_grid(h), ref_heads);
      att = std::max(att, oracle::max_abs_diff(ref.hidden, lib.hidden.value()));
      for (int k = 0; k < heads; ++k) att = std::max(att, oracle::max_abs_diff(ref.attention[k], lib.attention[k].value()));
    }
    {
      std::vector<int> p(static_cast<std::size_t>(n));
      for (int& x : p) x = uniform(rng, 0, 500);
      const int width = 2 * uniform(rng, 1, 32);
      pe = std::max(pe, oracle::max_abs_diff(oracle::positional_encoding(p, width), model::positional_encoding(p, width)));
    }
    {
      std::vector<double> pc, tc, pl, tl;
      for (int i = 0; i < n; ++i) {
        pc.push_back(uniform(rng, 0, 10000));
        tc.push_back(uniform(rng, 0, 10000));
        pl.push_back(std::log2(pc.back() + 1.0));
        tl.push_back(std::log2(tc.back() + 1.0));
      }
      msle = std::max(msle, std::abs(trainer::msle(pl, tl) - oracle::msle_counts(pc, tc)));
    }
  }
  const double worst = std::max({gcn, gat, att, pe, msle});
  return {worst < 1e-9, std::to_string(trials) + " random instances of <= 6 nodes; max |diff| GCN " + sci(gcn) +
                            ", GAT " + sci(gat) + ", attention " + sci(att) + ", PE " + sci(pe) + ", MSLE " +
                            sci(msle) + " (tol 1e-9)"};
}

// ------------------------------------------------------------------ 3

Outcome normalization_invariants() {
  std::mt19937_64 rng(77);
  double alpha_err = 0, att_err = 0, asym = 0, min_ev = 0, max_ev = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = uniform(rng, 1, 6);
    const auto edges = random_edges(n, rng);
    numcore::Tape tape;
    const auto h = tape.constant(gaussian(n, 4, rng, 3.0));
    const auto gat = model::gat_layer<double>(h, std::nullopt, model::attention_neighborhood(edges, n),
                                              tape.constant(gaussian(4, 5, rng, 3.0)),
                                              tape.constant(gaussian(10, 1, rng, 3.0)), 0.2, model::Activation::kElu);
    alpha_err = std::max(alpha_err, (gat.attention.value().rowwise().sum().array() - 1.0).abs().maxCoeff());
    std::vector<model::AttentionHead<double>> heads;
    for (int k = 0; k < 3; ++k) {
      heads.push_back({tape.constant(gaussian(4, 4, rng, 2.0)), tape.constant(gaussian(4, 4, rng, 2.0)),
                       tape.constant(gaussian(4, 4, rng, 2.0))});
    }
    for (const auto& a : model::multi_head_attention<double>(h, heads).attention) {
      att_err = std::max(att_err, (a.value().rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
    const MatrixXd l = model::normalized_laplacian(edges, n);
    asym = std::max(asym, (l - l.transpose()).cwiseAbs().maxCoeff());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(l).eigenvalues();
    min_ev = std::min(min_ev, ev.minCoeff());
    max_ev = std::max(max_ev, ev.maxCoeff());
  }
  const bool pass = alpha_err <= 1e-9 && att_err <= 1e-9 && asym == 0.0 && min_ev >= -1e-9 && max_ev <= 2.0 + 1e-9;
  return {pass, "100 random graphs; max |row sum - 1| alpha " + sci(alpha_err) + ", Att " + sci(att_err) +
                    "; L asymmetry " + sci(asym) + ", eigenvalues in [" + sci(min_ev) + ", " + fixed(max_ev, 9) +
                    "]"};
}

// ------------------------------------------------------------------ 4

Outcome pe_shift() {
  const int dp = 16;
  const MatrixXd pe = model::positional_encoding(positions(129), dp);
  double worst = 0.0;
  for (int p = 0; p <= 64; ++p) {
    for (int t = 0; t <= 64; ++t) {
      for (int i = 0; i < dp / 2; ++i) {
        const double w = t * model::pe_frequency(i, dp);
        const double s = pe(p, 2 * i), c = pe(p, 2 * i + 1);
        worst = std::max({worst, std::abs(std::cos(w) * s + std::sin(w) * c - pe(p + t, 2 * i)),
                          std::abs(-std::sin(w) * s + std::cos(w) * c - pe(p + t, 2 * i + 1))});
      }
    }
  }
  return {worst < 1e-9, "PE(p+t) = R(t) PE(p) for all p, t <= 64 at d_p = 16, max |diff| " + sci(worst)};
}

// ------------------------------------------------------------------ 5

Outcome learnability() {
  data::GeneratorConfig g;
  g.cascade_count = 16;
  g.noise = 0.0;
  g.seed = 11;
  data::DatasetSplit split;
  split.train = data::generate_synthetic(g);
  trainer::TrainConfig tc;
  tc.batch_size = 16;
  tc.epochs = 3000;
  tc.max_steps = 3000;
  const auto start = Clock::now();
  const auto result = trainer::train(split, model::ModelConfig{}, tc);
  const double wall = seconds_since(start);

  const auto& m = result.model;
  numcore::Tape tape;
  const auto bound = model::bind_params<double>(tape, m.params, m.config, false);
  std::vector<model::ForwardOutput> outs;
  std::vector<std::int64_t> labels;
  for (const auto& c : split.train) {
    outs.push_back(model::forward<double>(bound, model::prepare_inputs(m.normalizer.apply(c), m.config), m.config));
    labels.push_back(c.growth_label);
  }
  const double loss = model::loss<double>(outs, labels).item();
  const double w1 = m.params.at(model::kFusionW1)(0, 0), w2 = m.params.at(model::kFusionW2)(0, 0);
  // A negative fusion weight could push the weighted loss below zero without
  // fitting anything, so both weights must stay positive.
  const bool pass = loss < 0.05 && w1 > 0 && w2 > 0 && result.steps <= 3000 && wall < 120.0;
  return {pass, "16 noiseless cascades, default config: loss " + sci(loss) + " (limit 0.05) after " +
                    std::to_string(result.steps) + " steps, w1 " + fixed(w1) + ", w2 " + fixed(w2) + ", train MSLE " +
                    sci(result.report.msle.at(trainer::kTrainSplit)) + ", " + fixed(wall, 1) + " s (limit 120 s)"};
}

// ------------------------------------------------------------------ 6

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

Outcome protocol(const fs::path& work) {
  const auto start = Clock::now();
  const fs::path dir = work / "protocol";
  const fs::path log = work / "commands.log";
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "protocol.cfg");
    cfg << "gen.cascades = 2000\n"
           "train.epochs = 30\n"
           "train.patience = 6\n"
           "sensitivity.pe_dims = 8,16,32\n"
           "sensitivity.dropout_rates = 0,0.05,0.1,0.15,0.2\n";
  }
  const std::string cfg = (dir / "protocol.cfg").string();
  auto cmd = [&](const std::string& name, const std::string& out, std::vector<std::string> extra) {
    std::vector<std::string> args{name, "--config", cfg, "--out", (dir / out).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return ccasgnn_cmd(args, log);
  };
  if (cmd("gen-data", "corpus", {"--seed", "2024"}) != 0) return {false, "gen-data failed"};
  const std::string corpus = (dir / "corpus" / "corpus.jsonl").string();

  std::vector<double> full, linear;
  for (int seed = 1; seed <= 5; ++seed) {
    const std::string s = std::to_string(seed);
    if (cmd("train", "train-" + s, {"--corpus", corpus, "--seed", s}) != 0) return {false, "train failed"};
    if (cmd("baseline", "baseline-" + s, {"--corpus", corpus, "--seed", s}) != 0) return {false, "baseline failed"};
    full.push_back(trainer::load_report(dir / ("train-" + s) / "report.json").msle.at(trainer::kTestSplit));
    linear.push_back(
        trainer::load_report(dir / ("baseline-" + s) / "baseline_linear.json").msle.at(trainer::kTestSplit));
  }

  if (cmd("ablate", "ablation", {"--corpus", corpus, "--seed", "1"}) != 0) return {false, "ablate failed"};
  const json ablation = read_json(dir / "ablation" / "ablation.json");
  bool ablation_ok = ablation.at("rows").size() == 4;
  for (const auto& row : ablation.at("rows")) {
    ablation_ok = ablation_ok && row.at("error").get<std::string>().empty() && row.at("test_msle").is_number();
  }
  std::cout << compare::slurp(dir / "ablation" / "ablation.txt");

  if (cmd("sensitivity", "sensitivity", {"--corpus", corpus, "--seed", "1"}) != 0) return {false, "sensitivity failed"};
  const json sens = read_json(dir / "sensitivity" / "sensitivity.json");
  std::vector<double> dims, rates;
  bool sens_ok = true;
  for (const auto& r : sens.at("records")) {
    sens_ok = sens_ok && r.at("error").get<std::string>().empty() && r.at("test_msle").is_number();
    (r.at("parameter") == "pe_dim" ? dims : rates).push_back(r.at("value").get<double>());
  }
  sens_ok = sens_ok && dims == std::vector<double>{8, 16, 32} &&
            rates == std::vector<double>{0.0, 0.05, 0.10, 0.15, 0.20};
  std::cout << compare::slurp(dir / "sensitivity" / "sensitivity.txt");

  const double wall = seconds_since(start);
  const double mf = median(full), ml = median(linear);
  std::string per_seed;
  for (std::size_t i = 0; i < full.size(); ++i) {
    per_seed += (i ? ", " : "") + fixed(full[i]) + "/" + fixed(linear[i]);
  }
  const bool pass = ablation_ok && sens_ok && mf <= ml && wall < 1800.0;
  return {pass, "2000 cascades; median test MSLE CCasGNN " + fixed(mf) + " vs Feature-Linear " + fixed(ml) +
                    " (per seed " + per_seed + "); ablation rows " + std::to_string(ablation.at("rows").size()) +
                    (ablation_ok ? " ok" : " INCOMPLETE") + "; sensitivity records " +
                    std::to_string(dims.size()) + " d_p + " + std::to_string(rates.size()) + " dropout" +
                    (sens_ok ? " ok" : " INCOMPLETE") + "; " + fixed(wall / 60.0, 1) + " min (limit 30 min)"};
}

// ------------------------------------------------------------------ 7

Outcome determinism(const fs::path& work) {
  const fs::path dir = work / "determinism";
  const fs::path log = work / "commands.log";
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "small.cfg");
    cfg << "gen.cascades = 120\ngen.max_nodes = 16\ntrain.epochs = 3\ndeep.epochs = 20\n"
           "model.gat_hidden = 16,16\nmodel.gcn_hidden = 16,16\nmodel.mlp_hidden = 16,8\n"
           "sensitivity.pe_dims = 8,16\nsensitivity.dropout_rates = 0,0.1\n";
  }
  const std::string cfg = (dir / "small.cfg").string();
  const std::string corpus = (dir / "gen-data" / "corpus.jsonl").string();
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"gen-data", {"--seed", "31"}},
      {"train", {"--corpus", corpus, "--seed", "4", "--dropout-rate", "0.05"}},
      {"eval",
       {"--corpus", corpus, "--checkpoint", (dir / "train" / "checkpoint.json").string(), "--split",
        (dir / "train" / "split.json").string()}},
      {"baseline", {"--corpus", corpus, "--seed", "4"}},
      {"ablate", {"--corpus", corpus, "--seed", "4"}},
      {"sensitivity", {"--corpus", corpus, "--seed", "4"}},
      {"gradcheck", {"--seed", "4"}},
  };
  std::vector<std::string> problems;
  for (const auto& [name, extra] : runs) {
    std::vector<std::string> args{name, "--config", cfg, "--out", (dir / name).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    if (ccasgnn_cmd(args, log) != 0) {
      problems.push_back(name + " failed");
      continue;
    }
    const fs::path again = dir / (name + "-replay");
    if (ccasgnn_cmd({"replay", "--manifest", (dir / name / "manifest.json").string(), "--out", again.string()}, log) !=
        0) {
      problems.push_back(name + " replay failed");
      continue;
    }
    for (const auto& d : compare::compare_run_dirs(dir / name, again, 1e-12)) problems.push_back(name + ": " + d);
  }
  std::string detail = std::to_string(runs.size()) + " commands replayed from their manifests";
  if (problems.empty()) {
    detail += "; all numeric outputs equal to 1e-12, corpus files byte-identical";
  } else {
    detail += "; " + std::to_string(problems.size()) + " differences, first: " + problems.front();
  }
  return {problems.empty(), detail};
}

// ------------------------------------------------------------------ 8

Outcome baseline_correctness() {
  std::mt19937_64 rng(8);
  double residual = 0.0, recovery = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = uniform(rng, 10, 200), p = uniform(rng, 1, 8);
    const MatrixXd x = gaussian(n, p, rng, 2.0);
    const Eigen::VectorXd y = gaussian(n, 1, rng);
    for (double ridge : {0.0, 1e-6, 1.0}) {
      residual = std::max(residual, baselines::normal_equation_residual(baselines::fit_linear(x, y, ridge), x, y, ridge));
    }
    const Eigen::VectorXd w = gaussian(p, 1, rng);
    const double b = std::normal_distribution<double>()(rng);
    const Eigen::VectorXd exact = (x * w).array() + b;
    const auto fit = baselines::fit_linear(x, exact, 0.0);
    recovery = std::max({recovery, std::abs(fit.intercept - b), (fit.weights - w).cwiseAbs().maxCoeff()});
  }
  return {residual < 1e-8 && recovery < 1e-8,
          "20 random systems; max normal-equation residual " + sci(residual) + " (tol 1e-8), exact-recovery error " +
              sci(recovery)};
}

}  // namespace

int main(int argc, char** argv) {
  std::optional<fs::path> keep;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--work") && i + 1 < argc) keep = argv[++i];
    else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
    else {
      std::cerr << "usage: acceptance [--work DIR] [--only N]\n";
      return 2;
    }
  }
  const fs::path work = keep ? *keep : fs::temp_directory_path() / ("ccasgnn-acceptance-" +
                                                                    std::to_string(std::random_device{}()));
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient fidelity", [&] { return gradient_fidelity(work); }},
      {"equation oracles", equation_oracles},
      {"normalization invariants", normalization_invariants},
      {"PE shift property", pe_shift},
      {"learnability", learnability},
      {"protocol reproduction", [&] { return protocol(work); }},
      {"determinism", [&] { return determinism(work); }},
      {"baseline correctness", baseline_correctness},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto& [name, run] = criteria[i];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << name << ": " << o.detail << std::endl;
  }
  if (!keep) fs::remove_all(work);
  else std::cout << "artifacts in " << work.string() << '\n';
  return failed ? 1 : 0;
}
