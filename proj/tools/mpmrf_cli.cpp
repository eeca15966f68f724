#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mpmrf/io.hpp"
#include "mpmrf/mpmrf.hpp"

namespace fs = std::filesystem;
using namespace mpmrf;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kComputation = 2, kGoldenMismatch = 3 };

// Raised for problems with the command line or its inputs.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSource {
  std::string model_path;
  std::string tree;
  double lambda = 1.0;
  double alpha = 0.0;

  Model load() const {
    try {
      if (!model_path.empty()) return io::read_model_file(model_path);
      if (tree.empty()) throw UsageError("one of --model or --tree is required");
      Tree t = fs::exists(tree) ? io::read_tree_file(tree) : io::tree_from_spec(tree);
      return new_model(std::move(t), lambda, alpha);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
};

struct Common {
  ModelSource source;
  std::string out_dir;
  std::size_t threads = 0;
  std::size_t n_fft = std::size_t{1} << 15;

  fs::path output_dir() const {
    fs::path dir = out_dir;
    if (dir.empty()) {
      const char* env = std::getenv("MPMRF_OUTPUT_DIR");
      dir = env && *env ? env : ".";
    }
    fs::create_directories(dir);
    return dir;
  }

  FftOptions fft() const {
    FftOptions o;
    o.n_fft = n_fft;
    o.threads = threads;
    return o;
  }
};

std::string short_number(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(x);
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

void write_pmf(const fs::path& path, const PmfVector& pmf) {
  auto out = open_csv(path);
  io::CsvWriter csv(out);
  csv.row("k", "p");
  for (std::size_t k = 0; k <= pmf.last_support(); ++k) csv.row(k, pmf.probs[k]);
}

void write_curves(const fs::path& path, const PmfVector& pmf, std::size_t x_max) {
  auto out = open_csv(path);
  io::CsvWriter csv(out);
  csv.row("x", "F", "pi");
  const auto f = cdf(pmf);
  for (std::size_t x = 0; x <= x_max; ++x) csv.row(x, f[std::min(x, f.size() - 1)], stop_loss(pmf, double(x)));
}

void write_cov(const fs::path& path, const CovarianceMatrix& cov) {
  auto out = open_csv(path);
  io::CsvWriter csv(out);
  std::vector<std::string> header{"vertex"};
  for (Vertex v = 1; v <= cov.d; ++v) header.push_back(std::to_string(v));
  csv.row_range(header);
  for (Vertex u = 1; u <= cov.d; ++u) {
    std::ostringstream line;
    io::full_precision(line) << u;
    for (Vertex v = 1; v <= cov.d; ++v) line << ',' << cov(u, v);
    out << line.str() << '\n';
  }
}

void write_alloc(const fs::path& path, const AllocationTable& table) {
  auto out = open_csv(path);
  io::CsvWriter csv(out);
  csv.row("k", "p_M", "alloc_v", "share_v");
  for (std::size_t k = 0; k <= table.pmf.last_support(); ++k) {
    // Shares are left blank where p_M(k) is below the mass floor.
    std::ostringstream share;
    if (table.pmf[k] > kShareMassFloor) io::full_precision(share) << table.share(k);
    csv.row(k, table.pmf[k], table.alloc[k], share.str());
  }
}

void write_contributions(const fs::path& path, const TvarContributions& tc) {
  auto out = open_csv(path);
  io::CsvWriter csv(out);
  csv.row("vertex", "contribution", "fraction_of_tvar");
  for (const auto& p : tc.parts) csv.row(p.vertex, p.contribution, p.fraction);
}

std::vector<Vertex> resolve_vertices(const std::vector<Vertex>& requested, const Model& m) {
  if (requested.empty()) {
    std::vector<Vertex> all(m.size());
    for (Vertex v = 1; v <= m.size(); ++v) all[v - 1] = v;
    return all;
  }
  for (Vertex v : requested)
    if (v < 1 || v > m.size()) throw UsageError("vertex " + std::to_string(v) + " is not in the tree");
  return requested;
}

// ---------------------------------------------------------------------------

int cmd_sample(const Common& c, std::size_t n, std::optional<std::uint64_t> seed, Vertex root) {
  if (!seed) throw UsageError("sample requires --seed");
  const Model m = c.source.load();
  SampleOptions opts;
  opts.threads = c.threads;
  const SamplePanel panel = sample(m, root, n, *seed, opts);
  const fs::path path = c.output_dir() / "sample.csv";
  auto out = open_csv(path);
  io::CsvWriter csv(out);
  std::vector<std::string> header;
  for (Vertex v = 1; v <= m.size(); ++v) header.push_back("v" + std::to_string(v));
  csv.row_range(header);
  for (std::size_t r = 0; r < n; ++r)
    csv.row_range(std::span<const Count>(panel.values.data() + r * m.size(), m.size()));

  std::cout << "vertex,mean,variance\n" << std::setprecision(6);
  for (Vertex v = 1; v <= m.size(); ++v) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double x = double(panel.at(r, v));
      s += x;
      s2 += x * x;
    }
    const double mu = s / double(n);
    const double var = n > 1 ? (s2 - double(n) * mu * mu) / double(n - 1) : 0.0;
    std::cout << v << ',' << mu << ',' << var << '\n';
  }
  std::cerr << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_sum_pmf(const Common& c, Vertex root) {
  const Model m = c.source.load();
  const PmfVector pmf = sum_pmf_fft(m, root, c.fft());
  const PmfVector secondary = secondary_pmf_fft(m, c.fft());
  const fs::path dir = c.output_dir();
  write_pmf(dir / "sum_pmf.csv", pmf);
  write_pmf(dir / "secondary_pmf.csv", secondary);
  const auto cp = compound_params(m);
  std::cout << std::setprecision(10) << "lambda_M," << cp.lambda_M << "\nmean_secondary," << cp.mean_secondary
            << "\nmass_deficit," << pmf.mass_deficit << "\ntail_bound," << pmf.tail_bound << '\n';
  return kOk;
}

int cmd_cov(const Common& c) {
  const Model m = c.source.load();
  const CovarianceMatrix cov = covariance_matrix(m);
  write_cov(c.output_dir() / "cov.csv", cov);
  std::cout << std::setprecision(10) << "variance_of_sum," << cov.grand_sum() << '\n';
  return kOk;
}

int cmd_alloc(const Common& c, const std::vector<Vertex>& requested, const std::vector<double>& kappas) {
  const Model m = c.source.load();
  const auto vertices = resolve_vertices(requested, m);
  for (double kappa : kappas) {
    if (!(kappa >= 0.0 && kappa < 1.0)) throw UsageError("--kappa values must lie in [0, 1)");
  }
  const fs::path dir = c.output_dir();
  for (Vertex v : vertices)
    write_alloc(dir / ("alloc_v" + std::to_string(v) + ".csv"), expected_allocations_fft(m, v, c.fft()));
  std::cout << "kappa,vertex,contribution,fraction_of_tvar\n" << std::setprecision(8);
  for (double kappa : kappas) {
    const TvarContributions tc = tvar_contributions(m, kappa, c.fft(), vertices);
    write_contributions(dir / ("contributions_k" + short_number(kappa) + ".csv"), tc);
    for (const auto& p : tc.parts)
      std::cout << short_number(kappa) << ',' << p.vertex << ',' << p.contribution << ',' << p.fraction << '\n';
  }
  return kOk;
}

int cmd_risk(const Common& c, const std::vector<double>& kappas, const std::vector<double>& rhos, std::size_t x_max) {
  const Model m = c.source.load();
  for (double kappa : kappas) {
    if (!(kappa >= 0.0 && kappa < 1.0)) throw UsageError("--kappa values must lie in [0, 1)");
  }
  for (double rho : rhos) {
    if (!(rho > 0.0)) throw UsageError("--rho values must be positive");
  }
  const PmfVector pmf = sum_pmf_fft(m, 1, c.fft());
  const RiskReport r = risk_report(pmf, kappas, rhos, &m);
  const fs::path dir = c.output_dir();
  {
    auto out = open_csv(dir / "risk.csv");
    io::CsvWriter csv(out);
    csv.row("measure", "level", "value");
    csv.row("mean", "", mean(pmf));
    csv.row("variance", "", r.variance);
    for (double kappa : kappas) {
      csv.row("VaR", short_number(kappa), r.var_levels.at(kappa));
      csv.row("TVaR", short_number(kappa), r.tvar_levels.at(kappa));
    }
    for (double rho : rhos) csv.row("entropic", short_number(rho), r.entropic.at(rho));
  }
  write_curves(dir / "curves.csv", pmf, x_max);
  std::ifstream echo(dir / "risk.csv");
  std::cout << echo.rdbuf();
  return kOk;
}

int cmd_gen_tree(const Common& c, const std::string& format, const std::string& out_path) {
  if (c.source.tree.empty()) throw UsageError("gen-tree requires --tree");
  std::ostringstream text;
  if (format == "json") {
    text << io::model_to_json(c.source.load()).dump() << '\n';
  } else {
    io::write_tree_text(text, c.source.load().tree());
  }
  if (out_path.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw UsageError("cannot write " + out_path);
    out << text.str();
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// reproduce: the 50-vertex example at beta in {0, 0.3, 0.7, 0.9}.

struct Golden {
  double lambda_M, mean_secondary;
  double variance;
  std::size_t var90;
  double tvar90;
  std::size_t var99;
  double tvar99, entropic;
  // Contributions and percentage shares for vertices 1, 16, 30 at kappa 0.9.
  double contribution[3], percent[3];
};

constexpr double kBetas[] = {0.0, 0.3, 0.7, 0.9};
constexpr Vertex kTableVertices[] = {1, 16, 30};
constexpr Golden kGolden[] = {
    {50, 1, 50.00, 59, 62.76, 67, 69.82, 52.59, {1.26, 1.26, 1.26}, {2.00, 2.00, 2.00}},
    {35.3, 1.416, 157.84, 67, 74.60, 84, 90.85, 60.47, {1.31, 1.86, 2.38}, {1.75, 2.50, 3.19}},
    {15.7, 3.185, 841.80, 90, 109.95, 135, 152.30, 200.01, {1.88, 2.63, 2.75}, {1.71, 2.40, 2.50}},
    {5.9, 8.475, 1762.60, 105, 137.35, 175, 199.38, 719.77, {2.58, 2.95, 2.96}, {1.88, 2.14, 2.15}},
};

class GoldenDiff {
 public:
  explicit GoldenDiff(std::ostream& out) : out_(out) {}

  // Published values are rounded, so tol is usually half a unit in their
  // last printed digit.
  void check(const std::string& cell, double got, double want, double tol) {
    const bool ok = std::abs(got - want) <= tol;
    failures_ += !ok;
    out_ << (ok ? "PASS " : "FAIL ") << cell << " computed=" << std::setprecision(8) << got << " published=" << want
         << " diff=" << std::setprecision(3) << got - want << " tol=" << tol << '\n';
  }

  int failures() const { return failures_; }

 private:
  std::ostream& out_;
  int failures_ = 0;
};

int cmd_reproduce(const Common& c) {
  const fs::path dir = c.output_dir();
  std::ostringstream report;
  GoldenDiff diff(report);
  auto t1 = open_csv(dir / "table1.csv");
  auto t2 = open_csv(dir / "table2.csv");
  auto t3 = open_csv(dir / "table3.csv");
  io::CsvWriter table1(t1), table2(t2), table3(t3);
  table1.row("beta", "lambda_M", "mean_secondary");
  table2.row("beta", "variance", "var_0.9", "tvar_0.9", "var_0.99", "tvar_0.99", "entropic_0.1");
  table3.row("beta", "vertex", "contribution", "percent_of_tvar");

  const double kappas[] = {0.9, 0.99};
  const double rhos[] = {0.1};
  for (std::size_t i = 0; i < 4; ++i) {
    const double beta = kBetas[i];
    const Golden& g = kGolden[i];
    const std::string b = short_number(beta);
    const Model m = new_model(example_tree_50(), 1.0, beta);

    const auto cp = compound_params(m);
    table1.row(b, cp.lambda_M, cp.mean_secondary);
    diff.check("table1 beta=" + b + " lambda_M", cp.lambda_M, g.lambda_M, 0.0005);
    diff.check("table1 beta=" + b + " E[C_M]", cp.mean_secondary, g.mean_secondary, 0.0005);

    const PmfVector pmf = sum_pmf_fft(m, 1, c.fft());
    const RiskReport r = risk_report(pmf, kappas, rhos, &m);
    table2.row(b, r.variance, r.var_levels.at(0.9), r.tvar_levels.at(0.9), r.var_levels.at(0.99),
               r.tvar_levels.at(0.99), r.entropic.at(0.1));
    diff.check("table2 beta=" + b + " Var", r.variance, g.variance, 0.005);
    diff.check("table2 beta=" + b + " VaR_0.9", double(r.var_levels.at(0.9)), double(g.var90), 0.0);
    diff.check("table2 beta=" + b + " TVaR_0.9", r.tvar_levels.at(0.9), g.tvar90, 0.005);
    diff.check("table2 beta=" + b + " VaR_0.99", double(r.var_levels.at(0.99)), double(g.var99), 0.0);
    diff.check("table2 beta=" + b + " TVaR_0.99", r.tvar_levels.at(0.99), g.tvar99, 0.005);
    diff.check("table2 beta=" + b + " entropic_0.1", r.entropic.at(0.1), g.entropic, 0.005);

    const TvarContributions tc = tvar_contributions(m, 0.9, c.fft(), kTableVertices);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& p = tc.parts[j];
      const std::string v = std::to_string(p.vertex);
      table3.row(b, p.vertex, p.contribution, 100.0 * p.fraction);
      diff.check("table3 beta=" + b + " vertex=" + v + " contribution", p.contribution, g.contribution[j], 0.005);
      diff.check("table3 beta=" + b + " vertex=" + v + " percent", 100.0 * p.fraction, g.percent[j], 0.02);
    }

    write_pmf(dir / ("pmf_M_beta" + b + ".csv"), pmf);
    write_pmf(dir / ("pmf_C_beta" + b + ".csv"), secondary_pmf_fft(m, c.fft()));
    write_curves(dir / ("curves_beta" + b + ".csv"), pmf, 250);
  }

  {
    auto out = open_csv(dir / "golden_diff.txt");
    out << report.str();
  }
  std::cout << report.str() << (diff.failures() ? "golden mismatches: " + std::to_string(diff.failures()) : "all golden values reproduced")
            << '\n';
  return diff.failures() ? kGoldenMismatch : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson Markov random fields on trees: sampling, aggregate pmf, allocations and risk measures"};
  app.require_subcommand(1);
  Common common;

  auto add_model = [&](CLI::App* sub) {
    auto* model = sub->add_option("--model", common.source.model_path, "model JSON file")->check(CLI::ExistingFile);
    auto* tree = sub->add_option("--tree", common.source.tree,
                                 "tree file or generator: star:<d>, series:<d>, chinary:<chi>:<xi>, example50");
    model->excludes(tree);
    sub->add_option("--lambda", common.source.lambda, "Poisson mean of every component")->excludes(model);
    sub->add_option("--alpha", common.source.alpha, "dependence parameter on every edge")->excludes(model);
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out-dir", common.out_dir, "output directory (default $MPMRF_OUTPUT_DIR or .)");
    sub->add_option("--threads", common.threads, "worker threads, 0 = one per core");
  };
  auto add_nfft = [&](CLI::App* sub) {
    sub->add_option("--nfft", common.n_fft, "FFT length, a power of two")->check([](const std::string& s) {
      std::size_t n = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
      return ec == std::errc() && ptr == s.data() + s.size() && n >= 2 && fft::is_power_of_two(n)
                 ? std::string()
                 : std::string("--nfft must be a power of two >= 2");
    });
  };

  std::size_t n_draws = 1000;
  std::optional<std::uint64_t> seed;
  Vertex root = 1;
  auto* sample_cmd = app.add_subcommand("sample", "draw rows of N and write sample.csv");
  add_model(sample_cmd);
  add_output(sample_cmd);
  sample_cmd->add_option("--n", n_draws, "number of draws")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", seed, "random seed")->required();
  sample_cmd->add_option("--root", root, "vertex the sampler starts from");

  auto* pmf_cmd = app.add_subcommand("sum-pmf", "pmf of the sum M and of its batch size C_M");
  add_model(pmf_cmd);
  add_output(pmf_cmd);
  add_nfft(pmf_cmd);
  pmf_cmd->add_option("--root", root, "rooting used for the pgf");

  auto* cov_cmd = app.add_subcommand("cov", "covariance matrix of N");
  add_model(cov_cmd);
  add_output(cov_cmd);

  std::vector<Vertex> vertices;
  std::vector<double> kappas{0.9};
  auto* alloc_cmd = app.add_subcommand("alloc", "expected allocations, shares and TVaR contributions");
  add_model(alloc_cmd);
  add_output(alloc_cmd);
  add_nfft(alloc_cmd);
  alloc_cmd->add_option("--vertices", vertices, "comma-separated vertex labels (default all)")->delimiter(',');
  alloc_cmd->add_option("--kappa", kappas, "TVaR levels")->delimiter(',');

  std::vector<double> risk_kappas{0.9, 0.99}, rhos{0.1};
  std::size_t x_max = 250;
  auto* risk_cmd = app.add_subcommand("risk", "variance, VaR, TVaR, entropic measure and cdf/stop-loss curves of M");
  add_model(risk_cmd);
  add_output(risk_cmd);
  add_nfft(risk_cmd);
  risk_cmd->add_option("--kappa", risk_kappas, "VaR/TVaR levels")->delimiter(',');
  risk_cmd->add_option("--rho", rhos, "entropic risk aversion")->delimiter(',');
  risk_cmd->add_option("--x-max", x_max, "last point of the curves");

  std::string format = "text", out_path;
  auto* gen_cmd = app.add_subcommand("gen-tree", "print a generated tree as an edge list or a model as JSON");
  add_model(gen_cmd);
  gen_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  gen_cmd->add_option("--out", out_path, "write to this file instead of stdout");

  auto* repro_cmd = app.add_subcommand("reproduce", "50-vertex example: tables, figure data and a golden diff");
  add_output(repro_cmd);
  add_nfft(repro_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sample_cmd) return cmd_sample(common, n_draws, seed, root);
    if (*pmf_cmd) return cmd_sum_pmf(common, root);
    if (*cov_cmd) return cmd_cov(common);
    if (*alloc_cmd) return cmd_alloc(common, vertices, kappas);
    if (*risk_cmd) return cmd_risk(common, risk_kappas, rhos, x_max);
    if (*gen_cmd) return cmd_gen_tree(common, format, out_path);
    if (*repro_cmd) return cmd_reproduce(common);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kComputation;
  }
  return kUsage;
}
