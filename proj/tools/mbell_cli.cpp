// Copyright 2026 The mbell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mbell: classical bounds, GHZ values, relaxation bounds and key rates of the
// multipartite Bell correlator B(n).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "mbell/mbell.hpp"

namespace {

constexpr int kModuleError = 1;
constexpr int kUsageError = 2;

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void export_sdpa(const std::string& path, const mbell::npa::MomentProblem& mp) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  mbell::sdp::write_sdpa(os, mbell::npa::to_sdp(mp));
}

const std::vector<std::string> kLevels{"1", "1+AB", "2", "1+AB+ABC"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell correlator toolkit: bounds, GHZ values, relaxations and key rates"};
  app.require_subcommand(1);
  app.allow_extras(false);
  std::string out_path;
  long long seed = 0;
  bool verbose = false;
  app.add_option("--seed", seed, "Reserved; every computation is deterministic");
  app.add_flag("-v,--verbose", verbose, "Print solver diagnostics to stderr");

  auto* bounds = app.add_subcommand("bounds", "Classical bounds of B(n) as JSON");
  int bounds_n = 3;
  std::string mode = "exhaustive";
  unsigned workers = 0;
  bounds->add_option("--n", bounds_n, "Number of parties")->required();
  bounds->add_option("--mode", mode, "exhaustive or reduced")->check(CLI::IsMember({"exhaustive", "reduced"}));
  bounds->add_option("--workers", workers, "Threads for the exhaustive scan (0 = all cores)");
  bounds->add_option("--out", out_path, "Output file (default stdout)");

  auto* table1 = app.add_subcommand("table1", "Optimal GHZ values and angles as CSV");
  int nmax = 7;
  table1->add_option("--nmax", nmax, "Largest party count")->required();
  table1->add_option("--out", out_path, "Output file (default stdout)");

  auto* ghz = app.add_subcommand("ghz-value", "Closed-form GHZ value of B(n) at a Bob angle");
  int ghz_n = 3;
  double theta = 0.0;
  bool dense = false;
  ghz->add_option("--n", ghz_n, "Number of parties")->required();
  ghz->add_option("--theta", theta, "Polar angle of the Bob observables")->required();
  ghz->add_flag("--dense", dense, "Evaluate the dense Bell operator instead of the closed form");
  ghz->add_option("--out", out_path, "Output file (default stdout)");

  auto* tsirelson = app.add_subcommand("tsirelson", "Relaxation upper bound on the quantum value of B(n)");
  int ts_n = 3;
  std::string ts_level;
  std::string ts_export;
  tsirelson->add_option("--n", ts_n, "Number of parties")->required();
  tsirelson->add_option("--level", ts_level, "1, 1+AB, 2 or 1+AB+ABC")->check(CLI::IsMember(kLevels));
  tsirelson->add_option("--export-sdpa", ts_export, "Also write the SDP in SDPA sparse format");
  tsirelson->add_option("--out", out_path, "Output file (default stdout)");

  auto* guessing = app.add_subcommand("guessing", "Bound on the probability of guessing A0");
  int gu_n = 3;
  double g_obs = 0.0;
  std::string gu_level;
  std::string gu_export;
  bool gu_parity = false;
  guessing->add_option("--n", gu_n, "Number of parties")->required();
  guessing->add_option("--g", g_obs, "Observed Bell value")->required();
  guessing->add_option("--level", gu_level, "1, 1+AB, 2 or 1+AB+ABC")->check(CLI::IsMember(kLevels));
  guessing->add_flag("--parity", gu_parity, "Constrain the Parity-CHSH value instead of B(n)");
  guessing->add_option("--export-sdpa", gu_export, "Also write the max <A0> SDP in SDPA sparse format");
  guessing->add_option("--out", out_path, "Output file (default stdout)");

  auto* keyrate = app.add_subcommand("keyrate", "Key-rate curve under depolarizing noise as CSV");
  int kr_n = 3;
  double pmax = 0.1;
  int steps = 11;
  std::string kr_level;
  bool bottleneck = false;
  bool parity = false;
  bool reoptimize = false;
  unsigned kr_workers = 1;
  keyrate->add_option("--n", kr_n, "Number of parties")->required();
  keyrate->add_option("--pmax", pmax, "Largest noise value")->check(CLI::Range(0.0, 0.2));
  keyrate->add_option("--steps", steps, "Grid points from 0 to pmax")->check(CLI::PositiveNumber);
  keyrate->add_option("--level", kr_level, "1, 1+AB, 2 or 1+AB+ABC")->check(CLI::IsMember(kLevels));
  keyrate->add_flag("--bottleneck", bottleneck, "Report where the bottleneck CHSH baseline overtakes");
  keyrate->add_flag("--parity", parity, "Add the Parity-CHSH rate column");
  keyrate->add_flag("--reoptimize-theta", reoptimize, "Re-maximize the Bell value at every noise value");
  keyrate->add_option("--workers", kr_workers, "Threads over grid points");
  keyrate->add_option("--out", out_path, "Output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }
  (void)seed;

  try {
    Output out(out_path);
    std::ostream& os = out.stream();
    namespace npa = mbell::npa;

    if (*bounds) {
      const mbell::BoundsReport r = mode == "exhaustive" ? mbell::classical_bounds_exhaustive(bounds_n, workers)
                                                         : mbell::classical_bounds_reduced(bounds_n);
      os << mbell::to_json(r, mode).dump(2) << '\n';
    } else if (*table1) {
      mbell::write_table1(os, nmax);
    } else if (*ghz) {
      double v = 0.0;
      if (dense) {
        v = mbell::expectation(mbell::ghz_state(ghz_n),
                               mbell::bell_operator(mbell::build_bell(ghz_n), mbell::honest_measurements(ghz_n, theta)));
      } else {
        v = mbell::ghz_bell_value_closed(ghz_n, theta);
      }
      os << mbell::format_number(v) << '\n';
    } else if (*tsirelson) {
      const npa::Level level = ts_level.empty() ? npa::default_level(ts_n) : npa::parse_level(ts_level);
      const mbell::BellPolynomial bell = mbell::build_bell(ts_n);
      if (!ts_export.empty()) export_sdpa(ts_export, npa::build_moment_problem(ts_n, level, bell));
      const npa::RelaxationResult r = npa::tsirelson_bound(bell, level);
      if (verbose) {
        std::cerr << "iterations " << r.solution.iterations << ", primal residual "
                  << mbell::format_number(r.solution.residuals.primal) << '\n';
      }
      os << "n,level,value,status,primal_residual,dual_residual,gap\n"
         << ts_n << ',' << npa::to_string(level) << ',' << mbell::format_number(r.value) << ','
         << mbell::sdp::to_string(r.solution.status) << ',' << mbell::format_number(r.solution.residuals.primal)
         << ',' << mbell::format_number(r.solution.residuals.dual) << ','
         << mbell::format_number(r.solution.residuals.gap) << '\n';
    } else if (*guessing) {
      const npa::Level level = gu_level.empty() ? npa::default_guessing_level(gu_n) : npa::parse_level(gu_level);
      const mbell::BellPolynomial bell = gu_parity ? mbell::parity_chsh(gu_n) : mbell::build_bell(gu_n);
      if (!gu_export.empty()) {
        mbell::BellPolynomial a0(gu_n);
        a0.add(mbell::Monomial({{1, 0}}), mbell::Rational(1));
        export_sdpa(gu_export, npa::build_moment_problem(gu_n, level, a0, std::pair{bell, g_obs}));
      }
      const double pg = npa::guessing_probability(bell, g_obs, level);
      os << "n,level,g_obs,p_guess\n"
         << gu_n << ',' << npa::to_string(level) << ',' << mbell::format_number(g_obs) << ','
         << mbell::format_number(pg) << '\n';
    } else if (*keyrate) {
      mbell::RateOptions options;
      if (!kr_level.empty()) options.level = npa::parse_level(kr_level);
      options.parity = parity;
      options.reoptimize_theta = reoptimize;
      const std::vector<mbell::RatePoint> curve =
          mbell::rate_curve(kr_n, mbell::noise_grid(pmax, steps), options, kr_workers);
      mbell::write_rate_csv(os, curve, parity);
      bool failed = false;
      for (const auto& pt : curve) {
        if (!pt.error.empty()) {
          failed = true;
          std::cerr << "p=" << mbell::format_number(pt.p) << ": " << pt.error << '\n';
        }
      }
      if (bottleneck) {
        std::optional<double> crossover;
        for (const auto& pt : curve) {
          if (pt.error.empty() && pt.rate < pt.chsh_bottleneck_rate) {
            crossover = pt.p;
            break;
          }
        }
        if (crossover) {
          std::cerr << "bottleneck baseline overtakes from p=" << mbell::format_number(*crossover) << '\n';
        } else {
          std::cerr << "conference rate stays at or above the bottleneck baseline on this grid\n";
        }
      }
      if (failed) return kModuleError;
    } else if (*verify) {
      if (!mbell::run_verify(os).ok()) return kModuleError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kModuleError;
  }
  return 0;
}
