// epr_cli: analysis, construction and measurement of EPR states from the command line.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epr/epr.hpp"
#include "epr/io.hpp"

namespace {

using namespace epr;
using nlohmann::json;

struct RunConfig {
  std::string state;
  std::vector<std::string> obs;
  std::string group = "2";
  std::vector<long> ns{101, 401, 1601};
  std::string f = "gauss";
  std::string g = "gauss";
  std::vector<double> lambdas;
  std::vector<std::size_t> mults;
  std::size_t dim1 = 0;
  std::size_t dim2 = 0;
  std::size_t spin = 2;
  std::vector<double> rho;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  Tolerances tol;
};

PureState named_state(const std::string& name) {
  if (name == "bohm2") {
    const double s = 1.0 / std::sqrt(2.0);
    return PureState(ComplexMatrix{{0.0, s}, {-s, 0.0}});
  }
  if (name.rfind("maximal-d", 0) == 0) {
    const auto d = std::stoul(name.substr(9));
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "--state: maximal-d<k> needs k >= 1");
    return PureState((1.0 / std::sqrt(static_cast<double>(d))) * ComplexMatrix::identity(d));
  }
  if (name.rfind("epr-group-", 0) == 0) return bohm_state(FiniteAbelianGroup::parse(name.substr(10)));
  return io::load_state(name);
}

Observable named_observable(const std::string& name, const Tolerances& tol) {
  if (name == "pauli-x") return Observable(ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}, tol);
  if (name == "pauli-y") return Observable(ComplexMatrix{{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}}, tol);
  if (name == "pauli-z") return Observable(ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}, tol);
  return io::load_observable(name, tol);
}

PureState load_state_arg(const RunConfig& cfg) {
  if (cfg.state.empty()) throw Error(ErrorCode::InvalidArgument, "--state is required");
  try {
    return named_state(cfg.state);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::InvalidArgument, "--state: cannot parse '" + cfg.state + "'");
  }
}

std::vector<Observable> load_observables(const RunConfig& cfg) {
  std::vector<Observable> out;
  for (const auto& o : cfg.obs) out.push_back(named_observable(o, cfg.tol));
  return out;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw Error(ErrorCode::InvalidArgument, "--out: cannot write '" + cfg.out + "'");
  f << text;
}

void emit(const RunConfig& cfg, const json& j) { emit(cfg, j.dump(2) + "\n"); }

int run_analyze(const RunConfig& cfg) {
  const auto sigma = load_state_arg(cfg);
  const auto dec = schmidt_decompose(sigma, cfg.tol);
  const auto id = state_norm_identity(sigma);
  json j = io::to_json(dec);
  j["norm_squared"] = id.lhs;
  j["trace_gram"] = id.rhs;
  emit(cfg, j);
  return 0;
}

int run_check_epr(const RunConfig& cfg) {
  const auto sigma = load_state_arg(cfg);
  const auto obs = load_observables(cfg);
  if (obs.empty()) throw Error(ErrorCode::InvalidArgument, "--obs: at least one observable is required");
  emit(cfg, io::to_json(is_epr(sigma, obs, cfg.tol, cfg.obs)));
  return 0;
}

int run_construct(const RunConfig& cfg) {
  if (cfg.lambdas.empty() || cfg.lambdas.size() != cfg.mults.size())
    throw Error(ErrorCode::InvalidArgument, "--lambdas and --mults must have the same nonzero length");
  std::size_t rank = 0;
  for (auto d : cfg.mults) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "--mults: multiplicities must be positive");
    rank += d;
  }
  const std::size_t d2 = cfg.dim2 ? cfg.dim2 : rank;
  const std::size_t d1 = cfg.dim1 ? cfg.dim1 : d2;
  if (d2 < rank) throw Error(ErrorCode::InvalidArgument, "--dim2 is smaller than the sum of multiplicities");
  if (d1 < d2) throw Error(ErrorCode::InvalidArgument, "--dim1 must be >= --dim2 for a full antiunitary imbedding");

  RandomSource rng(cfg.seed);
  const auto basis = rng.unitary(d2);
  std::vector<ComplexMatrix> blocks;
  std::size_t first = 0;
  for (auto d : cfg.mults) {
    blocks.push_back(basis.columns(first, d));
    first += d;
  }
  const auto w = rng.isometry(d1, d2);
  const auto sigma = construct_epr_state(cfg.lambdas, blocks, AntiunitaryImbedding::full(w));
  emit(cfg, io::to_json(sigma));
  return 0;
}

int run_predict(const RunConfig& cfg) {
  const auto sigma = load_state_arg(cfg);
  const auto obs = load_observables(cfg);
  if (obs.size() != 1) throw Error(ErrorCode::InvalidArgument, "--obs: predict takes exactly one observable B2");
  emit(cfg, io::to_json(predictive_map(sigma, obs.front(), cfg.tol)));
  return 0;
}

int run_measure(const RunConfig& cfg) {
  const auto sigma = load_state_arg(cfg);
  const auto obs = load_observables(cfg);
  if (obs.empty() || obs.size() > 2)
    throw Error(ErrorCode::InvalidArgument, "--obs: measure takes B2, or A1 followed by B2");
  const auto joint = obs.size() == 2 ? joint_distribution(sigma, obs[0], obs[1])
                                     : joint_distribution(sigma, predictive_map(sigma, obs[0], cfg.tol), obs[0]);
  emit(cfg, cfg.format == "csv" ? io::to_csv(joint) : io::to_json(joint).dump(2) + "\n");
  return 0;
}

int run_bohm(const RunConfig& cfg) {
  const auto g = FiniteAbelianGroup::parse(cfg.group);
  const auto table = epr_symmetry_table(g, cfg.tol);
  if (cfg.format == "csv") {
    std::ostringstream out;
    out << "pair,a,b,p\n";
    for (const auto& pt : table.position.support)
      out << "position," << io::format_double(pt.a) << ',' << io::format_double(pt.b) << ',' << io::format_double(pt.p) << '\n';
    for (const auto& pt : table.momentum.support)
      out << "momentum," << io::format_double(pt.a) << ',' << io::format_double(pt.b) << ',' << io::format_double(pt.p) << '\n';
    emit(cfg, out.str());
    return 0;
  }
  const auto star = verify_star_identity(g);
  json j = io::to_json(star.delta_form);
  j["group"] = g.spec();
  j["star_residual"] = star.residual;
  j["position_off_graph"] = table.position_off_graph;
  j["momentum_off_graph"] = table.momentum_off_graph;
  emit(cfg, j);
  return 0;
}

int run_spin_example(const RunConfig& cfg) {
  const auto g = FiniteAbelianGroup::parse(cfg.group);
  std::vector<double> diag = cfg.rho;
  if (diag.empty()) diag.assign(cfg.spin, 1.0 / static_cast<double>(cfg.spin));
  if (diag.size() != cfg.spin) throw Error(ErrorCode::InvalidArgument, "--rho must list --spin diagonal entries");
  const auto sigma = spin_system_state(g, cfg.spin, ComplexMatrix::diagonal(diag), cfg.tol);
  const auto obs = spin_observables(g, cfg.spin, cfg.tol);
  const std::vector<std::string> ids{"X(x)1", "P(x)1"};
  json j = io::to_json(is_epr(sigma, obs, cfg.tol, ids));
  j["state"] = io::to_json(sigma);
  j["commutant_dim"] = commutant_dimension(obs, cfg.tol);
  emit(cfg, j);
  return 0;
}

int run_limit(const RunConfig& cfg) {
  const auto rows = convergence_sweep(cfg.ns, test_functions::by_name(cfg.f), test_functions::by_name(cfg.g));
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"N", r.n}, {"epsilon", r.epsilon}, {"pairing", r.pairing}, {"target", r.target}, {"abs_error", r.abs_error}});
    emit(cfg, arr);
    return 0;
  }
  emit(cfg, io::to_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EPR state analysis for finite-dimensional bipartite systems"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output path (default: stdout)");
    sub->add_option("--tol-commutator", cfg.tol.commutator_tol, "Relative commutator tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol-cluster", cfg.tol.eigen_cluster, "Eigenvalue clustering tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol-zero", cfg.tol.zero_threshold, "Zero threshold")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", cfg.seed, "Seed for randomized constructions");
  };
  auto add_state = [&](CLI::App* sub) {
    sub->add_option("--state", cfg.state, "State JSON file or bohm2 | maximal-d<k> | epr-group-<spec>")->required();
  };
  auto add_obs = [&](CLI::App* sub) {
    sub->add_option("--obs", cfg.obs, "Observable JSON file or pauli-x | pauli-y | pauli-z (repeatable)")->required();
  };
  auto* analyze = app.add_subcommand("analyze", "Schmidt spectrum, multiplicities and imbedding of a state");
  add_state(analyze);
  add_common(analyze);

  auto* check = app.add_subcommand("check-epr", "Commutation test of L^dagger L against observables on H2");
  add_state(check);
  add_obs(check);
  add_common(check);

  auto* construct = app.add_subcommand("construct", "Build an EPR state from weights, block sizes and a random imbedding");
  construct->add_option("--lambdas", cfg.lambdas, "Weights lambda_j")->delimiter(',')->required();
  construct->add_option("--mults", cfg.mults, "Block dimensions d_j")->delimiter(',')->required();
  construct->add_option("--dim1", cfg.dim1, "Dimension of H1 (default: dim2)");
  construct->add_option("--dim2", cfg.dim2, "Dimension of H2 (default: sum of d_j)");
  add_common(construct);

  auto* predict = app.add_subcommand("predict", "Predictive observable B1 = U B2 U^dagger");
  add_state(predict);
  add_obs(predict);
  add_common(predict);

  auto* measure = app.add_subcommand("measure", "Joint distribution of A1 (x) 1 and 1 (x) B2");
  add_state(measure);
  add_obs(measure);
  add_common(measure);
  measure->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* bohm = app.add_subcommand("bohm", "EPR state of a finite abelian group and its correlation tables");
  bohm->add_option("--group", cfg.group, "Group spec n1xn2x...")->required();
  bohm->add_option("--format", cfg.format, "json: state; csv: correlation tables")->check(CLI::IsMember({"json", "csv"}));
  add_common(bohm);

  auto* spin = app.add_subcommand("spin-example", "EPR states of a spin-N particle on a finite abelian group");
  spin->add_option("--group", cfg.group, "Group spec n1xn2x...");
  spin->add_option("--spin", cfg.spin, "Spin dimension N")->check(CLI::PositiveNumber);
  spin->add_option("--rho", cfg.rho, "Diagonal of rho (unit trace)")->delimiter(',');
  add_common(spin);

  auto* limit = app.add_subcommand("limit", "Convergence sweep of the renormalized Z_N pairing");
  limit->add_option("--ns", cfg.ns, "Odd grid sizes, increasing")->delimiter(',');
  limit->add_option("--f", cfg.f, "Test function name");
  limit->add_option("--g", cfg.g, "Test function name");
  add_common(limit);
  limit->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cfg.format = "json";

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (limit->parsed() && limit->count("--format") == 0) cfg.format = "csv";

  try {
    cfg.tol.validate();
    if (analyze->parsed()) return run_analyze(cfg);
    if (check->parsed()) return run_check_epr(cfg);
    if (construct->parsed()) return run_construct(cfg);
    if (predict->parsed()) return run_predict(cfg);
    if (measure->parsed()) return run_measure(cfg);
    if (bohm->parsed()) return run_bohm(cfg);
    if (spin->parsed()) return run_spin_example(cfg);
    if (limit->parsed()) return run_limit(cfg);
  } catch (const Error& e) {
    std::cerr << "epr_cli " << app.get_subcommands().front()->get_name() << ": " << e.what() << '\n';
    return is_numerical_failure(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "epr_cli: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
