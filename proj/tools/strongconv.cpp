#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "strongconv/ensembles.hpp"
#include "strongconv/experiments.hpp"
#include "strongconv/freeprob.hpp"
#include "strongconv/ncpoly.hpp"
#include "strongconv/orbit.hpp"
#include "strongconv/tuple_io.hpp"

using namespace strongconv;
using nlohmann::json;

namespace {

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

GeneratorSpec make_spec(const std::string& gen, int count) {
  return parse_generator_kind(gen) == GeneratorSpec::Kind::semicircular ? GeneratorSpec::semicircular(count)
                                                                        : GeneratorSpec::haar(count);
}

int cmd_run(const std::string& id, const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out, int threads) {
  json config = json::object();
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot open config " + config_path);
    config = json::parse(is);
  }
  if (seed) config["seed"] = *seed;
  const ScenarioSpec spec = spec_from_json(id, config);
  const RunRecord rec = run_scenario(spec, threads);
  emit(rec, out);
  std::cout << "scenario " << rec.scenario << " seed " << rec.seed << ": " << rec.tables.size() << " tables in "
            << out << " (" << shortest(rec.wall_clock_seconds) << " s)\n";
  for (const auto& n : rec.notes) std::cout << "note: " << n << '\n';
  return 0;
}

int cmd_moment(const std::string& text, const std::string& gen, int legs) {
  const Word w = parse_word(text);
  int count = legs;
  if (count == 0) {
    count = 1;
    for (const auto& l : w) count = std::max(count, l.index);
  }
  const Complex m = tensor_moment(to_oracle_word(w, count), make_spec(gen, count));
  std::cout << shortest(m.real());
  if (m.imag() != 0.0) std::cout << (m.imag() < 0 ? " - " : " + ") << shortest(std::abs(m.imag())) << "i";
  std::cout << '\n';
  return 0;
}

int cmd_norm(const std::string& text, const std::string& gen, int q_max, int legs) {
  const NcPoly p = parse_poly(text);
  const int count = legs > 0 ? legs : std::max(p.max_index(), 1);
  const LimitNormResult res = limit_norm(p, make_spec(gen, count), q_max);
  const json out{{"poly", to_string(p)},
                 {"gen", gen},
                 {"q_max", q_max},
                 {"moments", res.moments},
                 {"raw_lower_bounds", res.raw_lower_bounds},
                 {"max_raw_bound", res.max_raw_bound()},
                 {"extrapolated", res.extrapolated},
                 {"edge_exponent", res.edge_exponent},
                 {"fit_first_q", res.fit_first_q}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_dorb(const std::string& fa, const std::string& fb, bool exact, int restarts, std::uint64_t seed) {
  const MatTuple a = read_tuple(fa);
  const MatTuple b = read_tuple(fb);
  json out;
  if (exact) {
    if (a.size() != 1 || b.size() != 1) throw std::invalid_argument("--exact needs single-matrix tuples");
    out = json{{"value", dorb_exact_herm1(a[0], b[0])}, {"certification", "exact"}};
  } else {
    OrbitOptions opts;
    opts.restarts = restarts;
    opts.seed = SeedSpec{seed, {}};
    const OrbitResult res = dorb_upper(a, b, opts);
    out = json{{"value", res.value},
               {"certification", to_string(res.certified)},
               {"lower_bound", dorb_lower(a, b)},
               {"restarts_used", res.restarts_used},
               {"iterations", res.iterations}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_sample(const std::string& ensemble, int k, int r, std::uint64_t seed, const std::string& out) {
  write_tuple(out, sample_tuple(parse_ensemble(ensemble), r, k, SeedSpec{seed, {}}));
  std::cout << "wrote " << out << " and " << sidecar_path(out).string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-matrix strong convergence experiments and free probability oracles"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment scenario and write record.json plus CSV tables");
  std::string run_id, run_config, run_out;
  std::optional<std::uint64_t> run_seed;
  int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  run->add_option("scenario", run_id, "Scenario id")->required()->check(CLI::IsMember(scenario_ids()));
  run->add_option("--config", run_config, "JSON file with scenario parameters")->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "Master seed (overrides the config)");
  run->add_option("--out", run_out, "Output directory")->required();
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle", "Exact moments and limit norms of free families");
  oracle->require_subcommand(1);
  std::string gen = "semicircular";
  int legs = 0;

  auto* moment = oracle->add_subcommand("moment", "Moment of a word, e.g. \"T1 T2 T1 T2\"");
  std::string moment_word;
  moment->add_option("word", moment_word)->required();
  moment->add_option("--gen", gen, "semicircular or haar")->check(CLI::IsMember({"semicircular", "haar"}));
  moment->add_option("--legs", legs, "Generators per tensor leg (0: single leg)");

  auto* norm = oracle->add_subcommand("norm", "Limit norm of a polynomial from moments of (P*P)^q");
  std::string norm_poly;
  int q_max = 8;
  norm->add_option("poly", norm_poly)->required();
  norm->add_option("--gen", gen, "semicircular or haar")->check(CLI::IsMember({"semicircular", "haar"}));
  norm->add_option("--qmax", q_max, "Largest q")->check(CLI::PositiveNumber);
  norm->add_option("--legs", legs, "Generators per tensor leg (0: single leg)");

  auto* dorb = app.add_subcommand("dorb", "Unitary-orbit distance between two stored tuples");
  std::string file_a, file_b;
  bool exact = false;
  int restarts = 8;
  std::uint64_t dorb_seed = 0x0bb17;
  dorb->add_option("fileA", file_a)->required()->check(CLI::ExistingFile);
  dorb->add_option("fileB", file_b)->required()->check(CLI::ExistingFile);
  dorb->add_flag("--exact", exact, "Exact value for single Hermitian matrices");
  dorb->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  dorb->add_option("--seed", dorb_seed);

  auto* sample = app.add_subcommand("sample", "Write a random tuple to disk");
  std::string ensemble = "gue", sample_out;
  int k = 8, r = 1;
  std::uint64_t sample_seed = 0;
  sample->add_option("ensemble", ensemble)->check(CLI::IsMember({"gue", "haar"}));
  sample->add_option("--k", k)->check(CLI::PositiveNumber);
  sample->add_option("--r", r)->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_seed);
  sample->add_option("--out", sample_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_id, run_config, run_seed, run_out, threads);
    if (*moment) return cmd_moment(moment_word, gen, legs);
    if (*norm) return cmd_norm(norm_poly, gen, q_max, legs);
    if (*dorb) return cmd_dorb(file_a, file_b, exact, restarts, dorb_seed);
    if (*sample) return cmd_sample(ensemble, k, r, sample_seed, sample_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
