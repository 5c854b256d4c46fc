#include "strongconv/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "strongconv/concentration.hpp"
#include "strongconv/ensembles.hpp"
#include "strongconv/freeprob.hpp"
#include "strongconv/laws.hpp"
#include "strongconv/orbit.hpp"
#include "strongconv/parallel.hpp"
#include "strongconv/spectral.hpp"
#include "strongconv/tensorops.hpp"

namespace strongconv {

using nlohmann::json;

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids{"ht-strong",     "asym-free",     "tensor-probe",
                                            "collapse",      "entropy-probe", "concentration",
                                            "nonamen-gap",   "haar-variant",  "witness"};
  return ids;
}

int scenario_number(const std::string& id) {
  const auto& ids = scenario_ids();
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw std::invalid_argument("unknown scenario: " + id);
  return static_cast<int>(it - ids.begin()) + 1;
}

// ---------------------------------------------------------------------------
// Specs

void ScenarioSpec::validate() const {
  scenario_number(id);
  if (ks.empty()) throw std::invalid_argument("spec: k list is empty");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw std::invalid_argument("spec: k must be >= 1");
    if (i > 0 && ks[i] <= ks[i - 1]) throw std::invalid_argument("spec: k list must be strictly ascending");
  }
  if (r < 1) throw std::invalid_argument("spec: r must be >= 1");
  if (reps < 1) throw std::invalid_argument("spec: reps must be >= 1");
  if (degree_cap < 0) throw std::invalid_argument("spec: degree_cap must be >= 0");
  if (q_max < 1) throw std::invalid_argument("spec: q_max must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("spec: tolerance must be > 0");
  if (restarts < 1 || max_iters < 1) throw std::invalid_argument("spec: restarts and max_iters must be >= 1");
  if (!(microstate_epsilon >= 0.0)) throw std::invalid_argument("spec: microstate_epsilon must be >= 0");
  for (double e : epsilons)
    if (!(e >= 0.0)) throw std::invalid_argument("spec: epsilons must be >= 0");
  if (!weights.empty() && static_cast<int>(weights.size()) != r)
    throw std::invalid_argument("spec: weights must have r entries");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("spec: weights must be >= 0");
    total += w;
  }
  if (!weights.empty() && std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("spec: weights must sum to 1");
  parse_ensemble(ensemble);
  parse_statistic(statistic);
  for (const auto& p : polys) parse_poly(p);
  for (const auto& p : tensor_polys) {
    if (parse_poly(p).max_index() > 2 * r)
      throw std::invalid_argument("spec: tensor polynomial " + p + " uses more than 2r generators");
  }
  for (const auto& m : maps) {
    if (m.empty()) throw std::invalid_argument("spec: empty pushforward map");
    for (const auto& p : m) parse_poly(p);
  }
  for (const auto& [poly, ivs] : supports)
    for (const auto& [a, b] : ivs)
      if (!(a <= b)) throw std::invalid_argument("spec: support interval with a > b for " + poly);

  const bool needs_polys = id == "ht-strong" || id == "concentration" || id == "haar-variant";
  if (needs_polys && polys.empty()) throw std::invalid_argument("spec: " + id + " needs polys");
  if ((id == "tensor-probe" || id == "haar-variant") && tensor_polys.empty())
    throw std::invalid_argument("spec: " + id + " needs tensor_polys");
  if ((id == "collapse" || id == "entropy-probe" || id == "haar-variant") && maps.empty())
    throw std::invalid_argument("spec: " + id + " needs maps");
  if ((id == "entropy-probe" || id == "concentration") && epsilons.empty())
    throw std::invalid_argument("spec: " + id + " needs epsilons");
}

ScenarioSpec default_spec(const std::string& id) {
  ScenarioSpec s;
  s.id = id;
  switch (scenario_number(id)) {
    case 1:
      s.ks = {64, 128, 256, 512};
      s.polys = {"T1", "T1 + T2", "T1 T2 + T2 T1"};
      break;
    case 2:
      s.ks = {64};
      s.reps = 200;
      break;
    case 3:
      s.ks = {8, 16, 32};
      s.r = 1;
      s.reps = 4;
      s.tensor_polys = {"T1 + T2", "T1 T2"};
      break;
    case 4:
      s.ks = {16, 32, 64};
      s.reps = 10;
      s.maps = {{"T1"}, {"T1", "T2"}};
      break;
    case 5:
      s.ks = {8, 16, 32};
      s.r = 1;
      s.reps = 100;
      s.degree_cap = 2;
      s.maps = {{"T1"}};
      s.epsilons = {0.1, 0.2, 0.4};
      break;
    case 6:
      s.ks = {16, 32, 64, 128};
      s.r = 1;
      s.reps = 200;
      s.polys = {"T1 T1"};
      s.epsilons = {0.05, 0.1, 0.2};
      break;
    case 7:
      s.ks = {4, 8, 16, 32};
      s.reps = 3;
      break;
    case 8:
      s.ensemble = "haar";
      s.ks = {16, 32, 64};
      s.reps = 10;
      s.polys = {"T1 + T1'", "T1 + T1' + T2 + T2'"};
      s.tensor_polys = {"T1 + T1' + T3 + T3'"};
      s.maps = {{"T1"}, {"T1", "T2"}};
      break;
    case 9:
      s.ks = {32, 64, 128};
      s.reps = 3;
      break;
  }
  return s;
}

namespace {

template <typename T>
void read_field(const json& cfg, const char* key, T& out) {
  if (cfg.contains(key)) out = cfg.at(key).get<T>();
}

}  // namespace

ScenarioSpec spec_from_json(const std::string& id, const json& config) {
  if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known{
      "id",        "ks",         "r",        "reps",     "degree_cap", "tolerance",
      "q_max",     "polys",      "tensor_polys", "maps", "epsilons",   "ensemble",
      "statistic", "weights",    "supports", "restarts", "max_iters",  "microstate_epsilon",
      "seed"};
  for (const auto& [key, value] : config.items())
    if (!known.contains(key)) throw std::invalid_argument("config: unknown field '" + key + "'");
  if (config.contains("id") && config.at("id").get<std::string>() != id)
    throw std::invalid_argument("config: id '" + config.at("id").get<std::string>() + "' does not match " + id);

  ScenarioSpec s = default_spec(id);
  try {
    read_field(config, "ks", s.ks);
    read_field(config, "r", s.r);
    read_field(config, "reps", s.reps);
    read_field(config, "degree_cap", s.degree_cap);
    read_field(config, "tolerance", s.tolerance);
    read_field(config, "q_max", s.q_max);
    read_field(config, "polys", s.polys);
    read_field(config, "tensor_polys", s.tensor_polys);
    read_field(config, "maps", s.maps);
    read_field(config, "epsilons", s.epsilons);
    read_field(config, "ensemble", s.ensemble);
    read_field(config, "statistic", s.statistic);
    read_field(config, "weights", s.weights);
    read_field(config, "supports", s.supports);
    read_field(config, "restarts", s.restarts);
    read_field(config, "max_iters", s.max_iters);
    read_field(config, "microstate_epsilon", s.microstate_epsilon);
    read_field(config, "seed", s.seed);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const ScenarioSpec& s) {
  return json{{"id", s.id},
              {"ks", s.ks},
              {"r", s.r},
              {"reps", s.reps},
              {"degree_cap", s.degree_cap},
              {"tolerance", s.tolerance},
              {"q_max", s.q_max},
              {"polys", s.polys},
              {"tensor_polys", s.tensor_polys},
              {"maps", s.maps},
              {"epsilons", s.epsilons},
              {"ensemble", s.ensemble},
              {"statistic", s.statistic},
              {"weights", s.weights},
              {"supports", s.supports},
              {"restarts", s.restarts},
              {"max_iters", s.max_iters},
              {"microstate_epsilon", s.microstate_epsilon},
              {"seed", s.seed}};
}

// ---------------------------------------------------------------------------
// Scenario runners

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<NcPoly> parse_all(const std::vector<std::string>& texts) {
  std::vector<NcPoly> out;
  for (const auto& t : texts) out.push_back(parse_poly(t));
  return out;
}

int max_index(const std::vector<NcPoly>& ps) {
  int m = 0;
  for (const auto& p : ps) m = std::max(m, p.max_index());
  return m;
}

std::string join_names(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

GeneratorSpec oracle_spec(Ensemble kind, int r) {
  return kind == Ensemble::gue ? GeneratorSpec::semicircular(r) : GeneratorSpec::haar(r);
}

MatTuple pushforward(const std::vector<NcPoly>& f, const MatTuple& a) {
  std::vector<Matrix> out;
  out.reserve(f.size());
  for (const auto& p : f) out.push_back(evaluate(p, a));
  return MatTuple(std::move(out));
}

struct Ctx {
  const ScenarioSpec& spec;
  int threads;
  SeedSpec root;
  RunRecord& record;
  std::string prefix;
  Ensemble kind;

  Table& table(const std::string& name, std::vector<std::string> columns) {
    Table& t = record.tables[prefix + name];
    t.columns = std::move(columns);
    t.rows.clear();
    return t;
  }
  void note(const std::string& s) {
    record.notes.push_back(prefix.empty() ? s : prefix.substr(0, prefix.size() - 1) + ": " + s);
  }
};

struct LimitInfo {
  double extrapolated = kNaN;
  double lower = kNaN;
  int q_used = 0;
};

/// Largest q <= q_max inside the letter budget and the term bound
/// |P^*P|^q <= max_terms; the clamp is reported as a note.
LimitInfo limit_for(Ctx& ctx, const NcPoly& p, const std::string& name, const GeneratorSpec& gen) {
  const LimitNormOptions opts;
  LimitInfo info;
  const int deg = std::max(p.degree(), 1);
  const double gram_terms = std::max<double>(static_cast<double>((adjoint(p) * p).size()), 1.0);
  int q = ctx.spec.q_max;
  while (q > 0 && (deg * 2 * q > opts.max_letters ||
                   static_cast<double>(q) * std::log(gram_terms) > std::log(static_cast<double>(opts.max_terms))))
    --q;
  if (q < ctx.spec.q_max)
    ctx.note("limit norm of " + name + ": q_max " + std::to_string(ctx.spec.q_max) + " clamped to " +
             std::to_string(q) + " by the oracle budget");
  if (q < 1) return info;
  try {
    const LimitNormResult res = limit_norm(p, gen, q, opts);
    info.extrapolated = res.extrapolated;
    info.lower = res.max_raw_bound();
    info.q_used = q;
  } catch (const std::length_error& e) {
    ctx.note("limit norm of " + name + ": " + e.what());
  }
  return info;
}

/// Support of an affine polynomial in a single generator, when known.
std::optional<IntervalUnion> derived_support(const NcPoly& p, Ensemble kind) {
  double a = 0.0;
  int index = 0;
  double plain = 0.0, starred = 0.0;
  for (const auto& [w, c] : p.terms()) {
    if (std::abs(c.imag()) > 0.0) return std::nullopt;
    if (w.empty()) {
      a = c.real();
      continue;
    }
    if (w.size() != 1) return std::nullopt;
    if (index != 0 && w[0].index != index) return std::nullopt;
    index = w[0].index;
    (w[0].starred ? starred : plain) += c.real();
  }
  if (index == 0) return std::nullopt;
  double b = 0.0;
  if (kind == Ensemble::gue) {
    b = plain + starred;
  } else {
    if (plain != starred) return std::nullopt;
    b = plain;
  }
  return IntervalUnion{{{a - 2.0 * std::abs(b), a + 2.0 * std::abs(b)}}};
}

void run_ht_strong(Ctx& ctx) {
  const ScenarioSpec& s = ctx.spec;
  const auto polys = parse_all(s.polys);
  const int r = std::max(s.r, max_index(polys));
  const GeneratorSpec gen = oracle_spec(ctx.kind, r);

  std::vector<LimitInfo> limits;
  std::vector<Complex> oracle_moments;
  std::vector<std::optional<IntervalUnion>> supports;
  for (std::size_t j = 0; j < polys.size(); ++j) {
    limits.push_back(limit_for(ctx, polys[j], s.polys[j], gen));
    oracle_moments.push_back(poly_moment(polys[j], gen));
    if (const auto it = s.supports.find(s.polys[j]); it != s.supports.end())
      supports.push_back(IntervalUnion{it->second});
    else
      supports.push_back(derived_support(polys[j], ctx.kind));
  }

  struct Cell {
    double norm, hausdorff;
    Complex moment;
  };
  Table& t = ctx.table("ht_strong", {"k", "replica", "poly", "finite_norm", "limit_norm", "limit_lower", "q_used",
                                     "norm_gap", "moment_gap", "hausdorff"});
  Table& sum = ctx.table("ht_strong_summary",
                         {"k", "poly", "median_finite_norm", "median_norm_gap", "median_hausdorff"});
  for (int k : s.ks) {
    const SeedSpec at_k = ctx.root.child(static_cast<std::uint64_t>(k));
    const auto cells = parallel_map<std::vector<Cell>>(static_cast<std::size_t>(s.reps), ctx.threads, [&](std::size_t i) {
      const MatTuple x = sample_tuple(ctx.kind, r, k, at_k.child(i));
      std::vector<Cell> row;
      for (std::size_t j = 0; j < polys.size(); ++j) {
        const Matrix m = evaluate(polys[j], x);
        Cell c{0.0, kNaN, m.trace() / static_cast<double>(k)};
        if (hermitian_defect(m) <= 1e-10) {
          const Eigen::VectorXd ev = herm_eigenvalues(m);
          c.norm = ev.cwiseAbs().maxCoeff();
          if (supports[j]) {
            const double res = 1e-9 * (1.0 + c.norm);
            c.hausdorff = hausdorff(spectrum_set(std::vector<double>(ev.data(), ev.data() + ev.size()), res), *supports[j]);
          }
        } else {
          c.norm = op_norm(m);
        }
        row.push_back(c);
      }
      return row;
    });
    for (std::size_t j = 0; j < polys.size(); ++j) {
      std::vector<double> norms, gaps, hs;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i][j];
        const double gap = c.norm - limits[j].extrapolated;
        t.rows.push_back({k, static_cast<int>(i), s.polys[j], num(c.norm), num(limits[j].extrapolated),
                          num(limits[j].lower), limits[j].q_used, num(gap), num(std::abs(c.moment - oracle_moments[j])),
                          num(c.hausdorff)});
        norms.push_back(c.norm);
        gaps.push_back(gap);
        hs.push_back(c.hausdorff);
      }
      sum.rows.push_back({k, s.polys[j], num(median(norms)), num(median(gaps)), num(median(hs))});
    }
  }
}

void run_asym_free(Ctx& ctx) {
  const ScenarioSpec& s = ctx.spec;
  const GeneratorSpec gen = oracle_spec(ctx.kind, s.r);
  const std::vector<Word> words = star_words(s.r, s.degree_cap);
  const Law oracle = oracle_law(gen, s.degree_cap);

  Table& t = ctx.table("asym_free", {"k", "word", "mc_mean_re", "mc_mean_im", "oracle", "gap"});
  Table& sum = ctx.table("asym_free_summary", {"k", "max_gap", "worst_word"});
  for (int k : s.ks) {
    const SeedSpec at_k = ctx.root.child(static_cast<std::uint64_t>(k));
    const auto laws = parallel_map<std::vector<Complex>>(static_cast<std::size_t>(s.reps), ctx.threads, [&](std::size_t i) {
      const Law l = empirical_law(sample_tuple(ctx.kind, s.r, k, at_k.child(i)), s.degree_cap);
      std::vector<Complex> v;
      v.reserve(words.size());
      for (const auto& w : words) v.push_back(l(w));
      return v;
    });
    double worst = 0.0;
    std::string worst_word;
    for (std::size_t w = 0; w < words.size(); ++w) {
      Complex mean(0.0, 0.0);
      for (const auto& l : laws) mean += l[w];
      mean /= static_cast<double>(s.reps);
      const Complex o = oracle(words[w]);
      const double gap = std::abs(mean - o);
      const std::string name = to_string(words[w]);
      t.rows.push_back({k, name, mean.real(), mean.imag(), o.real(), gap});
      if (worst_word.empty() || gap > worst) {
        worst = gap;
        worst_word = name;
      }
    }
    sum.rows.push_back({k, worst, worst_word});
  }
}

void run_tensor_probe(Ctx& ctx) {
  const ScenarioSpec& s = ctx.spec;
  const auto polys = parse_all(s.tensor_polys);
  const GeneratorSpec gen = oracle_spec(ctx.kind, s.r);
  std::vector<LimitInfo> limits;
  for (std::size_t j = 0; j < polys.size(); ++j) limits.push_back(limit_for(ctx, polys[j], s.tensor_polys[j], gen));

  Table& t = ctx.table("tensor_probe", {"k", "replica", "poly", "tensor_norm", "converged", "iterations",
                                         "limit_norm", "limit_lower", "q_used", "norm_gap"});
  Table& sum = ctx.table("tensor_probe_summary", {"k", "poly", "median_tensor_norm", "median_norm_gap"});
  for (int k : s.ks) {
    const SeedSpec at_k = ctx.root.child(static_cast<std::uint64_t>(k));
    const auto est = parallel_map<std::vector<NormEstimate>>(static_cast<std::size_t>(s.reps), ctx.threads, [&](std::size_t i) {
      const MatTuple x = sample_tuple(ctx.kind, s.r, k, at_k.child(i).child(0));
      const MatTuple y = sample_tuple(ctx.kind, s.r, k, at_k.child(i).child(1));
      std::vector<NormEstimate> out;
      for (const auto& p : polys)
        out.push_back(tensor_norm(eval_tensor_poly(p, x, y), s.tolerance, s.max_iters, at_k.child(i).child(2)));
      return out;
    });
    for (std::size_t j = 0; j < polys.size(); ++j) {
      std::vector<double> norms, gaps;
      for (std::size_t i = 0; i < est.size(); ++i) {
        const NormEstimate& e = est[i][j];
        const double gap = e.value - limits[j].extrapolated;
        t.rows.push_back({k, static_cast<int>(i), s.tensor_polys[j], e.value, e.converged, e.iterations,
                          num(limits[j].extrapolated), num(limits[j].lower), limits[j].q_used, num(gap)});
        norms.push_back(e.value);
        gaps.push_back(gap);
      }
      sum.rows.push_back({k, s.tensor_polys[j], num(median(norms)), num(median(gaps))});
    }
  }
}

void run_collapse(Ctx& ctx) {
  const ScenarioSpec& s = ctx.spec;
  std::vector<std::vector<NcPoly>> maps;
  int r = s.r;
  for (const auto& m : s.maps) {
    maps.push_back(parse_all(m));
    r = std::max(r, max_index(maps.back()));
  }

  struct Cell {
    OrbitResult upper;
    double lower, exact;
  };
  Table& t = ctx.table("collapse", {"k", "replica", "map", "dorb_upper", "dorb_lower", "dorb_exact", "certification",
                                    "restarts_used", "iterations"});
  Table& sum = ctx.table("collapse_summary", {"k", "map", "median_upper", "median_lower", "median_exact"});
  for (int k : s.ks) {
    const SeedSpec at_k = ctx.root.child(static_cast<std::uint64_t>(k));
    const auto cells = parallel_map<std::vector<Cell>>(static_cast<std::size_t>(s.reps), ctx.threads, [&](std::size_t i) {
      const MatTuple a = sample_tuple(ctx.kind, r, k, at_k.child(i).child(0));
      const MatTuple b = sample_tuple(ctx.kind, r, k, at_k.child(i).child(1));
      std::vector<Cell> out;
      for (std::size_t m = 0; m < maps.size(); ++m) {
        const MatTuple fa = pushforward(maps[m], a);
        const MatTuple fb = pushforward(maps[m], b);
        OrbitOptions opts;
        opts.restarts = s.restarts;
        opts.max_iters = s.max_iters;
        opts.seed = at_k.child(i).child(2 + m);
        Cell c{dorb_upper(fa, fb, opts), dorb_lower(fa, fb), kNaN};
        if (fa.size() == 1 && fa.is_hermitian(0) && fb.is_hermitian(0)) c.exact = dorb_exact_herm1(fa[0], fb[0]);
        c.upper.minimizer = Matrix();
        out.push_back(std::move(c));
      }
      return out;
    });
    for (std::size_t m = 0; m < maps.size(); ++m) {
      const std::string name = join_names(s.maps[m]);
      std::vector<double> up, lo, ex;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i][m];
        t.rows.push_back({k, static_cast<int>(i), name, c.upper.value, c.lower, num(c.exact),
                          to_string(c.upper.certified), c.upper.restarts_used, c.upper.iterations});
        up.push_back(c.upper.value);
        lo.push_back(c.lower);
        ex.push_back(c.exact);
      }
      sum.rows.push_back({k, name, num(median(up)), num(median(lo)), num(median(ex))});
    }
  }
}

void run_entropy_probe(Ctx& ctx) {
  const ScenarioSpec& s = ctx.spec;
  const auto f = parse_all(s.maps.front());
  const int r = std::max(s.r, max_index(f));
  const double radius = ctx.kind == Ensemble::gue ? kGueRadius : 1.0;
  std::optional<NeighborhoodSpec> nbhd;
  if (s.microstate_epsilon > 0.0)
    nbhd = NeighborhoodSpec{oracle_law(oracle_spec(ctx.kind, r), s.degree_cap, std::vector<double>(static_cast<std::size_t>(r), radius)),
                            s.microstate_epsilon};

  Table& t = ctx.table("entropy_probe", {"k", "epsilon", "samples_drawn", "accepted", "cover_size", "h_estimate", "distance"});
  for (int k : s.ks) {
    const SeedSpec at_k = ctx.root.child(static_cast<std::uint64_t>(k));
    const auto drawn = parallel_map<std::optional<MatTuple>>(static_cast<std::size_t>(s.reps), ctx.threads, [&](std::size_t i) {
      const MatTuple a = sample_tuple(ctx.kind, r, k, at_k.child(i));
      if (nbhd && !is_microstate(a, *nbhd)) return std::optional<MatTuple>();
      return std::optional<MatTuple>(pushforward(f, a));
    });
    std::vector<MatTuple> samples;
    for (const auto& d : drawn)
      if (d) samples.push_back(*d);
    bool herm1 = !samples.empty() && samples.front().size() == 1;
    for (const auto& x : samples) herm1 = herm1 && x.is_hermitian(0);
    const CoverDistance dist = herm1 ? CoverDistance::exact_herm1 : CoverDistance::dorb_upper;
    OrbitOptions opts;
    opts.restarts = s.restarts;
    opts.max_iters = s.max_iters;
    opts.seed = at_k.child(static_cast<std::uint64_t>(s.reps));
    const auto probes = parallel_map<EntropyProbe>(s.epsilons.size(), ctx.threads, [&](std::size_t e) {
      if (samples.empty()) return EntropyProbe{s.epsilons[e], 0, 0, kNaN};
      return covering_number(samples, s.epsilons[e], dist, opts);
    });
    for (const auto& p : probes)
      t.rows.push_back({k, p.epsilon, s.reps, static_cast<int>(samples.size()), p.cover_size, num(p.h_estimate),
                        herm1 ? "exact_herm1" : "dorb_upper"});
  }
}

void run_concentration(Ctx& ctx) {
  const ScenarioSpec& s = ctx.spec;
  DeviationOptions opts;
  opts.kind = ctx.kind;
  opts.statistic = parse_statistic(s.statistic);
  opts.ks = s.ks;
  opts.epsilons = s.epsilons;
  opts.reps = s.reps;
  opts.seed = ctx.root;
  opts.threads = ctx.threads;
  const DeviationProfile prof = deviation_profile(parse_poly(s.polys.front()), opts);

  Table& t = ctx.table("deviation", {"k", "epsilon", "tail_prob", "neg_log_tail_over_k2", "censored_flag"});
  for (const auto& row : prof.rows)
    t.rows.push_back({row.k, row.epsilon, row.tail_prob, row.neg_log_tail_over_k2, row.censored ? 1 : 0});
  Table& med = ctx.table("deviation_medians", {"k", "median"});
  for (std::size_t i = 0; i < s.ks.size(); ++i) med.rows.push_back({s.ks[i], prof.medians[i]});
  Table& trend = ctx.table("deviation_trend", {"epsilon", "nondecreasing"});
  for (std::size_t e = 0; e < s.epsilons.size(); ++e)
    trend.rows.push_back({s.epsilons[e], prof.nondecreasing[e] ? 1 : 0});
}

void run_nonamen_gap(Ctx& ctx) {
  const ScenarioSpec& s = ctx.spec;
  const std::vector<double> weights = s.weights.empty() ? std::vector<double>(static_cast<std::size_t>(s.r), 1.0 / s.r) : s.weights;
  Table& t = ctx.table("nonamen_gap", {"k", "replica", "lambda_min", "lambda_gap", "kernel_dim", "converged"});
  for (int k : s.ks) {
    const SeedSpec at_k = ctx.root.child(static_cast<std::uint64_t>(k));
    const auto gaps = parallel_map<LaplacianGap>(static_cast<std::size_t>(s.reps), ctx.threads, [&](std::size_t i) {
      LaplacianOptions opts;
      opts.tol = s.tolerance;
      opts.max_iter = s.max_iters;
      opts.seed = at_k.child(i).child(1);
      return nonamen_laplacian(sample_tuple(ctx.kind, s.r, k, at_k.child(i).child(0)), weights, opts);
    });
    for (std::size_t i = 0; i < gaps.size(); ++i)
      t.rows.push_back({k, static_cast<int>(i), gaps[i].lambda_min, gaps[i].lambda_gap, gaps[i].kernel_dim,
                        gaps[i].converged});
  }
}

void run_witness(Ctx& ctx) {
  const ScenarioSpec& s = ctx.spec;
  struct Cell {
    NormEstimate indep, self;
  };
  Table& t = ctx.table("witness", {"k", "replica", "witness_indep", "witness_self", "converged_indep", "converged_self"});
  Table& sum = ctx.table("witness_summary", {"k", "median_indep"});
  for (int k : s.ks) {
    const SeedSpec at_k = ctx.root.child(static_cast<std::uint64_t>(k));
    const auto cells = parallel_map<Cell>(static_cast<std::size_t>(s.reps), ctx.threads, [&](std::size_t i) {
      const MatTuple u = sample_tuple(Ensemble::haar, s.r, k, at_k.child(i).child(0));
      const MatTuple v = sample_tuple(Ensemble::haar, s.r, k, at_k.child(i).child(1));
      return Cell{haagerup_witness(u, v, s.tolerance, s.max_iters), haagerup_witness(u, u, s.tolerance, s.max_iters)};
    });
    std::vector<double> vals;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      t.rows.push_back({k, static_cast<int>(i), cells[i].indep.value, cells[i].self.value, cells[i].indep.converged,
                        cells[i].self.converged});
      vals.push_back(cells[i].indep.value);
    }
    sum.rows.push_back({k, median(vals)});
  }

  // Limit of (1/r) sum u_j (x) conj(v_j): the elements u_j (x) conj(v_j) form a
  // free Haar family, whose sum has norm 2 sqrt(r - 1) for r >= 2.
  NcPoly p;
  for (int j = 1; j <= s.r; ++j)
    p += NcPoly::monomial({{j, false}, {s.r + j, false}}, Complex(1.0 / s.r, 0.0));
  const LimitInfo lim = limit_for(ctx, p, "witness polynomial", GeneratorSpec::haar(s.r));
  const double analytic = s.r == 1 ? 1.0 : 2.0 * std::sqrt(s.r - 1.0) / s.r;
  Table& o = ctx.table("witness_oracle", {"r", "analytic", "extrapolated", "raw_lower", "q_used"});
  o.rows.push_back({s.r, analytic, num(lim.extrapolated), num(lim.lower), lim.q_used});
}

}  // namespace

RunRecord run_scenario(const ScenarioSpec& spec, int threads) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const int number = scenario_number(spec.id);
  RunRecord rec;
  rec.scenario = spec.id;
  rec.params = spec;
  rec.threads = threads;
  const SeedSpec root = SeedSpec{spec.seed, {}}.child(static_cast<std::uint64_t>(number));
  rec.seed = root.to_string();

  Ctx ctx{spec, threads, root, rec, "", parse_ensemble(spec.ensemble)};
  switch (number) {
    case 1: run_ht_strong(ctx); break;
    case 2: run_asym_free(ctx); break;
    case 3: run_tensor_probe(ctx); break;
    case 4: run_collapse(ctx); break;
    case 5: run_entropy_probe(ctx); break;
    case 6: run_concentration(ctx); break;
    case 7: run_nonamen_gap(ctx); break;
    case 8: {
      const std::pair<const char*, void (*)(Ctx&)> parts[] = {
          {"ht-strong", run_ht_strong}, {"asym-free", run_asym_free},
          {"tensor-probe", run_tensor_probe}, {"collapse", run_collapse}};
      for (std::size_t i = 0; i < 4; ++i) {
        Ctx sub{spec, threads, root.child(i + 1), rec, "haar_", parse_ensemble(spec.ensemble)};
        parts[i].second(sub);
      }
      break;
    }
    case 9: run_witness(ctx); break;
  }
  rec.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

// ---------------------------------------------------------------------------
// Persistence

json to_json(const RunRecord& rec) {
  json tables = json::object();
  for (const auto& [name, t] : rec.tables) tables[name] = json{{"columns", t.columns}, {"rows", t.rows}};
  return json{{"scenario", rec.scenario},
              {"params", to_json(rec.params)},
              {"seed", rec.seed},
              {"tables", tables},
              {"notes", rec.notes},
              {"wall_clock_seconds", rec.wall_clock_seconds},
              {"threads", rec.threads},
              {"version", rec.version}};
}

RunRecord record_from_json(const json& j) {
  RunRecord rec;
  rec.scenario = j.at("scenario").get<std::string>();
  rec.params = spec_from_json(rec.scenario, j.at("params"));
  rec.seed = j.at("seed").get<std::string>();
  for (const auto& [name, t] : j.at("tables").items()) {
    Table table;
    table.columns = t.at("columns").get<std::vector<std::string>>();
    for (const auto& row : t.at("rows")) table.rows.push_back(row.get<std::vector<json>>());
    rec.tables[name] = std::move(table);
  }
  rec.notes = j.at("notes").get<std::vector<std::string>>();
  rec.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  rec.threads = j.at("threads").get<int>();
  rec.version = j.at("version").get<std::string>();
  return rec;
}

namespace {

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, res.ptr);
  }
  const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << csv_cell(table.columns[i]);
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

void emit(const RunRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("emit: cannot open " + path.string());
    os << text;
    if (!os) throw std::runtime_error("emit: write failed for " + path.string());
  };
  write(dir / "record.json", to_json(record).dump(2) + "\n");
  for (const auto& [name, t] : record.tables) write(dir / (name + ".csv"), to_csv(t));
}

}  // namespace strongconv
