#include "strongconv/laws.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "strongconv/spectral.hpp"
#include "strongconv/tensorops.hpp"

namespace strongconv {

std::vector<Word> star_words(int r, int degree_cap) {
  if (r < 1) throw std::invalid_argument("star_words: r must be >= 1");
  if (degree_cap < 0) throw std::invalid_argument("star_words: negative degree cap");
  std::vector<Word> out{Word{}};
  std::size_t level_begin = 0;
  for (int d = 1; d <= degree_cap; ++d) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int g = 1; g <= r; ++g)
        for (bool star : {false, true}) {
          Word w = out[i];
          w.push_back({g, star});
          out.push_back(std::move(w));
        }
    }
    level_begin = level_end;
  }
  return out;
}

Law::Law(int generators, int degree_cap, std::vector<double> radii, MomentMap moments)
    : generators_(generators), degree_cap_(degree_cap), radii_(std::move(radii)), moments_(std::move(moments)) {
  if (generators_ < 1) throw std::invalid_argument("Law: generator count must be >= 1");
  if (degree_cap_ < 1) throw std::invalid_argument("Law: degree cap must be >= 1");
  if (radii_.empty()) radii_.assign(static_cast<std::size_t>(generators_), MatTuple::kUnbounded);
  if (static_cast<int>(radii_.size()) != generators_)
    throw std::invalid_argument("Law: radii length differs from generator count");
  for (const auto& w : star_words(generators_, degree_cap_))
    if (!moments_.count(w)) throw std::invalid_argument("Law: missing moment for " + to_string(w));
  if (moments_.size() != star_words(generators_, degree_cap_).size())
    throw std::invalid_argument("Law: moments outside the generator/degree signature");
  if (std::abs(moments_.at(Word{}) - Complex(1.0, 0.0)) > 1e-12)
    throw std::invalid_argument("Law: l(1) must equal 1");
  for (const auto& [w, m] : moments_) {
    const Complex ms = moments_.at(adjoint(w));
    if (std::abs(ms - std::conj(m)) > 1e-9 * (1.0 + std::abs(m)))
      throw std::invalid_argument("Law: moments not Hermitian-symmetric at " + to_string(w));
    double bound = 1.0;
    for (const auto& l : w) bound *= radii_[static_cast<std::size_t>(l.index - 1)];
    if (std::isfinite(bound) && std::abs(m) > bound + 1e-9)
      throw std::invalid_argument("Law: moment of " + to_string(w) + " exceeds the radius bound");
  }
}

Complex Law::operator()(const Word& w) const {
  auto it = moments_.find(w);
  if (it == moments_.end()) throw std::out_of_range("Law: no moment stored for " + to_string(w));
  return it->second;
}

Law empirical_law(const MatTuple& a, int degree_cap) {
  if (degree_cap < 1) throw std::invalid_argument("empirical_law: degree cap must be >= 1");
  const int r = static_cast<int>(a.size());
  const Eigen::Index k = a.dim();
  const double kd = static_cast<double>(k);
  // Every word w = u v with |u| = ceil(|w| / 2); tr(u(A) v(A)) only needs the
  // products of the short words.
  const int half = (degree_cap + 1) / 2;
  const std::vector<Word> short_words = star_words(r, half);
  std::map<Word, Matrix, WordLess> products;
  products.emplace(Word{}, Matrix::Identity(k, k));
  for (const auto& w : short_words) {
    if (w.empty()) continue;
    Word prefix(w.begin(), w.end() - 1);
    const Letter l = w.back();
    const Matrix& m = a[static_cast<std::size_t>(l.index - 1)];
    products.emplace(w, l.starred ? Matrix(products.at(prefix) * m.adjoint()) : Matrix(products.at(prefix) * m));
  }
  Law::MomentMap moments;
  for (const auto& w : star_words(r, degree_cap)) {
    const std::size_t cut = (w.size() + 1) / 2;
    const Matrix& u = products.at(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(cut)));
    const Matrix& v = products.at(Word(w.begin() + static_cast<std::ptrdiff_t>(cut), w.end()));
    moments.emplace(w, u.cwiseProduct(v.transpose()).sum() / kd);
  }
  moments[Word{}] = Complex(1.0, 0.0);
  return Law(r, degree_cap, a.radii(), std::move(moments));
}

Law oracle_law(const GeneratorSpec& spec, int degree_cap, std::vector<double> radii) {
  spec.validate();
  Law::MomentMap moments;
  for (const auto& w : star_words(spec.count, degree_cap)) {
    OracleWord ow;
    for (const auto& l : w) ow.push_back({Leg::none, l.index, l.starred});
    moments.emplace(w, single_leg_moment(ow, spec));
  }
  return Law(spec.count, degree_cap, std::move(radii), std::move(moments));
}

Law oracle_law(const GeneratorSpec& spec, int degree_cap) {
  const double r = spec.kind == GeneratorSpec::Kind::semicircular
                       ? std::abs(spec.mean) + 2.0 * std::sqrt(spec.variance)
                       : 1.0;
  return oracle_law(spec, degree_cap, std::vector<double>(static_cast<std::size_t>(spec.count), r));
}

double law_distance(const Law& a, const Law& b, int degree_cap) {
  if (a.generators() != b.generators())
    throw std::invalid_argument("law_distance: laws have different generator counts");
  if (degree_cap > a.degree_cap() || degree_cap > b.degree_cap())
    throw std::invalid_argument("law_distance: degree cap exceeds a law's truncation");
  double d = 0.0;
  for (const auto& w : star_words(a.generators(), degree_cap)) d = std::max(d, std::abs(a(w) - b(w)));
  return d;
}

bool is_microstate(const MatTuple& a, const NeighborhoodSpec& nbhd) {
  if (!(nbhd.epsilon > 0.0)) throw std::invalid_argument("is_microstate: epsilon must be > 0");
  const Law& c = nbhd.center;
  for (double r : c.radii())
    if (!std::isfinite(r)) throw std::invalid_argument("is_microstate: center radii must be finite");
  if (static_cast<int>(a.size()) != c.generators())
    throw std::invalid_argument("is_microstate: tuple length differs from the law's generator count");
  for (std::size_t j = 0; j < a.size(); ++j)
    if (op_norm(a[j]) > c.radii()[j]) return false;
  return law_distance(empirical_law(a, c.degree_cap()), c, c.degree_cap()) < nbhd.epsilon;
}

bool is_microstate_in_presence(const MatTuple& a, const MatTuple& extension, const NeighborhoodSpec& nbhd) {
  return is_microstate(join(a, extension), nbhd);
}

nlohmann::json to_json(const Law& law) {
  nlohmann::json j;
  j["generators"] = law.generators();
  j["degree_cap"] = law.degree_cap();
  nlohmann::json radii = nlohmann::json::array();
  for (double r : law.radii()) radii.push_back(std::isfinite(r) ? nlohmann::json(r) : nlohmann::json(nullptr));
  j["radii"] = radii;
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [w, c] : law.moments()) m[to_string(w)] = {c.real(), c.imag()};
  j["moments"] = m;
  return j;
}

Law law_from_json(const nlohmann::json& j) {
  std::vector<double> radii;
  for (const auto& r : j.at("radii")) radii.push_back(r.is_null() ? MatTuple::kUnbounded : r.get<double>());
  Law::MomentMap moments;
  for (const auto& [key, val] : j.at("moments").items())
    moments.emplace(parse_word(key), Complex(val.at(0).get<double>(), val.at(1).get<double>()));
  return Law(j.at("generators").get<int>(), j.at("degree_cap").get<int>(), std::move(radii), std::move(moments));
}

namespace {

void fill_oracle(DiscrepancyRow& row, const NcPoly& p, const GeneratorSpec& spec, int q_max,
                 const LimitNormOptions& opts) {
  const Complex oracle = poly_moment(p, spec);
  row.oracle_moment = oracle.real();
  row.moment_gap = std::abs(Complex(row.finite_moment, 0.0) - oracle);
  try {
    const LimitNormResult ln = limit_norm(p, spec, q_max, opts);
    row.limit_norm = ln.extrapolated;
    row.limit_lower = ln.max_raw_bound();
    row.norm_gap = row.finite_norm - row.limit_norm;
  } catch (const std::length_error& e) {
    row.limit_norm = std::numeric_limits<double>::quiet_NaN();
    row.norm_gap = std::numeric_limits<double>::quiet_NaN();
    row.error = e.what();
  }
}

}  // namespace

std::vector<DiscrepancyRow> strong_discrepancy(const MatTuple& a, const GeneratorSpec& spec,
                                               std::span<const NcPoly> polys, int q_max,
                                               const LimitNormOptions& opts) {
  std::vector<DiscrepancyRow> rows;
  for (const auto& p : polys) {
    DiscrepancyRow row;
    row.poly = to_string(p);
    const Matrix v = evaluate(p, a);
    const Complex tr = v.trace() / static_cast<double>(a.dim());
    row.finite_moment = tr.real();
    row.finite_norm = op_norm(v);
    fill_oracle(row, p, spec, q_max, opts);
    row.moment_gap = std::abs(tr - poly_moment(p, spec));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<DiscrepancyRow> strong_discrepancy(const MatTuple& x, const MatTuple& y,
                                               const GeneratorSpec& spec,
                                               std::span<const NcPoly> polys, int q_max,
                                               const LimitNormOptions& opts) {
  std::vector<DiscrepancyRow> rows;
  for (const auto& p : polys) {
    DiscrepancyRow row;
    row.poly = to_string(p);
    const TensorOp op = eval_tensor_poly(p, x, y);
    const Complex tr = tensor_trace(op);
    row.finite_moment = tr.real();
    const NormEstimate ne = tensor_norm(op);
    row.finite_norm = ne.value;
    fill_oracle(row, p, spec, q_max, opts);
    row.moment_gap = std::abs(tr - poly_moment(p, spec));
    if (!ne.converged) row.error += (row.error.empty() ? "" : "; ") + std::string("lanczos not converged");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace strongconv
