#include "semiform/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "semiform/form_io.hpp"
#include "semiform/indecomposability.hpp"
#include "semiform/random_forms.hpp"

namespace semiform {

using ojson = nlohmann::ordered_json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SEMIFORM_SEED")) {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used);
      if (used == std::string(env).size()) return value;
    } catch (const std::logic_error&) {
    }
  }
  return kDefaultSeed;
}

namespace {

void render(const ojson& v, int indent, std::ostream& out);

bool is_flat(const ojson& v) {
  if (v.is_object()) return v.empty();
  if (!v.is_array()) return true;
  return std::all_of(v.begin(), v.end(), [](const ojson& e) { return !e.is_object(); });
}

std::string scalar_text(const ojson& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void render(const ojson& v, int indent, std::ostream& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (v.is_object()) {
    for (const auto& [key, value] : v.items()) {
      if (is_flat(value)) {
        out << pad << key << ": " << scalar_text(value) << "\n";
      } else {
        out << pad << key << ":\n";
        render(value, indent + 2, out);
      }
    }
  } else if (v.is_array()) {
    for (const auto& item : v) {
      if (is_flat(item)) {
        out << pad << "- " << scalar_text(item) << "\n";
      } else {
        out << pad << "-\n";
        render(item, indent + 2, out);
      }
    }
  } else {
    out << pad << scalar_text(v) << "\n";
  }
}

// --- JSON helpers -----------------------------------------------------------

ojson one_based(const IndexSet& s) {
  auto out = ojson::array();
  for (auto i : s) out.push_back(i + 1);
  return out;
}

ojson partition_json(const BasePartition& p) {
  auto out = ojson::array();
  for (const auto& block : p) out.push_back(one_based(block));
  return out;
}

ojson pair_partition_json(const ProductBase& base, const BasePartition& p) {
  auto out = ojson::array();
  for (const auto& block : p) {
    auto pairs = ojson::array();
    for (auto q : block) {
      const auto [i, k] = base.pair(q);
      pairs.push_back(ojson::array({i + 1, k + 1}));
    }
    out.push_back(pairs);
  }
  return out;
}

ojson plain(const nlohmann::json& j) { return ojson::parse(j.dump()); }

ojson matrix_json(const Semiring& s, const Matrix& m) { return plain(matrix_to_json(s, m)); }

ojson form_json(const Form& f) {
  ojson out;
  out["kind"] = is_quadratic(f) ? "quadratic" : "bilinear";
  out["rank"] = form_rank(f);
  const auto payload = form_payload(f);
  if (payload.contains("gram")) {
    out["gram"] = plain(payload["gram"]);
  } else {
    out["diag"] = plain(payload["diag"]);
    out["off"] = plain(payload["off"]);
  }
  return out;
}

ojson check_json(const CheckResult& c, const Semiring& s) {
  ojson out;
  out["holds"] = c.holds;
  out["exhaustive"] = c.exhaustive;
  out["checked"] = c.checked;
  if (c.witness) {
    out["witness"] = {{"x", plain(coeffs_to_json(s, c.witness->first))},
                      {"y", plain(coeffs_to_json(s, c.witness->second))}};
  }
  return out;
}

ojson witness_json(const Semiring& s, const IsometryWitness& w) {
  ojson out;
  out["permutation"] = cycle_notation(w.perm);
  auto images = ojson::array();
  for (auto p : w.perm) images.push_back(p + 1);
  out["images"] = images;
  out["units"] = plain(coeffs_to_json(s, w.units));
  return out;
}

// --- command context --------------------------------------------------------

struct Context {
  std::string format = "text";
  std::uint64_t seed = 0;
  ojson warnings = ojson::array();
  void warn(const std::string& message) {
    if (std::find(warnings.begin(), warnings.end(), message) == warnings.end()) {
      warnings.push_back(message);
    }
  }
};

struct Outcome {
  ojson result;
  int code = kExitOk;
};

const char* kSampledCompanion = "companion check sampled, not exhaustive";

GramMatrix resolve_companion(const QuadraticScheme& q, const FormDocument& doc,
                             const std::string& option, Context& ctx) {
  if (option == "balanced") return balanced_companion(q);
  if (!option.empty()) {
    const auto other = load_form_file(option);
    const auto* b = std::get_if<GramMatrix>(&other.form);
    if (!b) throw ParseError(option + ": companion file must hold a bilinear form");
    if (!(b->semiring() == q.semiring())) throw SemiringMismatch("companion over a different semiring");
    if (b->rank() != q.rank()) throw DimensionMismatch("companion rank differs from the form");
    return *b;
  }
  if (doc.companion) return *doc.companion;
  ctx.warn("no companion given; using the balanced companion");
  return balanced_companion(q);
}

const QuadraticScheme& require_quadratic(const FormDocument& doc, const std::string& path) {
  const auto* q = std::get_if<QuadraticScheme>(&doc.form);
  if (!q) throw PreconditionError(path + " must hold a quadratic form");
  return *q;
}

const GramMatrix& require_bilinear(const FormDocument& doc, const std::string& path) {
  const auto* b = std::get_if<GramMatrix>(&doc.form);
  if (!b) throw PreconditionError(path + " must hold a bilinear form");
  return *b;
}

void require_companion(const QuadraticScheme& q, const GramMatrix& b, Context& ctx) {
  Rng rng(ctx.seed);
  const auto check = is_companion(q, b, rng);
  if (!check.holds) throw PreconditionError("the given bilinear form is not a companion of q");
  if (!check.exhaustive) ctx.warn(kSampledCompanion);
}

UnitCandidates parse_units(const Semiring& s, const std::string& text) {
  if (text.empty()) return UnitCandidates::defaults(s);
  // Commas inside parentheses belong to product literals such as "(1,1)".
  std::vector<std::string> tokens(1);
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      tokens.emplace_back();
    } else {
      tokens.back() += c;
    }
  }
  std::vector<Scalar> units;
  for (const auto& token : tokens) {
    const auto u = s.parse(std::string_view(token));
    if (!s.is_unit(u)) throw ParseError("'" + token + "' is not a unit of " + s.name());
    units.push_back(u);
  }
  if (units.empty()) throw ParseError("empty unit list");
  return UnitCandidates::of(std::move(units));
}

Semiring parse_semiring_argument(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    const auto j = load_json_file(arg);
    return Semiring::from_descriptor(j.contains("semiring") ? j["semiring"] : j);
  }
  const auto trimmed = arg.find_first_not_of(" \t");
  if (trimmed != std::string::npos && (arg[trimmed] == '{' || arg[trimmed] == '"')) {
    try {
      return Semiring::from_descriptor(nlohmann::json::parse(arg));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed semiring descriptor: ") + e.what());
    }
  }
  return Semiring::from_descriptor(nlohmann::json{{"kind", arg}});
}

// --- subcommands ------------------------------------------------------------

Outcome cmd_decompose(const std::string& path, bool verify, Context& ctx) {
  const auto doc = load_form_file(path);
  const auto& f = doc.form;
  const auto& s = doc.semiring();
  Outcome o;
  o.result["semiring"] = s.name();
  o.result["kind"] = is_quadratic(f) ? "quadratic" : "bilinear";
  o.result["rank"] = form_rank(f);
  const auto partition = decompose(f);
  o.result["components"] = partition.size();
  o.result["partition"] = partition_json(partition);
  auto edges = ojson::array();
  for (const auto& e : base_graph(f).edges) {
    edges.push_back({{"pair", ojson::array({e.i + 1, e.j + 1})}, {"witness", plain(s.to_json(e.witness))}});
  }
  o.result["edges"] = edges;
  o.result["indecomposable"] = is_indecomposable(f);
  if (verify) {
    Rng rng(ctx.seed);
    const auto check = verify_orthogonality(f, partition, rng);
    o.result["orthogonality"] = check_json(check, s);
    if (!check.exhaustive) ctx.warn("orthogonality check sampled, not exhaustive");
    if (!check.holds) o.code = kExitNegative;
  }
  return o;
}

Outcome cmd_companions(const std::string& path, Context& ctx) {
  const auto doc = load_form_file(path);
  const auto& q = require_quadratic(doc, path);
  const auto balanced = balanced_companion(q);
  const auto faithful = quasiminimal_reduce(q, balanced);
  Rng rng(ctx.seed);
  const auto check_balanced = is_companion(q, balanced, rng);
  const auto check_faithful = is_companion(q, faithful, rng);
  if (!check_balanced.exhaustive || !check_faithful.exhaustive) ctx.warn(kSampledCompanion);
  Outcome o;
  o.result["semiring"] = q.semiring().name();
  o.result["balanced"] = matrix_json(q.semiring(), balanced.entries());
  o.result["faithful"] = matrix_json(q.semiring(), faithful.entries());
  o.result["balanced_check"] = check_json(check_balanced, q.semiring());
  o.result["faithful_check"] = check_json(check_faithful, q.semiring());
  if (!check_balanced.holds || !check_faithful.holds) o.code = kExitNegative;
  return o;
}

Outcome cmd_expand(const std::string& path, const std::string& companion, Context& ctx) {
  const auto doc = load_form_file(path);
  const auto& q = require_quadratic(doc, path);
  const auto b = resolve_companion(q, doc, companion, ctx);
  require_companion(q, b, ctx);
  const auto e = make_expansion(q, b);
  Outcome o;
  o.result["semiring"] = q.semiring().name();
  o.result["companion"] = matrix_json(q.semiring(), b.entries());
  o.result["expansion"] = matrix_json(q.semiring(), e.entries);
  return o;
}

Outcome cmd_tensor(const std::string& p1, const std::string& p2, Context&) {
  const auto d1 = load_form_file(p1);
  const auto d2 = load_form_file(p2);
  const auto& b1 = require_bilinear(d1, p1);
  const auto& b2 = require_bilinear(d2, p2);
  const auto t = tensor_bilinear(b1, b2);
  const ProductBase base{b1.rank(), b2.rank()};
  const auto partition = decompose(t);
  Outcome o;
  o.result["semiring"] = t.semiring().name();
  o.result["rank"] = t.rank();
  o.result["gram"] = matrix_json(t.semiring(), t.entries());
  o.result["components"] = partition.size();
  o.result["partition"] = partition_json(partition);
  o.result["partition_pairs"] = pair_partition_json(base, partition);
  return o;
}

Outcome cmd_tensor_q(const std::string& gamma_path, const std::string& q_path,
                     const std::string& companion, Context& ctx) {
  const auto dg = load_form_file(gamma_path);
  const auto dq = load_form_file(q_path);
  const auto& gamma = require_bilinear(dg, gamma_path);
  const auto& q = require_quadratic(dq, q_path);
  const auto b = resolve_companion(q, dq, companion, ctx);
  require_companion(q, b, ctx);
  const auto t = tensor_quadratic(gamma, q, b);
  const ProductBase base{gamma.rank(), q.rank()};
  const auto partition = decompose(t);
  Outcome o;
  o.result["semiring"] = q.semiring().name();
  o.result["scheme"] = form_json(t);
  o.result["components"] = partition.size();
  o.result["partition"] = partition_json(partition);
  o.result["partition_pairs"] = pair_partition_json(base, partition);
  return o;
}

Outcome cmd_predict(const std::string& kind, const std::string& p1, const std::string& p2,
                    const std::string& companion, bool verify, Context& ctx) {
  const auto d1 = load_form_file(p1);
  const auto d2 = load_form_file(p2);
  Outcome o;
  o.result["kind"] = kind;
  if (kind == "bb") {
    const auto& b1 = require_bilinear(d1, p1);
    const auto& b2 = require_bilinear(d2, p2);
    const auto prediction = predict_bilinear_tensor(b1, b2);
    const ProductBase base{b1.rank(), b2.rank()};
    o.result["reason"] = prediction.reason;
    o.result["components"] = prediction.components();
    o.result["partition"] = partition_json(prediction.partition);
    o.result["partition_pairs"] = pair_partition_json(base, prediction.partition);
    if (verify) {
      const auto v = oracle_crosscheck(prediction, tensor_bilinear(b1, b2));
      o.result["oracle"] = {{"match", v.match}, {"actual", partition_json(v.actual)}};
      if (!v.match) o.code = kExitNegative;
    }
    return o;
  }
  const auto& gamma = require_bilinear(d1, p1);
  const auto& q = require_quadratic(d2, p2);
  const auto b = resolve_companion(q, d2, companion, ctx);
  require_companion(q, b, ctx);
  const auto blocks = full_tensor_analysis(gamma, q, b);
  const ProductBase base{gamma.rank(), q.rank()};
  auto out = ojson::array();
  std::size_t total = 0;
  for (const auto& entry : blocks) {
    total += entry.prediction.components();
    out.push_back({{"gamma_block", one_based(entry.block)},
                   {"reason", entry.prediction.reason},
                   {"components", entry.prediction.components()},
                   {"partition", partition_json(entry.prediction.partition)},
                   {"partition_pairs", pair_partition_json(base, entry.prediction.partition)}});
  }
  o.result["components"] = total;
  o.result["blocks"] = out;
  if (verify) {
    const auto v = oracle_crosscheck(blocks, tensor_quadratic(gamma, q, b));
    o.result["oracle"] = {{"match", v.match}, {"actual", partition_json(v.actual)}};
    if (!v.match) o.code = kExitNegative;
  }
  return o;
}

Outcome cmd_isometry(const std::string& p1, const std::string& p2, const std::string& units,
                     Context&) {
  const auto d1 = load_form_file(p1);
  const auto d2 = load_form_file(p2);
  const auto& s = d1.semiring();
  if (!(s == d2.semiring())) throw SemiringMismatch("forms over different semirings");
  const auto w = isometry_search(d1.form, d2.form, parse_units(s, units));
  Outcome o;
  o.result["isometric"] = w.has_value();
  if (w) {
    o.result["witness"] = witness_json(s, *w);
    o.result["maps_components"] = maps_blocks(*w, decompose(d1.form), decompose(d2.form));
  } else {
    o.code = kExitNegative;
  }
  return o;
}

ojson multiplicity_json(const MultiplicityMap& m) {
  auto out = ojson::array();
  for (const auto& cls : m) {
    auto blocks = ojson::array();
    for (const auto& b : cls.blocks) blocks.push_back(one_based(b));
    out.push_back({{"representative", form_literal(cls.representative)},
                   {"multiplicity", cls.count()},
                   {"components", blocks}});
  }
  return out;
}

Outcome cmd_multiplicities(const std::string& path, const std::string& units, Context&) {
  const auto doc = load_form_file(path);
  const auto m = multiplicities(doc.form, parse_units(doc.semiring(), units));
  Outcome o;
  o.result["semiring"] = doc.semiring().name();
  o.result["classes"] = multiplicity_json(m);
  return o;
}

Outcome cmd_cancel(const std::string& pv, const std::string& pv2, const std::string& summand,
                   const std::string& summand2, const std::string& units, Context& ctx) {
  const auto v = load_form_file(pv);
  const auto v2 = load_form_file(pv2);
  const auto& s = v.semiring();
  if (!(s == v2.semiring())) throw SemiringMismatch("forms over different semirings");
  const auto candidates = parse_units(s, units);
  auto w1 = parse_index_list(summand);
  std::sort(w1.begin(), w1.end());
  IndexSet w1_2;
  if (!summand2.empty()) {
    w1_2 = parse_index_list(summand2);
  } else {
    const auto w = isometry_search(v.form, v2.form, candidates);
    if (!w) throw PreconditionError("V and V' are not isometric");
    for (auto i : w1) {
      if (i >= w->perm.size()) throw DimensionMismatch("summand index out of range");
      w1_2.push_back(w->perm[i]);
    }
    ctx.warn("second summand taken as the image of the first under an isometry V -> V'");
  }
  std::sort(w1_2.begin(), w1_2.end());
  const auto verdict = witt_cancel(v.form, v2.form, w1, w1_2, candidates);
  Outcome o;
  o.result["summand"] = one_based(w1);
  o.result["summand2"] = one_based(w1_2);
  o.result["complement"] = one_based(verdict.w2);
  o.result["complement2"] = one_based(verdict.w2_2);
  o.result["complements_isometric"] = verdict.complements_isometric;
  auto ledger = ojson::array();
  for (const auto& row : verdict.ledger) {
    ledger.push_back({{"representative", form_literal(row.representative)},
                      {"V", row.in_v},
                      {"W1", row.in_w1},
                      {"W2", row.in_w2},
                      {"V'", row.in_v2},
                      {"W1'", row.in_w1_2},
                      {"W2'", row.in_w2_2}});
  }
  o.result["ledger"] = ledger;
  if (!verdict.complements_isometric) o.code = kExitNegative;
  return o;
}

Outcome cmd_check_semiring(const std::string& arg, Context& ctx) {
  const auto s = parse_semiring_argument(arg);
  const auto report = axioms_check(s);
  Outcome o;
  o.result["semiring"] = s.name();
  o.result["descriptor"] = plain(s.descriptor());
  const auto& f = s.flags();
  o.result["flags"] = {{"antiring", f.antiring},   {"entire", f.entire},
                       {"indecomposable", f.indecomposable}, {"nql", s.has_nql()},
                       {"frobenius", f.frobenius}, {"doubling_free", f.doubling_free}};
  o.result["unique_base"] = to_string(unique_base_guarantee(s));
  o.result["exhaustive"] = report.exhaustive;
  o.result["sample_size"] = report.sample_size;
  auto verdicts = ojson::array();
  bool laws_hold = true;
  static const std::vector<std::string> laws = {
      "additive commutativity", "additive associativity", "multiplicative commutativity",
      "multiplicative associativity", "distributivity", "additive identity",
      "multiplicative identity", "zero annihilates"};
  for (const auto& v : report.verdicts) {
    ojson entry{{"axiom", v.axiom}, {"holds", v.holds}};
    if (!v.holds) {
      auto w = ojson::array();
      for (const auto& a : v.witness) w.push_back(s.format(a));
      entry["witness"] = w;
      if (std::find(laws.begin(), laws.end(), v.axiom) != laws.end()) laws_hold = false;
    }
    verdicts.push_back(entry);
  }
  o.result["verdicts"] = verdicts;
  o.result["inconsistent"] = report.inconsistent;
  if (!report.exhaustive) ctx.warn("axiom check sampled, not exhaustive");
  if (!laws_hold || !report.consistent()) o.code = kExitNegative;
  return o;
}

Outcome cmd_check_base(const std::string& path, Context& ctx) {
  const auto j = load_json_file(path);
  if (!j.is_object() || !j.contains("semiring") || !j.contains("candidates")) {
    throw ParseError(path + ": base file needs \"semiring\" and \"candidates\"");
  }
  const auto s = Semiring::from_descriptor(j["semiring"]);
  const auto& cand = j["candidates"];
  if (!cand.is_array()) throw ParseError(path + ": \"candidates\" must be an array");
  std::vector<Coeffs> candidates;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    candidates.push_back(parse_coeffs(s, cand[i], "candidates[" + std::to_string(i) + "]"));
  }
  const std::size_t rank = j.contains("rank") ? j["rank"].get<std::size_t>() : candidates.size();
  std::vector<Scalar> sample;
  if (j.contains("sample")) sample = parse_coeffs(s, j["sample"], "sample");
  const FreeModule module(s, rank);
  const auto v = verify_base(module, candidates, sample);
  Outcome o;
  o.result["semiring"] = s.name();
  o.result["rank"] = rank;
  o.result["is_base"] = v.is_base;
  o.result["projectively_standard"] = v.projectively_standard;
  o.result["exhaustive"] = v.exhaustive;
  o.result["combinations"] = v.combinations;
  o.result["targets"] = v.targets;
  if (v.witness) {
    o.result["witness"] = plain(coeffs_to_json(s, *v.witness));
    o.result["witness_representations"] = v.witness_representations;
  }
  o.result["unique_base"] = to_string(unique_base_guarantee(s));
  if (!v.exhaustive) ctx.warn("base check sampled, not exhaustive");
  if (!v.is_base) o.code = kExitNegative;
  return o;
}

// --- verify-suite -----------------------------------------------------------

struct InstanceResult {
  std::vector<std::pair<std::string, bool>> checks;
  std::string error;
};

InstanceResult run_instance(std::size_t index, std::uint64_t seed) {
  InstanceResult r;
  Rng rng(seed);
  static const std::vector<Semiring> pool = {Semiring::boolean(), Semiring::natural(),
                                             Semiring::max_plus()};
  const auto& s = pool[index % pool.size()];
  try {
    const auto n = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    const auto q = random_scheme(s, n, rng);
    const auto partition = decompose(q);
    r.checks.emplace_back("orthogonality", verify_orthogonality(q, partition, rng).holds);
    r.checks.emplace_back("quadratic/bilinear agreement",
                          decompose(quasiminimal_reduce(q, balanced_companion(q))) == partition);

    const auto units = UnitCandidates::defaults(s);
    const auto w = random_witness(s, n, rng, units);
    const auto image = apply_witness(w, Form(q));
    const auto found = isometry_search(q, image, units);
    r.checks.emplace_back("isometry invariance",
                          found && maps_blocks(*found, partition, decompose(image)));

    if (s.kind() != SemiringKind::Boolean) {
      const auto gamma = random_gram(s, std::uniform_int_distribution<std::size_t>(1, 3)(rng), rng);
      const auto small = random_scheme(s, std::uniform_int_distribution<std::size_t>(1, 3)(rng), rng);
      const auto report =
          expansion_independence_check(gamma, small, balanced_companion(small), 20, rng);
      r.checks.emplace_back("expansion independence", report.identical);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

Outcome cmd_verify_suite(std::size_t instances, std::size_t threads, Context& ctx) {
  std::vector<InstanceResult> results(instances);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < instances; i = next++) results[i] = run_instance(i, ctx.seed + i);
  };
  threads = std::max<std::size_t>(1, std::min(threads, instances));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ojson tally = ojson::object();
  auto failures = ojson::array();
  for (std::size_t i = 0; i < instances; ++i) {
    const auto& r = results[i];
    if (!r.error.empty()) {
      failures.push_back({{"instance", i}, {"seed", ctx.seed + i}, {"error", r.error}});
    }
    for (const auto& [name, ok] : r.checks) {
      if (!tally.contains(name)) tally[name] = {{"passed", 0}, {"failed", 0}};
      tally[name][ok ? "passed" : "failed"] = tally[name][ok ? "passed" : "failed"].get<int>() + 1;
      if (!ok) failures.push_back({{"instance", i}, {"seed", ctx.seed + i}, {"check", name}});
    }
  }
  Outcome o;
  o.result["instances"] = instances;
  o.result["seed"] = ctx.seed;
  o.result["checks"] = tally;
  o.result["failures"] = failures;
  o.result["passed"] = failures.empty();
  if (!failures.empty()) o.code = kExitNegative;
  return o;
}

}  // namespace

std::string render_text(const ojson& report) {
  std::ostringstream out;
  render(report, 0, out);
  return out.str();
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decompose, compare and tensor quadratic and bilinear forms over semirings",
               "semiform"};
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx;
  std::optional<std::uint64_t> seed;
  app.add_option("--format", ctx.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", seed, "Seed for randomized checks (default: SEMIFORM_SEED or fixed)");

  std::string f1, f2, companion, units, summand, summand2, kind = "bb";
  bool verify = false;
  std::size_t instances = 100, threads = std::max(1u, std::thread::hardware_concurrency());
  std::function<Outcome()> action;

  auto* decompose_cmd = app.add_subcommand("decompose", "Split a form into indecomposable components");
  decompose_cmd->add_option("form", f1, "Form file")->required();
  decompose_cmd->add_flag("--verify", verify, "Check orthogonality of the computed blocks");
  decompose_cmd->callback([&] { action = [&] { return cmd_decompose(f1, verify, ctx); }; });

  auto* companions_cmd = app.add_subcommand("companions", "Balanced and faithful companions of a quadratic form");
  companions_cmd->add_option("form", f1, "Quadratic form file")->required();
  companions_cmd->callback([&] { action = [&] { return cmd_companions(f1, ctx); }; });

  auto* expand_cmd = app.add_subcommand("expand", "Triangular expansion of a quadratic pair");
  expand_cmd->add_option("form", f1, "Quadratic form file")->required();
  expand_cmd->add_option("--companion", companion, "'balanced' or a bilinear form file");
  expand_cmd->callback([&] { action = [&] { return cmd_expand(f1, companion, ctx); }; });

  auto* tensor_cmd = app.add_subcommand("tensor", "Tensor product of two bilinear forms");
  tensor_cmd->add_option("left", f1, "Bilinear form file")->required();
  tensor_cmd->add_option("right", f2, "Bilinear form file")->required();
  tensor_cmd->callback([&] { action = [&] { return cmd_tensor(f1, f2, ctx); }; });

  auto* tensor_q_cmd = app.add_subcommand("tensor-q", "Tensor product of a bilinear form with a quadratic pair");
  tensor_q_cmd->add_option("gamma", f1, "Bilinear form file")->required();
  tensor_q_cmd->add_option("q", f2, "Quadratic form file")->required();
  tensor_q_cmd->add_option("--companion", companion, "'balanced' or a bilinear form file");
  tensor_q_cmd->callback([&] { action = [&] { return cmd_tensor_q(f1, f2, companion, ctx); }; });

  auto* predict_cmd = app.add_subcommand("predict", "Predict the components of a tensor product");
  predict_cmd->add_option("--kind", kind, "bb: bilinear x bilinear, bq: bilinear x quadratic")
      ->check(CLI::IsMember({"bb", "bq"}));
  predict_cmd->add_option("left", f1, "Bilinear form file")->required();
  predict_cmd->add_option("right", f2, "Bilinear or quadratic form file")->required();
  predict_cmd->add_option("--companion", companion, "'balanced' or a bilinear form file (bq)");
  predict_cmd->add_flag("--verify", verify, "Compare with the decomposition of the product");
  predict_cmd->callback([&] {
    action = [&] { return cmd_predict(kind, f1, f2, companion, verify, ctx); };
  });

  auto* isometry_cmd = app.add_subcommand("isometry", "Search for an isometry between two forms");
  isometry_cmd->add_option("first", f1, "Form file")->required();
  isometry_cmd->add_option("second", f2, "Form file")->required();
  isometry_cmd->add_option("--units", units, "Comma-separated candidate units");
  isometry_cmd->callback([&] { action = [&] { return cmd_isometry(f1, f2, units, ctx); }; });

  auto* mult_cmd = app.add_subcommand("multiplicities", "Isometry classes of components");
  mult_cmd->add_option("form", f1, "Form file")->required();
  mult_cmd->add_option("--units", units, "Comma-separated candidate units");
  mult_cmd->callback([&] { action = [&] { return cmd_multiplicities(f1, units, ctx); }; });

  auto* cancel_cmd = app.add_subcommand("cancel", "Cancel an isometric summand from isometric forms");
  cancel_cmd->add_option("V", f1, "Form file")->required();
  cancel_cmd->add_option("V2", f2, "Form file")->required();
  cancel_cmd->add_option("--summand", summand, "1-based base indices of W1 in V")->required();
  cancel_cmd->add_option("--summand2", summand2, "1-based base indices of W1' in V'");
  cancel_cmd->add_option("--units", units, "Comma-separated candidate units");
  cancel_cmd->callback([&] {
    action = [&] { return cmd_cancel(f1, f2, summand, summand2, units, ctx); };
  });

  auto* semiring_cmd = app.add_subcommand("check-semiring", "Check semiring laws and declared flags");
  semiring_cmd->add_option("semiring", f1, "Kind (e.g. maxplus, finite:z6), JSON descriptor or file")
      ->required();
  semiring_cmd->callback([&] { action = [&] { return cmd_check_semiring(f1, ctx); }; });

  auto* base_cmd = app.add_subcommand("check-base", "Check whether candidate vectors form a base");
  base_cmd->add_option("file", f1, "Base candidate file")->required();
  base_cmd->callback([&] { action = [&] { return cmd_check_base(f1, ctx); }; });

  auto* suite_cmd = app.add_subcommand("verify-suite", "Run randomized property checks");
  suite_cmd->add_option("--instances", instances, "Number of random instances");
  suite_cmd->add_option("--threads", threads, "Worker threads");
  suite_cmd->callback([&] { action = [&] { return cmd_verify_suite(instances, threads, ctx); }; });

  std::vector<const char*> argv{"semiform"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitError;
  }

  ctx.seed = seed ? *seed : default_seed();
  const auto name = app.get_subcommands().front()->get_name();
  try {
    auto outcome = action();
    ojson report;
    report["command"] = name;
    report["result"] = std::move(outcome.result);
    report["warnings"] = ctx.warnings;
    if (ctx.format == "json") {
      out << report.dump(2) << "\n";
    } else {
      out << render_text(report);
    }
    return outcome.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace semiform
