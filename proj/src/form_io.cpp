#include "semiform/form_io.hpp"

#include <fstream>
#include <sstream>

namespace semiform {

namespace {

std::string at(std::string_view what, std::size_t i) {
  return std::string(what) + "[" + std::to_string(i) + "]";
}

Scalar parse_scalar(const Semiring& s, const nlohmann::json& literal, const std::string& where) {
  try {
    return s.parse(literal);
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

std::pair<std::size_t, std::size_t> parse_key(const std::string& key, std::size_t rank) {
  const auto comma = key.find(',');
  auto fail = [&]() -> std::pair<std::size_t, std::size_t> {
    throw ParseError("bad scheme key \"" + key + "\"; expected \"i,j\" with 1 <= i < j <= " +
                     std::to_string(rank));
  };
  if (comma == std::string::npos) return fail();
  std::size_t i = 0, j = 0;
  try {
    std::size_t used = 0;
    i = std::stoul(key.substr(0, comma), &used);
    if (used != comma) return fail();
    const auto rest = key.substr(comma + 1);
    j = std::stoul(rest, &used);
    if (used != rest.size()) return fail();
  } catch (const std::logic_error&) {
    return fail();
  }
  if (i < 1 || i >= j || j > rank) return fail();
  return {i - 1, j - 1};
}

}  // namespace

Coeffs parse_coeffs(const Semiring& s, const nlohmann::json& values, std::string_view what) {
  if (!values.is_array()) throw ParseError(std::string(what) + " must be an array");
  Coeffs out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back(parse_scalar(s, values[i], at(what, i)));
  return out;
}

Matrix parse_matrix(const Semiring& s, const nlohmann::json& rows, std::string_view what) {
  if (!rows.is_array()) throw ParseError(std::string(what) + " must be an array of rows");
  Matrix out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back(parse_coeffs(s, rows[i], at(what, i)));
    if (out.back().size() != rows.size()) {
      throw ParseError(std::string(what) + " must be square; row " + std::to_string(i + 1) +
                       " has " + std::to_string(out.back().size()) + " entries");
    }
  }
  return out;
}

IndexSet parse_index_list(std::string_view text) {
  IndexSet out;
  std::stringstream in{std::string(text)};
  std::string token;
  while (std::getline(in, token, ',')) {
    std::size_t used = 0;
    std::size_t value = 0;
    try {
      value = std::stoul(token, &used);
    } catch (const std::logic_error&) {
      throw ParseError("bad index list '" + std::string(text) + "'");
    }
    if (used != token.size() || value == 0) throw ParseError("bad index list '" + std::string(text) + "'");
    out.push_back(value - 1);
  }
  return out;
}

namespace {

FormDocument parse_document(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("form document must be a JSON object");
  if (!doc.contains("semiring")) throw ParseError("form document needs a \"semiring\"");
  const auto s = Semiring::from_descriptor(doc["semiring"]);
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw ParseError("form document needs \"kind\": \"bilinear\" or \"quadratic\"");
  }
  const auto kind = doc["kind"].get<std::string>();
  std::optional<std::size_t> rank;
  if (doc.contains("rank")) {
    if (!doc["rank"].is_number_unsigned()) throw ParseError("\"rank\" must be a non-negative integer");
    rank = doc["rank"].get<std::size_t>();
  }
  auto check_rank = [&](std::size_t n) {
    if (rank && *rank != n) {
      throw ParseError("payload has dimension " + std::to_string(n) + " but rank is " +
                       std::to_string(*rank));
    }
  };

  std::optional<Form> form;
  if (kind == "bilinear") {
    if (!doc.contains("gram")) throw ParseError("bilinear form needs a \"gram\" matrix");
    auto m = parse_matrix(s, doc["gram"], "gram");
    check_rank(m.size());
    form = GramMatrix(s, std::move(m));
  } else if (kind == "quadratic") {
    const auto& body = doc.contains("quadratic") ? doc["quadratic"] : doc;
    if (!body.contains("diag")) throw ParseError("quadratic form needs \"diag\"");
    auto diag = parse_coeffs(s, body["diag"], "diag");
    check_rank(diag.size());
    OffMap off;
    if (body.contains("off")) {
      if (!body["off"].is_object()) throw ParseError("\"off\" must be an object of \"i,j\" keys");
      for (const auto& [key, value] : body["off"].items()) {
        const auto ij = parse_key(key, diag.size());
        if (off.count(ij)) throw ParseError("duplicate scheme key \"" + key + "\"");
        off.emplace(ij, parse_scalar(s, value, "off[\"" + key + "\"]"));
      }
    }
    form = QuadraticScheme(s, std::move(diag), std::move(off));
  } else {
    throw ParseError("unknown form kind \"" + kind + "\"");
  }

  FormDocument out{*form, std::nullopt};
  if (doc.contains("companion")) {
    const auto& c = doc["companion"];
    auto m = parse_matrix(s, c.is_object() && c.contains("gram") ? c["gram"] : c, "companion");
    if (m.size() != form_rank(*form)) throw ParseError("companion dimension differs from rank");
    out.companion = GramMatrix(s, std::move(m));
  }
  return out;
}

}  // namespace

FormDocument parse_form_document(const nlohmann::json& doc) {
  try {
    return parse_document(doc);
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  } catch (const DimensionMismatch& e) {
    throw ParseError(e.what());
  }
}

FormDocument parse_form_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_form_document(doc);
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": malformed JSON: " + e.what());
  }
}

FormDocument load_form_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_form_text(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

nlohmann::json coeffs_to_json(const Semiring& s, const Coeffs& x) {
  auto out = nlohmann::json::array();
  for (const auto& a : x) out.push_back(s.to_json(a));
  return out;
}

nlohmann::json matrix_to_json(const Semiring& s, const Matrix& m) {
  auto out = nlohmann::json::array();
  for (const auto& row : m) out.push_back(coeffs_to_json(s, row));
  return out;
}

nlohmann::json form_payload(const Form& f) {
  const auto& s = form_semiring(f);
  if (const auto* b = std::get_if<GramMatrix>(&f)) {
    return {{"gram", matrix_to_json(s, b->entries())}};
  }
  const auto& q = std::get<QuadraticScheme>(f);
  auto off = nlohmann::json::object();
  for (const auto& [key, value] : q.off_entries()) {
    off[std::to_string(key.first + 1) + "," + std::to_string(key.second + 1)] = s.to_json(value);
  }
  return {{"diag", coeffs_to_json(s, q.diagonal())}, {"off", off}};
}

nlohmann::json to_json(const FormDocument& doc) {
  auto out = form_payload(doc.form);
  out["semiring"] = doc.semiring().descriptor();
  out["kind"] = is_quadratic(doc.form) ? "quadratic" : "bilinear";
  out["rank"] = form_rank(doc.form);
  if (doc.companion) out["companion"] = matrix_to_json(doc.semiring(), doc.companion->entries());
  return out;
}

std::string form_literal(const Form& f) { return form_payload(f).dump(); }

}  // namespace semiform
