#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "semiform/forms.hpp"

namespace semiform {

struct FormDocument {
  Form form;
  std::optional<GramMatrix> companion;

  const Semiring& semiring() const { return form_semiring(form); }
};

// Accepts {"semiring": ..., "kind": "bilinear", "rank": n, "gram": [[...]]}
// or {"semiring": ..., "kind": "quadratic", "rank": n, "diag": [...],
// "off": {"i,j": s}} (1-based i < j; the scheme may also sit under a
// "quadratic" key), with an optional "companion" Gram matrix.
FormDocument parse_form_document(const nlohmann::json& doc);
FormDocument parse_form_text(std::string_view text);
FormDocument load_form_file(const std::string& path);
nlohmann::json load_json_file(const std::string& path);

Matrix parse_matrix(const Semiring& s, const nlohmann::json& rows, std::string_view what);
Coeffs parse_coeffs(const Semiring& s, const nlohmann::json& values, std::string_view what);
// "1,3,4" -> {0, 2, 3}
IndexSet parse_index_list(std::string_view text);

nlohmann::json matrix_to_json(const Semiring& s, const Matrix& m);
nlohmann::json coeffs_to_json(const Semiring& s, const Coeffs& x);
// Payload only: {"gram": ...} or {"diag": ..., "off": ...}.
nlohmann::json form_payload(const Form& f);
nlohmann::json to_json(const FormDocument& doc);
// Compact one-line literal of a form's payload.
std::string form_literal(const Form& f);

}  // namespace semiform
