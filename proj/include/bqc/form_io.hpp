#pragma once

// JSON form files.
//   quadratic:   {"kind":"quadratic","n":5,"gram":[[...],...]}
//   biquadratic: {"kind":"biquadratic","n":3,"coeffs":[{"i":1,"j":1,"k":1,"l":1,"c":1},...]}
// Indices are 1-based with i <= j and k <= l. Integers may be given as
// JSON numbers or as decimal strings.

#include "bqc/errors.hpp"
#include "bqc/forms.hpp"

#include <filesystem>
#include <string>
#include <variant>

namespace bqc {

using AnyForm = std::variant<QuadraticForm, BiquadraticForm>;

// Throws SchemaError; messages carry the source name and either the line of
// a syntax error or the offending field.
AnyForm parse_form(const std::string& text, const std::string& source = "<input>");
AnyForm load_form(const std::filesystem::path& path);

std::string form_to_json(const QuadraticForm& f);
std::string form_to_json(const BiquadraticForm& b);
void save_form(const std::filesystem::path& path, const AnyForm& form);

}  // namespace bqc
