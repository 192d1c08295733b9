#pragma once

#include "g2lab/exterior.hpp"

#include "json.hpp"

namespace g2lab {

using json = nlohmann::json;

/// {"dim":7,"degree":3,"terms":[{"idx":[5,6,7],"c":"1"}, ...]}
/// Exact coefficients are decimal/fraction strings, doubles are JSON numbers.
/// Exact scalar from "3", "-3/4" or a terminating decimal like "0.125".
Rational parse_exact(std::string s);

json form_to_json(const QForm &f);
json form_to_json(const Form &f);

QForm exact_form_from_json(const json &j);
Form double_form_from_json(const json &j);

} // namespace g2lab
