#include "g2lab/form_json.hpp"

#include <stdexcept>

namespace g2lab {

namespace {

template <class S, class Coef> json to_json_impl(const ConstForm<S> &f, Coef coef) {
  json terms = json::array();
  for (auto &[k, c] : f.terms()) terms.push_back({{"idx", k.indices()}, {"c", coef(c)}});
  return {{"dim", f.dim()}, {"degree", f.degree()}, {"terms", terms}};
}

void check_keys(const json &j, std::initializer_list<const char *> allowed, const char *what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
  for (auto &[k, v] : j.items()) {
    bool ok = false;
    for (auto *a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument(std::string("unknown key '") + k + "' in " + what);
  }
}

template <class S, class Parse> ConstForm<S> from_json_impl(const json &j, Parse parse) {
  check_keys(j, {"dim", "degree", "terms"}, "form");
  ConstForm<S> f(j.at("dim").get<int>(), j.at("degree").get<int>());
  for (auto &t : j.at("terms")) {
    check_keys(t, {"idx", "c"}, "form term");
    auto idx = t.at("idx").get<std::vector<int>>();
    if (int(idx.size()) != f.degree()) throw std::invalid_argument("term degree does not match form degree");
    for (int i : idx)
      if (i < 1 || i > f.dim()) throw std::invalid_argument("term index out of range");
    f.add_unsorted(idx, parse(t.at("c")));
  }
  return f;
}

} // namespace

// Accepts "3", "-3/4" and terminating decimals such as "0.125" or "-2.5".
// Leading zeros are stripped because cpp_int reads them as octal.
Rational parse_exact(std::string s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.erase(0, 1);
  }
  auto digits_only = [](const std::string &t) {
    return !t.empty() && t.find_first_not_of("0123456789") == std::string::npos;
  };
  auto to_int = [](std::string t) {
    t.erase(0, std::min(t.find_first_not_of('0'), t.size() - 1));
    return BigInt(t);
  };
  Rational r;
  auto slash = s.find('/'), dot = s.find('.');
  if (slash != std::string::npos) {
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    if (!digits_only(a) || !digits_only(b) || to_int(b) == 0) throw std::invalid_argument("malformed rational '" + s + "'");
    r = Rational(to_int(a), to_int(b));
  } else if (dot != std::string::npos) {
    std::string a = s.substr(0, dot), b = s.substr(dot + 1);
    if (a.empty()) a = "0";
    if (!digits_only(a) || (!b.empty() && !digits_only(b))) throw std::invalid_argument("malformed decimal '" + s + "'");
    r = Rational(to_int(a + b), boost::multiprecision::pow(BigInt(10), unsigned(b.size())));
  } else {
    if (!digits_only(s)) throw std::invalid_argument("malformed integer '" + s + "'");
    r = Rational(to_int(s));
  }
  return neg ? Rational(-r) : r;
}


json form_to_json(const QForm &f) {
  return to_json_impl(f, [](const Rational &c) { return c.str(); });
}

json form_to_json(const Form &f) {
  return to_json_impl(f, [](double c) { return c; });
}

QForm exact_form_from_json(const json &j) {
  return from_json_impl<Rational>(j, [](const json &c) {
    if (c.is_string()) {
      std::string s = c.get<std::string>();
      return parse_exact(s);
    }
    if (c.is_number_integer()) return Rational(c.get<long long>());
    throw std::invalid_argument("exact coefficients must be strings or integers");
  });
}

Form double_form_from_json(const json &j) {
  return from_json_impl<double>(j, [](const json &c) {
    if (c.is_string()) return parse_exact(c.get<std::string>()).convert_to<double>();
    return c.get<double>();
  });
}

} // namespace g2lab
