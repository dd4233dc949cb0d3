#include "finsler/parse.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "finsler/errors.hpp"
#include "finsler/spd.hpp"

namespace finsler {

namespace {

void skip_ws(const std::string& s, std::size_t& pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
}

double parse_number(const std::string& s, std::size_t& pos) {
  const char* begin = s.c_str() + pos;
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw ParseError("expected a number", pos);
  pos += static_cast<std::size_t>(end - begin);
  return v;
}

Mat parse_matrix_inline(const std::string& text) {
  std::vector<std::vector<double>> rows(1);
  std::size_t pos = 0;
  for (;;) {
    skip_ws(text, pos);
    rows.back().push_back(parse_number(text, pos));
    skip_ws(text, pos);
    if (pos >= text.size()) break;
    if (text[pos] == ',') {
      ++pos;
    } else if (text[pos] == ';') {
      ++pos;
      rows.emplace_back();
    } else {
      throw ParseError("expected ',' or ';' in matrix", pos);
    }
  }
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw ParseError("ragged matrix rows", text.size());
  Mat m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

Mat parse_matrix_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("invalid matrix JSON", e.byte);
  }
  if (!j.is_array() || j.empty()) throw ParseError("matrix JSON must be an array of rows", 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ParseError("matrix JSON rows must be non-empty arrays", 0);
  Mat m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ParseError("ragged matrix rows", 0);
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw ParseError("matrix entries must be numbers", 0);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

}  // namespace

Mat parse_matrix(const std::string& text) {
  std::size_t pos = 0;
  skip_ws(text, pos);
  if (pos >= text.size()) throw ParseError("empty matrix", pos);
  return text[pos] == '[' ? parse_matrix_json(text) : parse_matrix_inline(text);
}

Norm parse_norm(const std::string& spec, int n_hint) {
  if (spec.rfind("quad:", 0) == 0)
    return Norm::quadratic(validate_spd(parse_matrix(spec.substr(5))));
  if (spec.rfind("q:", 0) == 0) {
    std::size_t pos = 0;
    const std::string body = spec.substr(2);
    const double q = parse_number(body, pos);
    skip_ws(body, pos);
    if (pos != body.size()) throw ParseError("trailing characters in q-norm spec", pos + 2);
    return Norm::qnorm(q, n_hint);
  }
  throw ParseError("norm spec must start with 'quad:' or 'q:'", 0);
}

std::string norm_to_spec(const Norm& h) {
  if (h.is_quadratic()) {
    const Mat& m = h.matrix().matrix();
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return "quad:" + rows.dump();
  }
  return "q:" + nlohmann::json(h.exponent()).dump();
}

Polynomial parse_polynomial(const std::string& text, int n) {
  Polynomial poly(n);
  std::size_t pos = 0;
  skip_ws(text, pos);
  if (pos >= text.size()) throw ParseError("empty polynomial", pos);
  bool first = true;
  while (pos < text.size()) {
    double sign = 1.0;
    skip_ws(text, pos);
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1.0 : 1.0;
      ++pos;
    } else if (!first) {
      throw ParseError("expected '+' or '-' between terms", pos);
    }
    first = false;
    skip_ws(text, pos);
    // one term: factors joined by '*'; factors are numbers or y<k>[^e]
    double coeff = sign;
    std::vector<int> exps(n, 0);
    bool saw_factor = false;
    for (;;) {
      skip_ws(text, pos);
      if (pos < text.size() && (text[pos] == 'y' || text[pos] == 'Y')) {
        ++pos;
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
          throw ParseError("expected variable index after 'y'", pos);
        std::size_t idx = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
          idx = idx * 10 + static_cast<std::size_t>(text[pos++] - '0');
        if (idx < 1 || static_cast<int>(idx) > n)
          throw ParseError("variable index out of range 1..n", pos);
        int e = 1;
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw ParseError("expected a non-negative integer exponent", pos);
          e = 0;
          while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            e = e * 10 + (text[pos++] - '0');
        }
        exps[idx - 1] += e;
      } else {
        coeff *= parse_number(text, pos);
      }
      saw_factor = true;
      skip_ws(text, pos);
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        continue;
      }
      break;
    }
    if (!saw_factor) throw ParseError("empty term", pos);
    poly.add_term(exps, coeff);
  }
  return poly;
}

ScalarField parse_field(const std::string& spec, int n, const Norm* norm) {
  if (spec.rfind("poly:", 0) == 0) return parse_polynomial(spec.substr(5), n).field();
  if (spec.rfind("constant:", 0) == 0) {
    const std::string body = spec.substr(9);
    std::size_t pos = 0;
    const double c = parse_number(body, pos);
    skip_ws(body, pos);
    if (pos != body.size()) throw ParseError("trailing characters in constant spec", pos + 9);
    return make_constant(c, n);
  }
  if (spec.rfind("harmonic-pullback:", 0) == 0) {
    if (!norm || !norm->is_quadratic())
      throw UnsupportedNorm("harmonic-pullback field needs a quadratic norm");
    const Polynomial hp = parse_polynomial(spec.substr(18), n);
    return make_harmonic_pullback(hp, sqrt_spd(norm->matrix()));
  }
  if (spec == "liouville") {
    if (!norm || !norm->is_quadratic())
      throw UnsupportedNorm("liouville field needs a quadratic norm");
    return make_liouville_profile(dual_norm(*norm));
  }
  throw ParseError("unknown field spec (expected poly:, harmonic-pullback:, liouville, constant:)",
                   0);
}

Vec parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::size_t pos = 0;
  for (;;) {
    skip_ws(text, pos);
    vals.push_back(parse_number(text, pos));
    skip_ws(text, pos);
    if (pos >= text.size()) break;
    if (text[pos] != ',') throw ParseError("expected ',' in vector", pos);
    ++pos;
  }
  Vec v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

}  // namespace finsler
