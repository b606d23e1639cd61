#include "qxlab/decomposition.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace qxlab {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
  std::size_t i = 0;
  auto read_int = [&]() -> BigInt {
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      neg = text[i] == '-';
      ++i;
    }
    const std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
      ++i;
    if (i == start)
      throw std::invalid_argument("parse_rational: malformed '" + text + "'");
    BigInt v(text.substr(start, i - start));
    return neg ? BigInt(-v) : v;
  };
  const BigInt num = read_int();
  if (i == text.size()) return Rational(num);
  if (text[i] != '/')
    throw std::invalid_argument("parse_rational: malformed '" + text + "'");
  ++i;
  const BigInt den = read_int();
  if (i != text.size())
    throw std::invalid_argument("parse_rational: malformed '" + text + "'");
  if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
  return Rational(num, den);
}

std::string rational_to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string kind_to_string(SummandKind k) {
  switch (k) {
    case SummandKind::diffuse_abelian: return "diffuse_abelian";
    case SummandKind::matrix: return "matrix";
    case SummandKind::diffuse_matrix: return "diffuse_matrix";
    case SummandKind::ii1_factor: return "II1_factor";
  }
  throw std::logic_error("kind_to_string: bad kind");
}

SummandKind kind_from_string(const std::string& s) {
  if (s == "diffuse_abelian") return SummandKind::diffuse_abelian;
  if (s == "matrix") return SummandKind::matrix;
  if (s == "diffuse_matrix") return SummandKind::diffuse_matrix;
  if (s == "II1_factor") return SummandKind::ii1_factor;
  throw std::invalid_argument("unknown summand kind '" + s + "'");
}

Rational total_weight(const Decomposition& dec) {
  Rational total = 0;
  for (const auto& s : dec.summands) total += s.weight * s.copies;
  return total;
}

bool is_type_one(const Decomposition& dec) {
  for (const auto& s : dec.summands)
    if (s.kind == SummandKind::ii1_factor) return false;
  return true;
}

Decomposition normalize(const Decomposition& dec) {
  Rational diffuse = 0;
  bool has_diffuse = false;
  std::map<Rational, int> one_dim;                    // weight -> copies
  std::vector<Summand> big;                           // dim >= 2 matrix
  std::vector<Summand> ii1;

  for (const auto& s : dec.summands) {
    if (s.weight <= 0) throw std::invalid_argument("normalize: nonpositive weight");
    if (s.copies < 1) throw std::invalid_argument("normalize: copies < 1");
    switch (s.kind) {
      case SummandKind::diffuse_abelian:
        if (s.dim != 1)
          throw std::invalid_argument("normalize: diffuse_abelian must have dim 1");
        diffuse += s.weight * s.copies;
        has_diffuse = true;
        break;
      case SummandKind::diffuse_matrix:
        if (s.dim < 1) throw std::invalid_argument("normalize: dim < 1");
        if (s.dim == 1) {  // M_1 tensor L^inf is just L^inf
          diffuse += s.weight * s.copies;
          has_diffuse = true;
        } else {
          for (int c = 0; c < s.copies; ++c) {
            Summand t = s;
            t.copies = 1;
            big.push_back(t);
          }
        }
        break;
      case SummandKind::matrix:
        if (s.dim < 1) throw std::invalid_argument("normalize: dim < 1");
        if (s.dim == 1) {
          one_dim[s.weight] += s.copies;
        } else {
          for (int c = 0; c < s.copies; ++c) {
            Summand t = s;
            t.copies = 1;
            big.push_back(t);
          }
        }
        break;
      case SummandKind::ii1_factor:
        for (int c = 0; c < s.copies; ++c) {
          Summand t = s;
          t.copies = 1;
          t.dim = 1;
          ii1.push_back(t);
        }
        break;
    }
  }

  if (total_weight(dec) != 1)
    throw std::invalid_argument("normalize: weights must sum to 1 exactly");

  Decomposition out;
  if (has_diffuse) {
    Summand s;
    s.kind = SummandKind::diffuse_abelian;
    s.dim = 1;
    s.weight = diffuse;
    out.summands.push_back(s);
  }
  for (auto it = one_dim.rbegin(); it != one_dim.rend(); ++it) {
    Summand s;
    s.kind = SummandKind::matrix;
    s.dim = 1;
    s.weight = it->first;
    s.copies = it->second;
    out.summands.push_back(s);
  }
  std::stable_sort(big.begin(), big.end(), [](const Summand& a, const Summand& b) {
    if (a.dim != b.dim) return a.dim > b.dim;
    return a.weight > b.weight;
  });
  out.summands.insert(out.summands.end(), big.begin(), big.end());
  std::stable_sort(ii1.begin(), ii1.end(), [](const Summand& a, const Summand& b) {
    return a.weight > b.weight;
  });
  out.summands.insert(out.summands.end(), ii1.begin(), ii1.end());
  return out;
}

Decomposition decomposition_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("decomposition: bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("summands") || !j["summands"].is_array())
    throw std::invalid_argument("decomposition: expected {\"summands\": [...]}");
  Decomposition dec;
  for (const auto& js : j["summands"]) {
    Summand s;
    if (!js.contains("kind"))
      throw std::invalid_argument("decomposition: summand without kind");
    s.kind = kind_from_string(js["kind"].get<std::string>());
    s.dim = js.value("dim", 1);
    if (!js.contains("weight"))
      throw std::invalid_argument("decomposition: summand without weight");
    if (js["weight"].is_string())
      s.weight = parse_rational(js["weight"].get<std::string>());
    else if (js["weight"].is_number_integer())
      s.weight = Rational(js["weight"].get<long long>());
    else
      throw std::invalid_argument(
          "decomposition: weight must be an exact fraction string");
    s.copies = js.value("copies", 1);
    if (js.contains("m2_embeddable"))
      s.m2_embeddable = js["m2_embeddable"].get<bool>();
    dec.summands.push_back(s);
  }
  return dec;
}

std::string decomposition_to_json_text(const Decomposition& dec) {
  nlohmann::json j;
  j["summands"] = nlohmann::json::array();
  for (const auto& s : dec.summands) {
    nlohmann::json js;
    js["kind"] = kind_to_string(s.kind);
    js["dim"] = s.dim;
    js["weight"] = rational_to_string(s.weight);
    if (s.copies != 1) js["copies"] = s.copies;
    if (s.m2_embeddable) js["m2_embeddable"] = *s.m2_embeddable;
    j["summands"].push_back(js);
  }
  return j.dump();
}

}  // namespace qxlab
