#include "divtower/certificates.hpp"

#include <cmath>

#include <json.hpp>

namespace divtower {

static double to_double(const BigInt& v) { return v.convert_to<double>(); }

CertificateSequence phi_certificates(unsigned n_max, unsigned phi_power, unsigned palindrome_max) {
  if (n_max < 1) throw std::invalid_argument("certificate sequence needs n_max >= 1");
  const FreeEndo phi = power(phi_endo(), phi_power);
  CertificateSequence seq;
  seq.family = "phi";
  seq.phi_power = phi_power;
  for (unsigned n = 1; n <= n_max; ++n) {
    IterImage it = iterate(phi, Letter{0, 1}, n);
    CertificateElement e;
    e.index = n;
    e.r_length = it.exact_length;
    e.t_length = 2 * static_cast<std::int64_t>(n) + 1;
    e.t_witness = "t^" + std::to_string(n) + " d1 t^-" + std::to_string(n);
    if (n <= palindrome_max) e.palindrome = is_palindrome(expand(it));
    seq.elems.push_back(std::move(e));
  }
  return seq;
}

CertificateSequence snowflake_certificates(unsigned m_param, unsigned n_param, unsigned count,
                                           double c2) {
  if (m_param < 2 || n_param < 1) throw std::invalid_argument("snowflake parameters out of range");
  CertificateSequence seq;
  seq.family = "snowflake";
  for (unsigned k = 1; k <= count; ++k) {
    CertificateElement e;
    e.index = k;
    e.r_length = iterate(phi_endo(), Letter{0, 1}, n_param * k).exact_length;
    e.t_length = static_cast<std::int64_t>(std::ceil(c2 * std::pow(double(m_param), double(k))));
    seq.elems.push_back(std::move(e));
  }
  return seq;
}

std::string to_string(Tier t) {
  switch (t) {
    case Tier::Table: return "table";
    case Tier::Surrogate: return "surrogate";
    case Tier::Unchecked: return "unchecked";
  }
  return "?";
}

CertificateReport verify_certificate(const CertificateSequence& seq, double C,
                                     const std::vector<std::int64_t>& normalized) {
  if (!(C > 1)) throw std::invalid_argument("certificate constant must exceed 1");
  if (seq.elems.empty()) throw std::invalid_argument("empty certificate sequence");
  CertificateReport rep;
  rep.C = C;
  rep.condition1 = rep.condition2 = rep.condition3 = rep.palindromic = true;
  const double table_end = normalized.empty() ? -1 : static_cast<double>(normalized.size() - 1);
  for (std::size_t i = 0; i < seq.elems.size(); ++i) {
    const auto& e = seq.elems[i];
    ConditionRow row;
    row.index = e.index;
    if (i + 1 < seq.elems.size()) {
      const BigInt& next = seq.elems[i + 1].r_length;
      row.growth = next > e.r_length;
      row.ratio = to_double(next) <= C * to_double(e.r_length);
    }
    const double x = static_cast<double>(e.t_length) / C;
    const double rhs = C * to_double(e.r_length);
    if (x <= table_end) {
      row.tier = Tier::Table;
      row.dist_lhs = interpolate(normalized, x);
      row.dist = row.dist_lhs <= rhs;
    } else if (seq.family == "phi") {
      row.tier = Tier::Surrogate;
      row.dist_lhs = std::pow(2.0, x);
      row.dist = row.dist_lhs <= to_double(e.r_length);
    }
    row.palindrome = e.palindrome;
    rep.condition1 = rep.condition1 && row.growth;
    rep.condition2 = rep.condition2 && row.ratio;
    rep.condition3 = rep.condition3 && row.dist;
    if (e.palindrome) rep.palindromic = rep.palindromic && *e.palindrome;
    rep.rows.push_back(row);
  }
  return rep;
}

DerivedConstants derived_constants(const CertificateSequence& seq, const CertificateReport& rep) {
  if (!rep.passed()) throw std::invalid_argument("certificate sequence is not verified");
  DerivedConstants k;
  k.C = rep.C;
  k.D = rep.C * rep.C * rep.C;
  k.r0 = rep.C * to_double(seq.elems.front().r_length);
  return k;
}

Selection select_certificate(const CertificateSequence& seq, const DerivedConstants& k, double r,
                             const InverseDistortion& f) {
  if (r < k.r0) throw std::invalid_argument("radius below r0");
  const double g1 = to_double(seq.elems.front().r_length);
  Selection s;
  s.bracket = 1;
  double lo = k.C * g1;
  while (lo * k.C <= r) {
    lo *= k.C;
    ++s.bracket;
  }
  const double low = std::pow(k.C, double(s.bracket) - 2) * g1;
  const double high = std::pow(k.C, double(s.bracket) - 1) * g1;
  bool found = false;
  for (std::size_t i = 0; i < seq.elems.size(); ++i) {
    const double len = to_double(seq.elems[i].r_length);
    if (len >= low && len <= high) {
      s.position = i;
      found = true;
    }
  }
  if (!found) throw std::out_of_range("certificate prefix too short for this radius");
  const auto& u = seq.elems[s.position];
  s.index = u.index;
  s.r_length = to_double(u.r_length);
  s.t_length = u.t_length;
  s.lower_ok = s.r_length >= r / k.D;
  s.upper_ok = s.r_length <= r;
  s.t_ok = static_cast<double>(s.t_length) <= k.D * f(r);
  return s;
}

double snowflake_beta(unsigned m_param, unsigned n_param) {
  if (m_param < 2 || n_param < 1) throw std::invalid_argument("snowflake parameters out of range");
  return n_param * std::log(1 + std::sqrt(2.0)) / std::log(double(m_param));
}

double divergence_exponent(int m, double beta) { return m - 1 + 1 / beta; }

ExponentReport snowflake_exponent(unsigned m_param, unsigned n_param, int levels) {
  ExponentReport r;
  r.m_param = m_param;
  r.n_param = n_param;
  r.beta = snowflake_beta(m_param, n_param);
  r.beta_valid = r.beta >= 1;
  if (!r.beta_valid) r.warning = "beta < 1: the distortion must dominate the identity";
  for (int m = 1; m <= levels; ++m)
    r.alpha.push_back(r.beta_valid ? divergence_exponent(m, r.beta) : std::nan(""));
  return r;
}

std::vector<std::pair<double, double>> uncovered(const std::vector<double>& values, double lo,
                                                double hi, double step) {
  const auto cells = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<bool> hit(cells, false);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto k = static_cast<std::size_t>(std::floor((v - lo) / step));
    if (k >= cells) k = cells - 1;
    hit[k] = true;
  }
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < cells; ++k)
    if (!hit[k]) out.emplace_back(lo + step * double(k), lo + step * double(k + 1));
  return out;
}

std::vector<double> beta_values(unsigned mp_max, unsigned np_max) {
  std::vector<double> out;
  for (unsigned mp = 2; mp <= mp_max; ++mp)
    for (unsigned np = 1; np <= np_max; ++np) {
      double b = snowflake_beta(mp, np);
      if (b >= 1) out.push_back(b);
    }
  return out;
}

std::vector<double> alpha_values(unsigned mp_max, unsigned np_max, int max_level) {
  std::vector<double> out;
  for (double b : beta_values(mp_max, np_max))
    for (int m = 2; m <= max_level; ++m) out.push_back(divergence_exponent(m, b));
  return out;
}

std::string certificate_json(const CertificateSequence& seq, const CertificateReport& rep) {
  nlohmann::ordered_json j;
  j["family"] = seq.family;
  j["phi_power"] = seq.phi_power;
  j["C"] = rep.C;
  j["conditions"] = {{"growth", rep.condition1},
                     {"ratio", rep.condition2},
                     {"distortion", rep.condition3},
                     {"palindromic", rep.palindromic}};
  auto& rows = j["elements"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < seq.elems.size(); ++i) {
    const auto& e = seq.elems[i];
    const auto& r = rep.rows.at(i);
    nlohmann::ordered_json row;
    row["index"] = e.index;
    row["r_length"] = e.r_length.str();
    row["t_length"] = e.t_length;
    if (!e.t_witness.empty()) row["t_witness"] = e.t_witness;
    row["growth"] = r.growth;
    row["ratio"] = r.ratio;
    row["distortion"] = r.dist;
    row["tier"] = to_string(r.tier);
    if (e.palindrome) row["palindrome"] = *e.palindrome;
    rows.push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace divtower
