#include "finsler/report.hpp"

#include <sstream>

namespace finsler {

namespace {

nlohmann::json record_to_json(const PointRecord& r) {
  nlohmann::json jx = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.x.size(); ++i) jx.push_back(r.x[i]);
  return nlohmann::json{{"x", jx},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"abs", r.abs_residual},
                        {"rel", r.rel_residual}};
}

PointRecord record_from_json(const nlohmann::json& j) {
  PointRecord r;
  const auto& jx = j.at("x");
  r.x = Vec(jx.size());
  for (std::size_t i = 0; i < jx.size(); ++i) r.x[static_cast<Eigen::Index>(i)] = jx[i].get<double>();
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.abs_residual = j.at("abs").get<double>();
  r.rel_residual = j.at("rel").get<double>();
  return r;
}

}  // namespace

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["check"] = check;
  j["norm"] = norm_spec;
  j["p"] = p;
  j["n"] = n;
  j["samples"] = sample_count;
  j["max_abs_residual"] = max_abs_residual;
  j["max_rel_residual"] = max_rel_residual;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["seed"] = seed;
  j["fd_step"] = fd_step;
  j["details"] = details;
  nlohmann::json jw = nlohmann::json::array();
  for (const auto& r : worst) jw.push_back(record_to_json(r));
  j["worst"] = jw;
  return j;
}

VerificationReport VerificationReport::from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.check = j.at("check").get<std::string>();
  r.norm_spec = j.at("norm").get<std::string>();
  r.p = j.at("p").get<double>();
  r.n = j.at("n").get<int>();
  r.sample_count = j.at("samples").get<int>();
  r.max_abs_residual = j.at("max_abs_residual").get<double>();
  r.max_rel_residual = j.at("max_rel_residual").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.fd_step = j.at("fd_step").get<double>();
  r.details = j.at("details").get<std::map<std::string, double>>();
  for (const auto& jr : j.at("worst")) r.worst.push_back(record_from_json(jr));
  return r;
}

std::string VerificationReport::to_csv() const {
  const std::vector<PointRecord>& rows = points.empty() ? worst : points;
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < n; ++i) out << "x" << i << ",";
  out << "lhs,rhs,residual\n";
  for (const auto& r : rows) {
    for (Eigen::Index i = 0; i < r.x.size(); ++i) out << r.x[i] << ",";
    out << r.lhs << "," << r.rhs << "," << (r.lhs - r.rhs) << "\n";
  }
  return out.str();
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  out.precision(6);
  out << "check: " << check << "\n"
      << "norm:  " << norm_spec << "   n=" << n << "  p=" << p << "\n"
      << "samples: " << sample_count << "   seed: " << seed << "   fd_step: " << fd_step << "\n"
      << "max |residual|: " << max_abs_residual
      << "   max relative: " << max_rel_residual << "   tolerance: " << tolerance << "\n";
  if (!details.empty()) {
    out << "details:";
    for (const auto& [k, v] : details) out << "  " << k << "=" << v;
    out << "\n";
  }
  if (!worst.empty()) {
    out << "worst offenders (x | lhs | rhs | rel):\n";
    for (const auto& r : worst) {
      out << "  [";
      for (Eigen::Index i = 0; i < r.x.size(); ++i)
        out << (i ? ", " : "") << r.x[i];
      out << "]  " << r.lhs << "  " << r.rhs << "  " << r.rel_residual << "\n";
    }
  }
  out << "result: " << (pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace finsler
