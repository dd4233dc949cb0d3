#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/types.hpp"

namespace finsler {

/// One evaluated sample: both sides of the identity under test and the
/// residuals.
struct PointRecord {
  Vec x;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
};

/// |lhs - rhs| / (max(|lhs|, |rhs|) + 1e-12). The floor keeps the quotient
/// finite where both sides vanish exactly.
inline double relative_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / (std::max(std::abs(lhs), std::abs(rhs)) + 1e-12);
}

/// Structured outcome of one identity check. Serializes to a stable JSON
/// object ("schema": 1) that round-trips losslessly; the full per-point dump
/// feeds the CSV format and is not part of the JSON.
struct VerificationReport {
  std::string check;
  std::string norm_spec;
  double p = 0.0;
  int n = 0;
  int sample_count = 0;
  double max_abs_residual = 0.0;
  double max_rel_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<PointRecord> worst;  // up to 10, largest relative residual first
  std::uint64_t seed = 0;
  double fd_step = 0.0;
  std::map<std::string, double> details;
  std::vector<PointRecord> points;  // full dump, populated on request

  nlohmann::json to_json() const;
  static VerificationReport from_json(const nlohmann::json& j);
  std::string to_csv() const;
  std::string to_text() const;
};

/// Gathers per-point residuals and finalizes the aggregate fields of a
/// report. Checkers push records in sample order; aggregation is a
/// single-owner reduction.
class ResidualAccumulator {
 public:
  void add(Vec x, double lhs, double rhs) {
    PointRecord r;
    r.x = std::move(x);
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_residual = std::abs(lhs - rhs);
    r.rel_residual = relative_residual(lhs, rhs);
    records_.push_back(std::move(r));
  }

  /// For checkers with their own relative-residual convention.
  void add_record(PointRecord r) { records_.push_back(std::move(r)); }

  double max_abs() const {
    double m = 0.0;
    for (const auto& r : records_) m = std::max(m, r.abs_residual);
    return m;
  }

  double max_rel() const {
    double m = 0.0;
    for (const auto& r : records_) m = std::max(m, r.rel_residual);
    return m;
  }

  std::size_t size() const { return records_.size(); }

  /// Writes sample_count, residual maxima, the worst offenders, and
  /// optionally the full per-point dump into the report.
  void finalize(VerificationReport& report, bool keep_points) const {
    report.sample_count = static_cast<int>(records_.size());
    report.max_abs_residual = max_abs();
    report.max_rel_residual = max_rel();
    std::vector<PointRecord> sorted = records_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const PointRecord& a, const PointRecord& b) {
      return a.rel_residual > b.rel_residual;
    });
    if (sorted.size() > 10) sorted.resize(10);
    report.worst = std::move(sorted);
    if (keep_points) report.points = records_;
  }

 private:
  std::vector<PointRecord> records_;
};

}  // namespace finsler
