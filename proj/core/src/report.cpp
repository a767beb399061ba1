#include "pmlrate/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace pml {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << to_string(r.axis) << ',' << format_double(r.value) << ',' << format_double(r.report.rel_L2) << ','
       << format_double(r.report.rel_H1) << ',' << format_double(r.report.abs_H1) << ','
       << format_double(r.report.predicted_bound) << ',' << format_double(r.report.ratio) << ',' << r.flag << '\n';
  }
  return os.str();
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

std::string sweep_json(std::span<const SweepRow> rows, const std::optional<FitResult>& fit) {
  nlohmann::ordered_json doc;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["axis"] = to_string(r.axis);
    j["value"] = number(r.value);
    j["rel_L2"] = number(r.report.rel_L2);
    j["rel_H1"] = number(r.report.rel_H1);
    j["abs_H1"] = number(r.report.abs_H1);
    j["predicted_bound"] = number(r.report.predicted_bound);
    j["ratio"] = number(r.report.ratio);
    j["flag"] = r.flag;
    doc["rows"].push_back(std::move(j));
  }
  if (fit) {
    nlohmann::ordered_json f;
    f["slope"] = number(fit->slope);
    f["intercept"] = number(fit->intercept);
    f["residual_rms"] = number(fit->residual_rms);
    f["predicted_slope"] = number(fit->predicted_slope);
    f["used_points"] = fit->used_points;
    f["verdict"] = to_string(fit->verdict);
    doc["fit"] = std::move(f);
  }
  return doc.dump(2) + "\n";
}

}  // namespace pml
