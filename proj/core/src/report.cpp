#include "metaband/report.hpp"

#include <cmath>
#include <json.hpp>

namespace metaband {

using nlohmann::json;

namespace {

json number_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

}  // namespace

std::string coefficients_json(const CoefficientReport& report, const std::optional<DecScan>& scan) {
  std::vector<std::size_t> witness;
  for (std::size_t i = 0; i < kMaxTasks; ++i) {
    if (report.witness_subset >> i & 1U) witness.push_back(i);
  }
  json j{{"lambda", report.lambda},
         {"star_lambda", report.star_lambda},
         {"C", number_or_inf(report.c_det)},
         {"C_rand", number_or_inf(report.c_rand)},
         {"C_star", number_or_inf(report.c_star)},
         {"witness_subset", witness},
         {"checks",
          {{"C_rand_le_C", report.rand_le_det},
           {"C_le_C_star", report.det_le_star},
           {"C_star_le_C_log", report.star_le_det_log}}}};
  if (scan) {
    json rows = json::array();
    for (const auto& r : scan->rows) rows.push_back({{"gamma", r.gamma}, {"dec", r.dec}, {"above_3eps", r.above}});
    j["dec"] = {{"epsilon", scan->epsilon}, {"lambda", scan->lambda}, {"rows", rows}};
    j["dec"]["crossover"] = scan->crossover ? json(*scan->crossover) : json(nullptr);
  }
  return j.dump(2) + "\n";
}

}  // namespace metaband
