#pragma once

// JSON/CSV serialization of command results.

#include "convhom/config.hpp"
#include "convhom/problem.hpp"
#include "convhom/rate_certification.hpp"
#include "convhom/selfcheck.hpp"
#include "convhom/threshold_analysis.hpp"

#include <json.hpp>

#include <string>

namespace convhom::report {

using json = nlohmann::json;

json checked(double value, const char* relation, double tolerance, bool pass);

json header(const std::string& command, const RunConfig& cfg);
json effective(const Problem& pb, const RunConfig& cfg);
json gap(const SpectralGap& g);
json ledger(const ConstantsLedger& c);
json threshold(const Problem& pb, const ThresholdContext& ctx, const ThresholdReport& tr);
json rate(const RateReport& rr, const SweepConfig& sweep);
json selfcheck(const SelfcheckReport& rep);

std::string threshold_csv(const ThresholdReport& tr);
std::string rate_csv(const RateReport& rr);

/// %.17g, with nan/inf spelled out.
std::string fmt(double x);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);

}  // namespace convhom::report
