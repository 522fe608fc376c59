#pragma once

#include <json.hpp>
#include <ostream>
#include <span>
#include <string>

#include "mspacings/spacings.hpp"
#include "mspacings/stest.hpp"
#include "mspacings/verify.hpp"

namespace mspacings {

using Json = nlohmann::ordered_json;

Json to_json(const SampleDesign& design);
Json to_json(const verify::SampleSummary& summary);
// Config echo; the worker count is left out because it never changes results.
Json to_json(const verify::ExperimentConfig& config);
// Wall-clock time is left out so reports are byte-identical across runs.
Json to_json(const verify::MCReport& report);
Json to_json(const stest::TestResult& result);

// Round-trip formatting with 17 significant digits.
std::string format_real(double x);

// Writes a header line and the rows of `columns`, which must be equally long.
void write_csv(std::ostream& out, std::span<const std::string> header,
               std::span<const std::vector<double>> columns);

}  // namespace mspacings
