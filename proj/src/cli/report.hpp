#pragma once

// JSON and CSV serialization for the commands.

#include "beamide/cli.hpp"

#include <string>

namespace beamide::cli {

using ojson = nlohmann::ordered_json;

ojson to_json(const CheckResult& c);
ojson to_json(const VerificationReport& r);
ojson to_json(const ContractionCertificate& c, const std::optional<StatedClaim>& claim);
ojson to_json(const SignValidation& v, GreenFormula formula);
ojson to_json(const SignCertificate& c);
ojson to_json(const IterationReport& r);
ojson vector_json(const GridFunction& f);
/// Values at interior nodes, null at the excluded ones.
ojson interior_json(const InteriorValues& v);
ojson problem_json(const RunConfig& cfg);
ojson problem_json(const LinearConfig& cfg);

/// Throws std::logic_error naming the first non-finite number.
void require_finite(const ojson& j, const std::string& path = "");
std::string dump(const ojson& j);

std::string chains_csv(const ExtremalResult& r);
std::string solution_csv(const GridFunction& y_min, const GridFunction& y_max, const InteriorValues& res_min,
                         const InteriorValues& res_max);
std::string reconstructed_csv(const GridFunction& u);
std::string linear_csv(const GridFunction& picard, const GridFunction& resolvent, const GridFunction& nystrom,
                       const std::optional<GridFunction>& exact);

}  // namespace beamide::cli
