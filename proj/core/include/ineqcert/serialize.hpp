#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "ineqcert/certify.hpp"
#include "ineqcert/lyapunov.hpp"
#include "ineqcert/measure.hpp"
#include "ineqcert/verify.hpp"

namespace ineqcert {

/// Version of the JSON report layout.
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Descriptor of a grid: potential source and constants, L, n, x0, log Z.
Json to_json(const GridMeasure& mu);
/// Node coordinates and weights, one node per line.
void write_grid_csv(std::ostream& os, const GridMeasure& mu);

Json to_json(const AuditDomain& audit);
Json to_json(const LyapunovCertificate& cert);
Json to_json(const ChainStep& step);
Json to_json(const InequalityCertificate& cert);
Json to_json(const EmpiricalEstimate& est);
Json to_json(const CheckReport& report);
Json to_json(const MonotonicityReport& report);
Json to_json(const ConcentrationReport& report);
Json to_json(const SoundnessReport& report);

/// Rebuilds a certificate's constant and chain (assumptions are not restored).
InequalityCertificate certificate_from_json(const Json& j);

/// Table of (parameter, lhs, rhs, slack) in whitespace-separated columns,
/// readable by gnuplot.
void write_check_table(std::ostream& os, const CheckReport& report);

}  // namespace ineqcert
