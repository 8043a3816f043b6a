#pragma once

// JSON and CSV forms of the computed reports. Every floating-point number is
// rounded to 12 significant digits before it is written, so output is
// byte-stable and parsing it back reproduces the written values exactly.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgs/graph.hpp"
#include "qgs/hill.hpp"
#include "qgs/oracle.hpp"
#include "qgs/spectrum.hpp"

namespace qgs {

/// x rounded to 12 significant digits.
double round12(double x);
/// "%.12g".
std::string format_number(double x);

std::string band_structure_to_json(const BandStructure& bs);
BandStructure band_structure_from_json(std::string_view text);

std::string spectrum_report_to_json(const SpectrumReport& report);
/// Throws ParseError naming the offending field.
SpectrumReport spectrum_report_from_json(std::string_view text);

std::string comparison_to_json(const ComparisonReport& cmp, const std::optional<ConvergenceDiagnostic>& conv,
                               const SpectrumReport& refined);

std::string discrete_spectrum_to_json(const std::vector<EigenvalueCluster>& spectrum);
std::string dirichlet_to_json(const std::vector<double>& mu);
std::string sweep_to_json(const std::vector<double>& z, const std::vector<double>& eta);

std::string sweep_to_csv(const std::vector<double>& z, const std::vector<double>& eta);
std::string dirichlet_to_csv(const std::vector<double>& mu);
std::string band_structure_to_csv(const BandStructure& bs);
std::string discrete_spectrum_to_csv(const std::vector<EigenvalueCluster>& spectrum);
/// One row per point, interval, Sigma_0 entry and gap:
/// kind,lower,upper,multiplicity,lambda,band,label
std::string spectrum_report_to_csv(const SpectrumReport& report);
std::string comparison_to_csv(const ComparisonReport& cmp);

}  // namespace qgs
