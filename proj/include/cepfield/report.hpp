#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cepfield/diagnostics.hpp"
#include "cepfield/estimation.hpp"

namespace cepfield {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);
/// 16 hex digits of fnv1a(text).
std::string config_hash(std::string_view text);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// "theta[j,k]" labels of the free coefficients in canonical order.
std::vector<std::string> theta_names(const CepstralGrid& grid);

/// Estimate and standard-error rows labelled theta_1, theta_2, ... in vec
/// order of the display matrix, followed by the regression coefficients.
std::string estimates_table(const FitResult& fit, const std::vector<std::string>& beta_names);

struct CriteriaRow {
  std::string label;
  InfoCriteria ic;
};
/// -log L, AIC, BIC and HQ per model; the minimum of each column is starred.
std::string criteria_table(const std::vector<CriteriaRow>& rows);

std::string fit_report(const FitResult& fit, const LatticeSample& sample, const InfoCriteria& ic,
                       const std::optional<MoranResult>& moran);

nlohmann::json to_json(const FitResult& fit, const LatticeSample& sample, const InfoCriteria& ic,
                       const std::optional<MoranResult>& moran);

/// Posterior draws with a header of parameter names.
std::string draws_csv(const Eigen::MatrixXd& draws, const std::vector<std::string>& names);

}  // namespace cepfield
