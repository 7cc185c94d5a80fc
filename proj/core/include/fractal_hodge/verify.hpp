#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fractal_hodge/gasket.hpp"

namespace fractal_hodge {

enum class CheckStatus { pass, fail, erratum };

std::string_view to_string(CheckStatus status);

struct Check {
  std::string id;
  std::string description;
  CheckStatus status = CheckStatus::pass;
  std::string lhs;
  std::string rhs;
  /// 0 for exact comparisons.
  double tolerance = 0;
  /// Source of the printed value for erratum entries.
  std::string citation;
};

struct VerificationReport {
  std::string suite;
  std::vector<Check> checks;
  std::string version;
  std::uint64_t seed = 0;
  double seconds = 0;

  /// Throws DomainError on a duplicate id.
  void add(Check check);
  std::size_t failures() const;
  std::size_t errata() const;
  bool passed() const { return failures() == 0; }
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  std::uint64_t simplex_cap = kDefaultSimplexCap;
  /// Sampling depth of the d_1 delta_2 checks on non-constant functions.
  int identity_depth = 10;
};

/// "counting", "complex", "harmonic", "kusuoka", or "all".
const std::vector<std::string>& suite_names();

/// Runs one suite; "all" concatenates every suite. Throws DomainError for an
/// unknown name.
VerificationReport run_suite(std::string_view suite, const VerifyOptions& options = {});

/// JSON with schema_version; timing is omitted when include_timing is false so
/// that the output is byte-deterministic.
std::string report_json(const VerificationReport& report, bool include_timing = true);

}  // namespace fractal_hodge
