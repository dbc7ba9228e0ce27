#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "envcalc/algebra.hpp"
#include "envcalc/equality.hpp"
#include "envcalc/parallel.hpp"

namespace envcalc::suites {

enum class Outcome { Pass, Fail, Undetermined };

[[nodiscard]] const char* to_string(Outcome o);

struct Case {
  std::string id;
  Outcome verdict = Outcome::Pass;
  /// Worst residual seen by the numeric checks of the case (0 when every
  /// check was decided by normal forms).
  double residual = 0.0;
  std::string detail;
};

struct Settings {
  ProductModel model{2, 2};
  std::uint64_t seed = 42;
  /// Equality oracle; its seed is replaced by `seed` when a suite runs.
  sym::OracleConfig oracle;
  Execution execution = Execution::Parallel;
};

struct Summary {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t undetermined = 0;
};

struct Report {
  std::string suite;
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  std::uint64_t seed = 0;
  /// Sorted by case index.
  std::vector<Case> cases;
  /// Free-form lines printed after the cases.
  std::vector<std::string> notes;
  /// Wall time. Never part of the JSON document, which must be reproducible.
  double seconds = 0.0;

  [[nodiscard]] Summary summary() const;
  /// Undetermined cases do not fail a suite.
  [[nodiscard]] bool passed() const { return summary().fail == 0; }
  [[nodiscard]] double worst_residual() const;
};

class UnknownSuite : public std::invalid_argument {
 public:
  explicit UnknownSuite(std::string_view name);
};

/// Registered suite names in run order.
[[nodiscard]] const std::vector<std::string>& suite_names();

/// Throws UnknownSuite.
[[nodiscard]] Report run_suite(std::string_view name, const Settings& settings);

/// One JSON document: the report itself for a single suite, otherwise
/// {suites: [...], summary}.
[[nodiscard]] std::string render_json(std::span<const Report> reports);
/// Summary line per suite, one line per case that did not pass, then notes.
[[nodiscard]] std::string render_text(std::span<const Report> reports);

}  // namespace envcalc::suites
