#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace condcap {

struct AcceptanceOptions {
  double gap_tolerance = 1e-12;
  std::size_t max_iterations = 200000;
};

struct CriterionInfo {
  int id = 0;
  std::string title;
  std::string target;
};

struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// The built-in analytic suite, numbered 1..9.
const std::vector<CriterionInfo>& acceptance_criteria();

/// Runs acceptance criteria, caching solves that several criteria share.
class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(AcceptanceOptions opts = {});
  ~AcceptanceSuite();
  AcceptanceSuite(const AcceptanceSuite&) = delete;
  AcceptanceSuite& operator=(const AcceptanceSuite&) = delete;

  CriterionOutcome run(int id);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// One line: "PASS  criterion N  <title>  (<seconds> s)  <detail>".
std::string format_outcome(const CriterionOutcome& outcome);

}  // namespace condcap
