#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ftl/io.hpp"

namespace ftl {

struct AcceptanceOptions {
  uint64_t seed = 7;
  int n = 4;  // base for the criteria stated at a single n (4, 6, 7, 12)
  std::vector<int> only;  // criterion ids to run; empty runs all
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<CheckRecord> checks;
  double seconds = 0;  // wall clock; kept out of JSON so reports stay byte-identical
  double time_limit = 0;
  bool within_time = false;
  bool pass = false;  // every check passed and the runtime stayed within the limit
};

// Pinned tolerances.
inline constexpr double kHolderSlackFactor = 1.0;   // bound used as is: n^3 sqrt 2
inline constexpr double kLineTolerance = 0.05;      // blow-up to line, relative to the unit window

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_done = {});
json to_json(const CriterionResult& r);
// "[PASS] 1 title (0.12 s)" style line.
std::string summary_line(const CriterionResult& r);

// Individual criteria.
CriterionResult criterion_cut_points();
CriterionResult criterion_constraints();
CriterionResult criterion_excess_axioms(uint64_t seed);
CriterionResult criterion_ahlfors(int n, uint64_t seed);
CriterionResult criterion_holder(uint64_t seed);
CriterionResult criterion_surjectivity(int n, uint64_t seed);
CriterionResult criterion_properties(int n, uint64_t seed);
CriterionResult criterion_blowup_bounds(uint64_t seed);
CriterionResult criterion_aw_profile(uint64_t seed);
CriterionResult criterion_universal();
CriterionResult criterion_sponge_faces();
CriterionResult criterion_ball_covers(int n, uint64_t seed);
CriterionResult criterion_line_blowups();

// Plant specs used by the blow-up criteria.
PlantSpec acceptance_bounds_spec();  // (N, k) = (3, 0), (3, 1), (4, 1)
PlantSpec acceptance_profile_spec();  // N = 2, 3, 4 with k = 1

// sqrt(a) <= sqrt(b) + sqrt(c), exactly.
bool sqrt_sum_le(const BigRational& a, const BigRational& b, const BigRational& c);

}  // namespace ftl
