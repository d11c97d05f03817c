#pragma once

// Reference checks run by `robust_sampler selftest`: each compares the
// library against a brute-force oracle or a value worked out by hand.

#include <cstdint>
#include <string>
#include <vector>

namespace robust {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AuditReport {
  std::uint64_t instances = 0;   // instances generated
  std::uint64_t checked = 0;     // instances (or queries) actually checked
  std::uint64_t violations = 0;
  std::string first_violation;
};

/// Random (stream, sample, eps) instances over every system kind, N and n up
/// to `max_size` (boxes: m <= 5, d <= 2). Each instance is counted as a
/// violation unless the library's verdict, gap and witness gap all equal the
/// brute-force values exactly.
AuditReport audit_verifier(std::uint64_t seed, std::uint64_t instances, std::uint64_t max_size);

/// Random instances filtered by is_eps_approximation; every query answered
/// from a passing sample is checked against the stream by brute force
/// (rank, quantile, heavy hitters, range counts, center points).
AuditReport audit_applications(std::uint64_t seed, std::uint64_t instances);

std::vector<SelftestResult> run_selftest(std::uint64_t seed = 1);

}  // namespace robust
