#ifndef NCCONV_VERIFY_HPP
#define NCCONV_VERIFY_HPP

#include <string>
#include <vector>

#include "ncconv/convolution.hpp"

namespace ncconv {

struct SuiteResult {
  std::string name;
  std::vector<std::string> lines;  // "ok ..." / "FAIL ..."
  int checks = 0;
  int failures = 0;

  void pass(const std::string& what) {
    lines.push_back("ok " + what);
    ++checks;
  }
  void fail(const std::string& what, const std::string& detail) {
    lines.push_back("FAIL " + what + " (" + detail + ")");
    ++checks;
    ++failures;
  }
  void check(bool ok, const std::string& what, const std::string& detail) {
    if (ok)
      pass(what);
    else
      fail(what, detail);
  }
};

// The 5.2 Dirac bridges, unit laws and the mixture-affinity identity.
SuiteResult run_suite_diracs(std::uint64_t seed);

// Matrix resolvent vs closed-form resolvent vs transform identity for the
// five model-backed operations, on seeded atomic pairs.
SuiteResult run_suite_oracles(std::uint64_t seed);

// Sampled associativity/commutativity, including the failure witnesses of
// the alternative monotone and new boolean multiplicative convolutions.
SuiteResult run_suite_associativity(std::uint64_t seed);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed);

}  // namespace ncconv

#endif
