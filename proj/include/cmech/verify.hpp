#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmech/report.hpp"

namespace cmech {

struct CriterionResult {
  int number = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

// One printed result compared with the engine's own computation.
struct PrintedCheck {
  std::string location;
  std::string printed;
  std::string computed;
  bool match = false;
};

struct Discrepancy {
  std::string location;
  std::string printed;
  std::string computed;
  std::string analysis;
};

struct VerifyOptions {
  std::uint64_t seed = 20011;
  int bracket_triples = 240;
  int corpus_size = 24;
  int rk_tuples = 10;
};

struct VerifyReport {
  std::vector<CriterionResult> criteria;
  std::vector<PrintedCheck> printed;
  std::vector<Discrepancy> discrepancies;
  bool passed() const;
};

/// Runs the reproduction suite against the bundled models.
VerifyReport verify_paper(const VerifyOptions& opts = {});

// "criterion N: PASS|FAIL  title (detail)" lines, then the discrepancies.
std::string format_summary(const VerifyReport& rep);
Json to_json(const VerifyReport& rep);

// Graded antisymmetry, Leibniz and Jacobi on random parity-homogeneous triples.
struct PropertyStats {
  int triples = 0;
  int checks = 0;
  int failures = 0;
  std::string first_failure;
};
PropertyStats bracket_properties(std::uint64_t seed, int triples);

// The bundled models followed by seeded random velocity-quadratic models.
std::vector<std::string> model_corpus(std::uint64_t seed, int count);
// Number of corpus entries for which parse(render(parse(text))) differs from parse(text).
int roundtrip_failures(const std::vector<std::string>& corpus, std::string* first = nullptr);

}  // namespace cmech
