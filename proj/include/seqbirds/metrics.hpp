#pragma once

#include "seqbirds/catalog.hpp"
#include "seqbirds/types.hpp"

#include <string>
#include <vector>

namespace seqbirds {

/// Number of unique n-grams (n = 1 or 2) over all sentences.
long long distinct_n(const std::vector<Sentence>& sentences, int n);

struct DiversityReport {
  long long n_levels = 0;
  long long distinct_1 = 0;
  long long distinct_2 = 0;
};

DiversityReport diversity(const std::vector<Sentence>& sentences);

struct StabilityRateReport {
  long long n_levels = 0;
  long long n_stable = 0;
  double rate = 0;
};

StabilityRateReport stability_report(const ObjectCatalog& catalog, const std::vector<Level>& levels);
double stability_rate(const ObjectCatalog& catalog, const std::vector<Level>& levels);

std::string format_diversity_csv(const DiversityReport& report, long long skipped = 0);
std::string format_stability_csv(const StabilityRateReport& report);

}  // namespace seqbirds
