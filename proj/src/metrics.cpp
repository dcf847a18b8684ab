#include "seqbirds/metrics.hpp"

#include "seqbirds/physics.hpp"

#include <iomanip>
#include <sstream>
#include <unordered_set>

namespace seqbirds {

long long distinct_n(const std::vector<Sentence>& sentences, int n) {
  if (n == 1) {
    std::unordered_set<int> seen;
    for (const auto& s : sentences) seen.insert(s.begin(), s.end());
    return static_cast<long long>(seen.size());
  }
  if (n == 2) {
    std::unordered_set<std::uint64_t> seen;
    for (const auto& s : sentences)
      for (std::size_t t = 1; t < s.size(); ++t)
        seen.insert((static_cast<std::uint64_t>(static_cast<std::uint32_t>(s[t - 1])) << 32) |
                    static_cast<std::uint32_t>(s[t]));
    return static_cast<long long>(seen.size());
  }
  throw std::invalid_argument("distinct_n supports n = 1 or 2");
}

DiversityReport diversity(const std::vector<Sentence>& sentences) {
  return {static_cast<long long>(sentences.size()), distinct_n(sentences, 1), distinct_n(sentences, 2)};
}

StabilityRateReport stability_report(const ObjectCatalog& catalog, const std::vector<Level>& levels) {
  if (levels.empty()) throw std::invalid_argument("stability rate needs at least one level");
  StabilityRateReport r;
  r.n_levels = static_cast<long long>(levels.size());
  for (const auto& level : levels)
    if (check_stability(catalog, level).stable) ++r.n_stable;
  r.rate = static_cast<double>(r.n_stable) / static_cast<double>(r.n_levels);
  return r;
}

double stability_rate(const ObjectCatalog& catalog, const std::vector<Level>& levels) {
  return stability_report(catalog, levels).rate;
}

std::string format_diversity_csv(const DiversityReport& report, long long skipped) {
  std::ostringstream out;
  out << "n_levels,distinct_1,distinct_2,skipped\n"
      << report.n_levels << ',' << report.distinct_1 << ',' << report.distinct_2 << ',' << skipped << '\n';
  return out.str();
}

std::string format_stability_csv(const StabilityRateReport& report) {
  std::ostringstream out;
  out << "n_levels,n_stable,stability_rate\n"
      << report.n_levels << ',' << report.n_stable << ',' << std::setprecision(6) << report.rate << '\n';
  return out.str();
}

}  // namespace seqbirds
