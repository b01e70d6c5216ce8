#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <initializer_list>
#include <map>
#include <span>

#include "cvxrich/pmf.hpp"

namespace cvxrich {

/// Frequency-of-frequencies table: counts[j] = S_j, the number of species
/// observed exactly j times, and D = sum_j S_j.
class FrequencyTable {
 public:
  FrequencyTable() = default;

  /// Zero counts are dropped; negative counts and j = 0 are rejected.
  explicit FrequencyTable(const std::map<std::int64_t, std::int64_t>& counts);
  FrequencyTable(std::initializer_list<std::pair<const std::int64_t, std::int64_t>> counts)
      : FrequencyTable(std::map<std::int64_t, std::int64_t>(counts)) {}

  /// Tabulates zero-truncated abundances X_1, ..., X_D.
  static FrequencyTable from_abundances(std::span<const std::int64_t> abundances);

  const std::map<std::int64_t, std::int64_t>& counts() const { return counts_; }
  std::int64_t observed() const { return d_; }
  std::int64_t count(std::int64_t j) const;
  std::int64_t max_abundance() const;
  bool empty() const { return d_ == 0; }

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  std::map<std::int64_t, std::int64_t> counts_;
  std::int64_t d_ = 0;
};

/// f_j = S_j / D on j >= 1. Throws InputError("no observed species") if D = 0.
Pmf empirical_freq(const FrequencyTable& t);

enum class FrequencyFormat { freq, raw };

/// Reads either format. A first non-comment line "format: freq" or
/// "format: raw" selects the format; without it the file is read as freq.
/// Errors carry the offending line number.
FrequencyTable parse_frequency_table(std::istream& in);
FrequencyTable read_frequency_file(const std::filesystem::path& path);

void write_frequency_table(std::ostream& out, const FrequencyTable& t);
void write_frequency_file(const std::filesystem::path& path,
                          const FrequencyTable& t);

}  // namespace cvxrich
