#include "cvxrich/frequency_table.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cvxrich/errors.hpp"

namespace cvxrich {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t\r\n", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r\n", start);
    if (end == std::string_view::npos) end = s.size();
    tokens.push_back(s.substr(start, end - start));
    pos = end;
  }
  return tokens;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

std::int64_t parse_int(std::string_view token, std::size_t line) {
  std::int64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    fail_at(line, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

// Returns the format named by a header line, if the line is one.
std::optional<FrequencyFormat> header_format(std::string_view line,
                                             std::size_t line_no) {
  auto body = trim(line);
  if (!body.empty() && body.front() == '#') body = trim(body.substr(1));
  constexpr std::string_view key = "format:";
  if (body.substr(0, key.size()) != key) return std::nullopt;
  const auto value = trim(body.substr(key.size()));
  if (value == "freq") return FrequencyFormat::freq;
  if (value == "raw") return FrequencyFormat::raw;
  fail_at(line_no, "unknown format '" + std::string(value) + "'");
}

}  // namespace

FrequencyTable::FrequencyTable(
    const std::map<std::int64_t, std::int64_t>& counts) {
  for (const auto& [j, s] : counts) {
    if (j <= 0) {
      throw InputError(j == 0 ? "abundance index 0 not allowed"
                              : "abundance index " + std::to_string(j) +
                                    " must be positive");
    }
    if (s < 0) {
      throw InputError("negative count " + std::to_string(s) +
                       " for abundance " + std::to_string(j));
    }
    if (s == 0) continue;
    counts_.emplace(j, s);
    d_ += s;
  }
}

FrequencyTable FrequencyTable::from_abundances(
    std::span<const std::int64_t> abundances) {
  std::map<std::int64_t, std::int64_t> counts;
  for (const auto x : abundances) {
    if (x <= 0) {
      throw InputError(x == 0 ? "abundance index 0 not allowed"
                              : "abundance " + std::to_string(x) +
                                    " must be positive");
    }
    ++counts[x];
  }
  return FrequencyTable(counts);
}

std::int64_t FrequencyTable::count(std::int64_t j) const {
  const auto it = counts_.find(j);
  return it == counts_.end() ? 0 : it->second;
}

std::int64_t FrequencyTable::max_abundance() const {
  return counts_.empty() ? 0 : counts_.rbegin()->first;
}

Pmf empirical_freq(const FrequencyTable& t) {
  if (t.empty()) throw InputError("no observed species");
  std::vector<double> probs(static_cast<std::size_t>(t.max_abundance()) + 1,
                            0.0);
  const auto d = static_cast<double>(t.observed());
  for (const auto& [j, s] : t.counts()) {
    probs[static_cast<std::size_t>(j)] = static_cast<double>(s) / d;
  }
  return Pmf(std::move(probs));
}

FrequencyTable parse_frequency_table(std::istream& in) {
  std::optional<FrequencyFormat> format;
  std::map<std::int64_t, std::int64_t> counts;
  std::vector<std::int64_t> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!format) {
      if (const auto header = header_format(line, line_no)) {
        format = header;
        continue;
      }
    }
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    const auto tokens = split_ws(body);
    if (tokens.empty()) continue;
    if (!format) format = FrequencyFormat::freq;

    if (*format == FrequencyFormat::raw) {
      for (const auto token : tokens) {
        const auto x = parse_int(token, line_no);
        if (x == 0) fail_at(line_no, "abundance index 0 not allowed");
        if (x < 0) fail_at(line_no, "abundance must be positive");
        raw.push_back(x);
      }
      continue;
    }

    if (tokens.size() != 2) {
      fail_at(line_no, "expected 'j S_j', got " +
                           std::to_string(tokens.size()) + " fields");
    }
    const auto j = parse_int(tokens[0], line_no);
    const auto s = parse_int(tokens[1], line_no);
    if (j == 0) fail_at(line_no, "abundance index 0 not allowed");
    if (j < 0) fail_at(line_no, "abundance index must be positive");
    if (s < 0) fail_at(line_no, "negative count for abundance " +
                                    std::to_string(j));
    if (!counts.emplace(j, s).second) {
      fail_at(line_no, "duplicate abundance index " + std::to_string(j));
    }
  }
  if (format == FrequencyFormat::raw) {
    return FrequencyTable::from_abundances(raw);
  }
  return FrequencyTable(counts);
}

FrequencyTable read_frequency_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return parse_frequency_table(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_frequency_table(std::ostream& out, const FrequencyTable& t) {
  out << "format: freq\n";
  for (const auto& [j, s] : t.counts()) out << j << ' ' << s << '\n';
}

void write_frequency_file(const std::filesystem::path& path,
                          const FrequencyTable& t) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_frequency_table(out, t);
}

}  // namespace cvxrich
