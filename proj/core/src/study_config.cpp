#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "cvxrich/errors.hpp"
#include "cvxrich/study.hpp"

namespace cvxrich {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    auto item = trim(s.substr(start, end - start));
    if (!item.empty()) items.push_back(std::move(item));
    start = end + 1;
  }
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InputError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += format(items[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(TruthKind k) {
  switch (k) {
    case TruthKind::gamma_poisson_threshold: return "gamma_poisson_threshold";
    case TruthKind::perturbed: return "perturbed";
  }
  return "unknown";
}

TruthKind parse_truth_kind(std::string_view s) {
  if (s == "gamma_poisson_threshold" || s == "convex") {
    return TruthKind::gamma_poisson_threshold;
  }
  if (s == "perturbed") return TruthKind::perturbed;
  throw InputError("unknown truth '" + std::string(s) + "'");
}

Pmf make_truth(TruthKind kind, double nu) {
  const auto p = gamma_poisson(GammaPoissonParams::at_threshold(nu));
  return kind == TruthKind::perturbed ? robustness_perturb(p) : p;
}

StudyConfig StudyConfig::desk_scale() { return StudyConfig{}; }

StudyConfig StudyConfig::paper_scale() {
  StudyConfig c;
  c.nu_values = {1.01, 1.05, 1.1, 1.3, 1.5, 1.75};
  c.n_values = {50, 100, 200, 400, 800, 1500, 3000, 5000, 10000};
  c.n_reps = 1000;
  c.n_sims = 1000;
  c.n_boot = 1000;
  c.estimators = {EstimatorMethod::empirical, EstimatorMethod::convex,
                  EstimatorMethod::chao84};
  c.intervals = {IntervalMethod::empirical, IntervalMethod::plugin,
                 IntervalMethod::bootstrap};
  return c;
}

void StudyConfig::validate() const {
  if (nu_values.empty()) throw InputError("study needs at least one nu");
  for (const double nu : nu_values) {
    if (!(nu > 1.0)) throw InputError("every nu must exceed 1");
  }
  if (n_values.empty()) throw InputError("study needs at least one N");
  for (const auto n : n_values) {
    if (n < 1) throw InputError("every N must be >= 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (n_reps < 1) throw InputError("n_reps must be >= 1");
  if (n_sims < 1 || n_boot < 1) throw InputError("n_sims and n_boot must be >= 1");
  if (estimators.empty() && intervals.empty()) {
    throw InputError("study selects no estimator and no interval");
  }
  if (!(knot_tol > 0.0)) throw InputError("knot_tol must be positive");
  if (workers < 0) throw InputError("workers must be >= 0");
}

StudyConfig parse_study_config(std::istream& in) {
  StudyConfig c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));

    if (key == "scale") {
      if (value == "desk") {
        c = StudyConfig::desk_scale();
      } else if (value == "paper") {
        c = StudyConfig::paper_scale();
      } else {
        throw InputError("config key 'scale' must be desk or paper");
      }
    } else if (key == "truth") {
      c.truth = parse_truth_kind(value);
    } else if (key == "nu") {
      c.nu_values.clear();
      for (const auto& item : split_list(value)) {
        c.nu_values.push_back(parse_number<double>(key, item));
      }
    } else if (key == "n") {
      c.n_values.clear();
      for (const auto& item : split_list(value)) {
        c.n_values.push_back(parse_number<std::int64_t>(key, item));
      }
    } else if (key == "alpha") {
      c.alpha = parse_number<double>(key, value);
    } else if (key == "n_reps") {
      c.n_reps = parse_number<int>(key, value);
    } else if (key == "n_sims") {
      c.n_sims = parse_number<int>(key, value);
    } else if (key == "n_boot") {
      c.n_boot = parse_number<int>(key, value);
    } else if (key == "estimators") {
      c.estimators.clear();
      for (const auto& item : split_list(value)) {
        if (item != "none") c.estimators.push_back(parse_estimator_method(item));
      }
    } else if (key == "intervals") {
      c.intervals.clear();
      for (const auto& item : split_list(value)) {
        if (item != "none") c.intervals.push_back(parse_interval_method(item));
      }
    } else if (key == "seed") {
      c.seed.master_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "stream") {
      c.seed.stream_id = parse_number<std::uint64_t>(key, value);
    } else if (key == "knot_tol") {
      c.knot_tol = parse_number<double>(key, value);
    } else if (key == "sampling") {
      if (value == "direct") {
        c.sampling = SamplingPath::direct;
      } else if (value == "two_stage") {
        c.sampling = SamplingPath::two_stage;
      } else {
        throw InputError("config key 'sampling' must be direct or two_stage");
      }
    } else if (key == "workers") {
      c.workers = parse_number<int>(key, value);
    } else {
      throw InputError("config line " + std::to_string(line_no) +
                       ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

StudyConfig read_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_study_config(in);
}

std::string to_config_text(const StudyConfig& c) {
  std::ostringstream out;
  out << "truth = " << to_string(c.truth) << '\n'
      << "nu = " << join(c.nu_values, format_double) << '\n'
      << "n = "
      << join(c.n_values, [](std::int64_t n) { return std::to_string(n); })
      << '\n'
      << "alpha = " << format_double(c.alpha) << '\n'
      << "n_reps = " << c.n_reps << '\n'
      << "n_sims = " << c.n_sims << '\n'
      << "n_boot = " << c.n_boot << '\n'
      << "estimators = "
      << (c.estimators.empty()
              ? std::string("none")
              : join(c.estimators,
                     [](EstimatorMethod m) { return std::string(to_string(m)); }))
      << '\n'
      << "intervals = "
      << (c.intervals.empty()
              ? std::string("none")
              : join(c.intervals,
                     [](IntervalMethod m) { return std::string(to_string(m)); }))
      << '\n'
      << "seed = " << c.seed.master_seed << '\n'
      << "stream = " << c.seed.stream_id << '\n'
      << "knot_tol = " << format_double(c.knot_tol) << '\n'
      << "sampling = "
      << (c.sampling == SamplingPath::direct ? "direct" : "two_stage") << '\n';
  return out.str();
}

}  // namespace cvxrich
