#include "cvxrich/study.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "cvxrich/errors.hpp"
#include "cvxrich/serialize.hpp"

namespace cvxrich {

namespace fs = std::filesystem;

namespace {

struct ReplicateRecord {
  std::vector<std::optional<double>> n_hat;
  std::vector<std::optional<double>> theta;
  std::vector<std::optional<IntervalReport>> interval;
};

bool wants(const std::vector<EstimatorMethod>& list, EstimatorMethod m) {
  return std::find(list.begin(), list.end(), m) != list.end();
}

ReplicateRecord run_replicate(const Pmf& truth, std::int64_t n,
                              const StudyConfig& config,
                              const SeedSpec& seed) {
  ReplicateRecord rec;
  rec.n_hat.resize(config.estimators.size());
  rec.theta.resize(config.estimators.size());
  rec.interval.resize(config.intervals.size());

  const auto table = simulate_counts(truth, n, seed.child(0), config.sampling);
  if (table.empty()) return rec;

  const ConvexLseOptions lse{.knot_tol = config.knot_tol};
  const bool need_convex =
      wants(config.estimators, EstimatorMethod::convex) ||
      std::any_of(config.intervals.begin(), config.intervals.end(),
                  [](IntervalMethod m) { return m != IntervalMethod::empirical; });
  std::optional<Estimate> convex;
  if (need_convex) {
    try {
      convex = estimate_convex(table, lse);
    } catch (const std::invalid_argument&) {
    } catch (const NumericalError&) {
    }
  }

  for (std::size_t i = 0; i < config.estimators.size(); ++i) {
    try {
      const auto e = config.estimators[i] == EstimatorMethod::convex
                         ? convex.value()
                         : estimate(config.estimators[i], table, lse);
      rec.n_hat[i] = e.n_hat_real;
      rec.theta[i] = e.theta_hat;
    } catch (const std::bad_optional_access&) {
    } catch (const std::invalid_argument&) {
    } catch (const NumericalError&) {
    }
  }

  for (std::size_t i = 0; i < config.intervals.size(); ++i) {
    try {
      switch (config.intervals[i]) {
        case IntervalMethod::empirical:
          rec.interval[i] = ci_empirical(table, config.alpha);
          break;
        case IntervalMethod::plugin:
          rec.interval[i] = ci_plugin(convex.value(), config.alpha,
                                      config.n_sims, seed.child(1));
          break;
        case IntervalMethod::bootstrap:
          rec.interval[i] = ci_bootstrap(convex.value(), config.alpha,
                                         config.n_boot, seed.child(2), lse);
          break;
      }
    } catch (const std::bad_optional_access&) {
    } catch (const std::invalid_argument&) {
    } catch (const NumericalError&) {
    }
  }
  return rec;
}

double mean_of(const std::vector<double>& v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_nu(double nu) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, nu);
  return std::string(buf, ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

const EstimatorSummary& CellResult::estimator(EstimatorMethod m) const {
  for (const auto& e : estimators) {
    if (e.method == m) return e;
  }
  throw InputError("cell has no estimator " + std::string(to_string(m)));
}

const IntervalSummary& CellResult::interval(IntervalMethod m) const {
  for (const auto& i : intervals) {
    if (i.method == m) return i;
  }
  throw InputError("cell has no interval " + std::string(to_string(m)));
}

CellResult run_cell(const Pmf& truth, std::int64_t n, const StudyConfig& config,
                    const SeedSpec& cell_seed) {
  config.validate();
  if (n < 1) throw InputError("N must be >= 1");

  std::vector<ReplicateRecord> records(static_cast<std::size_t>(config.n_reps));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int r = next++; r < config.n_reps; r = next++) {
      try {
        records[static_cast<std::size_t>(r)] = run_replicate(
            truth, n, config, cell_seed.child(static_cast<std::uint64_t>(r)));
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.n_reps);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  CellResult cell;
  cell.nu = 0.0;
  cell.p0 = truth[0];
  cell.n = n;
  cell.n_reps_done = config.n_reps;
  const auto n_true = static_cast<double>(n);

  for (std::size_t i = 0; i < config.estimators.size(); ++i) {
    EstimatorSummary s;
    s.method = config.estimators[i];
    std::vector<double> values;
    std::vector<double> thetas;
    for (const auto& rec : records) {
      if (!rec.n_hat[i]) continue;
      values.push_back(*rec.n_hat[i]);
      thetas.push_back(*rec.theta[i]);
    }
    s.n_ok = static_cast<int>(values.size());
    s.failures = config.n_reps - s.n_ok;
    if (s.n_ok > 0) {
      s.mean = mean_of(values);
      s.mean_theta = mean_of(thetas);
      std::vector<double> sq(values.size());
      std::transform(values.begin(), values.end(), sq.begin(),
                     [&](double v) { return (v - s.mean) * (v - s.mean); });
      s.bias = n_true - s.mean;
      s.se = std::sqrt(mean_of(sq));
      s.ep = std::sqrt(s.bias * s.bias + s.se * s.se);
    }
    cell.estimators.push_back(s);
  }

  for (std::size_t i = 0; i < config.intervals.size(); ++i) {
    IntervalSummary s;
    s.method = config.intervals[i];
    std::vector<double> left;
    std::vector<double> right;
    std::vector<double> lowers;
    std::vector<double> uppers;
    for (const auto& rec : records) {
      if (!rec.interval[i]) continue;
      const auto& iv = *rec.interval[i];
      left.push_back(n_true < iv.lower ? 1.0 : 0.0);
      right.push_back(n_true > iv.upper ? 1.0 : 0.0);
      lowers.push_back(iv.lower);
      uppers.push_back(iv.upper);
      if (iv.unreliable) ++s.unreliable;
    }
    s.n_ok = static_cast<int>(left.size());
    s.failures = config.n_reps - s.n_ok;
    if (s.n_ok > 0) {
      s.left_miss = 100.0 * mean_of(left);
      s.right_miss = 100.0 * mean_of(right);
      s.mean_lower = mean_of(lowers);
      s.mean_upper = mean_of(uppers);
      const double tail = config.alpha / 2.0;
      s.mc_se = 100.0 * std::sqrt(tail * (1.0 - tail) / s.n_ok);
    }
    cell.intervals.push_back(s);
  }
  return cell;
}

StudyReport run_study(const StudyConfig& config,
                      const StudyRunOptions& options) {
  config.validate();
  StudyReport report{config, {}};
  const std::size_t total = config.nu_values.size() * config.n_values.size();

  std::optional<fs::path> partial;
  if (options.out_dir) {
    partial = options.out_dir->string() + ".partial";
    const auto config_text = to_config_text(config);
    if (fs::exists(*partial) &&
        read_text(*partial / "config.txt") != config_text) {
      fs::remove_all(*partial);
    }
    fs::create_directories(*partial / "cells");
    write_text(*partial / "config.txt", config_text);
  }

  std::size_t index = 0;
  for (const double nu : config.nu_values) {
    const auto truth = make_truth(config.truth, nu);
    for (const auto n : config.n_values) {
      CellResult cell;
      const fs::path saved =
          partial ? *partial / "cells" / ("cell_" + std::to_string(index) + ".json")
                  : fs::path();
      if (partial && fs::exists(saved)) {
        nlohmann::json::parse(read_text(saved)).get_to(cell);
      } else {
        cell = run_cell(truth, n, config,
                        config.seed.child(static_cast<std::uint64_t>(index)));
        cell.truth = config.truth;
        cell.nu = nu;
        if (partial) {
          write_text(saved, nlohmann::json(cell).dump());
          write_text(*partial / "RESUME",
                     std::to_string(index + 1) + " of " +
                         std::to_string(total) + " cells complete\n");
        }
      }
      if (options.on_cell) options.on_cell(cell, index, total);
      report.cells.push_back(std::move(cell));
      ++index;
    }
  }

  if (options.out_dir) {
    const fs::path staging = options.out_dir->string() + ".staging";
    fs::remove_all(staging);
    write_study_outputs(report, staging);
    fs::remove_all(*options.out_dir);
    fs::rename(staging, *options.out_dir);
    fs::remove_all(*partial);
  }
  return report;
}

void write_cells_csv(std::ostream& out, const StudyReport& report) {
  out << "truth,nu,p0,n,kind,method,n_ok,failures,mean,bias,se,ep,bias_rel,"
         "se_rel,ep_rel,mean_theta,left_miss_pct,right_miss_pct,mc_se_pct,"
         "mean_lower,mean_upper,unreliable\n";
  for (const auto& c : report.cells) {
    const std::string prefix = std::string(to_string(c.truth)) + "," +
                               format_nu(c.nu) + "," + format_number(c.p0) +
                               "," + std::to_string(c.n) + ",";
    const auto n = static_cast<double>(c.n);
    for (const auto& e : c.estimators) {
      out << prefix << "estimator," << to_string(e.method) << ',' << e.n_ok
          << ',' << e.failures << ',' << format_number(e.mean) << ','
          << format_number(e.bias) << ',' << format_number(e.se) << ','
          << format_number(e.ep) << ',' << format_number(e.bias / n) << ','
          << format_number(e.se / n) << ',' << format_number(e.ep / n) << ','
          << format_number(e.mean_theta) << ",,,,,,\n";
    }
    for (const auto& i : c.intervals) {
      out << prefix << "interval," << to_string(i.method) << ',' << i.n_ok
          << ',' << i.failures << ",,,,,,,,," << format_number(i.left_miss)
          << ',' << format_number(i.right_miss) << ','
          << format_number(i.mc_se) << ',' << format_number(i.mean_lower)
          << ',' << format_number(i.mean_upper) << ',' << i.unreliable
          << '\n';
    }
  }
}

void write_study_outputs(const StudyReport& report, const fs::path& dir) {
  fs::create_directories(dir / "plotdata");

  std::ostringstream csv;
  write_cells_csv(csv, report);
  write_text(dir / "cells.csv", csv.str());

  nlohmann::json doc{{"config", to_config_text(report.config)},
                     {"cells", report.cells}};
  write_text(dir / "cells.json", doc.dump(2) + "\n");

  // One file per (nu, metric): x = N, one column per method.
  for (const double nu : report.config.nu_values) {
    std::vector<const CellResult*> rows;
    for (const auto& c : report.cells) {
      if (c.nu == nu) rows.push_back(&c);
    }
    const std::string stem =
        std::string(to_string(report.config.truth)) + "_nu" + format_nu(nu);

    using EstimatorMetric = double (*)(const EstimatorSummary&, double);
    const std::pair<const char*, EstimatorMetric> estimator_metrics[] = {
        {"bias_rel", [](const EstimatorSummary& e, double n) { return e.bias / n; }},
        {"se_rel", [](const EstimatorSummary& e, double n) { return e.se / n; }},
        {"ep_rel", [](const EstimatorSummary& e, double n) { return e.ep / n; }},
    };
    if (!report.config.estimators.empty()) {
      for (const auto& [name, metric] : estimator_metrics) {
        std::ostringstream tsv;
        tsv << "N";
        for (const auto m : report.config.estimators) tsv << '\t' << to_string(m);
        tsv << '\n';
        for (const auto* c : rows) {
          tsv << c->n;
          for (const auto& e : c->estimators) {
            tsv << '\t' << format_number(metric(e, static_cast<double>(c->n)));
          }
          tsv << '\n';
        }
        write_text(dir / "plotdata" / (stem + "_" + name + ".tsv"), tsv.str());
      }
    }

    using IntervalMetric = double (*)(const IntervalSummary&);
    const std::pair<const char*, IntervalMetric> interval_metrics[] = {
        {"left_miss_pct", [](const IntervalSummary& i) { return i.left_miss; }},
        {"right_miss_pct", [](const IntervalSummary& i) { return i.right_miss; }},
    };
    if (!report.config.intervals.empty()) {
      for (const auto& [name, metric] : interval_metrics) {
        std::ostringstream tsv;
        tsv << "N";
        for (const auto m : report.config.intervals) tsv << '\t' << to_string(m);
        tsv << '\n';
        for (const auto* c : rows) {
          tsv << c->n;
          for (const auto& i : c->intervals) tsv << '\t' << format_number(metric(i));
          tsv << '\n';
        }
        write_text(dir / "plotdata" / (stem + "_" + name + ".tsv"), tsv.str());
      }
    }
  }
}

}  // namespace cvxrich
