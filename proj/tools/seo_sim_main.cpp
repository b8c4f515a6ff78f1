#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seo/config.hpp"
#include "seo/harness.hpp"
#include "seo/ledger.hpp"
#include "seo/safety.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::uint64_t> parse_seed_range(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t from = std::stoull(spec.substr(0, dots));
    const std::uint64_t to = std::stoull(spec.substr(dots + 2));
    if (to < from) throw std::runtime_error("--seeds: range end before start");
    for (std::uint64_t s = from; s <= to; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t pos = 0;
  while (pos < spec.size()) {
    const auto comma = spec.find(',', pos);
    const auto tok = spec.substr(pos, comma - pos);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (seeds.empty()) throw std::runtime_error("--seeds: no seeds given");
  return seeds;
}

json nullable(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json summary_json(const seo::RunConfig& cfg, const seo::EpisodeSummary& s) {
  json j;
  j["seed"] = s.seed;
  j["mode"] = std::string(seo::to_string(cfg.mode));
  j["filtered"] = cfg.filtered;
  j["obstacle_count"] = cfg.obstacle_count;
  j["status"] = std::string(seo::to_string(s.status));
  j["final_time_s"] = s.final_time_s;
  j["periods"] = s.periods;
  j["min_clearance_m"] = nullable(s.min_clearance_m);
  j["staleness_violations"] = s.staleness_violations;
  j["report"] = seo::gain_report_json(s.report);
  return j;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

int cmd_run(const std::optional<std::string>& config_path,
            const std::optional<std::string>& mode,
            const std::optional<bool>& filtered,
            const std::optional<int>& obstacles,
            const std::optional<double>& tau_ms,
            const std::optional<std::string>& seeds,
            const std::optional<std::string>& out_dir,
            const std::optional<std::string>& table_path) {
  seo::RunConfig cfg =
      config_path ? seo::load_config(*config_path) : seo::default_config();
  if (mode) cfg.mode = seo::parse_mode(*mode);
  if (filtered) cfg.filtered = *filtered;
  if (obstacles) cfg.obstacle_count = *obstacles;
  if (tau_ms) cfg.tau_s = *tau_ms / 1000.0;
  if (seeds) cfg.seeds = parse_seed_range(*seeds);
  if (out_dir) cfg.out_dir = *out_dir;
  seo::validate_config(cfg);

  const seo::DeadlineTable table = table_path
                                       ? seo::load_deadline_table(*table_path)
                                       : seo::build_table(cfg);

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  write_json(seo::config_json(cfg), out / "config.json");

  char prefix[128];
  std::snprintf(prefix, sizeof(prefix), "%s_%s_%dobs",
                std::string(seo::to_string(cfg.mode)).c_str(),
                cfg.filtered ? "filtered" : "unfiltered", cfg.obstacle_count);

  seo::BatchResult batch;
  std::map<std::string, double> gain_sums;
  double combined_sum = 0.0, delta_sum = 0.0;

  for (const auto seed : cfg.seeds) {
    const seo::EpisodeResult r = seo::run_episode(cfg, table, seed);
    const seo::EpisodeSummary s = seo::summarize(r);
    batch.episodes.push_back(s);

    const fs::path run_dir = out / (std::string(prefix) + "_seed" +
                                    std::to_string(seed));
    fs::create_directories(run_dir);
    seo::write_trace_csv(r.ledger, (run_dir / "trace.csv").string());
    write_json(summary_json(cfg, s), run_dir / "summary.json");

    std::cout << "seed " << seed << ": " << seo::to_string(s.status) << ", "
              << s.final_time_s << " s, combined gain "
              << s.report.combined_gain << "\n";

    if (s.status != seo::TerminalStatus::Completed) continue;
    ++batch.completed;
    combined_sum += s.report.combined_gain;
    for (const auto& g : s.report.per_model) gain_sums[g.id] += g.gain;
    for (const auto& [d, c] : s.report.delta_histogram) {
      batch.aggregate.delta_histogram[d] += c;
      batch.aggregate.interval_count += c;
      delta_sum += static_cast<double>(d) * static_cast<double>(c);
    }
  }

  if (batch.completed == 0)
    throw std::runtime_error("no episode completed the route");

  for (const auto& [id, sum] : gain_sums)
    batch.aggregate.per_model.push_back(
        {id, 0.0, 0.0, sum / batch.completed});
  batch.aggregate.combined_gain = combined_sum / batch.completed;
  if (batch.aggregate.interval_count > 0)
    batch.aggregate.mean_delta_max =
        delta_sum / static_cast<double>(batch.aggregate.interval_count);

  json agg;
  agg["mode"] = std::string(seo::to_string(cfg.mode));
  agg["filtered"] = cfg.filtered;
  agg["obstacle_count"] = cfg.obstacle_count;
  agg["seeds"] = cfg.seeds;
  agg["episodes"] = cfg.seeds.size();
  agg["completed"] = batch.completed;
  agg["aggregate"] = seo::gain_report_json(batch.aggregate);
  write_json(agg, out / (std::string(prefix) + "_aggregate.json"));

  std::cout << "completed " << batch.completed << "/" << cfg.seeds.size()
            << ", mean combined gain " << batch.aggregate.combined_gain
            << ", mean delta_max " << batch.aggregate.mean_delta_max << "\n";
  return 0;
}

int cmd_table_build(const std::optional<std::string>& config_path,
                    const std::string& out_path) {
  seo::RunConfig cfg =
      config_path ? seo::load_config(*config_path) : seo::default_config();
  const seo::DeadlineTable t = seo::build_table(cfg);
  seo::save_deadline_table(t, out_path);
  std::cout << "wrote " << out_path << " (" << t.values.size() << " cells)\n";
  return 0;
}

struct GroupKey {
  std::string mode;
  bool filtered = false;
  int obstacles = 0;
  auto operator<=>(const GroupKey&) const = default;
};

int cmd_report(const std::string& dir) {
  std::map<GroupKey, std::vector<json>> groups;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().filename() != "summary.json")
      continue;
    std::ifstream f(entry.path());
    json j;
    f >> j;
    groups[{j.at("mode"), j.at("filtered"), j.at("obstacle_count")}]
        .push_back(std::move(j));
  }
  if (groups.empty())
    throw std::runtime_error("no summary.json files under " + dir);

  std::ofstream gains_csv(fs::path(dir) / "gains_vs_obstacles.csv");
  gains_csv << "mode,filtered,obstacle_count,episodes,completed,"
               "mean_combined_gain,mean_delta_max\n";
  std::ofstream hist_csv(fs::path(dir) / "delta_histogram.csv");
  hist_csv << "mode,filtered,obstacle_count,delta_max,intervals\n";

  for (const auto& [key, runs] : groups) {
    double gain_sum = 0.0, delta_sum = 0.0;
    long long completed = 0, intervals = 0;
    std::map<int, long long> hist;
    for (const auto& j : runs) {
      if (j.at("status") != "Completed") continue;
      ++completed;
      gain_sum += j.at("report").at("combined_gain").get<double>();
      for (const auto& [k, v] :
           j.at("report").at("delta_max_histogram").items()) {
        hist[std::stoi(k)] += v.get<long long>();
        intervals += v.get<long long>();
        delta_sum += std::stod(k) * v.get<double>();
      }
    }
    const double mean_gain = completed ? gain_sum / completed : 0.0;
    const double mean_delta = intervals ? delta_sum / intervals : 0.0;

    std::cout << key.mode << (key.filtered ? " filtered " : " unfiltered ")
              << key.obstacles << " obstacles: " << runs.size()
              << " episodes, " << completed << " completed, mean gain "
              << mean_gain << ", mean delta_max " << mean_delta << "\n";
    gains_csv << key.mode << ',' << (key.filtered ? "true" : "false") << ','
              << key.obstacles << ',' << runs.size() << ',' << completed << ','
              << mean_gain << ',' << mean_delta << "\n";
    for (const auto& [d, c] : hist)
      hist_csv << key.mode << ',' << (key.filtered ? "true" : "false") << ','
               << key.obstacles << ',' << d << ',' << c << "\n";
  }
  std::cout << "wrote " << dir << "/gains_vs_obstacles.csv and "
            << dir << "/delta_histogram.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic closed-loop simulator for safety-aware "
               "energy optimization of perception pipelines"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run episodes and write traces");
  std::string config_path, mode, seeds, out_dir, table_path;
  int obstacles = -1;
  double tau_ms = 0.0;
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--mode", mode, "offload | model-gate | sensor-gate");
  auto* filt = run->add_flag("--filtered", "Enable the safety filter");
  auto* unfilt = run->add_flag("--unfiltered", "Disable the safety filter");
  filt->excludes(unfilt);
  run->add_option("--obstacles", obstacles, "Obstacle count");
  run->add_option("--tau-ms", tau_ms, "Base period in milliseconds");
  run->add_option("--seeds", seeds, "Seed list 'a,b,c' or range 'a..b'");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--table", table_path, "Prebuilt deadline table file");

  // table build
  auto* table = app.add_subcommand("table", "Deadline table utilities");
  table->require_subcommand(1);
  auto* build = table->add_subcommand("build", "Build and save the table");
  std::string tbl_config, tbl_out;
  build->add_option("--config", tbl_config, "JSON config file");
  build->add_option("--out", tbl_out, "Output table file")->required();

  // report
  auto* report = app.add_subcommand("report", "Aggregate run summaries");
  std::string report_dir;
  report->add_option("dir", report_dir, "Directory with run outputs")
      ->required();

  CLI11_PARSE(app, argc, argv);

  auto opt_str = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
  };

  try {
    if (run->parsed()) {
      std::optional<bool> filtered;
      if (*filt) filtered = true;
      if (*unfilt) filtered = false;
      return cmd_run(opt_str(config_path), opt_str(mode), filtered,
                     obstacles >= 0 ? std::optional<int>(obstacles)
                                    : std::nullopt,
                     tau_ms > 0.0 ? std::optional<double>(tau_ms)
                                  : std::nullopt,
                     opt_str(seeds), opt_str(out_dir), opt_str(table_path));
    }
    if (table->parsed()) return cmd_table_build(opt_str(tbl_config), tbl_out);
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
