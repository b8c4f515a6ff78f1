#include <pybind11/pybind11.h>

#include <cmath>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "seo/config.hpp"
#include "seo/harness.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json nullable(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
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

// Owns a parsed config and the deadline table built from it, so repeated
// episodes share the expensive table construction.
class Simulator {
 public:
  explicit Simulator(const std::string& config_json)
      : cfg_(config_json.empty()
                 ? seo::default_config()
                 : seo::config_from_json(json::parse(config_json))),
        table_(seo::build_table(cfg_)) {}

  std::string config() const { return seo::config_json(cfg_).dump(); }

  std::string run_episode(std::uint64_t seed) const {
    const seo::EpisodeResult r = seo::run_episode(cfg_, table_, seed);
    return summary_json(cfg_, seo::summarize(r)).dump();
  }

  std::string run_batch() const {
    const seo::BatchResult batch = seo::run_batch(cfg_, table_);
    json j;
    j["mode"] = std::string(seo::to_string(cfg_.mode));
    j["filtered"] = cfg_.filtered;
    j["obstacle_count"] = cfg_.obstacle_count;
    j["episodes"] = json::array();
    for (const auto& s : batch.episodes)
      j["episodes"].push_back(summary_json(cfg_, s));
    j["completed"] = batch.completed;
    j["aggregate"] = seo::gain_report_json(batch.aggregate);
    return j.dump();
  }

 private:
  seo::RunConfig cfg_;
  seo::DeadlineTable table_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-loop simulator for deadline-gated perception workloads";

  m.def(
      "default_config", [] { return seo::config_json(seo::default_config()).dump(); },
      "Built-in run configuration as a JSON string.");
  m.def("discretize_period", &seo::discretize_period, py::arg("period_s"),
        py::arg("tau_s"), "Model period in base periods.");
  m.def("discretize_deadline", &seo::discretize_deadline, py::arg("time_s"),
        py::arg("tau_s"),
        "Largest whole number of base periods that fits in the deadline.");

  py::class_<Simulator>(m, "Simulator")
      .def(py::init<const std::string&>(), py::arg("config_json") = "")
      .def("config", &Simulator::config)
      .def("run_episode", &Simulator::run_episode, py::arg("seed"),
           py::call_guard<py::gil_scoped_release>())
      .def("run_batch", &Simulator::run_batch,
           py::call_guard<py::gil_scoped_release>());
}
