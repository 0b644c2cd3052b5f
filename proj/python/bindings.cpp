#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mad/config.hpp"
#include "mad/design.hpp"
#include "mad/error.hpp"
#include "mad/harness.hpp"
#include "mad/inference.hpp"
#include "mad/outcome_models.hpp"
#include "mad/policies.hpp"
#include "mad/presets.hpp"

namespace py = pybind11;
using namespace mad;

namespace {

DeltaSchedule make_schedule(const std::string& kind, double a, double c) {
  DeltaSchedule s;
  s.kind = schedule_kind_from_string(kind);
  s.a = a;
  s.c = c;
  s.validate();
  return s;
}

PotentialOutcomeTable table_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ParameterError("table", "needs at least one unit");
  const std::size_t k = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * k);
  for (const auto& row : rows) {
    if (row.size() != k) throw ParameterError("table", "rows must have equal length");
    values.insert(values.end(), row.begin(), row.end());
  }
  return PotentialOutcomeTable(rows.size(), k, std::move(values));
}

std::vector<std::vector<double>> table_rows(const PotentialOutcomeTable& table) {
  std::vector<std::vector<double>> rows(table.n_units());
  for (std::size_t i = 0; i < table.n_units(); ++i) rows[i].assign(table.row(i).begin(), table.row(i).end());
  return rows;
}

RunConfig config_for(const std::string& preset_or_json) {
  if (const auto preset = find_preset(preset_or_json)) {
    RunConfig config;
    config.preset = *preset;
    return config;
  }
  const auto tree = nlohmann::json::parse(preset_or_json, nullptr, false);
  if (tree.is_discarded()) throw ParameterError("preset", "'" + preset_or_json + "' is neither a preset nor JSON");
  return config_from_json(tree);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mixture adaptive design core";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  py::class_<DeltaSchedule>(m, "DeltaSchedule")
      .def(py::init(&make_schedule), py::arg("kind"), py::arg("a") = 0.0, py::arg("c") = 1.0)
      .def_property_readonly("kind", [](const DeltaSchedule& s) { return std::string(to_string(s.kind)); })
      .def_readonly("a", &DeltaSchedule::a)
      .def_readonly("c", &DeltaSchedule::c)
      .def("__call__", [](const DeltaSchedule& s, std::uint64_t t) { return evaluate_schedule(s, t); });

  py::class_<Trajectory>(m, "Trajectory")
      .def("__len__", &Trajectory::size)
      .def_readonly("design", &Trajectory::design_label)
      .def_readonly("seed", &Trajectory::seed)
      .def_readonly("n_arms", &Trajectory::n_arms)
      .def_property_readonly("arms",
                             [](const Trajectory& t) {
                               std::vector<std::size_t> out;
                               for (const auto& s : t.steps) out.push_back(s.chosen_arm);
                               return out;
                             })
      .def_property_readonly("outcomes",
                             [](const Trajectory& t) {
                               std::vector<double> out;
                               for (const auto& s : t.steps) out.push_back(s.observed_outcome);
                               return out;
                             })
      .def_property_readonly("probs",
                             [](const Trajectory& t) {
                               std::vector<std::vector<double>> out;
                               for (const auto& s : t.steps) out.push_back(s.mixed.probs);
                               return out;
                             })
      .def_property_readonly("deltas",
                             [](const Trajectory& t) {
                               std::vector<double> out;
                               for (const auto& s : t.steps) out.push_back(s.delta);
                               return out;
                             })
      .def("__eq__", [](const Trajectory& a, const Trajectory& b) { return a == b; })
      .def("to_csv", &trajectory_csv);

  py::class_<ConfidenceSequenceTrack>(m, "ConfidenceSequenceTrack")
      .def("__len__", &ConfidenceSequenceTrack::size)
      .def_readonly("center", &ConfidenceSequenceTrack::center)
      .def_readonly("radius", &ConfidenceSequenceTrack::radius)
      .def_readonly("s_hat", &ConfidenceSequenceTrack::s_hat)
      .def_readonly("eta", &ConfidenceSequenceTrack::eta)
      .def_readonly("alpha", &ConfidenceSequenceTrack::alpha)
      .def("to_csv", &track_csv);

  m.def("mix",
        [](double delta, const std::vector<double>& probs) {
          return mix(delta, AssignmentDistribution{probs}, probs.size()).probs;
        },
        py::arg("delta"), py::arg("policy_probs"));
  m.def("evaluate_schedule", [](const DeltaSchedule& s, std::uint64_t t) { return evaluate_schedule(s, t); },
        py::arg("schedule"), py::arg("t"));
  m.def("asymptotic_radius", &asymptotic_radius, py::arg("s_hat"), py::arg("t"), py::arg("eta"),
        py::arg("alpha") = 0.05);
  m.def("eta_for_horizon", &eta_for_horizon, py::arg("alpha"), py::arg("t_star"));
  m.def("normal_mixture_boundary", &normal_mixture_boundary, py::arg("v"), py::arg("rho"), py::arg("alpha"));
  m.def("stitched_boundary", &stitched_boundary, py::arg("v"), py::arg("scale"), py::arg("alpha"));
  m.def("ipw_step",
        [](std::size_t arm, double outcome, const std::vector<double>& probs, std::size_t treatment,
           std::size_t control) {
          const IpwTerm term = ipw_step(arm, outcome, AssignmentDistribution{probs}, {treatment, control});
          return py::make_tuple(term.tau, term.sigma2);
        },
        py::arg("arm"), py::arg("outcome"), py::arg("probs"), py::arg("treatment") = 1, py::arg("control") = 0);
  m.def("beta_superiority", &beta_superiority, py::arg("a1"), py::arg("b1"), py::arg("a0"), py::arg("b0"));

  m.def("generate_table",
        [](const std::string& kind, const std::vector<double>& params, std::size_t n_units, std::uint64_t seed,
           double scale, double df) {
          OutcomeModelSpec spec;
          spec.kind = outcome_kind_from_string(kind);
          spec.n_units = n_units;
          spec.base = {params, scale, df};
          return table_rows(generate_table(spec, seed));
        },
        py::arg("kind"), py::arg("params"), py::arg("n_units"), py::arg("seed"), py::arg("scale") = 1.0,
        py::arg("df") = 1.0);
  m.def("true_ate_curve",
        [](const std::vector<std::vector<double>>& rows, std::size_t treatment, std::size_t control) {
          return true_ate_curve(table_from_rows(rows), treatment, control);
        },
        py::arg("table"), py::arg("treatment") = 1, py::arg("control") = 0);
  m.def("run_trajectory",
        [](const std::vector<std::vector<double>>& rows, const std::string& policy,
           const std::optional<DeltaSchedule>& schedule, std::uint64_t seed, std::size_t batch_size,
           std::size_t mc_draws, const std::string& label) {
          PolicyConfig config;
          config.kind = policy_kind_from_string(policy);
          config.mc_draws = mc_draws;
          config.validate();
          const Design design{label, schedule};
          return run_trajectory(table_from_rows(rows), config, design, seed, AssignmentMode::batched(batch_size));
        },
        py::arg("table"), py::arg("policy") = "thompson_beta", py::arg("schedule") = std::nullopt,
        py::arg("seed") = 0, py::arg("batch_size") = 1, py::arg("mc_draws") = 1000, py::arg("label") = "design");
  m.def("cs_track",
        [](const Trajectory& t, double eta, double alpha, std::size_t treatment, std::size_t control) {
          return cs_track(t, {treatment, control}, eta, alpha, t.mode);
        },
        py::arg("trajectory"), py::arg("eta"), py::arg("alpha") = 0.05, py::arg("treatment") = 1,
        py::arg("control") = 0);
  m.def("stopping_time",
        [](const ConfidenceSequenceTrack& track) { return stopping_time(track).stop_time; }, py::arg("track"));

  m.def("list_presets", [] {
    std::vector<std::string> names;
    for (const auto& p : preset_catalog()) names.push_back(p.name);
    return names;
  });
  m.def("preset_json", [](const std::string& name) {
    const auto p = find_preset(name);
    if (!p) throw ParameterError("preset", "unknown preset '" + name + "'");
    return preset_to_json(*p).dump(2);
  });
  m.def("run_preset",
        [](const std::string& preset, std::uint64_t seed, std::optional<std::size_t> replicates,
           std::optional<std::size_t> horizon, std::size_t jobs) {
          RunConfig config = config_for(preset);
          Overrides o;
          o.replicates = replicates;
          o.horizon = horizon;
          apply_overrides(config, o);
          config.preset.validate();
          ExperimentResult result;
          {
            py::gil_scoped_release release;
            result = run_preset(config.preset, seed, RunOptions{jobs, false});
          }
          py::dict finals;
          for (const auto& c : result.curves.curves) {
            py::dict metrics;
            for (const auto& [name, stat] : c.metrics) {
              if (stat.size() > 0) metrics[py::str(name)] = py::make_tuple(stat.mean.back(), stat.se.back());
            }
            const std::string contrast = std::to_string(c.pair.treatment) + "-" + std::to_string(c.pair.control);
            finals[py::make_tuple(c.setting, c.design, contrast)] = metrics;
          }
          py::dict out;
          out["preset"] = result.preset;
          out["eta"] = result.eta;
          out["final"] = finals;
          out["metrics_csv"] = metrics_csv(result);
          if (result.race) {
            out["median_gap"] = result.race->median_gap();
            out["race_csv"] = race_csv(*result.race);
          }
          return out;
        },
        py::arg("preset"), py::arg("seed") = 0, py::arg("replicates") = std::nullopt,
        py::arg("horizon") = std::nullopt, py::arg("jobs") = 1);
}
