#ifndef WQUANT_JSON_IO_HPP
#define WQUANT_JSON_IO_HPP

#include "wquant/harness.hpp"
#include "wquant/quantize.hpp"
#include "wquant/tail.hpp"

#include "json.hpp"

// JSON bindings for configs, measures, schemes and reports. Discrete
// measures, lattices and approximants round-trip losslessly (doubles go
// through the shortest-representation printer); density measures cannot
// carry their pdf closure through JSON, so they serialize as a descriptive
// stub and only construction *from* JSON is fully supported for them.
// Report emitters never write timestamps or environment data: the same run
// must produce byte-identical reports.

namespace wquant {

Measure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const Measure& mu);

Lattice lattice_from_json(const nlohmann::json& j);
nlohmann::json lattice_to_json(const Lattice& L);

nlohmann::json approximant_to_json(const Approximant& ap);
Approximant approximant_from_json(const nlohmann::json& j);

// One-shot quantization job: a measure plus either a lattice scheme
// ("lattice" + "h") or an explicit site list ("sites", optional "support").
struct QuantizeJob {
    Measure measure;
    VoronoiScheme scheme;
    ApproximantMode mode = ApproximantMode::dirac;
    double p = 2.0;
    DiscretizeOptions disc;
};
QuantizeJob quantize_job_from_json(const nlohmann::json& j);

// Shared by the h- and N-sweep commands: which one runs is decided by
// whether the config carries "hs" or "budgets".
SweepConfig sweep_config_from_json(const nlohmann::json& j);
NonuniformConfig nonuniform_config_from_json(const nlohmann::json& j);
TailConfig tail_config_from_json(const nlohmann::json& j);
BaselineConfig baseline_config_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const SweepReport& rep);
nlohmann::json report_to_json(const NonuniformReport& rep);
nlohmann::json report_to_json(const TailReport& rep);
nlohmann::json report_to_json(const BaselineReport& rep);
nlohmann::json report_to_json(const AcceptanceResult& res);

} // namespace wquant

#endif
