#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbrl/bench/metrics.hpp"

namespace mbrl {

// CSV schema: header `seed,timestep,episode_return`; one row per logged
// episode, seeds in order. Returns round-trip exactly (%.17g).
void write_raw_csv(const ExperimentRecord& rec, const std::string& path);
ExperimentRecord read_raw_csv(const std::string& path);

nlohmann::json summary_json(const ExperimentRecord& rec, const ScoreSummary& score);

// One table row per record: | env | algo | return | in "mean ± std" form.
std::string markdown_table(const std::vector<ExperimentRecord>& recs,
                           const std::vector<ScoreSummary>& scores);

// Curve rows: per episode index present in every effective seed, the mean
// and population std across seeds of window-5 smoothed returns, stamped with
// the latest timestep at that index.
std::string curves_csv(const ExperimentRecord& rec, int window_episodes = 5);

// formats: any of csv | json | md | curves. Writes raw.csv, summary.json,
// table.md, curves.csv under out_dir. Unknown or empty formats throw with
// the supported list; an unwritable out_dir throws.
void emit_report(const ExperimentRecord& rec, const ScoreSummary& score,
                 const std::string& out_dir, const std::vector<std::string>& formats);

// Sidecar for wall-clock seconds; excluded from determinism guarantees.
void write_timing(const ExperimentRecord& rec, const std::string& out_dir);

}  // namespace mbrl
