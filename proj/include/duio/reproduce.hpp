#pragma once

// Reproduction pipeline for the bundled benchmark scenarios and the shared
// trace/plot writers used by the CLI.

#include <optional>
#include <string>

#include "duio/refcase.hpp"
#include "duio/report.hpp"
#include "duio/scenario.hpp"
#include "duio/simulate.hpp"

namespace duio {

// One row per sample: time, x(1..n), per-node x_hat and |e_i|, V.
void write_trace_csv(const std::string& path, const SimulationTrace& trace);

// Per-state overlay plots (true state vs all node estimates) plus a V(t)
// plot, with the exponential envelope overlaid when mu > 0. Returns the list
// of files written.
std::vector<std::string> emit_plots(const std::string& out_dir,
                                    const std::string& prefix,
                                    const SimulationTrace& trace,
                                    const ObserverDesign& design,
                                    double mu = 0.0);

// Runs check -> regression verify -> coupling/decay comparisons -> simulation
// for one bundled scenario (1, 2 or 3), appending pass/fail rows to the
// report. out_dir empty = no files written.
void reproduce_scenario(int which, const std::string& out_dir, RunReport& report);

}  // namespace duio
