#pragma once

// JSON encodings shared by schedules, step-unitary lists and reports.
// Dense complex matrices are nested arrays of [re, im] pairs, row by row.

#include "timeless/pm_engine.hpp"

#include <json.hpp>

#include <iosfwd>
#include <vector>

namespace timeless::io {

using Json = nlohmann::json;

Json to_json(const COperator& m);
COperator operator_from_json(const Json& j);

Json to_json(const CVector& v);
CVector vector_from_json(const Json& j);

Json to_json(const WindowFunction& w);
WindowFunction window_from_json(const Json& j);

/// {"system_dim", "ancilla_dims", "free_hamiltonian"?, "terms": [{window, center, coupling}]}
Json to_json(const InteractionSchedule& s);
InteractionSchedule schedule_from_json(const Json& j);

Json steps_to_json(const std::vector<COperator>& steps);
std::vector<COperator> steps_from_json(const Json& j);

/// {"orders_used", "converged", "residual" (null if unavailable), "term_norms", "ratios"}
Json to_json(const BornSeriesReport& report);

/// Header t,re_0,im_0,...,norm,denominator; one row per grid point.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace timeless::io
