#pragma once

#include <json.hpp>

#include "hitchin/periods.hpp"

namespace harness {

using json = nlohmann::json;

/// Complex numbers are [re, im]; matrices are row-major lists of rows.
json to_json(const hitchin::PeriodData& pd);
hitchin::PeriodData period_data_from_json(const json& j);

json to_json(const hitchin::CycleSet& cs);
hitchin::CycleSet cycle_set_from_json(const json& j);

json to_json(const hitchin::SurfacePoint& p);
hitchin::SurfacePoint point_from_json(const json& j);

json to_json(const hitchin::CVector& v);
json to_json(const hitchin::CMatrix& m);
hitchin::CVector cvector_from_json(const json& j);
hitchin::CMatrix cmatrix_from_json(const json& j);

}  // namespace harness
