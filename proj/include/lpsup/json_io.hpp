#pragma once

#include <json.hpp>

#include "lpsup/extreme_constants.hpp"
#include "lpsup/gaussian_paths.hpp"
#include "lpsup/mc_validation.hpp"
#include "lpsup/norm_geometry.hpp"
#include "lpsup/pointwise_tail.hpp"
#include "lpsup/tail_asymptotics.hpp"

namespace lpsup {

using Json = nlohmann::ordered_json;

/// p as a number, or the string "inf".
Json p_to_json(double p);
double p_from_json(const nlohmann::json& j);

Json to_json(const ProcessModel& m);
ProcessModel model_from_json(const nlohmann::json& j);

Json to_json(const Trend& g);
Trend trend_from_json(const nlohmann::json& j);

Json to_json(const DualGeometry& g, const WeightVector& w);
Json to_json(const PointwiseTail& t);
Json to_json(const PointwiseMC& m);
Json to_json(const ConstantEstimate& e);
Json to_json(const DriftFunctional& f);
Json to_json(const ResolvedConstant& c);
Json to_json(const TailApproximation& t);
Json to_json(const RuinAsymptotic& r);
Json to_json(const MCEstimate& e);
Json to_json(const RatioTable& t);
Json to_json(const SamplePlan& p);

SupremumQuery query_from_json(const nlohmann::json& j);
Json to_json(const SupremumQuery& q);

}  // namespace lpsup
