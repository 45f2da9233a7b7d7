#pragma once

#include <nlohmann/json.hpp>

#include "qb/balance.hpp"
#include "qb/fit.hpp"
#include "qb/histogram.hpp"
#include "qb/synth.hpp"
#include "qb/theory.hpp"

namespace qb {

using nlohmann::json;

void to_json(json& j, const LogBinGrid& g);
void from_json(const json& j, LogBinGrid& g);
void to_json(json& j, const Window& w);
void from_json(const json& j, Window& w);
void to_json(json& j, const LineFit& f);
void to_json(json& j, const ParetoFit& f);
void to_json(json& j, const LogNormalFit& f);
void to_json(json& j, const TentFit& f);
void to_json(json& j, const NonGibratFit& f);
void to_json(json& j, const QuasiBalanceFit& f);
void to_json(json& j, const GammaResult& g);
void to_json(json& j, const SymmetryReport& s);
void to_json(json& j, const RelationReport& r);
void to_json(json& j, const TheoryParams& p);
void to_json(json& j, const TentKernelParams& k);
void to_json(json& j, const GeneratorSpec& s);
void from_json(const json& j, GeneratorSpec& s);
void to_json(json& j, const GroundTruth& t);

/// Finite doubles as numbers, NaN and infinities as null.
json number_or_null(double v);

}  // namespace qb
