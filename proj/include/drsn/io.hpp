#pragma once

// JSON serialization of series, fields and reports.  Series records are
// sorted lexicographically by (m, n1, n2) so output is reproducible
// bit-for-bit.

#include "drsn/normal_form.hpp"
#include "drsn/saddle_node.hpp"
#include "drsn/series.hpp"

#include <json.hpp>

#include <string>

namespace drsn {

nlohmann::json series_to_json(const MultiSeries& f);
MultiSeries series_from_json(const nlohmann::json& j);

nlohmann::json uniseries_to_json(const UniSeries& f);
UniSeries uniseries_from_json(const nlohmann::json& j);

nlohmann::json cplx_to_json(cplx c);
cplx cplx_from_json(const nlohmann::json& j);

// Field files: {"lambda": {re, im} (optional), "components": {"comp_y1": ...,
// "comp_y2": ...}}; comp_x is implied x^2.  When lambda is absent it is read
// off the linear part.  Validates the diagonal saddle-node shape.
nlohmann::json field_to_json(const SaddleNodeField& Y);
SaddleNodeField field_from_json(const nlohmann::json& j);

// raw vector field, all three components explicit
nlohmann::json vector_field_to_json(const PolyVectorField& Y);
PolyVectorField vector_field_from_json(const nlohmann::json& j);

nlohmann::json normal_form_to_json(const NormalFormData& nf);
nlohmann::json map_to_json(const ConjugacyMap& m);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

} // namespace drsn
