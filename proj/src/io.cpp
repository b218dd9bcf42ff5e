#include "drsn/io.hpp"

#include <fstream>

namespace drsn {

using nlohmann::json;

json series_to_json(const MultiSeries& f) {
    json terms = json::array();
    for (const auto& [idx, c] : f.terms())
        terms.push_back({{"m", idx.m},
                         {"n1", idx.n1},
                         {"n2", idx.n2},
                         {"re", c.real()},
                         {"im", c.imag()}});
    return json{{"x_order", f.x_order()}, {"y_order", f.y_order()}, {"terms", terms}};
}

MultiSeries series_from_json(const json& j) {
    if (!j.contains("x_order") || !j.contains("y_order"))
        throw parse_error("series: missing truncation header");
    MultiSeries f(j.at("x_order").get<int>(), j.at("y_order").get<int>());
    for (const auto& t : j.value("terms", json::array()))
        f.add({t.at("m").get<int>(), t.at("n1").get<int>(), t.at("n2").get<int>()},
              cplx(t.at("re").get<double>(), t.value("im", 0.0)));
    return f;
}

json uniseries_to_json(const UniSeries& f) {
    json c = json::array();
    for (int k = 0; k < f.order(); ++k)
        c.push_back({{"re", f.coeff(k).real()}, {"im", f.coeff(k).imag()}});
    return json{{"order", f.order()}, {"coeffs", c}};
}

UniSeries uniseries_from_json(const json& j) {
    UniSeries f(j.at("order").get<int>());
    int k = 0;
    for (const auto& t : j.value("coeffs", json::array()))
        f.set(k++, cplx(t.at("re").get<double>(), t.value("im", 0.0)));
    return f;
}

json cplx_to_json(cplx c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

cplx cplx_from_json(const json& j) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    return cplx(j.at("re").get<double>(), j.value("im", 0.0));
}

json field_to_json(const SaddleNodeField& Y) {
    return json{{"lambda", cplx_to_json(Y.lambda)},
                {"components",
                 {{"comp_y1", series_to_json(Y.field.comp_y1)},
                  {"comp_y2", series_to_json(Y.field.comp_y2)}}}};
}

SaddleNodeField field_from_json(const json& j) {
    if (!j.contains("components")) throw parse_error("field: missing components");
    const json& comps = j.at("components");
    MultiSeries y1 = series_from_json(comps.at("comp_y1"));
    MultiSeries y2 = series_from_json(comps.at("comp_y2"));
    if (!y1.same_orders(y2)) throw parse_error("field: component truncations differ");
    PolyVectorField f;
    f.comp_x = MultiSeries::monomial({2, 0, 0}, 1.0, y1.x_order(), y1.y_order());
    f.comp_y1 = y1;
    f.comp_y2 = y2;
    cplx lambda = j.contains("lambda") ? cplx_from_json(j.at("lambda")) : y2.coeff(0, 0, 1);
    return make_saddle_node(f, lambda);
}

json vector_field_to_json(const PolyVectorField& Y) {
    return json{{"comp_x", series_to_json(Y.comp_x)},
                {"comp_y1", series_to_json(Y.comp_y1)},
                {"comp_y2", series_to_json(Y.comp_y2)}};
}

PolyVectorField vector_field_from_json(const json& j) {
    PolyVectorField f;
    f.comp_x = series_from_json(j.at("comp_x"));
    f.comp_y1 = series_from_json(j.at("comp_y1"));
    f.comp_y2 = series_from_json(j.at("comp_y2"));
    return f;
}

json normal_form_to_json(const NormalFormData& nf) {
    json stages = json::array();
    for (const auto& [name, r] : nf.stage_remainders)
        stages.push_back({{"stage", name}, {"remainder", r}});
    return json{{"lambda", cplx_to_json(nf.lambda)},
                {"a1", cplx_to_json(nf.a1)},
                {"a2", cplx_to_json(nf.a2)},
                {"c1", uniseries_to_json(nf.c1)},
                {"c2", uniseries_to_json(nf.c2)},
                {"d_N", uniseries_to_json(nf.d_N)},
                {"residual_max", nf.residual_max},
                {"nonresonant_defect", nf.nonresonant_defect},
                {"condition", nf.condition},
                {"stages", stages}};
}

json map_to_json(const ConjugacyMap& m) {
    return json{{"comp_y1", series_to_json(m.comp_y1)},
                {"comp_y2", series_to_json(m.comp_y2)},
                {"tangent_to_identity", m.is_tangent_to_identity},
                {"provenance", m.provenance}};
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace drsn
