#include "qmeas/io.hpp"

#include <json.hpp>

#include <charconv>
#include <system_error>

namespace qmeas {

namespace {

using nlohmann::json;

json parse_document(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string(what) + ": invalid JSON: " + e.what());
    }
}

Complex complex_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw SchemaError(std::string(what) + ": complex entries must be [re, im] pairs");
    }
    return Complex(j[0].get<double>(), j[1].get<double>());
}

json complex_to(const Complex& z) {
    return json::array({z.real(), z.imag()});
}

ComplexMatrix matrix_from(const json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw SchemaError(std::string(what) + ": matrix must be a nested array");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw SchemaError(std::string(what) + ": ragged matrix rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = complex_from(row[static_cast<std::size_t>(c)], what);
        }
    }
    return m;
}

json matrix_to(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<int> dims_from(const json& j, const char* what) {
    if (!j.is_array() || j.empty() || j.size() > 2) {
        throw SchemaError(std::string(what) + ": dims must be [d1] or [d1, d2]");
    }
    std::vector<int> dims;
    for (const auto& d : j) {
        if (!d.is_number_integer() || d.get<int>() <= 0) {
            throw SchemaError(std::string(what) + ": dims must be positive integers");
        }
        if (d.get<int>() > kMaxSubsystemDim) {
            throw SchemaError(std::string(what) + ": subsystem dimension exceeds " +
                              std::to_string(kMaxSubsystemDim));
        }
        dims.push_back(d.get<int>());
    }
    return dims;
}

int dims_product(const std::vector<int>& dims) {
    int p = 1;
    for (const int d : dims) p *= d;
    return p;
}

std::vector<std::string> labels_from(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) {
        throw SchemaError(std::string(what) + ": labels must be a nonempty array");
    }
    std::vector<std::string> labels;
    for (const auto& l : j) {
        labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
    }
    return labels;
}

const json& field(const json& j, const char* key, const char* what) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(std::string(what) + ": missing field '" + key + "'");
    }
    return *it;
}

template <typename F>
auto wrap_domain_errors(const char* what, F&& f) {
    try {
        return f();
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

StateDocument parse_state_vector(const std::string& text) {
    const char* what = "state";
    const json j = parse_document(text, what);
    const std::vector<int> dims = dims_from(field(j, "dims", what), what);
    const json& amp = field(j, "amplitudes", what);
    if (!amp.is_array() || static_cast<int>(amp.size()) != dims_product(dims)) {
        throw SchemaError("state: amplitude count does not match dims");
    }
    ComplexVector v(static_cast<Eigen::Index>(amp.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = complex_from(amp[static_cast<std::size_t>(i)], what);
    }
    return wrap_domain_errors(what, [&] {
        return StateDocument{StateVector(std::move(v)), dims};
    });
}

std::string to_json(const StateVector& v, const std::vector<int>& dims) {
    json j;
    j["dims"] = dims;
    json amps = json::array();
    for (Eigen::Index i = 0; i < v.amplitudes().size(); ++i) {
        amps.push_back(complex_to(v.amplitudes()[i]));
    }
    j["amplitudes"] = std::move(amps);
    return j.dump();
}

DensityDocument parse_density_operator(const std::string& text) {
    const char* what = "density";
    const json j = parse_document(text, what);
    const std::vector<int> dims = dims_from(field(j, "dims", what), what);
    ComplexMatrix m = matrix_from(field(j, "matrix", what), what);
    if (m.rows() != dims_product(dims) || m.cols() != m.rows()) {
        throw SchemaError("density: matrix shape does not match dims");
    }
    return wrap_domain_errors(what, [&] {
        return DensityDocument{DensityOperator(std::move(m)), dims};
    });
}

std::string to_json(const DensityOperator& rho, const std::vector<int>& dims) {
    json j;
    j["dims"] = dims;
    j["matrix"] = matrix_to(rho.matrix());
    return j.dump();
}

namespace {

std::pair<std::vector<std::string>, std::vector<ComplexMatrix>> observable_parts(
    const std::string& text, const char* what) {
    const json j = parse_document(text, what);
    auto labels = labels_from(field(j, "labels", what), what);
    const json& effects = field(j, "effects", what);
    if (!effects.is_array() || effects.size() != labels.size()) {
        throw SchemaError(std::string(what) + ": effects/labels count mismatch");
    }
    std::vector<ComplexMatrix> ops;
    for (const auto& e : effects) ops.push_back(matrix_from(e, what));
    return {std::move(labels), std::move(ops)};
}

}  // namespace

DiscretePVM parse_pvm(const std::string& text) {
    const char* what = "pvm";
    auto [labels, ops] = observable_parts(text, what);
    return wrap_domain_errors(what, [&] {
        return make_pvm(std::move(labels), std::move(ops));
    });
}

DiscretePOVM parse_povm(const std::string& text) {
    const char* what = "povm";
    auto [labels, ops] = observable_parts(text, what);
    return wrap_domain_errors(what, [&] {
        return make_povm(std::move(labels), std::move(ops));
    });
}

std::string to_json(const DiscretePOVM& povm) {
    json j;
    j["labels"] = povm.labels;
    json effects = json::array();
    for (const auto& e : povm.effects) effects.push_back(matrix_to(e));
    j["effects"] = std::move(effects);
    return j.dump();
}

MeasurementModel parse_measurement_model(const std::string& text) {
    const char* what = "measurement_model";
    const json j = parse_document(text, what);
    const DensityDocument apparatus =
        parse_density_operator(field(j, "apparatus_initial", what).dump());
    ComplexMatrix unitary = matrix_from(field(j, "unitary", what), what);
    DiscretePVM pointer = parse_pvm(field(j, "pointer_pvm", what).dump());
    return MeasurementModel{apparatus.op, std::move(unitary), std::move(pointer)};
}

BivariatePOVM parse_bivariate_povm(const std::string& text) {
    const char* what = "bivariate_povm";
    const json j = parse_document(text, what);
    auto row_labels = labels_from(field(j, "row_labels", what), what);
    auto col_labels = labels_from(field(j, "col_labels", what), what);
    const json& grid = field(j, "effects", what);
    if (!grid.is_array() || grid.size() != row_labels.size()) {
        throw SchemaError("bivariate_povm: effect grid row count mismatch");
    }
    std::vector<std::vector<ComplexMatrix>> effects;
    for (const auto& row : grid) {
        if (!row.is_array() || row.size() != col_labels.size()) {
            throw SchemaError("bivariate_povm: effect grid column count mismatch");
        }
        std::vector<ComplexMatrix> out_row;
        for (const auto& e : row) out_row.push_back(matrix_from(e, what));
        effects.push_back(std::move(out_row));
    }
    return wrap_domain_errors(what, [&] {
        return make_bivariate_povm(std::move(row_labels), std::move(col_labels),
                                   std::move(effects));
    });
}

std::vector<SelectionRule> parse_selection_rules(const std::string& text) {
    const char* what = "rules";
    const json j = parse_document(text, what);
    if (!j.is_array() || j.empty()) {
        throw SchemaError("rules: expected a nonempty array");
    }
    std::vector<SelectionRule> rules;
    for (const auto& r : j) {
        const std::string kind = field(r, "kind", what).get<std::string>();
        if (kind == "every_kth") {
            EveryKthRule rule;
            rule.k = field(r, "k", what).get<std::size_t>();
            rule.offset = r.value("offset", std::size_t{0});
            if (rule.k == 0) throw SchemaError("rules: every_kth needs k >= 1");
            rules.emplace_back(rule);
        } else if (kind == "side_channel_equals") {
            const int label = field(r, "label", what).get<int>();
            SideChannelRule rule;
            rule.name = "side_channel_equals_" + std::to_string(label);
            rule.predicate = [label](int side) { return side == label; };
            rules.emplace_back(std::move(rule));
        } else if (kind == "history_prev_equals") {
            const int value = field(r, "value", what).get<int>();
            HistoryRule rule;
            rule.name = "history_prev_equals_" + std::to_string(value);
            rule.predicate = [value](std::span<const int> prior, std::span<const int>) {
                return !prior.empty() && prior.back() == value;
            };
            rules.emplace_back(std::move(rule));
        } else {
            throw SchemaError("rules: unknown kind '" + kind + "'");
        }
    }
    return rules;
}

std::string matrix_to_json(const ComplexMatrix& m) {
    return matrix_to(m).dump();
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) return "nan";
    return std::string(buffer, ptr);
}

}  // namespace qmeas
