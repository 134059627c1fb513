#pragma once

#include "qmeas/collectives.hpp"
#include "qmeas/joint_nonideal.hpp"
#include "qmeas/observables.hpp"
#include "qmeas/states.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qmeas {

/// Raised for malformed or semantically invalid input documents.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// State vector document: { "dims": [d1, d2?], "amplitudes": [[re, im], ...] }.
struct StateDocument {
    StateVector state;
    std::vector<int> dims;
};
StateDocument parse_state_vector(const std::string& text);
std::string to_json(const StateVector& v, const std::vector<int>& dims);

/// Density operator document: { "dims": [...], "matrix": [[[re,im],...],...] }.
struct DensityDocument {
    DensityOperator op;
    std::vector<int> dims;
};
DensityDocument parse_density_operator(const std::string& text);
std::string to_json(const DensityOperator& rho, const std::vector<int>& dims);

/// Observable document: { "labels": [...], "effects": [matrix, ...] }.
DiscretePVM parse_pvm(const std::string& text);
DiscretePOVM parse_povm(const std::string& text);
std::string to_json(const DiscretePOVM& povm);

/// { "apparatus_initial": density, "unitary": matrix, "pointer_pvm": observable }.
MeasurementModel parse_measurement_model(const std::string& text);

/// { "row_labels": [...], "col_labels": [...], "effects": [[matrix,...],...] }.
BivariatePOVM parse_bivariate_povm(const std::string& text);

/// Selection rule array; kinds:
///   { "kind": "every_kth", "k": 2, "offset": 0 }
///   { "kind": "side_channel_equals", "label": 1 }
///   { "kind": "history_prev_equals", "value": 0 }
std::vector<SelectionRule> parse_selection_rules(const std::string& text);

/// Complex matrix as nested [re, im] rows.
std::string matrix_to_json(const ComplexMatrix& m);

/// Shortest round-trip decimal representation of a double (std::to_chars),
/// the numeric format used by every CSV report.
std::string format_double(double value);

}  // namespace qmeas
