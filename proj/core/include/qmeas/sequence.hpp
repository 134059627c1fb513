#pragma once

#include <optional>
#include <vector>

namespace qmeas {

/// Ordered measurement record. `values` are outcome indices; `side_channel`,
/// when present, carries one label per element (a preparation setting, a
/// coincidence partner's outcome, ...) and has the same length as values.
struct OutcomeSequence {
    std::vector<int> values;
    std::optional<std::vector<int>> side_channel;

    std::size_t size() const { return values.size(); }
};

}  // namespace qmeas
