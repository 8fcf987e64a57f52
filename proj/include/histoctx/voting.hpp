#pragma once

#include <optional>
#include <vector>

#include "histoctx/classes.hpp"
#include "histoctx/svm.hpp"

namespace histoctx {

// Region class mapped into cell-class space (Tumour->Cancer, Stroma->Stromal,
// Epidermis->Epidermis). Lumen has no counterpart and is handled by vote().
CellClass region_to_cell(RegionClass region);

// Context-driven label correction:
//   1. region Epidermis forces Epidermis;
//   2. the top class t stands if it matches the mapped region or is
//      Lymphocyte;
//   3. otherwise walk the ranking down to the first class that matches the
//      mapped region or is Lymphocyte;
//   4. cells in Lumen regions keep the top class unchanged.
CellClass vote(const ClassProbabilities& ranking, RegionClass region);

struct VoteAllResult {
    std::vector<CellClass> labels;
    std::vector<std::size_t> missing_context; // cells left uncorrected
};

VoteAllResult vote_all(const std::vector<ClassProbabilities>& rankings,
                       const std::vector<std::optional<RegionClass>>& regions);

} // namespace histoctx
