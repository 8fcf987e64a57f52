#include "histoctx/voting.hpp"

namespace histoctx {

CellClass region_to_cell(RegionClass region) {
    switch (region) {
        case RegionClass::Tumour: return CellClass::Cancer;
        case RegionClass::Stroma: return CellClass::Stromal;
        case RegionClass::Epidermis: return CellClass::Epidermis;
        case RegionClass::Lumen: break;
    }
    throw InvalidArgument("lumen has no cell-class counterpart");
}

CellClass vote(const ClassProbabilities& ranking, RegionClass region) {
    if (ranking.ranking.size() != kCellClasses.size())
        throw InvalidArgument("ranking must cover all four cell classes");
    CellClass top = static_cast<CellClass>(ranking.ranking[0]);
    if (region == RegionClass::Lumen) return top;
    if (region == RegionClass::Epidermis) return CellClass::Epidermis;
    CellClass mapped = region_to_cell(region);
    if (top == mapped || top == CellClass::Lymphocyte) return top;
    for (size_t i = 1; i < ranking.ranking.size(); ++i) {
        CellClass k = static_cast<CellClass>(ranking.ranking[i]);
        if (k == mapped || k == CellClass::Lymphocyte) return k;
    }
    return mapped; // unreachable: mapped is always in the ranking
}

VoteAllResult vote_all(const std::vector<ClassProbabilities>& rankings,
                       const std::vector<std::optional<RegionClass>>& regions) {
    if (rankings.size() != regions.size())
        throw InvalidArgument("vote_all: size mismatch");
    VoteAllResult out;
    out.labels.reserve(rankings.size());
    for (size_t i = 0; i < rankings.size(); ++i) {
        if (!regions[i]) {
            out.missing_context.push_back(i);
            out.labels.push_back(static_cast<CellClass>(rankings[i].ranking[0]));
        } else {
            out.labels.push_back(vote(rankings[i], *regions[i]));
        }
    }
    return out;
}

} // namespace histoctx
