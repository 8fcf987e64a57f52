#pragma once

#include <array>
#include <optional>
#include <string>

#include "histoctx/errors.hpp"

namespace histoctx {

// Region classes at 1.25x, fixed order.
enum class RegionClass : int { Tumour = 0, Stroma = 1, Epidermis = 2, Lumen = 3 };

// Cell classes at 20x, fixed order (also the tie-break order for rankings).
enum class CellClass : int { Cancer = 0, Epidermis = 1, Lymphocyte = 2, Stromal = 3 };

inline constexpr std::array<RegionClass, 4> kRegionClasses = {
    RegionClass::Tumour, RegionClass::Stroma, RegionClass::Epidermis, RegionClass::Lumen};

inline constexpr std::array<CellClass, 4> kCellClasses = {
    CellClass::Cancer, CellClass::Epidermis, CellClass::Lymphocyte, CellClass::Stromal};

inline const char* to_string(RegionClass c) {
    switch (c) {
        case RegionClass::Tumour: return "tumour";
        case RegionClass::Stroma: return "stroma";
        case RegionClass::Epidermis: return "epidermis";
        case RegionClass::Lumen: return "lumen";
    }
    return "?";
}

inline const char* to_string(CellClass c) {
    switch (c) {
        case CellClass::Cancer: return "cancer";
        case CellClass::Epidermis: return "epidermis";
        case CellClass::Lymphocyte: return "lymphocyte";
        case CellClass::Stromal: return "stromal";
    }
    return "?";
}

inline RegionClass region_class_from_string(const std::string& s) {
    for (RegionClass c : kRegionClasses)
        if (s == to_string(c)) return c;
    throw ParseError("unknown region class: " + s);
}

inline CellClass cell_class_from_string(const std::string& s) {
    for (CellClass c : kCellClasses)
        if (s == to_string(c)) return c;
    throw ParseError("unknown cell class: " + s);
}

} // namespace histoctx
