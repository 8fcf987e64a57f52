#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "histoctx/stain.hpp"
#include "histoctx/svm.hpp"

namespace histoctx {

inline constexpr const char* kModelFormatVersion = "1";

struct ModelBundle {
    std::string task; // "region" or "cell"
    TrainedSvm svm;
    std::string feature_schema_hash; // hex
    std::optional<ChannelStats> stain_target; // region models carry the target
    bool uses_context = false;                // cell models: f_gc attached
    std::uint64_t seed = 0;
    std::map<std::string, std::int64_t> class_counts; // training counts
};

std::string schema_hash_hex(std::uint64_t hash);

// Expected schema hash for a bundle, derived from the code's feature schema.
std::string expected_schema_hash(const std::string& task, bool uses_context);

void save_model(const std::string& path, const ModelBundle& bundle);

// Throws ParseError on corrupt files, IncompatibleModel on unknown format
// versions or schema-hash mismatches.
ModelBundle load_model(const std::string& path);

} // namespace histoctx
