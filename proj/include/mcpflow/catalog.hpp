#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mcpflow/sequence.hpp"

namespace mcpflow {

// Feature vocabulary and label names. Dynamic indices run over treatment,
// then medication, then nursing.
struct Catalog {
    std::vector<std::string> profile;
    std::vector<std::string> treatment;
    std::vector<std::string> medication;
    std::vector<std::string> nursing;
    std::vector<std::string> states;
    std::vector<std::string> durations;

    FeatureLayout layout() const;
    LabelSpace labels() const;

    std::optional<int> profile_index(std::string_view code) const;
    std::optional<int> dynamic_index(std::string_view code) const;

    // FNV-1a over the canonical serialization; stable across platforms.
    std::uint64_t hash() const;
    std::string hash_hex() const;

    // Generic names: p0.., t0.., state1.., d1.. with the last duration "d>K".
    static Catalog synthetic(const FeatureLayout& layout, const LabelSpace& labels);

    void build_index();

private:
    std::unordered_map<std::string, int> profile_lookup_;
    std::unordered_map<std::string, int> dynamic_lookup_;
};

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace mcpflow
