#include "mcpflow/catalog.hpp"

#include <cstdio>

namespace mcpflow {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

FeatureLayout Catalog::layout() const {
    return {static_cast<int>(profile.size()),
            static_cast<int>(treatment.size() + medication.size() + nursing.size())};
}

LabelSpace Catalog::labels() const {
    return {static_cast<int>(states.size()), static_cast<int>(durations.size())};
}

void Catalog::build_index() {
    profile_lookup_.clear();
    dynamic_lookup_.clear();
    for (std::size_t i = 0; i < profile.size(); ++i) profile_lookup_.emplace(profile[i], static_cast<int>(i));
    int next = 0;
    for (const auto* block : {&treatment, &medication, &nursing})
        for (const auto& name : *block) dynamic_lookup_.emplace(name, next++);
}

std::optional<int> Catalog::profile_index(std::string_view code) const {
    auto it = profile_lookup_.find(std::string(code));
    if (it == profile_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> Catalog::dynamic_index(std::string_view code) const {
    auto it = dynamic_lookup_.find(std::string(code));
    if (it == dynamic_lookup_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Catalog::hash() const {
    std::string canonical;
    auto section = [&](std::string_view name, const std::vector<std::string>& items) {
        canonical.append(name).push_back('\x1d');
        for (const auto& item : items) canonical.append(item).push_back('\x1f');
        canonical.push_back('\x1e');
    };
    section("profile", profile);
    section("treatment", treatment);
    section("medication", medication);
    section("nursing", nursing);
    section("states", states);
    section("durations", durations);
    return fnv1a(canonical);
}

std::string Catalog::hash_hex() const { return hex64(hash()); }

Catalog Catalog::synthetic(const FeatureLayout& layout, const LabelSpace& labels) {
    Catalog c;
    for (int i = 0; i < layout.profile_dim; ++i) c.profile.push_back("p" + std::to_string(i));
    for (int i = 0; i < layout.dynamic_dim; ++i) c.treatment.push_back("t" + std::to_string(i));
    for (int i = 1; i <= labels.states; ++i) c.states.push_back("state" + std::to_string(i));
    for (int i = 1; i <= labels.durations; ++i)
        c.durations.push_back(i == labels.durations && i > 1 ? "d>" + std::to_string(i - 1)
                                                             : "d" + std::to_string(i));
    c.build_index();
    return c;
}

}  // namespace mcpflow
