#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpflow/catalog.hpp"
#include "mcpflow/datagen.hpp"
#include "mcpflow/model.hpp"

namespace mcpflow {

inline constexpr int kModelFormatVersion = 1;

// Dataset: one JSON object per line,
//   {"subject_id", "window_end", "static": [...],
//    "events": [{"time", "state", "duration", "features": [...]}],
//    "provenance": "synthetic"?}
// Feature entries are integer indices or catalog codes; unknown codes are
// dropped. A null duration is the first-event marker.
std::vector<EventSequence> read_dataset(const std::string& path, const Catalog& catalog);
void write_dataset(const std::string& path, const std::vector<EventSequence>& sequences);
std::string dataset_to_string(const std::vector<EventSequence>& sequences);

nlohmann::json catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const nlohmann::json& j);
Catalog read_catalog(const std::string& path);
void write_catalog(const std::string& path, const Catalog& catalog);

// "data.jsonl" -> "data.catalog.json"
std::string default_catalog_path(const std::string& dataset_path);

struct ModelEnvelope {
    std::unique_ptr<FlowModel> model;
    std::string catalog_hash;
    nlohmann::json extra;  // solver report, config digest, provenance
};

nlohmann::ordered_json model_to_json(const FlowModel& model, const std::string& catalog_hash,
                                     const nlohmann::json& extra);
ModelEnvelope model_from_json(const nlohmann::json& j);

void write_model(const std::string& path, const FlowModel& model, const std::string& catalog_hash,
                 const nlohmann::json& extra);
// Throws ValidationError when expected_catalog_hash is non-empty and differs.
ModelEnvelope read_model(const std::string& path, const std::string& expected_catalog_hash = {});

nlohmann::json generator_manifest(const GeneratedData& data);

// Throw IoError with the offending path.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace mcpflow
