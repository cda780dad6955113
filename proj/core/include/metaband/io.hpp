#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "metaband/envsim.hpp"
#include "metaband/metatrain.hpp"
#include "metaband/tree.hpp"

namespace metaband {

// JSON text formats. Doubles are written in shortest round-trip form, so a
// save/load cycle reproduces every value bit for bit.

std::string collection_to_json(const BanditCollection& coll);
BanditCollection collection_from_json(std::string_view text);

std::string estimate_to_json(const EstimatedCollection& est);
EstimatedCollection estimate_from_json(std::string_view text);

/// Nested {arm, threshold, lambda, tasks, true, false} | {leaf, tasks}.
std::string tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(std::string_view text);

std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text(const std::filesystem::path& path, std::string_view text);

inline BanditCollection load_collection(const std::filesystem::path& p) { return collection_from_json(read_text(p)); }
inline void save_collection(const std::filesystem::path& p, const BanditCollection& c) {
  write_text(p, collection_to_json(c));
}
inline EstimatedCollection load_estimate(const std::filesystem::path& p) { return estimate_from_json(read_text(p)); }
inline void save_estimate(const std::filesystem::path& p, const EstimatedCollection& e) {
  write_text(p, estimate_to_json(e));
}
inline DecisionTree load_tree(const std::filesystem::path& p) { return tree_from_json(read_text(p)); }
inline void save_tree(const std::filesystem::path& p, const DecisionTree& t) { write_text(p, tree_to_json(t)); }

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace metaband
