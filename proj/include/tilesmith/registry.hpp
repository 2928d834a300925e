#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tilesmith/markup.hpp"

namespace tilesmith {

// A built-in example: a substitution, an optional verified markup for it, and
// a one-line description. Entries are constructed on first access and their
// documented properties are re-verified then; a drifted reconstruction throws
// InputError instead of serving bad data.
struct RegistryEntry {
    std::string key;
    std::string summary;
    Substitution sub;
    std::optional<Markup> markup;
};

std::vector<std::string> registry_keys();
bool registry_has(const std::string& key);
const RegistryEntry& registry_get(const std::string& key);

}  // namespace tilesmith
