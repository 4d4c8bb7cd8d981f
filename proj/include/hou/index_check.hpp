#pragma once

#include <cstdint>

#include "hou/engine.hpp"
#include "hou/term.hpp"

namespace hou {

enum class Confirmation : std::uint8_t { Yes, No, Unknown };
const char* confirmation_name(Confirmation c);

// Renames the free variables of t apart from those of `avoid`.
Term rename_apart(const Term& t, const Term& avoid);
// Replaces the free variables of t by fresh constants not occurring in
// `avoid` or t.
Term freeze(const Term& t, const Term& avoid);

// Engine-backed ground truth for retrieval: unifiability of q with a renamed
// copy of t, and matching of q onto t (only q's variables are instantiated).
Confirmation confirm_unifiable(const Term& q, const Term& t, const EngineConfig& cfg, std::uint64_t max_pulls = 20000);
Confirmation confirm_matching(const Term& q, const Term& t, const EngineConfig& cfg, std::uint64_t max_pulls = 20000);

}  // namespace hou
