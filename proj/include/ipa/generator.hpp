#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ipa {

// A seeded random verification case: a small multi-module spec, one
// abstraction file per module, and the manifest tying them together.
// Abstractions are the concrete modules minus their noise actions (updates
// to module-private variables only), which the manifest maps to VOID — a
// family that satisfies the abstraction constraints by construction. With
// `mutated`, one VOID-mapped action additionally flips the shared
// interaction flag, which both the constraint check and any refinement
// check must reject.
struct GeneratedFile {
  std::string name, text;
};

struct GeneratedCase {
  uint64_t seed = 0;
  bool mutated = false;
  std::vector<GeneratedFile> files;  // spec, abstractions, then the manifest
  std::string manifest_file;
};

GeneratedCase generate_case(uint64_t seed, bool mutated);

}  // namespace ipa
