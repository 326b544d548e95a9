#include "ipa/generator.hpp"

#include <random>
#include <sstream>

namespace ipa {

namespace {

// Shape of one generated module. Every module has a progress variable p<i>
// and a kept Work action stepping it; noise modules add a private q<i> and
// a droppable Noise action; sync modules add a kept action that reads and
// rewrites the shared flag.
struct ModShape {
  int idx = 0;
  int p_hi = 1;          // p<i> : 0..p_hi
  bool has_noise = false;
  int q_hi = 1;          // q<i> : 0..q_hi
  bool has_sync = false;
  bool work_param = false;     // Work takes d in 0..1
  bool work_sets_flag = false; // Work writes the shared flag
  int flag_guard = 0;          // 0 none, 1 "flag = false", 2 "flag = true"
  bool mutated_noise = false;  // Noise also flips the flag (the seeded bug)

  std::string p() const { return "p" + std::to_string(idx); }
  std::string q() const { return "q" + std::to_string(idx); }
  std::string mod() const { return "M" + std::to_string(idx); }
  std::string abs_mod() const { return "AbsM" + std::to_string(idx); }
  std::string work() const { return "Work" + std::to_string(idx); }
  std::string noise() const { return "Noise" + std::to_string(idx); }
  std::string sync() const { return "Sync" + std::to_string(idx); }
};

void emit_work(std::ostringstream& o, const ModShape& m) {
  o << "  action " << m.work();
  if (m.work_param) o << "(d in 0..1)";
  o << "\n";
  if (m.work_param)
    o << "    when " << m.p() << " + d <= " << m.p_hi << "\n";
  else
    o << "    when " << m.p() << " < " << m.p_hi << "\n";
  if (m.flag_guard == 1) o << "    when flag = false\n";
  if (m.flag_guard == 2) o << "    when flag = true\n";
  if (m.work_param)
    o << "    then " << m.p() << "' = " << m.p() << " + d\n";
  else
    o << "    then " << m.p() << "' = " << m.p() << " + 1\n";
  if (m.work_sets_flag) o << "    then flag' = true\n";
}

void emit_sync(std::ostringstream& o, const ModShape& m) {
  o << "  action " << m.sync() << "\n";
  o << "    when " << m.p() << " = " << m.p_hi << "\n";
  o << "    when flag = true\n";
  o << "    then " << m.p() << "' = 0\n";
  o << "    then flag' = false\n";
}

void emit_noise(std::ostringstream& o, const ModShape& m, bool concrete) {
  o << "  action " << m.noise() << "\n";
  o << "    when " << m.q() << " < " << m.q_hi << "\n";
  o << "    then " << m.q() << "' = " << m.q() << " + 1\n";
  if (concrete && m.mutated_noise) o << "    then flag' = not flag\n";
}

std::string spec_text(uint64_t seed, const std::vector<ModShape>& mods) {
  std::ostringstream o;
  o << "spec Gen" << seed << "\n\n";
  o << "vars\n";
  o << "  flag : bool\n";
  for (const ModShape& m : mods) {
    o << "  " << m.p() << " : 0.." << m.p_hi << "\n";
    if (m.has_noise) o << "  " << m.q() << " : 0.." << m.q_hi << "\n";
  }
  o << "\ninit\n";
  o << "  flag = false\n";
  for (const ModShape& m : mods) {
    o << "  " << m.p() << " = 0\n";
    if (m.has_noise) o << "  " << m.q() << " = 0\n";
  }
  for (const ModShape& m : mods) {
    o << "\nmodule " << m.mod() << "\n";
    emit_work(o, m);
    if (m.has_sync) emit_sync(o, m);
    if (m.has_noise) emit_noise(o, m, true);
  }
  return o.str();
}

std::string abstraction_text(uint64_t seed, const ModShape& m) {
  std::ostringstream o;
  o << "spec Gen" << seed << "Abs" << m.idx << "\n\n";
  o << "vars\n";
  bool uses_flag = m.work_sets_flag || m.has_sync || m.flag_guard != 0;
  if (uses_flag) o << "  flag : bool\n";
  o << "  " << m.p() << " : 0.." << m.p_hi << "\n";
  o << "\ninit\n";
  if (uses_flag) o << "  flag = false\n";
  o << "  " << m.p() << " = 0\n";
  o << "\nmodule " << m.abs_mod() << "\n";
  emit_work(o, m);
  if (m.has_sync) emit_sync(o, m);
  return o.str();
}

std::string manifest_text(uint64_t seed, const std::vector<ModShape>& mods) {
  std::ostringstream o;
  o << "manifest Gen" << seed << "\n";
  o << "spec \"spec.ipa\"\n\n";
  for (const ModShape& m : mods)
    o << "module " << m.mod() << " = \"abs_" << m.mod() << ".ipa\"\n";
  o << "\n";
  for (const ModShape& m : mods) {
    o << "map " << m.mod() << "." << m.work() << " -> " << m.abs_mod() << "."
      << m.work() << "\n";
    if (m.has_sync)
      o << "map " << m.mod() << "." << m.sync() << " -> " << m.abs_mod()
        << "." << m.sync() << "\n";
    if (m.has_noise)
      o << "map " << m.mod() << "." << m.noise() << " -> void\n";
  }
  o << "\ninvariant bounds = ";
  for (size_t i = 0; i < mods.size(); i++) {
    if (i) o << " and ";
    o << mods[i].p() << " <= " << mods[i].p_hi;
  }
  o << "\n";
  return o.str();
}

}  // namespace

GeneratedCase generate_case(uint64_t seed, bool mutated) {
  std::mt19937_64 rng(seed);
  auto pick = [&](uint64_t n) { return static_cast<int>(rng() % n); };

  GeneratedCase c;
  c.seed = seed;
  c.mutated = mutated;

  const int k = 2 + pick(2);
  std::vector<ModShape> mods(static_cast<size_t>(k));
  for (int i = 0; i < k; i++) {
    ModShape& m = mods[static_cast<size_t>(i)];
    m.idx = i + 1;
    m.p_hi = 1 + pick(3);
    m.has_noise = pick(4) != 0;
    m.q_hi = 1 + pick(2);
    m.has_sync = pick(2) != 0;
    m.work_param = pick(3) == 0;
    m.work_sets_flag = pick(2) != 0;
    // The first two modules always read the flag, making it a shared
    // dependency of at least two modules.
    m.flag_guard = i < 2 ? 1 + pick(2) : pick(3);
    // A sync action needs someone to raise the flag.
    if (m.has_sync) m.work_sets_flag = true;
  }
  if (mutated) {
    // Plant the bug in a module guaranteed to have a noise action. Noise is
    // enabled from the initial state, so the broken VOID step is reachable.
    ModShape& victim = mods[static_cast<size_t>(pick(static_cast<uint64_t>(k)))];
    victim.has_noise = true;
    victim.mutated_noise = true;
  }

  c.files.push_back({"spec.ipa", spec_text(seed, mods)});
  for (const ModShape& m : mods)
    c.files.push_back({"abs_" + m.mod() + ".ipa", abstraction_text(seed, m)});
  c.files.push_back({"manifest.ipam", manifest_text(seed, mods)});
  c.manifest_file = "manifest.ipam";
  return c;
}

}  // namespace ipa
