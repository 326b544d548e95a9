#include "ipa/manifest.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ipa/parser.hpp"

namespace ipa {

const Manifest::AbstractionEntry* Manifest::abstraction_for(
    const std::string& module) const {
  for (const auto& e : abstractions)
    if (e.module == module) return &e;
  return nullptr;
}

const Manifest::ActionMapEntry* Manifest::mapping_for(
    const std::string& module, const std::string& action) const {
  for (const auto& e : action_map)
    if (e.module == module && e.action == action) return &e;
  return nullptr;
}

const Manifest::RefineEntry* Manifest::refine_for(
    const std::string& var) const {
  for (const auto& e : refine)
    if (e.var == var) return &e;
  return nullptr;
}

namespace {

bool read_file(const std::filesystem::path& path, std::string& out,
               Diagnostics& diags, const SourceSpan& at) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    diags.push_back(
        error("E-io", "cannot read file '" + path.string() + "'", at));
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool load_spec(const std::filesystem::path& path, Spec& out,
               Diagnostics& diags, const SourceSpan& at) {
  std::string text;
  if (!read_file(path, text, diags, at)) return false;
  SpecParse sp = parse_spec(text, path.string());
  diags.insert(diags.end(), sp.diags.begin(), sp.diags.end());
  if (!sp.ok()) return false;
  out = std::move(*sp.spec);
  return true;
}

// Cross-spec consistency: the root spec and all abstraction specs are later
// merged into composed systems, so same-named sorts, constants and variables
// must denote the same thing everywhere.
class MergeChecker {
 public:
  explicit MergeChecker(Diagnostics& diags) : diags_(diags) {}

  void add(const Spec& s, const SourceSpan& at) {
    for (const SortDecl& d : s.sorts) {
      auto [it, fresh] = sorts_.emplace(d.name, std::make_pair(&d, s.name));
      if (!fresh && it->second.first->members != d.members)
        diags_.push_back(error(
            "E-merge",
            "sort '" + d.name + "' declared with different members in '" +
                it->second.second + "' and '" + s.name + "'",
            at));
    }
    for (const ConstDecl& d : s.consts) {
      auto [it, fresh] = consts_.emplace(d.name, std::make_pair(&d, s.name));
      if (!fresh && it->second.first->value != d.value)
        diags_.push_back(error(
            "E-merge",
            "constant '" + d.name + "' has value " +
                std::to_string(it->second.first->value) + " in '" +
                it->second.second + "' but " + std::to_string(d.value) +
                " in '" + s.name + "'",
            at));
    }
    for (const VarDecl& d : s.vars) {
      auto [it, fresh] = vars_.emplace(d.name, std::make_pair(&d, s.name));
      if (!fresh && !domain_equal(it->second.first->domain, d.domain))
        diags_.push_back(error(
            "E-merge",
            "variable '" + d.name + "' declared with different domains in '" +
                it->second.second + "' and '" + s.name + "'",
            at));
    }
  }

 private:
  Diagnostics& diags_;
  template <class T>
  using ByName = std::map<std::string, std::pair<const T*, std::string>>;
  ByName<SortDecl> sorts_;
  ByName<ConstDecl> consts_;
  ByName<VarDecl> vars_;
};

void validate_manifest(Manifest& m, Diagnostics& diags) {
  // Abstraction entries: exactly one per root module.
  std::set<std::string> abstracted;
  for (const auto& e : m.abstractions) {
    if (!m.root.find_module(e.module))
      diags.push_back(error(
          "E-manifest",
          "abstraction entry for unknown module '" + e.module + "'", e.span));
    if (!abstracted.insert(e.module).second)
      diags.push_back(error(
          "E-manifest", "module '" + e.module + "' has two abstractions",
          e.span));
    if (e.spec.modules.size() != 1)
      diags.push_back(error(
          "E-manifest",
          "abstraction spec '" + e.spec.name + "' must declare exactly one " +
              "module, found " + std::to_string(e.spec.modules.size()),
          e.span));
  }
  for (const Module& mod : m.root.modules)
    if (!abstracted.count(mod.name))
      diags.push_back(error(
          "E-manifest", "module '" + mod.name + "' has no abstraction",
          m.span));

  MergeChecker merge(diags);
  merge.add(m.root, m.span);
  for (const auto& e : m.abstractions) merge.add(e.spec, e.span);

  // Action map: exactly one entry per concrete action; targets must exist.
  std::set<std::pair<std::string, std::string>> mapped;
  for (auto& e : m.action_map) {
    const Action* concrete = m.root.find_action(e.module, e.action);
    if (!concrete) {
      diags.push_back(error(
          "E-manifest",
          "map entry for unknown action '" + e.module + "." + e.action + "'",
          e.span));
      continue;
    }
    if (!mapped.emplace(e.module, e.action).second) {
      diags.push_back(error(
          "E-manifest",
          "action '" + e.module + "." + e.action + "' is mapped twice",
          e.span));
      continue;
    }
    if (e.is_void) continue;
    const auto* abse = m.abstraction_for(e.module);
    if (!abse) continue;  // missing abstraction already reported
    const Action* target = abse->spec.find_action(e.abs_module, e.abs_action);
    if (!target) {
      diags.push_back(error(
          "E-manifest",
          "abstraction of module '" + e.module + "' has no action '" +
              e.abs_module + "." + e.abs_action + "'",
          e.span));
      continue;
    }
    if (e.args.empty()) {
      // Positional identity: arities and parameter domains must line up.
      if (concrete->params.size() != target->params.size()) {
        diags.push_back(error(
            "E-manifest",
            "'" + e.module + "." + e.action + "' has " +
                std::to_string(concrete->params.size()) +
                " parameter(s) but '" + e.abs_module + "." + e.abs_action +
                "' has " + std::to_string(target->params.size()) +
                "; give explicit arguments",
            e.span));
        continue;
      }
      for (size_t i = 0; i < concrete->params.size(); i++)
        if (!binder_domain_equal(concrete->params[i].dom,
                                 target->params[i].dom))
          diags.push_back(error(
              "E-manifest",
              "parameter " + std::to_string(i + 1) + " of '" + e.module +
                  "." + e.action + "' and '" + e.abs_module + "." +
                  e.abs_action + "' range over different domains",
              e.span));
    } else {
      if (e.args.size() != target->params.size()) {
        diags.push_back(error(
            "E-manifest",
            "'" + e.abs_module + "." + e.abs_action + "' takes " +
                std::to_string(target->params.size()) + " argument(s), got " +
                std::to_string(e.args.size()),
            e.span));
        continue;
      }
      for (size_t i = 0; i < e.args.size(); i++) {
        if (!resolve_expr_in(m.root, e.args[i], concrete->params, diags))
          continue;
        Type want = binder_domain_type(target->params[i].dom);
        if (!compatible(e.args[i]->type, want))
          diags.push_back(error(
              "E-type",
              "argument " + std::to_string(i + 1) + " of '" + e.abs_module +
                  "." + e.abs_action + "': expected " + want.str() +
                  ", got " + e.args[i]->type.str(),
              e.args[i]->span));
      }
    }
  }
  for (const Module& mod : m.root.modules)
    for (const Action& a : mod.actions)
      if (!mapped.count({mod.name, a.name}))
        diags.push_back(error(
            "E-manifest",
            "action '" + mod.name + "." + a.name + "' has no map entry",
            m.span));

  // Refine entries: one per abstract-only variable, over root variables.
  std::map<std::string, const VarDecl*> abstract_only;
  for (const auto& e : m.abstractions)
    for (const VarDecl& v : e.spec.vars)
      if (!m.root.var_index.count(v.name)) abstract_only.emplace(v.name, &v);

  std::set<std::string> refined;
  for (auto& e : m.refine) {
    if (!refined.insert(e.var).second)
      diags.push_back(error(
          "E-manifest", "variable '" + e.var + "' has two refine entries",
          e.span));
    if (m.root.var_index.count(e.var)) {
      diags.push_back(error(
          "E-manifest",
          "refine entry for root variable '" + e.var +
              "' (identity is implied for shared variables)",
          e.span));
      continue;
    }
    auto it = abstract_only.find(e.var);
    if (it == abstract_only.end()) {
      diags.push_back(error(
          "E-manifest", "refine entry for unknown variable '" + e.var + "'",
          e.span));
      continue;
    }
    if (resolve_expr_in(m.root, e.expr, {}, diags)) {
      Type want = domain_type(it->second->domain);
      if (!compatible(e.expr->type, want))
        diags.push_back(error(
            "E-type",
            "refine entry for '" + e.var + "': expected " + want.str() +
                ", got " + e.expr->type.str(),
            e.expr->span));
    }
  }
  for (const auto& [name, decl] : abstract_only)
    if (!refined.count(name))
      diags.push_back(error(
          "E-manifest",
          "abstract-only variable '" + name + "' has no refine entry",
          m.span));

  std::set<std::string> inv_names;
  for (const auto& e : m.invariants)
    if (!inv_names.insert(e.name).second)
      diags.push_back(error(
          "E-manifest", "duplicate invariant '" + e.name + "'", e.span));
  // Invariant expressions range over the merged abstract system's variables
  // and are resolved when that system is built.
}

}  // namespace

ManifestParse parse_manifest_file(const std::filesystem::path& path) {
  return parse_manifest_file(path, {});
}

ManifestParse parse_manifest_file(const std::filesystem::path& path,
                                  const std::filesystem::path& root_override) {
  ManifestParse result;
  std::string text;
  if (!read_file(path, text, result.diags, SourceSpan{path.string(), 1, 1, 0}))
    return result;
  result = parse_manifest(text, path);
  if (!result.manifest) return result;
  Manifest& m = *result.manifest;

  const std::filesystem::path base = path.parent_path();
  const std::filesystem::path root_file =
      root_override.empty() ? base / m.root_path : root_override;
  bool loaded = load_spec(root_file, m.root, result.diags, m.span);
  for (auto& e : m.abstractions)
    loaded &= load_spec(base / e.path, e.spec, result.diags, e.span);
  if (!loaded) {
    result.manifest.reset();
    return result;
  }

  validate_manifest(m, result.diags);
  if (has_errors(result.diags)) result.manifest.reset();
  return result;
}

}  // namespace ipa
