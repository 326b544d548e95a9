#include "ipa/value.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace ipa {

namespace {

size_t mix(size_t h, size_t v) {
  // boost::hash_combine flavored mixing.
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

size_t hash_node(const Value::Kind kind, bool b, int64_t i,
                 const std::string& s, const std::vector<Value>& items,
                 const std::vector<std::pair<std::string, Value>>& fields,
                 const std::vector<std::pair<Value, Value>>& entries) {
  size_t h = static_cast<size_t>(kind) * 0x9e3779b9u + 1;
  switch (kind) {
    case Value::Kind::Bool:
      h = mix(h, b ? 2u : 1u);
      break;
    case Value::Kind::Int:
      h = mix(h, static_cast<size_t>(i));
      break;
    case Value::Kind::Sym:
      h = mix(h, std::hash<std::string>{}(s));
      break;
    case Value::Kind::Set:
    case Value::Kind::Seq:
      for (const Value& v : items) h = mix(h, v.hash());
      break;
    case Value::Kind::Rec:
      for (const auto& [name, v] : fields) {
        h = mix(h, std::hash<std::string>{}(name));
        h = mix(h, v.hash());
      }
      break;
    case Value::Kind::Map:
      for (const auto& [k, v] : entries) {
        h = mix(h, k.hash());
        h = mix(h, v.hash());
      }
      break;
  }
  return h;
}

}  // namespace

Value::Value() : Value(boolean(false).node_) {}

Value Value::boolean(bool b) {
  static const Value t = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bool;
    n->b = true;
    n->hash = hash_node(Kind::Bool, true, 0, {}, {}, {}, {});
    return Value(std::move(n));
  }();
  static const Value f = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bool;
    n->b = false;
    n->hash = hash_node(Kind::Bool, false, 0, {}, {}, {}, {});
    return Value(std::move(n));
  }();
  return b ? t : f;
}

Value Value::integer(int64_t i) {
  // Small integers dominate this workload (indices, counters, terms);
  // sharing their nodes keeps states cheap and evaluation allocation-free.
  static constexpr int64_t kSmall = 128;
  auto fresh = [](int64_t k) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Int;
    n->i = k;
    n->hash = hash_node(Kind::Int, false, k, {}, {}, {}, {});
    return Value(std::move(n));
  };
  static const std::vector<Value> small = [&fresh] {
    std::vector<Value> out;
    out.reserve(kSmall + 1);
    for (int64_t k = 0; k <= kSmall; k++) out.push_back(fresh(k));
    return out;
  }();
  if (i >= 0 && i <= kSmall) return small[static_cast<size_t>(i)];
  return fresh(i);
}

Value Value::symbol(const std::string& name) {
  // Per-thread interning: symbol values are drawn from a small fixed pool
  // of sort members, but get constructed on hot evaluation paths.
  thread_local std::unordered_map<std::string, Value> interned;
  auto it = interned.find(name);
  if (it != interned.end()) return it->second;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sym;
  n->s = name;
  n->hash = hash_node(Kind::Sym, false, 0, name, {}, {}, {});
  Value v(std::move(n));
  interned.emplace(name, v);
  return v;
}

Value Value::set(std::vector<Value> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Set;
  n->items = std::move(items);
  n->hash = hash_node(Kind::Set, false, 0, {}, n->items, {}, {});
  return Value(std::move(n));
}

Value Value::seq(std::vector<Value> items) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Seq;
  n->items = std::move(items);
  n->hash = hash_node(Kind::Seq, false, 0, {}, n->items, {}, {});
  return Value(std::move(n));
}

Value Value::record(std::vector<std::pair<std::string, Value>> fields) {
  std::sort(fields.begin(), fields.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto n = std::make_shared<Node>();
  n->kind = Kind::Rec;
  n->fields = std::move(fields);
  n->hash = hash_node(Kind::Rec, false, 0, {}, {}, n->fields, {});
  return Value(std::move(n));
}

Value Value::map(std::vector<std::pair<Value, Value>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return compare(a.first, b.first) < 0;
  });
  auto n = std::make_shared<Node>();
  n->kind = Kind::Map;
  n->entries = std::move(entries);
  n->hash = hash_node(Kind::Map, false, 0, {}, {}, {}, n->entries);
  return Value(std::move(n));
}

const Value* Value::field(const std::string& name) const {
  for (const auto& [f, v] : node_->fields)
    if (f == name) return &v;
  return nullptr;
}

const Value* Value::at_key(const Value& key) const {
  const auto& es = node_->entries;
  auto it = std::lower_bound(es.begin(), es.end(), key,
                             [](const auto& e, const Value& k) {
                               return compare(e.first, k) < 0;
                             });
  if (it != es.end() && it->first == key) return &it->second;
  return nullptr;
}

bool Value::contains(const Value& v) const {
  const auto& xs = node_->items;
  return std::binary_search(xs.begin(), xs.end(), v);
}

int Value::compare(const Value& a, const Value& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Kind::Bool:
      return (a.as_bool() ? 1 : 0) - (b.as_bool() ? 1 : 0);
    case Kind::Int:
      return a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
    case Kind::Sym:
      return a.sym_name().compare(b.sym_name());
    case Kind::Set:
    case Kind::Seq: {
      const auto& xs = a.items();
      const auto& ys = b.items();
      size_t n = std::min(xs.size(), ys.size());
      for (size_t i = 0; i < n; i++) {
        int c = compare(xs[i], ys[i]);
        if (c != 0) return c;
      }
      return xs.size() < ys.size() ? -1 : (xs.size() > ys.size() ? 1 : 0);
    }
    case Kind::Rec: {
      const auto& xs = a.fields();
      const auto& ys = b.fields();
      size_t n = std::min(xs.size(), ys.size());
      for (size_t i = 0; i < n; i++) {
        int c = xs[i].first.compare(ys[i].first);
        if (c != 0) return c;
        c = compare(xs[i].second, ys[i].second);
        if (c != 0) return c;
      }
      return xs.size() < ys.size() ? -1 : (xs.size() > ys.size() ? 1 : 0);
    }
    case Kind::Map: {
      const auto& xs = a.entries();
      const auto& ys = b.entries();
      size_t n = std::min(xs.size(), ys.size());
      for (size_t i = 0; i < n; i++) {
        int c = compare(xs[i].first, ys[i].first);
        if (c != 0) return c;
        c = compare(xs[i].second, ys[i].second);
        if (c != 0) return c;
      }
      return xs.size() < ys.size() ? -1 : (xs.size() > ys.size() ? 1 : 0);
    }
  }
  return 0;
}

std::string Value::str() const {
  std::ostringstream out;
  switch (kind()) {
    case Kind::Bool:
      out << (as_bool() ? "true" : "false");
      break;
    case Kind::Int:
      out << as_int();
      break;
    case Kind::Sym:
      out << sym_name();
      break;
    case Kind::Set: {
      out << "{";
      bool first = true;
      for (const Value& v : items()) {
        if (!first) out << ", ";
        first = false;
        out << v.str();
      }
      out << "}";
      break;
    }
    case Kind::Seq: {
      out << "<<";
      bool first = true;
      for (const Value& v : items()) {
        if (!first) out << ", ";
        first = false;
        out << v.str();
      }
      out << ">>";
      break;
    }
    case Kind::Rec: {
      out << "[";
      bool first = true;
      for (const auto& [f, v] : fields()) {
        if (!first) out << ", ";
        first = false;
        out << f << " |-> " << v.str();
      }
      out << "]";
      break;
    }
    case Kind::Map: {
      out << "(";
      bool first = true;
      for (const auto& [k, v] : entries()) {
        if (!first) out << ", ";
        first = false;
        out << k.str() << " :> " << v.str();
      }
      out << ")";
      break;
    }
  }
  return out.str();
}

}  // namespace ipa
