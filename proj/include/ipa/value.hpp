#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ipa {

// Immutable structural value: booleans, bounded integers, enum symbols,
// finite sets, finite sequences, records, and total finite maps.
// Sets, maps and records are kept in canonical (sorted) form so that
// structural equality, ordering and hashing are well defined.
class Value {
 public:
  enum class Kind : uint8_t { Bool, Int, Sym, Set, Seq, Rec, Map };

  Value();  // false

  static Value boolean(bool b);
  static Value integer(int64_t i);
  static Value symbol(const std::string& name);
  // Canonicalizes: sorts and deduplicates.
  static Value set(std::vector<Value> items);
  static Value seq(std::vector<Value> items);
  // Canonicalizes: sorts by field name. Field names must be distinct.
  static Value record(std::vector<std::pair<std::string, Value>> fields);
  // Canonicalizes: sorts by key. Keys must be distinct.
  static Value map(std::vector<std::pair<Value, Value>> entries);

  Kind kind() const { return node_->kind; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_sym() const { return kind() == Kind::Sym; }
  bool is_set() const { return kind() == Kind::Set; }
  bool is_seq() const { return kind() == Kind::Seq; }
  bool is_rec() const { return kind() == Kind::Rec; }
  bool is_map() const { return kind() == Kind::Map; }

  bool as_bool() const { return node_->b; }
  int64_t as_int() const { return node_->i; }
  const std::string& sym_name() const { return node_->s; }
  // Set and Seq elements.
  const std::vector<Value>& items() const { return node_->items; }
  const std::vector<std::pair<std::string, Value>>& fields() const {
    return node_->fields;
  }
  const std::vector<std::pair<Value, Value>>& entries() const {
    return node_->entries;
  }

  // Field/key lookup; returns nullptr when absent.
  const Value* field(const std::string& name) const;
  const Value* at_key(const Value& key) const;
  bool contains(const Value& v) const;  // set membership

  size_t hash() const { return node_->hash; }

  // Total order over all values: kind tag first, then content.
  static int compare(const Value& a, const Value& b);

  friend bool operator==(const Value& a, const Value& b) {
    return a.node_ == b.node_ ||
           (a.node_->hash == b.node_->hash && compare(a, b) == 0);
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b) {
    return compare(a, b) < 0;
  }

  // Literal-style rendering ({s1, s2}, <<1, 2>>, [cmd |-> 1, term |-> 2]).
  std::string str() const;

 private:
  struct Node {
    Kind kind = Kind::Bool;
    bool b = false;
    int64_t i = 0;
    std::string s;
    std::vector<Value> items;
    std::vector<std::pair<std::string, Value>> fields;
    std::vector<std::pair<Value, Value>> entries;
    size_t hash = 0;
  };

  explicit Value(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct ValueHash {
  size_t operator()(const Value& v) const { return v.hash(); }
};

}  // namespace ipa
