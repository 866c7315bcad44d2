#include "nrcq/flatten_records.hpp"

#include <set>

#include "nrcq/typecheck.hpp"

namespace nrcq {

namespace {

void build_columns(const Type& t, const std::string& prefix, std::vector<std::string>& path,
                   std::vector<std::pair<std::string, std::vector<std::string>>>& out) {
  if (t.is_base()) {
    out.emplace_back(prefix, path);
    return;
  }
  if (t.is_record()) {
    for (const auto& [l, ft] : t.fields()) {
      path.push_back(l);
      build_columns(ft, prefix.empty() ? l : prefix + "_" + l, path, out);
      path.pop_back();
    }
    return;
  }
  throw FlattenError("element type contains a collection; shred instead: " + t.show());
}

KValue unflatten_at(const Type& t, const KValue& flat,
                    const std::string& prefix) {
  if (t.is_base()) {
    const KValue* f = flat.field(prefix);
    if (!f) throw FlattenError("flat row misses column " + prefix);
    return *f;
  }
  std::vector<std::pair<std::string, KValue>> fields;
  for (const auto& [l, ft] : t.fields())
    fields.emplace_back(l, unflatten_at(ft, flat, prefix.empty() ? l : prefix + "_" + l));
  return KValue::record(std::move(fields));
}

}  // namespace

KValue RecordFlattening::unflatten_elem(const KValue& flat) const {
  if (identity) return flat;
  return unflatten_at(original_elem, flat, "");
}

KValue RecordFlattening::unflatten(const KValue& rows, bool set_kind) const {
  CollectionBuilder cb;
  for (const auto& [v, m] : rows.entries()) cb.add(unflatten_elem(v), m);
  return set_kind ? std::move(cb).finish_set() : std::move(cb).finish_bag();
}

std::pair<TermPtr, RecordFlattening> flatten_records(const TermPtr& term,
                                                     const Signature& sig,
                                                     FreshSupply& fresh) {
  Type ty = typecheck(term, sig);
  if (!ty.is_collection())
    throw FlattenError("record flattening needs a collection, got " + ty.show());
  const Type& elem = ty.elem();
  RecordFlattening desc;
  desc.original_elem = elem;
  if (is_flat_elem(elem)) {
    desc.identity = true;
    return {term, desc};
  }
  std::vector<std::string> path;
  build_columns(elem, "", path, desc.columns);
  std::set<std::string> seen;
  for (const auto& [label, p] : desc.columns)
    if (!seen.insert(label).second)
      throw FlattenError("flattened column label collides: " + label);

  std::string x = fresh.fresh("f");
  std::vector<std::pair<std::string, TermPtr>> fields;
  for (const auto& [label, p] : desc.columns) {
    TermPtr e = mk::var(x);
    for (const auto& step : p) e = mk::project(e, step);
    fields.emplace_back(label, e);
  }
  TermPtr row = mk::record(std::move(fields));
  TermPtr comp = ty.is_set() ? mk::set_comp(mk::set_singleton(row), {{x, term}})
                             : mk::bag_comp(mk::bag_singleton(row), {{x, term}});
  return {comp, desc};
}

}  // namespace nrcq
