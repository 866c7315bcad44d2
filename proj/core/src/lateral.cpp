#include "nrcq/lateral.hpp"

#include <stdexcept>

namespace nrcq {

namespace {

std::uint64_t metric_rec(const TermPtr& t) {
  std::uint64_t m = 0;
  switch (t->kind) {
    case TermKind::BagDiff: {
      std::set<std::string> fv = free_vars(t);
      m = metric_rec(t->args[0]) + metric_rec(t->args[1]) + fv.size();
      return m;
    }
    case TermKind::Promote: {
      std::set<std::string> fv = free_vars(t->args[0]);
      return metric_rec(t->args[0]) + fv.size();
    }
    default:
      for (const auto& g : t->gens) m += metric_rec(g.source);
      for (const auto& a : t->args) m += metric_rec(a);
      return m;
  }
}

struct Scanner {
  std::vector<std::string> scope;  // generator binders, outermost first
  std::vector<LateralOccurrence> out;

  std::string latest_binder(const std::set<std::string>& fv) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (fv.count(*it)) return *it;
    return "";
  }

  void walk(const TermPtr& t, const std::string& pos) {
    if (t->kind == TermKind::Promote || t->kind == TermKind::BagDiff) {
      std::set<std::string> fv = free_vars(t);
      std::string b = latest_binder(fv);
      if (!b.empty()) out.push_back({pos, b, t});
    }
    switch (t->kind) {
      case TermKind::SetComp:
      case TermKind::BagComp: {
        size_t base = scope.size();
        for (size_t i = 0; i < t->gens.size(); ++i) {
          walk(t->gens[i].source, pos + ".gen" + std::to_string(i));
          scope.push_back(t->gens[i].var);
        }
        walk(t->args[0], pos + ".head");
        scope.resize(base);
        return;
      }
      default: {
        for (size_t i = 0; i < t->args.size(); ++i)
          walk(t->args[i], pos + ".arg" + std::to_string(i));
        return;
      }
    }
  }
};

}  // namespace

std::uint64_t lateral_metric(const TermPtr& term) { return metric_rec(term); }

LateralReport lateral_report(const TermPtr& term, const Signature& sig) {
  NFFailure nf;
  if (!is_normal_form(term, sig, {}, &nf))
    throw std::invalid_argument("lateral_report: input not in normal form at '" +
                                nf.position + "': " + nf.reason);
  Scanner sc;
  sc.walk(term, "");
  return {std::move(sc.out), lateral_metric(term)};
}

}  // namespace nrcq
