#pragma once
#include <memory>
#include <string>
#include <vector>

#include "qds/oper.hpp"

namespace qds {

enum class TripleKind { Point, Circle, Qds, Doubled };

// word families over a QDS algebra: everything, the finite part A (x) S, or the Laurent part
enum class Family { All, Finite, Laurent };
const char* family_name(Family f);

struct ConditionReport {
  bool condition_A = true;
  std::vector<std::string> witnesses;  // [D,g]F - F[D,g] per generator
  bool f_intersection_trivial = true;
  std::vector<std::string> notes;
};

struct TripleDescriptor;
using TriplePtr = std::shared_ptr<const TripleDescriptor>;

struct TripleDescriptor {
  TripleKind kind = TripleKind::Point;
  LayerPtr layer;
  TriplePtr inner;
  std::vector<Op> generators;
  std::vector<std::string> generator_names;
  bool unital = true;
  ConditionReport inner_conditions;  // qds_of only
  std::string describe() const { return layer->describe(); }
};

TriplePtr make_point();
TriplePtr make_circle(int window, int gen_degree = 1);
TriplePtr make_qds(const TriplePtr& inner, int cutoff);
TriplePtr make_doubled(const TriplePtr& inner);

struct SpanningSet {
  std::vector<Op> elems;
  std::vector<std::string> names;  // 0-based indices
  bool unital = true;              // when true elems[0] is the unit
  int budget = 1;
  Family family = Family::All;
};

SpanningSet spanning_set(const TripleDescriptor& t, int budget, Family fam = Family::All);
ConditionReport check_conditions(const TripleDescriptor& t, int budget = 1);

}  // namespace qds
