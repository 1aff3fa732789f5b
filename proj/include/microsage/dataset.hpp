#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "microsage/matrix.hpp"

namespace microsage {

// Dense indices assigned at ingestion: species ids follow the phylogeny
// matrix header order, condition ids the order of first appearance in the
// records stream.
using SpeciesId = std::int32_t;
using ConditionId = std::int32_t;

enum class SignLabel : std::uint8_t { Positive, Negative };
enum class TwoWayLabel : std::uint8_t { Mutualism, Competition, Parasitism };

// Class indices used by every classifier and report in the library.
// One-way: negative 0, positive 1. Two-way: mutualism 0, competition 1,
// parasitism 2.
inline int class_index(SignLabel s) { return s == SignLabel::Positive ? 1 : 0; }
inline int class_index(TwoWayLabel t) { return static_cast<int>(t); }

const char* to_string(SignLabel s);      // "+" / "-"
const char* to_string(TwoWayLabel t);
SignLabel sign_label_from_string(const std::string& s);

/// One pairwise co-culture experiment. Canonical form has
/// species_x < species_y; label_xy is the effect of y on x.
struct CocultureRecord {
  SpeciesId species_x = 0;
  SpeciesId species_y = 0;
  ConditionId condition = 0;
  double mono_grow_x = 0.0;
  double mono_grow_y = 0.0;
  double mono_grow24_x = 0.0;
  double mono_grow24_y = 0.0;
  std::optional<double> co_yield_x;
  std::optional<double> co_yield_y;
  SignLabel label_xy = SignLabel::Negative;
  SignLabel label_yx = SignLabel::Negative;

  bool operator==(const CocultureRecord&) const = default;
};

struct Dataset {
  std::vector<CocultureRecord> records;
  int species_count = 0;
  int condition_count = 0;
  Matrix mono_profile;    // S×C monoculture yields (0 where unobserved)
  Matrix phylo_distance;  // S×S symmetric, zero diagonal
  std::vector<std::string> species_names;
  std::vector<std::string> condition_names;

  bool operator==(const Dataset&) const = default;
};

/// Sign of the partner's effect on the focal species. Positive iff
/// coculture_yield - mono_yield > epsilon; ties go to Negative, the
/// majority class.
SignLabel label_one_way(double mono_yield, double coculture_yield, double epsilon);

/// (+,+) mutualism, (-,-) competition, mixed parasitism. Symmetric.
TwoWayLabel derive_two_way(SignLabel sign_xy, SignLabel sign_yx);

/// Parses the records and phylogeny CSV streams documented in the README.
/// epsilon is used to derive sign labels when rows carry co-yields but no
/// label columns.
Dataset ingest_csv(std::istream& records, std::istream& phylo, double epsilon = 0.0);

/// Writes the same CSV schema back out; ingest_csv(export_csv(ds)) == ds.
void export_records_csv(const Dataset& ds, std::ostream& out);
void export_phylo_csv(const Dataset& ds, std::ostream& out);

struct SplitMasks {
  std::vector<std::uint8_t> train;
  std::vector<std::uint8_t> test;
  int train_count = 0;
  int test_count = 0;
};

/// Seeded Fisher-Yates shuffle, then a prefix of round(train_fraction * n)
/// indices becomes the training set.
SplitMasks split_train_test(int n, double train_fraction, std::uint64_t seed);

}  // namespace microsage
