#include "microsage/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include "microsage/common.hpp"
#include "microsage/rng.hpp"

namespace microsage {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicatePair: return "DuplicatePair";
    case Errc::UnknownSpecies: return "UnknownSpecies";
    case Errc::UnknownCondition: return "UnknownCondition";
    case Errc::AsymmetricPhylo: return "AsymmetricPhylo";
    case Errc::NegativeYield: return "NegativeYield";
    case Errc::DegenerateSplit: return "DegenerateSplit";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::NonFinite: return "NonFinite";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::MissingCache: return "MissingCache";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::EmptyModel: return "EmptyModel";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::IoFailure: return "IoFailure";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::MissingInput: return "MissingInput";
  }
  return "UnknownError";
}

const char* to_string(SignLabel s) {
  return s == SignLabel::Positive ? "+" : "-";
}

const char* to_string(TwoWayLabel t) {
  switch (t) {
    case TwoWayLabel::Mutualism: return "mutualism";
    case TwoWayLabel::Competition: return "competition";
    case TwoWayLabel::Parasitism: return "parasitism";
  }
  return "?";
}

SignLabel sign_label_from_string(const std::string& s) {
  if (s == "+") return SignLabel::Positive;
  if (s == "-") return SignLabel::Negative;
  fail(Errc::MalformedRow, "sign label must be '+' or '-', got '" + s + "'");
}

SignLabel label_one_way(double mono_yield, double coculture_yield, double epsilon) {
  if (mono_yield < 0.0 || coculture_yield < 0.0) {
    fail(Errc::NegativeYield, "yields must be nonnegative");
  }
  return (coculture_yield - mono_yield > epsilon) ? SignLabel::Positive : SignLabel::Negative;
}

TwoWayLabel derive_two_way(SignLabel sign_xy, SignLabel sign_yx) {
  const bool pos_xy = sign_xy == SignLabel::Positive;
  const bool pos_yx = sign_yx == SignLabel::Positive;
  if (pos_xy && pos_yx) return TwoWayLabel::Mutualism;
  if (!pos_xy && !pos_yx) return TwoWayLabel::Competition;
  return TwoWayLabel::Parasitism;
}

namespace {

constexpr std::array<const char*, 11> kRecordColumns = {
    "species_x",    "species_y",    "condition",
    "monoGrow_x",   "monoGrow_y",   "monoGrow24_x", "monoGrow24_y",
    "coYield_x",    "coYield_y",    "label_xy",     "label_yx"};

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

// Reads the next line, skipping '#' comment lines (artifact preambles).
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    return true;
  }
  return false;
}

double parse_number(const std::string& cell, int line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    fail(Errc::MalformedRow,
         "line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
  }
  return value;
}

double parse_yield(const std::string& cell, int line_no) {
  double value = parse_number(cell, line_no);
  if (!(value >= 0.0)) {
    fail(Errc::MalformedRow,
         "line " + std::to_string(line_no) + ": negative yield " + cell);
  }
  return value;
}

struct PhyloTable {
  std::vector<std::string> names;
  Matrix distance;
};

PhyloTable parse_phylo(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) fail(Errc::MalformedRow, "phylo stream is empty");
  std::vector<std::string> header = split_csv_line(std::move(line));
  if (header.size() < 2) fail(Errc::MalformedRow, "phylo header needs at least one species");
  PhyloTable table;
  table.names.assign(header.begin() + 1, header.end());
  const int s = static_cast<int>(table.names.size());
  table.distance = Matrix(s, s);

  int line_no = 1;
  for (int i = 0; i < s; ++i) {
    if (!next_data_line(in, line)) {
      fail(Errc::MalformedRow, "phylo matrix has fewer rows than header species");
    }
    ++line_no;
    std::vector<std::string> cells = split_csv_line(std::move(line));
    if (static_cast<int>(cells.size()) != s + 1) {
      fail(Errc::MalformedRow, "phylo line " + std::to_string(line_no) + ": wrong column count");
    }
    if (cells[0] != table.names[i]) {
      fail(Errc::MalformedRow, "phylo line " + std::to_string(line_no) +
                                   ": row order must match header (" + cells[0] +
                                   " != " + table.names[i] + ")");
    }
    for (int j = 0; j < s; ++j) {
      double d = parse_number(cells[j + 1], line_no);
      if (!(d >= 0.0)) {
        fail(Errc::MalformedRow, "phylo line " + std::to_string(line_no) + ": negative distance");
      }
      table.distance.at(i, j) = d;
    }
  }
  for (int i = 0; i < s; ++i) {
    if (std::abs(table.distance.at(i, i)) > 1e-9) {
      fail(Errc::MalformedRow, "phylo diagonal must be zero for " + table.names[i]);
    }
    for (int j = i + 1; j < s; ++j) {
      if (std::abs(table.distance.at(i, j) - table.distance.at(j, i)) > 1e-9) {
        fail(Errc::AsymmetricPhylo,
             "phylo distance differs between (" + table.names[i] + "," + table.names[j] + ")");
      }
    }
  }
  return table;
}

void record_mono(Matrix& profile, std::vector<std::uint8_t>& seen, int s, int c,
                 double value, int line_no) {
  std::size_t idx = static_cast<std::size_t>(s) * profile.cols + c;
  if (seen[idx]) {
    if (std::abs(profile.data[idx] - value) > 1e-9) {
      fail(Errc::MalformedRow, "line " + std::to_string(line_no) +
                                   ": inconsistent monoculture yield for species " +
                                   std::to_string(s));
    }
  } else {
    profile.data[idx] = value;
    seen[idx] = 1;
  }
}

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

Dataset ingest_csv(std::istream& records, std::istream& phylo, double epsilon) {
  PhyloTable table = parse_phylo(phylo);
  const int s_count = static_cast<int>(table.names.size());

  std::map<std::string, SpeciesId> species_index;
  for (int i = 0; i < s_count; ++i) species_index[table.names[i]] = i;

  std::string line;
  if (!next_data_line(records, line)) fail(Errc::MalformedRow, "records stream is empty");
  std::vector<std::string> header = split_csv_line(std::move(line));
  if (header.size() < 7 || header.size() > kRecordColumns.size()) {
    fail(Errc::MalformedRow, "records header must list 7 to 11 known columns");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kRecordColumns[i]) {
      fail(Errc::MalformedRow, "records header column " + std::to_string(i) +
                                   " must be '" + kRecordColumns[i] + "', got '" + header[i] + "'");
    }
  }
  const std::size_t ncols = header.size();
  const bool has_co = ncols >= 9;
  const bool has_labels = ncols >= 11;

  Dataset ds;
  ds.species_count = s_count;
  ds.species_names = table.names;
  ds.phylo_distance = std::move(table.distance);

  std::map<std::string, ConditionId> condition_index;
  std::map<std::pair<std::pair<SpeciesId, SpeciesId>, ConditionId>, bool> seen_pairs;

  // mono profile cells are written as records mention them; conflicting
  // repeats are rejected.
  std::vector<std::uint8_t> mono_seen;
  int line_no = 1;

  struct RawRow {
    CocultureRecord rec;
    int line_no;
  };
  std::vector<RawRow> rows;

  while (next_data_line(records, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(std::move(line));
    if (cells.size() != ncols) {
      fail(Errc::MalformedRow, "line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(ncols) + " columns, got " +
                                   std::to_string(cells.size()));
    }

    auto sp = species_index.find(cells[0]);
    if (sp == species_index.end()) {
      fail(Errc::UnknownSpecies, "line " + std::to_string(line_no) + ": species '" + cells[0] +
                                     "' not present in phylo matrix");
    }
    auto sq = species_index.find(cells[1]);
    if (sq == species_index.end()) {
      fail(Errc::UnknownSpecies, "line " + std::to_string(line_no) + ": species '" + cells[1] +
                                     "' not present in phylo matrix");
    }

    CocultureRecord rec;
    rec.species_x = sp->second;
    rec.species_y = sq->second;
    if (rec.species_x == rec.species_y) {
      fail(Errc::MalformedRow, "line " + std::to_string(line_no) + ": co-culture of a species with itself");
    }

    auto [cond_it, inserted] =
        condition_index.try_emplace(cells[2], static_cast<ConditionId>(condition_index.size()));
    rec.condition = cond_it->second;

    rec.mono_grow_x = parse_yield(cells[3], line_no);
    rec.mono_grow_y = parse_yield(cells[4], line_no);
    rec.mono_grow24_x = parse_yield(cells[5], line_no);
    rec.mono_grow24_y = parse_yield(cells[6], line_no);
    if (has_co) {
      if (!cells[7].empty()) rec.co_yield_x = parse_yield(cells[7], line_no);
      if (!cells[8].empty()) rec.co_yield_y = parse_yield(cells[8], line_no);
    }

    const bool row_has_labels = has_labels && !cells[9].empty() && !cells[10].empty();
    if (row_has_labels) {
      rec.label_xy = sign_label_from_string(cells[9]);
      rec.label_yx = sign_label_from_string(cells[10]);
      // Stated labels must agree with the threshold rule wherever a co-yield
      // lets us recompute them.
      if (rec.co_yield_x &&
          rec.label_xy != label_one_way(rec.mono_grow_x, *rec.co_yield_x, epsilon)) {
        fail(Errc::MalformedRow,
             "line " + std::to_string(line_no) + ": label_xy contradicts yields");
      }
      if (rec.co_yield_y &&
          rec.label_yx != label_one_way(rec.mono_grow_y, *rec.co_yield_y, epsilon)) {
        fail(Errc::MalformedRow,
             "line " + std::to_string(line_no) + ": label_yx contradicts yields");
      }
    } else if (rec.co_yield_x && rec.co_yield_y) {
      rec.label_xy = label_one_way(rec.mono_grow_x, *rec.co_yield_x, epsilon);
      rec.label_yx = label_one_way(rec.mono_grow_y, *rec.co_yield_y, epsilon);
    } else {
      fail(Errc::MalformedRow,
           "line " + std::to_string(line_no) + ": need either both co-yields or both labels");
    }

    // Canonical order: lower species id first.
    if (rec.species_x > rec.species_y) {
      std::swap(rec.species_x, rec.species_y);
      std::swap(rec.mono_grow_x, rec.mono_grow_y);
      std::swap(rec.mono_grow24_x, rec.mono_grow24_y);
      std::swap(rec.co_yield_x, rec.co_yield_y);
      std::swap(rec.label_xy, rec.label_yx);
    }

    auto key = std::make_pair(std::make_pair(rec.species_x, rec.species_y), rec.condition);
    if (!seen_pairs.emplace(key, true).second) {
      fail(Errc::DuplicatePair, "line " + std::to_string(line_no) + ": repeated (pair, condition)");
    }
    rows.push_back({rec, line_no});
  }

  ds.condition_count = static_cast<int>(condition_index.size());
  ds.condition_names.resize(ds.condition_count);
  for (const auto& [name, id] : condition_index) ds.condition_names[id] = name;

  ds.mono_profile = Matrix(ds.species_count, ds.condition_count);
  mono_seen.assign(static_cast<std::size_t>(ds.species_count) * ds.condition_count, 0);

  ds.records.reserve(rows.size());
  for (const RawRow& raw : rows) {
    const CocultureRecord& rec = raw.rec;
    record_mono(ds.mono_profile, mono_seen, rec.species_x, rec.condition, rec.mono_grow_x,
                raw.line_no);
    record_mono(ds.mono_profile, mono_seen, rec.species_y, rec.condition, rec.mono_grow_y,
                raw.line_no);
    ds.records.push_back(rec);
  }
  return ds;
}

void export_records_csv(const Dataset& ds, std::ostream& out) {
  std::string buf;
  for (std::size_t i = 0; i < kRecordColumns.size(); ++i) {
    if (i) buf += ',';
    buf += kRecordColumns[i];
  }
  buf += '\n';
  for (const CocultureRecord& rec : ds.records) {
    buf += ds.species_names[rec.species_x];
    buf += ',';
    buf += ds.species_names[rec.species_y];
    buf += ',';
    buf += ds.condition_names[rec.condition];
    buf += ',';
    format_double(buf, rec.mono_grow_x);
    buf += ',';
    format_double(buf, rec.mono_grow_y);
    buf += ',';
    format_double(buf, rec.mono_grow24_x);
    buf += ',';
    format_double(buf, rec.mono_grow24_y);
    buf += ',';
    if (rec.co_yield_x) format_double(buf, *rec.co_yield_x);
    buf += ',';
    if (rec.co_yield_y) format_double(buf, *rec.co_yield_y);
    buf += ',';
    buf += to_string(rec.label_xy);
    buf += ',';
    buf += to_string(rec.label_yx);
    buf += '\n';
  }
  out << buf;
}

void export_phylo_csv(const Dataset& ds, std::ostream& out) {
  std::string buf = "species";
  for (const std::string& name : ds.species_names) {
    buf += ',';
    buf += name;
  }
  buf += '\n';
  for (int i = 0; i < ds.species_count; ++i) {
    buf += ds.species_names[i];
    for (int j = 0; j < ds.species_count; ++j) {
      buf += ',';
      format_double(buf, ds.phylo_distance.at(i, j));
    }
    buf += '\n';
  }
  out << buf;
}

SplitMasks split_train_test(int n, double train_fraction, std::uint64_t seed) {
  if (n < 2) fail(Errc::DegenerateSplit, "need at least 2 instances to split");
  const long long train_count = std::llround(train_fraction * n);
  if (train_count <= 0 || train_count >= n) {
    fail(Errc::DegenerateSplit, "train_fraction " + std::to_string(train_fraction) +
                                    " leaves an empty side for n=" + std::to_string(n));
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }

  SplitMasks masks;
  masks.train.assign(n, 0);
  masks.test.assign(n, 0);
  masks.train_count = static_cast<int>(train_count);
  masks.test_count = n - masks.train_count;
  for (int i = 0; i < n; ++i) {
    if (i < train_count) {
      masks.train[order[i]] = 1;
    } else {
      masks.test[order[i]] = 1;
    }
  }
  return masks;
}

}  // namespace microsage
