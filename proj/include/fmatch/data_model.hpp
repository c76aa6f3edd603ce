#ifndef FMATCH_DATA_MODEL_HPP
#define FMATCH_DATA_MODEL_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fmatch {

enum class CovariateKind { continuous, binary, categorical };

std::string_view to_string(CovariateKind kind);
CovariateKind covariate_kind_from_string(std::string_view text);

struct CovariateEntry {
  std::string name;
  CovariateKind kind = CovariateKind::continuous;
  std::string units;

  bool operator==(const CovariateEntry&) const = default;
};

/// Ordered covariate layout shared by a dataset and everything derived from
/// it. Construction rejects duplicate or empty names and empty schemas.
class CovariateSchema {
 public:
  explicit CovariateSchema(std::vector<CovariateEntry> entries);

  std::size_t size() const { return entries_.size(); }
  const CovariateEntry& at(std::size_t i) const { return entries_.at(i); }
  const std::vector<CovariateEntry>& entries() const { return entries_; }

  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const CovariateSchema&) const = default;

 private:
  std::vector<CovariateEntry> entries_;
};

/// A covariate value: numeric for continuous/binary entries, a label for
/// categorical entries. Which alternative is active follows the schema kind.
using CovariateCell = std::variant<double, std::string>;

struct Observation {
  std::string household_id;
  int year = 0;
  std::string village;
  bool treated = false;  // extension-service contact this year
  bool outcome = false;  // first fertiliser adoption this year
  std::vector<CovariateCell> covariates;
  std::string ethnicity;
  std::string religion;

  bool operator==(const Observation&) const = default;
};

struct PanelDataset {
  CovariateSchema schema;
  std::vector<Observation> rows;
  std::set<int> survey_years;  // parse fills with the years present

  bool operator==(const PanelDataset&) const = default;
};

struct Issue {
  std::size_t row_index = 0;  // 1-based data-row index
  std::string message;

  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool analysis_ready() const { return errors.empty(); }
};

struct ParseOptions {
  /// When false, a row with a missing or malformed field is a parse error.
  /// When true, such rows are dropped and reported through `dropped`.
  bool drop_invalid_rows = false;
  std::vector<Issue>* dropped = nullptr;
};

struct YearWindow {
  int start = 0;
  int end = 0;

  bool contains(int year) const { return year >= start && year <= end; }
};

/// Reads the delimited interchange format: header row
///   household_id,year,village,ethnicity,religion,treated,outcome,<covariates...>
/// UTF-8, LF newlines, no field quoting. Row order is preserved.
/// Throws Error{parse} naming the 1-based data row and column on malformed
/// input, Error{duplicate_key} on a repeated (household_id, year).
PanelDataset parse_dataset(std::istream& source, const CovariateSchema& schema,
                           const ParseOptions& options = {});

/// Inverse of parse_dataset; parse(write(parse(x))) == parse(x).
void write_dataset(std::ostream& out, const PanelDataset& dataset);

/// Lists every invariant violation without throwing. A window, when given,
/// adds the year-range check. Households with more than one adoption row get
/// a post-adoption-presence warning.
ValidationReport validate(const PanelDataset& dataset,
                          std::optional<YearWindow> window = std::nullopt);

}  // namespace fmatch

#endif  // FMATCH_DATA_MODEL_HPP
