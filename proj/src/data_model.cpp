#include "fmatch/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_set>
#include <utility>

#include "fmatch/csv.hpp"
#include "fmatch/errors.hpp"
#include "fmatch/log.hpp"

namespace fmatch {

namespace {

constexpr std::size_t kFixedColumns = 7;

const char* kFixedHeader[kFixedColumns] = {
    "household_id", "year", "village", "ethnicity",
    "religion",     "treated", "outcome"};

}  // namespace

std::string_view to_string(CovariateKind kind) {
  switch (kind) {
    case CovariateKind::continuous: return "continuous";
    case CovariateKind::binary: return "binary";
    case CovariateKind::categorical: return "categorical";
  }
  return "continuous";
}

CovariateKind covariate_kind_from_string(std::string_view text) {
  if (text == "continuous") return CovariateKind::continuous;
  if (text == "binary") return CovariateKind::binary;
  if (text == "categorical") return CovariateKind::categorical;
  throw Error(Error::Kind::config,
              "unknown covariate kind '" + std::string(text) + "'");
}

CovariateSchema::CovariateSchema(std::vector<CovariateEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw Error(Error::Kind::config, "covariate schema must not be empty");
  }
  std::unordered_set<std::string> seen;
  for (const auto& entry : entries_) {
    if (entry.name.empty()) {
      throw Error(Error::Kind::config, "covariate name must not be empty");
    }
    if (!seen.insert(entry.name).second) {
      throw Error(Error::Kind::config,
                  "duplicate covariate name '" + entry.name + "'");
    }
  }
}

std::optional<std::size_t> CovariateSchema::index_of(
    std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

namespace {

bool parse_flag(std::string_view text, bool& out) {
  if (text == "0") { out = false; return true; }
  if (text == "1") { out = true; return true; }
  return false;
}

std::string row_error(std::size_t row, std::string_view column,
                      std::string_view detail) {
  std::string msg = "row " + std::to_string(row) + ", " + std::string(column);
  if (!detail.empty()) msg += ": " + std::string(detail);
  return msg;
}

}  // namespace

PanelDataset parse_dataset(std::istream& source, const CovariateSchema& schema,
                           const ParseOptions& options) {
  std::string line;
  if (!std::getline(source, line)) {
    throw Error(Error::Kind::parse, "empty input: missing header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = csv::split(line);
  const std::size_t expected_columns = kFixedColumns + schema.size();
  if (header.size() != expected_columns) {
    throw Error(Error::Kind::parse,
                "header has " + std::to_string(header.size()) +
                    " columns, expected " + std::to_string(expected_columns));
  }
  for (std::size_t i = 0; i < kFixedColumns; ++i) {
    if (header[i] != kFixedHeader[i]) {
      throw Error(Error::Kind::parse, "header column " + std::to_string(i + 1) +
                                          " is '" + header[i] + "', expected '" +
                                          kFixedHeader[i] + "'");
    }
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (header[kFixedColumns + i] != schema.at(i).name) {
      throw Error(Error::Kind::parse,
                  "header covariate column " + std::to_string(i + 1) + " is '" +
                      header[kFixedColumns + i] + "', expected '" +
                      schema.at(i).name + "'");
    }
  }

  PanelDataset dataset{schema, {}, {}};
  std::map<std::pair<std::string, int>, std::size_t> seen_keys;
  std::size_t row_index = 0;

  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row_index;
    if (line.empty()) continue;

    const auto fields = csv::split(line);

    auto reject = [&](std::string_view column, std::string_view detail) {
      if (options.drop_invalid_rows) {
        if (options.dropped != nullptr) {
          options.dropped->push_back({row_index, row_error(row_index, column, detail)});
        }
        log::info("dropping invalid " + row_error(row_index, column, detail));
        return true;
      }
      throw Error(Error::Kind::parse, row_error(row_index, column, detail));
    };

    if (fields.size() != expected_columns) {
      if (reject("(row)", "has " + std::to_string(fields.size()) +
                              " fields, expected " +
                              std::to_string(expected_columns))) {
        continue;
      }
    }

    Observation obs;
    bool dropped = false;

    if (fields[0].empty()) {
      dropped = reject("household_id", "empty field");
      if (dropped) continue;
    }
    obs.household_id = fields[0];

    if (!csv::parse_int(fields[1], obs.year)) {
      dropped = reject("year", "unparsable integer '" + fields[1] + "'");
      if (dropped) continue;
    }
    if (fields[2].empty()) {
      dropped = reject("village", "empty field");
      if (dropped) continue;
    }
    obs.village = fields[2];
    obs.ethnicity = fields[3];
    obs.religion = fields[4];
    if (!parse_flag(fields[5], obs.treated)) {
      dropped = reject("treated", "expected 0 or 1, got '" + fields[5] + "'");
      if (dropped) continue;
    }
    if (!parse_flag(fields[6], obs.outcome)) {
      dropped = reject("outcome", "expected 0 or 1, got '" + fields[6] + "'");
      if (dropped) continue;
    }

    obs.covariates.reserve(schema.size());
    for (std::size_t i = 0; i < schema.size() && !dropped; ++i) {
      const auto& entry = schema.at(i);
      const std::string& field = fields[kFixedColumns + i];
      switch (entry.kind) {
        case CovariateKind::categorical: {
          if (field.empty()) {
            dropped = reject(entry.name, "missing value");
            break;
          }
          obs.covariates.emplace_back(field);
          break;
        }
        case CovariateKind::binary: {
          bool flag = false;
          if (!parse_flag(field, flag)) {
            dropped = reject(entry.name,
                             field.empty() ? "missing value"
                                           : "expected 0 or 1, got '" + field + "'");
            break;
          }
          obs.covariates.emplace_back(flag ? 1.0 : 0.0);
          break;
        }
        case CovariateKind::continuous: {
          double value = 0.0;
          if (!csv::parse_double(field, value) || !std::isfinite(value)) {
            dropped = reject(entry.name,
                             field.empty() ? "missing value"
                                           : "unparsable number '" + field + "'");
            break;
          }
          obs.covariates.emplace_back(value);
          break;
        }
      }
    }
    if (dropped) continue;

    const auto key = std::make_pair(obs.household_id, obs.year);
    const auto [it, inserted] = seen_keys.emplace(key, row_index);
    if (!inserted) {
      throw Error(Error::Kind::duplicate_key,
                  "duplicate (household_id, year) = (" + obs.household_id +
                      ", " + std::to_string(obs.year) + ") on rows " +
                      std::to_string(it->second) + " and " +
                      std::to_string(row_index));
    }

    dataset.survey_years.insert(obs.year);
    dataset.rows.push_back(std::move(obs));
  }

  return dataset;
}

void write_dataset(std::ostream& out, const PanelDataset& dataset) {
  std::vector<std::string> header(kFixedHeader, kFixedHeader + kFixedColumns);
  for (const auto& entry : dataset.schema.entries()) header.push_back(entry.name);
  out << csv::join(header) << "\n";

  for (const auto& row : dataset.rows) {
    std::vector<std::string> fields;
    fields.reserve(kFixedColumns + row.covariates.size());
    fields.push_back(row.household_id);
    fields.push_back(std::to_string(row.year));
    fields.push_back(row.village);
    fields.push_back(row.ethnicity);
    fields.push_back(row.religion);
    fields.push_back(row.treated ? "1" : "0");
    fields.push_back(row.outcome ? "1" : "0");
    for (std::size_t i = 0; i < row.covariates.size(); ++i) {
      const auto& cell = row.covariates[i];
      if (std::holds_alternative<std::string>(cell)) {
        fields.push_back(std::get<std::string>(cell));
      } else if (dataset.schema.at(i).kind == CovariateKind::binary) {
        fields.push_back(std::get<double>(cell) != 0.0 ? "1" : "0");
      } else {
        fields.push_back(csv::format_double(std::get<double>(cell)));
      }
    }
    out << csv::join(fields) << "\n";
  }
}

ValidationReport validate(const PanelDataset& dataset,
                          std::optional<YearWindow> window) {
  ValidationReport report;
  std::map<std::pair<std::string, int>, std::size_t> seen_keys;
  std::map<std::string, int> first_adoption;  // household -> year
  std::set<int> years_present;

  // First adoption years, for the post-adoption presence warning.
  for (const auto& row : dataset.rows) {
    if (!row.outcome) continue;
    auto it = first_adoption.find(row.household_id);
    if (it == first_adoption.end() || row.year < it->second) {
      first_adoption[row.household_id] = row.year;
    }
  }

  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    const auto& row = dataset.rows[i];
    const std::size_t row_index = i + 1;
    years_present.insert(row.year);

    if (row.covariates.size() != dataset.schema.size()) {
      report.errors.push_back(
          {row_index, "covariate vector has " +
                          std::to_string(row.covariates.size()) +
                          " entries, schema has " +
                          std::to_string(dataset.schema.size())});
      continue;
    }

    for (std::size_t j = 0; j < row.covariates.size(); ++j) {
      const auto& entry = dataset.schema.at(j);
      const auto& cell = row.covariates[j];
      switch (entry.kind) {
        case CovariateKind::continuous:
          if (!std::holds_alternative<double>(cell)) {
            report.errors.push_back(
                {row_index, entry.name + ": expected a numeric value"});
          } else if (!std::isfinite(std::get<double>(cell))) {
            report.errors.push_back(
                {row_index, entry.name + ": value is not finite"});
          }
          break;
        case CovariateKind::binary:
          if (!std::holds_alternative<double>(cell) ||
              (std::get<double>(cell) != 0.0 && std::get<double>(cell) != 1.0)) {
            report.errors.push_back(
                {row_index, entry.name + ": binary value must be 0 or 1"});
          }
          break;
        case CovariateKind::categorical:
          if (!std::holds_alternative<std::string>(cell) ||
              std::get<std::string>(cell).empty()) {
            report.errors.push_back(
                {row_index, entry.name + ": categorical label must be non-empty"});
          }
          break;
      }
    }

    if (window.has_value() && !window->contains(row.year)) {
      report.errors.push_back(
          {row_index, "year " + std::to_string(row.year) +
                          " outside study window [" +
                          std::to_string(window->start) + ", " +
                          std::to_string(window->end) + "]"});
    }

    const auto key = std::make_pair(row.household_id, row.year);
    const auto [it, inserted] = seen_keys.emplace(key, row_index);
    if (!inserted) {
      report.errors.push_back(
          {row_index, "duplicate (household_id, year) also on row " +
                          std::to_string(it->second)});
    }

    const auto adopted = first_adoption.find(row.household_id);
    if (adopted != first_adoption.end() && row.outcome &&
        row.year > adopted->second) {
      report.warnings.push_back(
          {row_index, "household " + row.household_id +
                          " present as adopter after its first adoption in " +
                          std::to_string(adopted->second)});
    }
  }

  for (int year : dataset.survey_years) {
    if (!years_present.contains(year)) {
      report.errors.push_back(
          {0, "survey year " + std::to_string(year) +
                  " has no rows in the dataset"});
    }
  }

  return report;
}

}  // namespace fmatch
