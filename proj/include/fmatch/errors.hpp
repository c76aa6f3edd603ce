#ifndef FMATCH_ERRORS_HPP
#define FMATCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fmatch {

/// One exception type for the whole toolkit; the kind tells callers (and the
/// CLI exit-code mapping) which contract was broken.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    parse,              // malformed input text
    duplicate_key,      // repeated (household_id, year)
    validation,         // dataset invariant broken
    rule_violation,     // sample-construction rule broken
    degenerate_sample,  // a treated or control group is empty
    insufficient_data,  // too few observations for the computation
    shape,              // dimension mismatch
    size_limit,         // exhaustive-enumeration guard exceeded
    lookup,             // unknown village / year / covariate
    domain,             // argument outside its documented domain
    normalization,      // shares do not sum to one
    config,             // bad run configuration
    io,                 // file system failure
  };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

  /// True for errors caused by the data rather than by the configuration.
  bool is_data_error() const noexcept { return kind_ != Kind::config; }

 private:
  Kind kind_;
};

}  // namespace fmatch

#endif  // FMATCH_ERRORS_HPP
