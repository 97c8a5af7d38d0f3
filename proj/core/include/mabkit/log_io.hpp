#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mabkit/trial.hpp"

namespace mabkit {

/// Shared log schema, one record per row:
///   t,user,decision_point,policy,<context...>,arm,reward,ts
/// Context columns sit between `policy` and `arm`, one per variable.
/// `reward` is empty for unrated assignments. Imported logs may carry a
/// `rating` column (integers 1..5) instead of `reward`; ratings are scaled
/// onto the [0,1] grid while parsing.
void write_log_csv(std::ostream& out, const AssignmentLog& log,
                   std::vector<std::string> context_names = {});

/// Strict parse; errors name the offending row.
AssignmentLog read_log_csv(std::istream& in);

/// JSON-lines flavour of the same schema; context is a nested object and
/// an unrated assignment carries "reward": null.
void write_log_jsonl(std::ostream& out, const AssignmentLog& log);
AssignmentLog read_log_jsonl(std::istream& in);

/// File conveniences; format chosen by extension (.csv / .jsonl).
void save_log(const std::filesystem::path& path, const AssignmentLog& log,
              std::vector<std::string> context_names = {});
AssignmentLog load_log(const std::filesystem::path& path);

/// Context column order for a log: first record's variable order.
std::vector<std::string> context_names_of(const AssignmentLog& log);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace mabkit
