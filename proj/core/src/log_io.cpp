#include "mabkit/log_io.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "mabkit/analytics.hpp"
#include "mabkit/errors.hpp"

namespace mabkit {

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw InternalError("double formatting failed");
  return std::string(buf, ptr);
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_row(const std::string& line, long row,
                                       const char* what) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw ParseError(std::string(what) + " row " + std::to_string(row) +
                     ": unterminated quote");
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_double(const std::string& s, long row, const std::string& col) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("row " + std::to_string(row) + ": field '" + col +
                     "' is not a number: '" + s + "'");
  }
  return value;
}

long parse_long(const std::string& s, long row, const std::string& col) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("row " + std::to_string(row) + ": field '" + col +
                     "' is not an integer: '" + s + "'");
  }
  return value;
}

}  // namespace

std::vector<std::string> context_names_of(const AssignmentLog& log) {
  std::vector<std::string> names;
  if (log.empty()) return names;
  for (const auto& [name, value] : log.front().context.entries()) {
    (void)value;
    names.push_back(name);
  }
  return names;
}

void write_log_csv(std::ostream& out, const AssignmentLog& log,
                   std::vector<std::string> context_names) {
  if (context_names.empty()) context_names = context_names_of(log);
  out << "t,user,decision_point,policy";
  for (const auto& name : context_names) out << ',' << csv_escape(name);
  out << ",arm,reward,ts\n";
  for (const auto& rec : log) {
    out << rec.t << ',' << csv_escape(rec.user) << ','
        << csv_escape(rec.decision_point) << ',' << to_string(rec.policy);
    for (const auto& name : context_names) {
      out << ',';
      if (auto v = rec.context.find(name)) out << format_double(*v);
    }
    out << ',' << rec.arm << ',';
    if (rec.reward) out << format_double(*rec.reward);
    out << ',' << rec.timestamp << '\n';
  }
}

AssignmentLog read_log_csv(std::istream& in) {
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw ParseError("log is empty: no header row");
  }
  if (!header_line.empty() && header_line.back() == '\r') {
    header_line.pop_back();
  }
  const auto header = split_csv_row(header_line, 1, "header");
  const std::vector<std::string> prefix{"t", "user", "decision_point",
                                        "policy"};
  if (header.size() < 7) {
    throw ParseError("header row has " + std::to_string(header.size()) +
                     " columns; expected at least "
                     "t,user,decision_point,policy,arm,reward,ts");
  }
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (header[i] != prefix[i]) {
      throw ParseError("header column " + std::to_string(i + 1) + " is '" +
                       header[i] + "', expected '" + prefix[i] + "'");
    }
  }
  const std::size_t arm_col = header.size() - 3;
  const std::size_t reward_col = header.size() - 2;
  const std::size_t ts_col = header.size() - 1;
  if (header[arm_col] != "arm" || header[ts_col] != "ts") {
    throw ParseError("header must end with arm,<reward|rating>,ts");
  }
  bool rating_column = false;
  if (header[reward_col] == "rating") {
    rating_column = true;
  } else if (header[reward_col] != "reward") {
    throw ParseError("header column " + std::to_string(reward_col + 1) +
                     " is '" + header[reward_col] +
                     "', expected 'reward' or 'rating'");
  }
  std::vector<std::string> context_names(header.begin() + prefix.size(),
                                         header.begin() + arm_col);

  AssignmentLog log;
  std::string line;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_row(line, row, "data");
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    AssignmentRecord rec;
    rec.t = parse_long(fields[0], row, "t");
    rec.user = fields[1];
    rec.decision_point = fields[2];
    try {
      rec.policy = policy_tag_from_string(fields[3]);
    } catch (const ParseError&) {
      throw ParseError("row " + std::to_string(row) + ": unknown policy '" +
                       fields[3] + "'");
    }
    for (std::size_t c = 0; c < context_names.size(); ++c) {
      const auto& value = fields[prefix.size() + c];
      if (value.empty()) continue;
      rec.context.set(context_names[c],
                      parse_double(value, row, context_names[c]));
    }
    rec.arm = static_cast<int>(parse_long(fields[arm_col], row, "arm"));
    if (!fields[reward_col].empty()) {
      if (rating_column) {
        const long rating = parse_long(fields[reward_col], row, "rating");
        try {
          rec.reward = scale_rating(static_cast<int>(rating));
        } catch (const ValidationError& e) {
          throw ParseError("row " + std::to_string(row) + ": " + e.what());
        }
      } else {
        rec.reward = parse_double(fields[reward_col], row, "reward");
      }
    }
    rec.timestamp = parse_long(fields[ts_col], row, "ts");
    log.push_back(std::move(rec));
  }
  return log;
}

void write_log_jsonl(std::ostream& out, const AssignmentLog& log) {
  for (const auto& rec : log) {
    nlohmann::json ctx = nlohmann::json::object();
    for (const auto& [name, value] : rec.context.entries()) ctx[name] = value;
    nlohmann::json doc{{"t", rec.t},
                       {"user", rec.user},
                       {"decision_point", rec.decision_point},
                       {"policy", to_string(rec.policy)},
                       {"context", std::move(ctx)},
                       {"arm", rec.arm},
                       {"ts", rec.timestamp}};
    if (rec.reward) {
      doc["reward"] = *rec.reward;
    } else {
      doc["reward"] = nullptr;
    }
    out << doc.dump() << '\n';
  }
}

AssignmentLog read_log_jsonl(std::istream& in) {
  AssignmentLog log;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what());
    }
    try {
      AssignmentRecord rec;
      rec.t = doc.at("t").get<long>();
      rec.user = doc.at("user").get<std::string>();
      rec.decision_point = doc.at("decision_point").get<std::string>();
      rec.policy = policy_tag_from_string(doc.at("policy").get<std::string>());
      for (const auto& [name, value] : doc.at("context").items()) {
        rec.context.set(name, value.get<double>());
      }
      rec.arm = doc.at("arm").get<int>();
      if (doc.contains("reward") && !doc.at("reward").is_null()) {
        rec.reward = doc.at("reward").get<double>();
      }
      if (doc.contains("rating") && !doc.at("rating").is_null()) {
        rec.reward = scale_rating(doc.at("rating").get<int>());
      }
      rec.timestamp = doc.value("ts", rec.t);
      log.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ParseError("row " + std::to_string(row) + ": " + e.what());
    }
  }
  return log;
}

void save_log(const std::filesystem::path& path, const AssignmentLog& log,
              std::vector<std::string> context_names) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  if (path.extension() == ".jsonl") {
    write_log_jsonl(out, log);
  } else {
    write_log_csv(out, log, std::move(context_names));
  }
}

AssignmentLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  if (path.extension() == ".jsonl") return read_log_jsonl(in);
  return read_log_csv(in);
}

}  // namespace mabkit
