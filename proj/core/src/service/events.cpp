#include "mabkit/service/events.hpp"

#include "mabkit/errors.hpp"

namespace mabkit::service {

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    // Count existing lines so appended events keep a consistent sequence.
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) ++count_;
    }
  }
  out_.open(path_, std::ios::app);
  if (!out_) {
    throw Error("cannot open event log '" + path_.string() + "' for append");
  }
}

void EventLog::append(const nlohmann::json& event) {
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) {
    throw Error("write to event log '" + path_.string() + "' failed");
  }
  ++count_;
}

std::vector<nlohmann::json> EventLog::read_all(
    const std::filesystem::path& path) {
  std::vector<nlohmann::json> events;
  std::ifstream in(path);
  if (!in) return events;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    try {
      events.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("event log '" + path.string() + "' row " +
                       std::to_string(row) + ": " + e.what());
    }
  }
  return events;
}

}  // namespace mabkit::service
