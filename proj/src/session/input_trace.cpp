#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "teleop/session/operator_input.hpp"

namespace teleop::session {

TraceInput::TraceInput(std::vector<Row> rows) : rows_(std::move(rows)) {
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].t < rows_[i - 1].t) throw std::invalid_argument("trace stamps must be sorted");
  }
}

TraceInput TraceInput::parse(std::istream& in) {
  std::vector<Row> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line.erase(std::remove(line.begin(), line.end(), '\r'), line.end());
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (std::isalpha(static_cast<unsigned char>(line[first]))) {
      if (rows.empty()) continue;  // header
      throw std::invalid_argument("trace line " + std::to_string(line_no) + ": unexpected text");
    }
    std::stringstream ss(line);
    std::string cell;
    double values[5];
    int n = 0;
    try {
      while (std::getline(ss, cell, ',')) {
        if (n >= 5) throw std::invalid_argument("too many columns");
        std::size_t used = 0;
        values[n++] = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) {
          throw std::invalid_argument("trailing characters");
        }
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("trace line " + std::to_string(line_no) + ": " + e.what());
    }
    if (n != 5) {
      throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                  ": expected t,vx,vz,omega,rot");
    }
    rows.push_back({values[0], {{values[1], values[2], values[3]}, values[4]}});
  }
  try {
    return TraceInput(std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("trace: ") + e.what());
  }
}

TraceInput TraceInput::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  return parse(in);
}

OperatorCommand TraceInput::command_at(double sim_time) {
  const auto it = std::upper_bound(rows_.begin(), rows_.end(), sim_time,
                                   [](double t, const Row& row) { return t < row.t; });
  if (it == rows_.begin()) return {};
  return std::prev(it)->command;
}

void ActionMailbox::post(const OperatorCommand& command) {
  std::lock_guard lock(mutex_);
  latest_.command = command;
  ++latest_.sequence;
}

ActionMailbox::Snapshot ActionMailbox::read() const {
  std::lock_guard lock(mutex_);
  return latest_;
}

MailboxInput::MailboxInput(const ActionMailbox& mailbox, sim::OperatorPolicy policy)
    : mailbox_(mailbox), policy_(policy) {}

OperatorCommand MailboxInput::command_at(double sim_time) {
  const auto snap = mailbox_.read();
  if (snap.sequence != seen_sequence_) {
    seen_sequence_ = snap.sequence;
    last_received_ = sim_time;
    last_ = snap.command;
  }
  timed_out_ = !last_received_ || sim_time - *last_received_ > policy_.timeout;
  if (!timed_out_ || (policy_.renew_on_timeout && last_received_)) return last_;
  return {};
}

}  // namespace teleop::session
