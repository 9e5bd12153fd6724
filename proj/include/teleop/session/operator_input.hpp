#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <mutex>
#include <optional>
#include <vector>

#include "teleop/sim/scenario.hpp"
#include "teleop/trajectory/types.hpp"

namespace teleop::session {

using trajectory::Action;

struct OperatorCommand {
  Action action;
  double rotation = 0.0;  // library rotation about the frame z-axis

  bool operator==(const OperatorCommand&) const = default;
};

/// Source of operator commands sampled by the planning loop.
class OperatorInput {
 public:
  virtual ~OperatorInput() = default;
  virtual OperatorCommand command_at(double sim_time) = 0;
};

/// Scripted trace: rows "t,vx,vz,omega,rot", each held until the next stamp.
/// Zero command before the first row.
class TraceInput final : public OperatorInput {
 public:
  struct Row {
    double t;
    OperatorCommand command;
  };

  explicit TraceInput(std::vector<Row> rows);

  /// Header line optional; blank lines and '#' comments skipped. Throws
  /// std::invalid_argument naming the line on malformed or unsorted rows.
  static TraceInput parse(std::istream& in);
  /// Throws std::runtime_error if the file cannot be opened.
  static TraceInput load(const std::filesystem::path& path);

  OperatorCommand command_at(double sim_time) override;
  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<Row> rows_;
};

/// Latest-value cell written by the protocol thread, read by the loop.
class ActionMailbox {
 public:
  void post(const OperatorCommand& command);

  struct Snapshot {
    OperatorCommand command;
    std::uint64_t sequence = 0;  // 0 until the first post
  };
  Snapshot read() const;

 private:
  mutable std::mutex mutex_;
  Snapshot latest_;
};

/// Live input with the dropout policy: after `timeout` seconds of simulated
/// time without a new message the command becomes zero (or, with
/// renew_on_timeout, stays at the last received command).
class MailboxInput final : public OperatorInput {
 public:
  MailboxInput(const ActionMailbox& mailbox, sim::OperatorPolicy policy);

  OperatorCommand command_at(double sim_time) override;
  bool timed_out() const { return timed_out_; }

 private:
  const ActionMailbox& mailbox_;
  sim::OperatorPolicy policy_;
  std::uint64_t seen_sequence_ = 0;
  std::optional<double> last_received_;
  OperatorCommand last_;
  bool timed_out_ = true;
};

}  // namespace teleop::session
