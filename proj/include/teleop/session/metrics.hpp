#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>

#include "json.hpp"
#include "teleop/trajectory/types.hpp"

namespace teleop::session {

/// One row per planning cycle.
struct MetricsRecord {
  double stamp = 0.0;
  trajectory::Action operator_action;
  trajectory::Action chosen_action;
  bool pruned = false;
  bool emergency = false;
  std::size_t candidates = 0;
  double min_clearance = 0.0;           // planner's map clearance along the chosen primitive
  double ground_truth_clearance = 0.0;  // analytic world distance at the stamp
  double speed = 0.0;
  double acceleration = 0.0;
  double generation_ms = 0.0;
  double pruning_ms = 0.0;
  double map_ms = 0.0;  // most recent map integration
};

std::string metrics_csv_header();
std::string to_csv_row(const MetricsRecord& record);

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double stddev() const;
  double max() const { return max_; }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double max_ = 0.0;
};

struct SessionSummary {
  std::string scenario;
  double sim_duration = 0.0;
  std::size_t plan_cycles = 0;
  std::size_t map_updates = 0;
  std::size_t pruned_cycles = 0;
  std::size_t emergency_cycles = 0;
  RunningStats generation_ms;
  RunningStats pruning_ms;
  RunningStats map_ms;
  double max_speed = 0.0;
  double max_acceleration = 0.0;
  double min_ground_truth_clearance = 0.0;
  bool penetrated = false;
  std::size_t keyframes = 0;
  std::size_t subframes = 0;
  std::size_t bufferframes = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Streams metrics rows to a CSV file on its own thread. push() never
/// blocks the caller on file I/O; rows queue until the writer drains them.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& path);
  ~MetricsWriter();
  MetricsWriter(const MetricsWriter&) = delete;
  MetricsWriter& operator=(const MetricsWriter&) = delete;

  void push(const MetricsRecord& record);
  /// Flushes all queued rows and joins the writer thread.
  void close();
  std::size_t rows_written() const;

 private:
  void run();

  std::ofstream out_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<MetricsRecord> queue_;
  bool closing_ = false;
  std::size_t written_ = 0;
  std::thread thread_;
};

}  // namespace teleop::session
