#include "teleop/session/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace teleop::session {

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

nlohmann::json stats_json(const RunningStats& s) {
  return {{"mean", s.mean()}, {"std", s.stddev()}, {"max", s.max()}, {"count", s.count()}};
}

}  // namespace

std::string metrics_csv_header() {
  return "stamp,op_vx,op_vz,op_omega,chosen_vx,chosen_vz,chosen_omega,pruned,emergency,"
         "candidates,min_clearance,gt_clearance,speed,accel,generation_ms,pruning_ms,map_ms";
}

std::string to_csv_row(const MetricsRecord& r) {
  std::ostringstream os;
  os << fmt(r.stamp) << ',' << fmt(r.operator_action.vx) << ',' << fmt(r.operator_action.vz)
     << ',' << fmt(r.operator_action.omega) << ',' << fmt(r.chosen_action.vx) << ','
     << fmt(r.chosen_action.vz) << ',' << fmt(r.chosen_action.omega) << ',' << int(r.pruned)
     << ',' << int(r.emergency) << ',' << r.candidates << ',' << fmt(r.min_clearance) << ','
     << fmt(r.ground_truth_clearance) << ',' << fmt(r.speed) << ',' << fmt(r.acceleration) << ','
     << fmt(r.generation_ms) << ',' << fmt(r.pruning_ms) << ',' << fmt(r.map_ms);
  return os.str();
}

void RunningStats::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
  max_ = count_ == 1 ? x : std::max(max_, x);
}

double RunningStats::stddev() const {
  return count_ > 1 ? std::sqrt(m2_ / static_cast<double>(count_ - 1)) : 0.0;
}

nlohmann::json SessionSummary::to_json() const {
  auto clearance = [](double d) -> nlohmann::json {
    if (std::isinf(d)) return "inf";
    return d;
  };
  return {{"scenario", scenario},
          {"sim_duration", sim_duration},
          {"plan_cycles", plan_cycles},
          {"map_updates", map_updates},
          {"pruned_cycles", pruned_cycles},
          {"emergency_cycles", emergency_cycles},
          {"generation_ms", stats_json(generation_ms)},
          {"pruning_ms", stats_json(pruning_ms)},
          {"map_ms", stats_json(map_ms)},
          {"max_speed", max_speed},
          {"max_acceleration", max_acceleration},
          {"min_ground_truth_clearance", clearance(min_ground_truth_clearance)},
          {"penetrated", penetrated},
          {"frames", {{"KF", keyframes}, {"SF", subframes}, {"BF", bufferframes}}}};
}

std::string SessionSummary::to_text() const {
  std::ostringstream os;
  auto stage = [&os](const char* name, const RunningStats& s) {
    os << "  " << name << ": " << fmt(s.mean()) << " +- " << fmt(s.stddev()) << " ms (n=" << s.count()
       << ")\n";
  };
  os << "scenario " << scenario << ", " << fmt(sim_duration) << " s simulated\n";
  os << "  plan cycles: " << plan_cycles << " (pruned " << pruned_cycles << ", emergency "
     << emergency_cycles << "), map updates: " << map_updates << "\n";
  stage("trajectory generation", generation_ms);
  stage("trajectory pruning", pruning_ms);
  stage("map integration", map_ms);
  os << "  max speed " << fmt(max_speed) << " m/s, max |accel| " << fmt(max_acceleration)
     << " m/s^2\n";
  os << "  min ground-truth clearance " << fmt(min_ground_truth_clearance) << " m"
     << (penetrated ? " (PENETRATION)" : "") << "\n";
  os << "  frames: KF " << keyframes << ", SF " << subframes << ", BF " << bufferframes << "\n";
  return os.str();
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open metrics file " + path.string());
  out_ << metrics_csv_header() << '\n';
  thread_ = std::thread([this] { run(); });
}

MetricsWriter::~MetricsWriter() { close(); }

void MetricsWriter::push(const MetricsRecord& record) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back(record);
  }
  cv_.notify_one();
}

void MetricsWriter::close() {
  {
    std::lock_guard lock(mutex_);
    closing_ = true;
  }
  cv_.notify_one();
  if (thread_.joinable()) thread_.join();
  out_.flush();
}

std::size_t MetricsWriter::rows_written() const {
  std::lock_guard lock(mutex_);
  return written_;
}

void MetricsWriter::run() {
  std::unique_lock lock(mutex_);
  for (;;) {
    cv_.wait(lock, [this] { return closing_ || !queue_.empty(); });
    std::deque<MetricsRecord> batch;
    batch.swap(queue_);
    lock.unlock();
    for (const auto& r : batch) out_ << to_csv_row(r) << '\n';
    lock.lock();
    written_ += batch.size();
    if (closing_ && queue_.empty()) return;
  }
}

}  // namespace teleop::session
