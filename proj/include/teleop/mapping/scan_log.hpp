#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "teleop/mapping/sensor_scan.hpp"

namespace teleop::mapping {

/// Binary scan log for replaying sensor data into a LocalMap.
///
/// All values little-endian. The file starts with the 8-byte magic
/// "TSCANLOG" and a u32 version (1), followed by records:
///
///   u32  payload length in bytes (everything after this field)
///   f64  stamp
///   u16  sensor id length, then that many bytes of UTF-8
///   f64  sensor pose: tx ty tz qw qx qy qz
///   f64  body pose:   tx ty tz qw qx qy qz
///   f64  max range (0 when undeclared)
///   u32  point count N
///   f64  3N coordinates, x y z per point, sensor frame
class ScanLogWriter {
 public:
  explicit ScanLogWriter(std::ostream& out);
  void write(const SensorScan& scan);

 private:
  std::ostream& out_;
};

class ScanLogReader {
 public:
  /// Throws std::runtime_error if the header is missing or the version is unknown.
  explicit ScanLogReader(std::istream& in);

  /// Next record, or nullopt at a clean end of stream. Throws
  /// std::runtime_error on a truncated or inconsistent record.
  std::optional<SensorScan> next();

 private:
  std::istream& in_;
};

void write_scan_log(const std::filesystem::path& path, const std::vector<SensorScan>& scans);
std::vector<SensorScan> read_scan_log(const std::filesystem::path& path);

}  // namespace teleop::mapping
