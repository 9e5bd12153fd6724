#include "teleop/mapping/scan_log.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace teleop::mapping {

namespace {

static_assert(std::endian::native == std::endian::little,
              "scan log encoding assumes a little-endian host");

constexpr std::array<char, 8> kMagic = {'T', 'S', 'C', 'A', 'N', 'L', 'O', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

void put_pose(std::string& buf, const Pose& pose) {
  put(buf, pose.translation.x());
  put(buf, pose.translation.y());
  put(buf, pose.translation.z());
  put(buf, pose.rotation.w());
  put(buf, pose.rotation.x());
  put(buf, pose.rotation.y());
  put(buf, pose.rotation.z());
}

class Cursor {
 public:
  explicit Cursor(const std::string& buf) : buf_(buf) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > buf_.size()) throw std::runtime_error("scan log record truncated");
    T value;
    std::memcpy(&value, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string(std::size_t n) {
    if (pos_ + n > buf_.size()) throw std::runtime_error("scan log record truncated");
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  Pose get_pose() {
    Pose pose;
    pose.translation.x() = get<double>();
    pose.translation.y() = get<double>();
    pose.translation.z() = get<double>();
    const double w = get<double>();
    const double x = get<double>();
    const double y = get<double>();
    const double z = get<double>();
    pose.rotation = Eigen::Quaterniond(w, x, y, z);
    return pose;
  }

  bool done() const { return pos_ == buf_.size(); }

 private:
  const std::string& buf_;
  std::size_t pos_ = 0;
};

}  // namespace

ScanLogWriter::ScanLogWriter(std::ostream& out) : out_(out) {
  out_.write(kMagic.data(), kMagic.size());
  std::string header;
  put(header, kVersion);
  out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

void ScanLogWriter::write(const SensorScan& scan) {
  if (scan.sensor_id.size() > UINT16_MAX) throw std::invalid_argument("sensor id too long");
  std::string payload;
  put(payload, scan.stamp);
  put(payload, static_cast<std::uint16_t>(scan.sensor_id.size()));
  payload += scan.sensor_id;
  put_pose(payload, scan.sensor_pose);
  put_pose(payload, scan.body_pose);
  put(payload, scan.max_range);
  put(payload, static_cast<std::uint32_t>(scan.points.size()));
  for (const auto& p : scan.points) {
    put(payload, p.x());
    put(payload, p.y());
    put(payload, p.z());
  }
  std::string length;
  put(length, static_cast<std::uint32_t>(payload.size()));
  out_.write(length.data(), static_cast<std::streamsize>(length.size()));
  out_.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out_) throw std::runtime_error("failed writing scan log record");
}

ScanLogReader::ScanLogReader(std::istream& in) : in_(in) {
  std::array<char, 8> magic{};
  in_.read(magic.data(), magic.size());
  std::uint32_t version = 0;
  in_.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in_ || magic != kMagic) throw std::runtime_error("not a scan log");
  if (version != kVersion) {
    throw std::runtime_error("unsupported scan log version " + std::to_string(version));
  }
}

std::optional<SensorScan> ScanLogReader::next() {
  std::uint32_t length = 0;
  in_.read(reinterpret_cast<char*>(&length), sizeof(length));
  if (in_.gcount() == 0 && in_.eof()) return std::nullopt;
  if (!in_) throw std::runtime_error("scan log record header truncated");

  std::string payload(length, '\0');
  in_.read(payload.data(), length);
  if (static_cast<std::uint32_t>(in_.gcount()) != length) {
    throw std::runtime_error("scan log record truncated");
  }

  Cursor cursor(payload);
  SensorScan scan;
  scan.stamp = cursor.get<double>();
  scan.sensor_id = cursor.get_string(cursor.get<std::uint16_t>());
  scan.sensor_pose = cursor.get_pose();
  scan.body_pose = cursor.get_pose();
  scan.max_range = cursor.get<double>();
  const auto count = cursor.get<std::uint32_t>();
  scan.points.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const double x = cursor.get<double>();
    const double y = cursor.get<double>();
    const double z = cursor.get<double>();
    scan.points.emplace_back(x, y, z);
  }
  if (!cursor.done()) throw std::runtime_error("scan log record has trailing bytes");
  return scan;
}

void write_scan_log(const std::filesystem::path& path, const std::vector<SensorScan>& scans) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  ScanLogWriter writer(out);
  for (const auto& scan : scans) writer.write(scan);
}

std::vector<SensorScan> read_scan_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  ScanLogReader reader(in);
  std::vector<SensorScan> scans;
  while (auto scan = reader.next()) scans.push_back(std::move(*scan));
  return scans;
}

}  // namespace teleop::mapping
