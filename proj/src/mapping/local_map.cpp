#include "teleop/mapping/local_map.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace teleop::mapping {

std::vector<Eigen::Vector3d> SensorScan::world_points() const {
  std::vector<Eigen::Vector3d> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(sensor_pose.apply(p));
  return out;
}

std::string_view to_string(FrameClass frame_class) {
  switch (frame_class) {
    case FrameClass::kKeyFrame:
      return "KF";
    case FrameClass::kSubFrame:
      return "SF";
    case FrameClass::kBufferFrame:
      return "BF";
  }
  return "?";
}

FrameClass classify(const Pose& scan_pose, const std::optional<Pose>& last_keyframe,
                    const std::optional<Pose>& last_subframe, const MapParams& params) {
  if (!last_keyframe ||
      (scan_pose.translation - last_keyframe->translation).norm() > params.keyframe_distance) {
    return FrameClass::kKeyFrame;
  }
  if (!last_subframe ||
      (scan_pose.translation - last_subframe->translation).norm() > params.subframe_distance ||
      heading_distance(scan_pose.yaw(), last_subframe->yaw()) > params.subframe_heading) {
    return FrameClass::kSubFrame;
  }
  return FrameClass::kBufferFrame;
}

std::shared_ptr<const VoxelLayer> VoxelLayer::make(std::vector<VoxelKey> keys, double voxel_size) {
  auto layer = std::make_shared<VoxelLayer>();
  layer->tree = KdTree(mapping::voxel_centers(keys, voxel_size));
  layer->keys = std::move(keys);
  return layer;
}

namespace {

std::shared_ptr<const VoxelLayer> empty_layer() {
  static const auto layer = std::make_shared<const VoxelLayer>();
  return layer;
}

}  // namespace

MapSnapshot::MapSnapshot()
    : current_(empty_layer()),
      previous_(empty_layer()),
      buffer_(empty_layer()),
      combined_(empty_layer()) {}

MapSnapshot::MapSnapshot(std::shared_ptr<const VoxelLayer> current,
                         std::shared_ptr<const VoxelLayer> previous,
                         std::shared_ptr<const VoxelLayer> buffer, double voxel_size)
    : current_(std::move(current)),
      previous_(std::move(previous)),
      buffer_(std::move(buffer)),
      voxel_size_(voxel_size) {
  combined_ = VoxelLayer::make(
      merge_keys(merge_keys(current_->keys, previous_->keys), buffer_->keys), voxel_size_);
}

NearestResult MapSnapshot::nearest(const Eigen::Vector3d& query) const {
  return combined_->tree.nearest(query);
}

std::vector<Eigen::Vector3d> MapSnapshot::voxel_centers() const {
  return mapping::voxel_centers(voxel_keys(), voxel_size_);
}

bool MapSnapshot::empty() const { return combined_->keys.empty(); }

LocalMap::LocalMap(MapParams params)
    : params_(params), current_(empty_layer()), previous_(empty_layer()), buffer_(empty_layer()) {
  if (!(params_.voxel_size > 0.0)) throw std::invalid_argument("voxel size must be positive");
  snapshot_ = MapSnapshot(current_, previous_, buffer_, params_.voxel_size);
}

FrameClass LocalMap::integrate(std::span<const SensorScan> frame) {
  if (frame.empty()) throw std::invalid_argument("empty sensor frame");
  const double stamp = frame.front().stamp;
  for (const auto& scan : frame) {
    if (scan.stamp != stamp) throw std::invalid_argument("scans in one frame must share a stamp");
  }
  if (last_stamp_ && stamp < *last_stamp_) {
    throw std::invalid_argument("scan stamp is older than the last integrated frame");
  }

  std::vector<Eigen::Vector3d> world;
  for (const auto& scan : frame) {
    if (scan.max_range > 0.0) {
      for (const auto& p : scan.points) {
        if (p.norm() > scan.max_range * (1.0 + 1e-9)) {
          throw std::invalid_argument("scan point beyond declared sensor range");
        }
      }
    }
    const auto pts = scan.world_points();
    world.insert(world.end(), pts.begin(), pts.end());
  }
  std::vector<VoxelKey> keys = voxelize_keys(world, params_.voxel_size);

  const Pose& body = frame.front().body_pose;
  const FrameClass frame_class = classify(body, last_keyframe_, last_subframe_, params_);
  switch (frame_class) {
    case FrameClass::kKeyFrame:
      previous_ = current_;
      previous_keyframe_ = last_keyframe_;
      current_ = VoxelLayer::make(std::move(keys), params_.voxel_size);
      last_keyframe_ = body;
      last_subframe_ = body;
      subframes_in_current_ = 0;
      ++counters_.keyframes;
      break;
    case FrameClass::kSubFrame:
      current_ = VoxelLayer::make(merge_keys(current_->keys, keys), params_.voxel_size);
      last_subframe_ = body;
      ++subframes_in_current_;
      ++counters_.subframes;
      break;
    case FrameClass::kBufferFrame:
      ++counters_.bufferframes;
      break;
  }
  buffer_ = frame_class == FrameClass::kBufferFrame
                ? VoxelLayer::make(std::move(keys), params_.voxel_size)
                : empty_layer();
  last_stamp_ = stamp;
  snapshot_ = MapSnapshot(current_, previous_, buffer_, params_.voxel_size);
  return frame_class;
}

}  // namespace teleop::mapping
