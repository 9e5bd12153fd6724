#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "teleop/geometry.hpp"
#include "teleop/mapping/kd_tree.hpp"
#include "teleop/mapping/nearest.hpp"
#include "teleop/mapping/sensor_scan.hpp"
#include "teleop/mapping/voxel_grid.hpp"

namespace teleop::mapping {

enum class FrameClass {
  kKeyFrame,
  kSubFrame,
  kBufferFrame,
};

std::string_view to_string(FrameClass frame_class);

struct MapParams {
  double voxel_size = 0.2;
  double keyframe_distance = 2.0;   // alpha_k, meters
  double subframe_distance = 0.2;   // alpha_s, meters
  double subframe_heading = 0.1;    // beta_s, radians
};

/// KF if farther than alpha_k from the last KF; else SF if farther than
/// alpha_s or turned more than beta_s from the last SF; else BF. A missing
/// previous frame counts as infinitely far.
FrameClass classify(const Pose& scan_pose, const std::optional<Pose>& last_keyframe,
                    const std::optional<Pose>& last_subframe, const MapParams& params);

/// One voxel layer of the map: sorted keys plus a KD-tree over their centers.
struct VoxelLayer {
  std::vector<VoxelKey> keys;
  KdTree tree;

  static std::shared_ptr<const VoxelLayer> make(std::vector<VoxelKey> keys, double voxel_size);
};

/// Immutable view of the map. Cheap to copy; shares layers with the map.
///
/// Queries go to one tree over the union of the layers, built when the
/// snapshot is created, so a planning cycle searches a single index.
class MapSnapshot final : public NearestNeighborIndex {
 public:
  MapSnapshot();
  MapSnapshot(std::shared_ptr<const VoxelLayer> current, std::shared_ptr<const VoxelLayer> previous,
              std::shared_ptr<const VoxelLayer> buffer, double voxel_size);

  /// Exact nearest neighbor over current KF, previous KF and buffer voxels.
  NearestResult nearest(const Eigen::Vector3d& query) const override;

  /// Sorted union of all voxel keys.
  const std::vector<VoxelKey>& voxel_keys() const { return combined_->keys; }
  std::vector<Eigen::Vector3d> voxel_centers() const;

  const VoxelLayer& current() const { return *current_; }
  const VoxelLayer& previous() const { return *previous_; }
  const VoxelLayer& buffer() const { return *buffer_; }
  double voxel_size() const { return voxel_size_; }
  bool empty() const;

 private:
  std::shared_ptr<const VoxelLayer> current_;
  std::shared_ptr<const VoxelLayer> previous_;
  std::shared_ptr<const VoxelLayer> buffer_;
  std::shared_ptr<const VoxelLayer> combined_;
  double voxel_size_ = 0.0;
};

struct MapCounters {
  std::size_t keyframes = 0;
  std::size_t subframes = 0;
  std::size_t bufferframes = 0;
};

/// Rolling local map built from the two most recent keyframes.
///
/// Points are stored in world frame; keyframe poses are kept so the map can be
/// re-anchored if state estimates drift.
class LocalMap {
 public:
  explicit LocalMap(MapParams params = {});

  /// Integrates one sensor frame. All scans must share a stamp and body pose
  /// (e.g. the forward and upward cameras fired together); they are
  /// classified once and their voxels are merged.
  ///
  /// Throws std::invalid_argument for an empty frame, mismatched stamps,
  /// points beyond a declared max range, or a stamp older than the last
  /// integrated frame.
  FrameClass integrate(std::span<const SensorScan> frame);
  FrameClass integrate(const SensorScan& scan) { return integrate(std::span(&scan, 1)); }

  NearestResult nearest(const Eigen::Vector3d& query) const { return snapshot().nearest(query); }

  const MapSnapshot& snapshot() const { return snapshot_; }

  const MapParams& params() const { return params_; }
  const MapCounters& counters() const { return counters_; }
  const std::optional<Pose>& last_keyframe_pose() const { return last_keyframe_; }
  const std::optional<Pose>& last_subframe_pose() const { return last_subframe_; }
  const std::optional<Pose>& previous_keyframe_pose() const { return previous_keyframe_; }
  std::size_t subframes_in_current_keyframe() const { return subframes_in_current_; }

 private:
  MapParams params_;
  std::optional<Pose> last_keyframe_;
  std::optional<Pose> last_subframe_;
  std::optional<Pose> previous_keyframe_;
  std::optional<double> last_stamp_;
  std::shared_ptr<const VoxelLayer> current_;
  std::shared_ptr<const VoxelLayer> previous_;
  std::shared_ptr<const VoxelLayer> buffer_;
  MapSnapshot snapshot_;
  MapCounters counters_;
  std::size_t subframes_in_current_ = 0;
};

}  // namespace teleop::mapping
