#pragma once

#include <Eigen/Core>
#include <array>
#include <span>

namespace nvs {

using Point3 = Eigen::Vector3d;

// Continuous image-plane coordinates; (u, v) = (column, row).
struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

// Pinhole intrinsics. Integer pixel (u, v) denotes the pixel center.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  // Throws CalibrationError when any invariant is violated.
  void validate() const;
  bool contains(double u, double v) const {
    return u >= 0.0 && v >= 0.0 && u < width && v < height;
  }
  Eigen::Matrix3d matrix() const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

// Rigid transform, camera-to-world: p_world = rotation * p_camera + translation.
class Pose {
 public:
  static constexpr double kOrthonormalTolerance = 1e-9;

  Pose() = default;
  // Throws CalibrationError unless `rotation` is a proper rotation within tolerance.
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
       double tolerance = kOrthonormalTolerance);

  static Pose identity() { return {}; }
  static Pose from_translation(const Eigen::Vector3d& t);
  // Rotation about the camera y axis (pointing down), angle in radians.
  static Pose rotation_y(double radians);
  // Rotation R = Ry(yaw) * Rx(pitch) * Rz(roll), angles in radians.
  static Pose from_euler(double yaw, double pitch, double roll,
                         const Eigen::Vector3d& translation = Eigen::Vector3d::Zero());
  // 12 numbers of a 3x4 row-major [R | t] matrix.
  static Pose from_row_major(std::span<const double, 12> values,
                             double tolerance = kOrthonormalTolerance);
  // Projects a nearly orthonormal matrix onto SO(3) before building the pose.
  static Pose orthonormalized(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  std::array<double, 12> to_row_major() const;

  Point3 apply(const Point3& p) const { return rotation_ * p + translation_; }

  bool is_identity(double tolerance = 0.0) const;
  // Largest per-entry difference of the two 3x4 matrices.
  double max_abs_diff(const Pose& other) const;

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

// Lifts pixel (u, v) with metric depth into the camera frame.
Point3 unproject(double u, double v, double depth, const CameraIntrinsics& k);

// Projects a camera-frame point; result may fall outside the image.
PixelCoord project(const Point3& p, const CameraIntrinsics& k);

// Applies b first, then a.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& t);

// Maps coordinates in camera A into camera B, given both camera-to-world poses.
Pose relative_pose(const Pose& from, const Pose& to);

}  // namespace nvs
