#include "nvs/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <fmt/format.h>

#include "nvs/error.hpp"

namespace nvs {

void CameraIntrinsics::validate() const {
  if (!(std::isfinite(fx) && fx > 0.0) || !(std::isfinite(fy) && fy > 0.0)) {
    throw CalibrationError(fmt::format("focal lengths must be positive (fx={}, fy={})", fx, fy));
  }
  if (width < 1 || height < 1) {
    throw CalibrationError(fmt::format("image size must be positive ({}x{})", width, height));
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw CalibrationError(
        fmt::format("principal point ({}, {}) outside {}x{} image", cx, cy, width, height));
  }
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation, double tolerance)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw CalibrationError("pose contains non-finite values");
  }
  const double ortho_err =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det_err = std::abs(rotation.determinant() - 1.0);
  if (ortho_err > tolerance || det_err > tolerance) {
    throw CalibrationError(fmt::format(
        "rotation is not orthonormal (|R^T R - I| = {:g}, |det - 1| = {:g})", ortho_err, det_err));
  }
}

Pose Pose::from_translation(const Eigen::Vector3d& t) {
  return Pose(Eigen::Matrix3d::Identity(), t);
}

Pose Pose::rotation_y(double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  Eigen::Matrix3d r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return Pose(r, Eigen::Vector3d::Zero());
}

Pose Pose::from_euler(double yaw, double pitch, double roll, const Eigen::Vector3d& translation) {
  const Eigen::Matrix3d r = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()) *
                             Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()))
                                .toRotationMatrix();
  return Pose(r, translation);
}

Pose Pose::from_row_major(std::span<const double, 12> values, double tolerance) {
  Eigen::Matrix3d r;
  Eigen::Vector3d t;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) r(row, col) = values[row * 4 + col];
    t(row) = values[row * 4 + 3];
  }
  return Pose(r, t, tolerance);
}

Pose Pose::orthonormalized(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return Pose(r, translation);
}

std::array<double, 12> Pose::to_row_major() const {
  std::array<double, 12> out{};
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) out[row * 4 + col] = rotation_(row, col);
    out[row * 4 + 3] = translation_(row);
  }
  return out;
}

bool Pose::is_identity(double tolerance) const {
  return max_abs_diff(Pose::identity()) <= tolerance;
}

double Pose::max_abs_diff(const Pose& other) const {
  return std::max((rotation_ - other.rotation_).cwiseAbs().maxCoeff(),
                  (translation_ - other.translation_).cwiseAbs().maxCoeff());
}

Point3 unproject(double u, double v, double depth, const CameraIntrinsics& k) {
  if (!std::isfinite(depth) || depth <= 0.0) {
    throw InvalidDepthError(fmt::format("depth must be positive and finite, got {}", depth));
  }
  if (!k.contains(u, v)) {
    throw BoundsError(
        fmt::format("pixel ({}, {}) outside {}x{} image", u, v, k.width, k.height));
  }
  return {(u - k.cx) * depth / k.fx, (v - k.cy) * depth / k.fy, depth};
}

PixelCoord project(const Point3& p, const CameraIntrinsics& k) {
  if (!(p.z() > 0.0)) {
    throw BehindCameraError(fmt::format("point has non-positive depth z={}", p.z()));
  }
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation(),
              1e-6);
}

Pose invert(const Pose& t) {
  const Eigen::Matrix3d rt = t.rotation().transpose();
  return Pose(rt, -(rt * t.translation()), 1e-6);
}

Pose relative_pose(const Pose& from, const Pose& to) { return compose(invert(to), from); }

}  // namespace nvs
