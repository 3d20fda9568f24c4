// Copyright 2026, The rio Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rio/errors.hpp"
#include "rio/geom.hpp"
#include "support.hpp"

namespace rio {
namespace {

using geom::Pose;
using geom::UnitQuaternion;
using testing::random_rotation;
using testing::random_vec;

UnitQuaternion about(const Vec3 &axis, double deg) {
  return UnitQuaternion::from_axis_angle(axis, deg * M_PI / 180.0);
}

TEST(Quaternion, IdentityIsNeutral) {
  std::mt19937_64 rng(1);
  const UnitQuaternion q = random_rotation(rng);
  const UnitQuaternion r = UnitQuaternion::identity() * q;
  EXPECT_DOUBLE_EQ(r.w(), q.w());
  EXPECT_DOUBLE_EQ(r.x(), q.x());
  EXPECT_DOUBLE_EQ(r.y(), q.y());
  EXPECT_DOUBLE_EQ(r.z(), q.z());
}

TEST(Quaternion, QuarterTurnsCompose) {
  const UnitQuaternion q = about(Vec3::UnitZ(), 90) * about(Vec3::UnitZ(), 90);
  EXPECT_LT(geom::angular_distance(q, about(Vec3::UnitZ(), 180)), 1e-12);
  EXPECT_NEAR(q.angle(), M_PI, 1e-12);
}

TEST(Quaternion, TimesInverseIsIdentity) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion q = random_rotation(rng);
    EXPECT_LT(geom::angular_distance(q * q.inverse(), UnitQuaternion::identity()), 1e-9);
  }
}

TEST(Quaternion, RotateVector) {
  EXPECT_TRUE((UnitQuaternion::identity() * Vec3(1, 2, 3)).isApprox(Vec3(1, 2, 3)));
  EXPECT_LT((about(Vec3::UnitZ(), 90) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm(), 1e-15);
  std::mt19937_64 rng(3);
  EXPECT_EQ(random_rotation(rng) * Vec3::Zero(), Vec3::Zero());
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = random_vec(rng, 10.0);
    EXPECT_NEAR((random_rotation(rng) * v).norm(), v.norm(), 1e-9);
  }
}

TEST(Quaternion, VecPart) {
  EXPECT_EQ(geom::vec_part(UnitQuaternion::identity()), Vec3::Zero());
  EXPECT_LT((geom::vec_part(about(Vec3::UnitX(), 180)) - Vec3(1, 0, 0)).norm(), 1e-15);
  // Both signs describe one rotation; the vector part follows the w >= 0 one.
  const UnitQuaternion q(-0.5, 0.5, -0.5, 0.5);
  const UnitQuaternion neg(0.5, -0.5, 0.5, -0.5);
  EXPECT_LT((q.matrix() - neg.matrix()).norm(), 1e-15);
  EXPECT_EQ(geom::vec_part(q), neg.vec());
}

TEST(Quaternion, NormalizesInput) {
  const UnitQuaternion q(2.0, 0.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(q.w(), 1.0);
  const UnitQuaternion z(0.0, 0.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(z.w(), 1.0);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i)
    EXPECT_NEAR((random_rotation(rng) * random_rotation(rng)).norm(), 1.0, 1e-12);
}

TEST(QuaternionProperty, MatchesRotationMatrix) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaternion q = random_rotation(rng);
    const Vec3 v = random_vec(rng, 3.0);
    EXPECT_LT((q * v - q.matrix() * v).norm(), 1e-9);
    EXPECT_LT((q * v - Eigen::Quaterniond(q.w(), q.x(), q.y(), q.z()) * v).norm(), 1e-9);
  }
}

TEST(QuaternionProperty, Associative) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaternion a = random_rotation(rng), b = random_rotation(rng),
                         c = random_rotation(rng);
    EXPECT_LT(geom::angular_distance((a * b) * c, a * (b * c)), 1e-9);
  }
}

TEST(QuaternionProperty, ExpLogRoundTrip) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Vec3 v = random_vec(rng, 1.0);
    if (v.norm() > 3.0) v *= 3.0 / v.norm();
    EXPECT_LT((UnitQuaternion::exp(v).log() - v).norm(), 1e-9);
    EXPECT_LT((UnitQuaternion::exp(v).matrix() - geom::so3_exp(v)).norm(), 1e-12);
  }
}

TEST(Geometry, RightJacobianFirstOrder) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const Vec3 phi = random_vec(rng, 0.7), d = random_vec(rng, 1e-6);
    const Mat3 lhs = geom::so3_exp(phi + d);
    const Mat3 rhs = geom::so3_exp(phi) * geom::so3_exp(geom::right_jacobian(phi) * d);
    EXPECT_LT((lhs - rhs).norm(), 1e-11);
  }
}

TEST(Pose, ComposeWithInverse) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Pose p{random_rotation(rng), random_vec(rng, 10.0)};
    const Pose id = p * p.inverse();
    EXPECT_LT(id.translation.norm(), 1e-9);
    EXPECT_LT(id.rotation.angle(), 1e-9);
  }
}

TEST(Pose, Associative) {
  std::mt19937_64 rng(10);
  const Pose a{random_rotation(rng), random_vec(rng)}, b{random_rotation(rng), random_vec(rng)},
      c{random_rotation(rng), random_vec(rng)};
  const Pose l = (a * b) * c, r = a * (b * c);
  EXPECT_LT((l.translation - r.translation).norm(), 1e-9);
  EXPECT_LT(geom::angular_distance(l.rotation, r.rotation), 1e-9);
}

std::vector<Vec3> cloud(std::mt19937_64 &rng, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.push_back(random_vec(rng, 5.0));
  return pts;
}

TEST(Umeyama, IdenticalSetsGiveIdentity) {
  std::mt19937_64 rng(11);
  const auto x = cloud(rng, 20);
  const Pose T = geom::umeyama_align(x, x);
  EXPECT_LT(T.translation.norm(), 1e-12);
  EXPECT_LT(T.rotation.angle(), 1e-9);
}

TEST(Umeyama, RecoversRigidTransform) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = cloud(rng, 10);
    const Pose T{random_rotation(rng), random_vec(rng, 20.0)};
    std::vector<Vec3> y;
    for (const auto &p : x) y.push_back(T * p);
    const Pose E = geom::umeyama_align(y, x);
    EXPECT_LT((E.translation - T.translation).norm(), 1e-9);
    EXPECT_LT(geom::angular_distance(E.rotation, T.rotation), 1e-9);
  }
}

TEST(Umeyama, NoisyResidualWithinThreeSigma) {
  std::mt19937_64 rng(13);
  const double sigma = 0.01;
  const auto x = cloud(rng, 100);
  const Pose T{random_rotation(rng), random_vec(rng, 5.0)};
  std::vector<Vec3> y;
  for (const auto &p : x) y.push_back(T * p + random_vec(rng, sigma));
  const Pose E = geom::umeyama_align(y, x);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += (E * x[i] - y[i]).squaredNorm();
  EXPECT_LE(std::sqrt(sum / x.size()), 3.0 * sigma);
}

TEST(Umeyama, RejectsDegenerateSets) {
  std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  EXPECT_THROW(geom::umeyama_align(line, line), Error);
  std::vector<Vec3> same(5, Vec3(1, 2, 3));
  EXPECT_THROW(geom::umeyama_align(same, same), Error);
  std::vector<Vec3> two{{0, 0, 0}, {1, 0, 0}};
  try {
    geom::umeyama_align(two, two);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateGeometry);
  }
}

TEST(Umeyama, RigidAlignAcceptsLines) {
  std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  std::vector<Vec3> moved;
  for (const auto &p : line) moved.push_back(p + Vec3(0, 5, 0));
  const Pose T = geom::rigid_align(moved, line);
  for (std::size_t i = 0; i < line.size(); ++i) EXPECT_LT((T * line[i] - moved[i]).norm(), 1e-9);
}

}  // namespace
}  // namespace rio
