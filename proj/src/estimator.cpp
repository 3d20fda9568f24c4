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

/**
 * \file estimator.cpp
 * \brief Window bookkeeping and the Levenberg-Marquardt solve.
 *
 * The normal equations are assembled densely over the state error vector
 * (15 per frame) and block-wise for landmarks (3 each); landmarks are
 * eliminated with a Schur complement before the dense state solve.
 */
#include "rio/estimator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "rio/errors.hpp"
#include "rio/kdtree.hpp"

namespace rio {

const char *to_string(Mode mode) {
  switch (mode) {
    case Mode::DopplerImu: return "D-IMU";
    case Mode::WeightedDopplerImu: return "WD-IMU";
    case Mode::P2PImu: return "P2P-IMU";
    case Mode::Full: return "Full";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string &text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "d-imu") return Mode::DopplerImu;
  if (t == "wd-imu") return Mode::WeightedDopplerImu;
  if (t == "p2p-imu") return Mode::P2PImu;
  if (t == "full") return Mode::Full;
  return std::nullopt;
}

double Huber::rho(double s) const {
  const double d2 = delta * delta;
  return s <= d2 ? s : 2.0 * delta * std::sqrt(s) - d2;
}

double Huber::drho(double s) const {
  return s <= delta * delta ? 1.0 : delta / std::sqrt(s);
}

Vec3 p2p_residual(const Vec3 &landmark, const Vec3 &point, const NavState &state,
                  const Extrinsics &extrinsics) {
  return landmark -
         (state.rotation * (extrinsics.radar_to_body * point + extrinsics.translation) +
          state.position);
}

P2PJacobians p2p_jacobians(const Vec3 &point, const NavState &state,
                           const Extrinsics &extrinsics) {
  const Vec3 x = extrinsics.radar_to_body * point + extrinsics.translation;
  P2PJacobians J;
  J.d_position = -Mat3::Identity();
  J.d_rotation = state.rotation.matrix() * geom::skew(x);
  J.d_landmark = Mat3::Identity();
  return J;
}

// ---------------------------------------------------------------------------
// Window bookkeeping

SlidingWindow::SlidingWindow(EstimatorConfig config, Extrinsics extrinsics)
    : config_(config), extrinsics_(extrinsics) {
  if (config_.window_size < 2)
    throw Error(ErrorCode::InvalidConfig, "window size must be >= 2");
}

std::optional<Frame> SlidingWindow::advance(Frame frame) {
  if (!frames_.empty() && frame.imu) {
    const double t = frame.state.timestamp;
    frame.state = propagate(frames_.back().state, *frame.imu, config_.gravity_vector());
    if (t != 0.0) frame.state.timestamp = t;
  }
  if (frame.keypoint_landmarks.size() != frame.keypoints.size())
    frame.keypoint_landmarks.assign(frame.keypoints.size(), std::nullopt);
  frames_.push_back(std::move(frame));

  std::optional<Frame> dropped;
  if (frames_.size() > static_cast<std::size_t>(config_.window_size)) {
    dropped = std::move(frames_.front());
    frames_.pop_front();
    retire_landmarks();
  }
  return dropped;
}

LandmarkId SlidingWindow::add_landmark(const Vec3 &position, LandmarkSource source) {
  Landmark l;
  l.id = next_id_++;
  l.position = position;
  l.observation_count = 1;
  l.source = source;
  landmarks_.emplace(l.id, l);
  return l.id;
}

void SlidingWindow::retire_landmarks() {
  std::unordered_map<LandmarkId, bool> seen;
  for (const auto &f : frames_)
    for (const auto &o : f.observations) seen[o.landmark] = true;
  for (auto it = landmarks_.begin(); it != landmarks_.end();) {
    if (!seen.count(it->first))
      it = landmarks_.erase(it);
    else
      ++it;
  }
}

void SlidingWindow::manage_landmarks(const std::vector<Correspondence> &matches) {
  if (frames_.empty()) return;
  Frame &cur = frames_.back();
  const Pose cur_radar = cur.state.pose() * extrinsics_.pose();

  if (frames_.size() >= 2) {
    Frame &prev = frames_[frames_.size() - 2];
    const Pose prev_radar = prev.state.pose() * extrinsics_.pose();
    for (const auto &m : matches) {
      if (m.index_a >= prev.keypoints.size() || m.index_b >= cur.keypoints.size()) continue;
      std::optional<LandmarkId> id = prev.keypoint_landmarks[m.index_a];
      if (!id || !landmarks_.count(*id)) {
        const Vec3 &p = prev.keypoints.positions[m.index_a];
        id = add_landmark(prev_radar * p, LandmarkSource::Keypoint);
        prev.observations.push_back({*id, p, false});
        prev.keypoint_landmarks[m.index_a] = id;
      }
      cur.observations.push_back({*id, cur.keypoints.positions[m.index_b], false});
      cur.keypoint_landmarks[m.index_b] = id;
      ++landmarks_.at(*id).observation_count;
    }
  }

  if (cur.nonkey_points.empty()) return;
  std::vector<LandmarkId> ids;
  std::vector<Vec3> positions;
  std::unordered_map<LandmarkId, bool> taken;
  for (const auto &o : cur.observations) taken[o.landmark] = true;
  for (const auto &[id, l] : landmarks_) {
    if (taken.count(id)) continue;
    ids.push_back(id);
    positions.push_back(l.position);
  }
  const KdTree tree(positions);
  for (const Vec3 &p : cur.nonkey_points) {
    const Vec3 w = cur_radar * p;
    std::optional<LandmarkId> hit;
    if (!tree.empty()) {
      for (const auto &n : tree.radius(w, config_.nonkey_association_radius)) {
        if (!taken.count(ids[n.index])) {
          hit = ids[n.index];
          break;
        }
      }
    }
    if (hit) {
      ++landmarks_.at(*hit).observation_count;
    } else {
      hit = add_landmark(w, LandmarkSource::PromotedNonkey);
    }
    taken[*hit] = true;
    cur.observations.push_back({*hit, p, true});
  }
}

bool SlidingWindow::is_active(const Observation &obs) const {
  if (!obs.nonkey) return true;
  const auto it = landmarks_.find(obs.landmark);
  return it != landmarks_.end() && it->second.observation_count > config_.nonkey_min_observations;
}

std::size_t SlidingWindow::imu_block_count() const {
  std::size_t n = 0;
  for (std::size_t i = 1; i < frames_.size(); ++i) n += frames_[i].imu ? 1 : 0;
  return n;
}

std::size_t SlidingWindow::doppler_block_count() const {
  std::size_t n = 0;
  for (const auto &f : frames_) n += f.doppler_points.size();
  return n;
}

std::size_t SlidingWindow::p2p_block_count() const {
  std::size_t n = 0;
  for (const auto &f : frames_)
    for (const auto &o : f.observations) n += is_active(o) && landmarks_.count(o.landmark) ? 1 : 0;
  return n;
}

// ---------------------------------------------------------------------------
// Problem evaluation

namespace {

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;
using Mat6x3 = Eigen::Matrix<double, 6, 3>;

constexpr int kStateDim = 15;

// Point-to-point terms touch only the position and rotation of a state, so
// the state-landmark coupling is kept as the 6x3 block of those rows.
constexpr int kPoseRows[2] = {0, 6};

struct LandmarkBlock {
  Mat3 H = Mat3::Zero();
  Vec3 g = Vec3::Zero();
  std::vector<std::pair<int, Mat6x3>> coupling;  // (state index, H_{[dp dtheta], l})
};

Eigen::Matrix<double, 6, 1> pose_rows(const VecX &v, int state) {
  Eigen::Matrix<double, 6, 1> out;
  out << v.segment<3>(kStateDim * state + kPoseRows[0]),
      v.segment<3>(kStateDim * state + kPoseRows[1]);
  return out;
}

struct Linearization {
  MatX H;
  VecX g;
  std::vector<LandmarkBlock> landmarks;
};

class WindowProblem {
 public:
  WindowProblem(const SlidingWindow &window, Mode mode)
      : window_(window), mode_(mode), huber_{window.config().huber_delta} {
    const auto &frames = window.frames();
    states_.reserve(frames.size());
    for (const auto &f : frames) states_.push_back(f.state);
    if (uses_p2p(mode)) {
      for (const auto &f : frames) {
        for (const auto &o : f.observations) {
          if (!window.is_active(o)) continue;
          const auto it = window.landmarks().find(o.landmark);
          if (it == window.landmarks().end()) continue;
          if (index_.emplace(o.landmark, static_cast<int>(ids_.size())).second) {
            ids_.push_back(o.landmark);
            points_.push_back(it->second.position);
          }
        }
      }
    }
  }

  std::vector<NavState> &states() { return states_; }
  std::vector<Vec3> &points() { return points_; }
  const std::vector<LandmarkId> &ids() const { return ids_; }
  int state_dim() const { return kStateDim * static_cast<int>(states_.size()); }

  FamilyCosts cost(const std::vector<NavState> &xs, const std::vector<Vec3> &ls) const {
    FamilyCosts c;
    run(xs, ls, &c, nullptr);
    return c;
  }

  FamilyCosts linearize(Linearization &lin) const {
    const int n = state_dim();
    lin.H.setZero(n, n);
    lin.g.setZero(n);
    lin.landmarks.assign(ids_.size(), LandmarkBlock{});
    FamilyCosts c;
    run(states_, points_, &c, &lin);
    return c;
  }

  ResidualMaxima maxima() const {
    ResidualMaxima m;
    const auto &frames = window_.frames();
    const Vec3 g = window_.config().gravity_vector();
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (!frames[i].imu) continue;
      const Vec15 r = imu_residual(*frames[i].imu, states_[i - 1], states_[i], g);
      m.imu = std::max(m.imu, r.cwiseAbs().maxCoeff());
    }
    const UnitQuaternion b2r = window_.extrinsics().radar_to_body.inverse();
    if (uses_doppler(mode_)) {
      for (std::size_t i = 0; i < frames.size(); ++i) {
        const UnitQuaternion w2b = states_[i].rotation.inverse();
        for (const auto &p : frames[i].doppler_points)
          m.doppler = std::max(m.doppler,
                               std::abs(doppler_residual(p, b2r, w2b, states_[i].velocity)));
      }
    }
    if (uses_p2p(mode_)) {
      for (std::size_t i = 0; i < frames.size(); ++i) {
        for (const auto &o : frames[i].observations) {
          const auto it = index_.find(o.landmark);
          if (it == index_.end()) continue;
          const Vec3 r = p2p_residual(points_[static_cast<std::size_t>(it->second)], o.point,
                                      states_[i], window_.extrinsics());
          m.p2p = std::max(m.p2p, r.cwiseAbs().maxCoeff());
        }
      }
    }
    return m;
  }

 private:
  // Adds a residual block's contribution. `Ja`/`Jb` are the Jacobian columns
  // for states a and b (b < 0 when absent).
  template <int R>
  static void add_states(Linearization &lin, int a, const Eigen::Matrix<double, R, 15> &Ja,
                         int b, const Eigen::Matrix<double, R, 15> *Jb,
                         const Eigen::Matrix<double, R, 1> &r) {
    const int oa = kStateDim * a;
    lin.H.block<15, 15>(oa, oa) += Ja.transpose() * Ja;
    lin.g.segment<15>(oa) += Ja.transpose() * r;
    if (Jb) {
      const int ob = kStateDim * b;
      const Mat15 Hab = Ja.transpose() * (*Jb);
      lin.H.block<15, 15>(oa, ob) += Hab;
      lin.H.block<15, 15>(ob, oa) += Hab.transpose();
      lin.H.block<15, 15>(ob, ob) += Jb->transpose() * (*Jb);
      lin.g.segment<15>(ob) += Jb->transpose() * r;
    }
  }

  void run(const std::vector<NavState> &xs, const std::vector<Vec3> &ls, FamilyCosts *c,
           Linearization *lin) const {
    const auto &frames = window_.frames();
    const auto &cfg = window_.config();
    const Vec3 g = cfg.gravity_vector();

    // IMU
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (!frames[i].imu) continue;
      const PreintegratedImu &pre = *frames[i].imu;
      const Mat15 &S = pre.sqrt_information();
      const Vec15 r = S * imu_residual(pre, xs[i - 1], xs[i], g);
      c->imu += 0.5 * r.squaredNorm();
      if (lin) {
        const ImuJacobians J = imu_residual_jacobians(pre, xs[i - 1], xs[i], g);
        const Mat15 Ja = S * J.d_state_k;
        const Mat15 Jb = S * J.d_state_k1;
        add_states<15>(*lin, static_cast<int>(i - 1), Ja, static_cast<int>(i), &Jb, r);
      }
    }

    // Doppler
    if (uses_doppler(mode_)) {
      const UnitQuaternion b2r = window_.extrinsics().radar_to_body.inverse();
      const bool weighted = uses_weights(mode_);
      for (std::size_t i = 0; i < frames.size(); ++i) {
        const Frame &f = frames[i];
        const NavState &x = xs[i];
        const UnitQuaternion w2b = x.rotation.inverse();
        for (std::size_t k = 0; k < f.doppler_points.size(); ++k) {
          const RadarPoint &p = f.doppler_points[k];
          const double rd = doppler_residual(p, b2r, w2b, x.velocity);
          Eigen::Vector2d wv(0.0, 1.0);  // unweighted: scalar in the second slot
          if (weighted) wv = weight_vector(p, f.cells[k], f.weights, cfg.pairing);
          const Eigen::Vector2d r = wv * rd;
          const double s = r.squaredNorm();
          c->doppler += 0.5 * huber_.rho(s);
          if (lin) {
            // Both weighted rows share the scalar Jacobian, which touches only
            // velocity and rotation (contiguous dims 3..8).
            const DopplerJacobian dj = doppler_jacobians(p, b2r, x.rotation, x.velocity);
            Eigen::Matrix<double, 6, 1> j;
            j << dj.d_velocity.transpose(), dj.d_rotation.transpose();
            const double w2 = huber_.drho(s) * wv.squaredNorm();
            const int o = kStateDim * static_cast<int>(i) + 3;
            lin->H.block<6, 6>(o, o).noalias() += (w2 * j) * j.transpose();
            lin->g.segment<6>(o) += (w2 * rd) * j;
          }
        }
      }
    }

    // Point-to-point
    if (uses_p2p(mode_)) {
      for (std::size_t i = 0; i < frames.size(); ++i) {
        const Frame &f = frames[i];
        for (const auto &o : f.observations) {
          const auto it = index_.find(o.landmark);
          if (it == index_.end() || !window_.is_active(o)) continue;
          const std::size_t li = static_cast<std::size_t>(it->second);
          const Vec3 r = p2p_residual(ls[li], o.point, xs[i], window_.extrinsics());
          const double s = r.squaredNorm();
          c->p2p += 0.5 * cfg.p2p_weight * huber_.rho(s);
          if (lin) {
            const P2PJacobians pj = p2p_jacobians(o.point, xs[i], window_.extrinsics());
            const double sc = std::sqrt(cfg.p2p_weight * huber_.drho(s));
            const Mat3 Jp = sc * pj.d_position;
            const Mat3 Jr = sc * pj.d_rotation;
            const Mat3 Jl = sc * pj.d_landmark;
            const Vec3 rs = sc * r;
            const int op = kStateDim * static_cast<int>(i) + kPoseRows[0];
            const int orot = kStateDim * static_cast<int>(i) + kPoseRows[1];
            lin->H.block<3, 3>(op, op).noalias() += Jp.transpose() * Jp;
            lin->H.block<3, 3>(op, orot).noalias() += Jp.transpose() * Jr;
            lin->H.block<3, 3>(orot, op).noalias() += Jr.transpose() * Jp;
            lin->H.block<3, 3>(orot, orot).noalias() += Jr.transpose() * Jr;
            lin->g.segment<3>(op) += Jp.transpose() * rs;
            lin->g.segment<3>(orot) += Jr.transpose() * rs;
            LandmarkBlock &lb = lin->landmarks[li];
            lb.H += Jl.transpose() * Jl;
            lb.g += Jl.transpose() * rs;
            const int si = static_cast<int>(i);
            if (lb.coupling.empty() || lb.coupling.back().first != si)
              lb.coupling.emplace_back(si, Mat6x3::Zero());
            lb.coupling.back().second.topRows<3>() += Jp.transpose() * Jl;
            lb.coupling.back().second.bottomRows<3>() += Jr.transpose() * Jl;
          }
        }
      }
    }
  }

  const SlidingWindow &window_;
  Mode mode_;
  Huber huber_;
  std::vector<NavState> states_;
  std::vector<Vec3> points_;
  std::vector<LandmarkId> ids_;
  std::unordered_map<LandmarkId, int> index_;
};

bool is_fixed(int dim) {
  // Pose and biases of the first state. Nothing ties the biases down once
  // older frames are dropped, and with Doppler alone a common drift of all
  // biases against the attitude is nearly free.
  return dim < kStateDim && !(dim >= 3 && dim < 6);
}

double damping_of(double h) { return std::clamp(h, 1e-6, 1e32); }

struct Step {
  VecX states;
  std::vector<Vec3> landmarks;
  bool ok = false;
};

Step solve_damped(const Linearization &lin, double lambda) {
  const int n = static_cast<int>(lin.g.size());
  MatX S = lin.H;
  for (int i = 0; i < n; ++i) S(i, i) += lambda * damping_of(lin.H(i, i));
  VecX rhs = -lin.g;

  std::vector<Mat3> inv(lin.landmarks.size());
  for (std::size_t l = 0; l < lin.landmarks.size(); ++l) {
    const LandmarkBlock &lb = lin.landmarks[l];
    Mat3 Hd = lb.H;
    for (int i = 0; i < 3; ++i) Hd(i, i) += lambda * damping_of(lb.H(i, i));
    inv[l] = Hd.inverse();
    for (const auto &[a, Ha] : lb.coupling) {
      const Mat6x3 HaInv = Ha * inv[l];
      const Eigen::Matrix<double, 6, 1> ra = HaInv * lb.g;
      for (int u = 0; u < 2; ++u)
        rhs.segment<3>(kStateDim * a + kPoseRows[u]) += ra.segment<3>(3 * u);
      for (const auto &[b, Hb] : lb.coupling) {
        const Eigen::Matrix<double, 6, 6> D = HaInv * Hb.transpose();
        for (int u = 0; u < 2; ++u)
          for (int v = 0; v < 2; ++v)
            S.block<3, 3>(kStateDim * a + kPoseRows[u], kStateDim * b + kPoseRows[v]) -=
                D.block<3, 3>(3 * u, 3 * v);
      }
    }
  }
  for (int d = 0; d < kStateDim; ++d) {
    if (!is_fixed(d)) continue;
    S.row(d).setZero();
    S.col(d).setZero();
    S(d, d) = 1.0;
    rhs(d) = 0.0;
  }

  Step step;
  const Eigen::LDLT<MatX> ldlt(S);
  if (ldlt.info() != Eigen::Success) return step;
  step.states = ldlt.solve(rhs);
  if (!step.states.allFinite()) return step;
  for (int d = 0; d < kStateDim; ++d)
    if (is_fixed(d)) step.states(d) = 0.0;

  step.landmarks.resize(lin.landmarks.size());
  for (std::size_t l = 0; l < lin.landmarks.size(); ++l) {
    const LandmarkBlock &lb = lin.landmarks[l];
    Vec3 b = -lb.g;
    for (const auto &[a, Ha] : lb.coupling) b -= Ha.transpose() * pose_rows(step.states, a);
    step.landmarks[l] = inv[l] * b;
    if (!step.landmarks[l].allFinite()) return step;
  }
  step.ok = true;
  return step;
}

/// Decrease of the quadratic model 0.5|r + J d|^2 for step d.
double model_decrease(const Linearization &lin, const Step &step) {
  double dec = -lin.g.dot(step.states) - 0.5 * step.states.dot(lin.H * step.states);
  for (std::size_t l = 0; l < lin.landmarks.size(); ++l) {
    const LandmarkBlock &lb = lin.landmarks[l];
    const Vec3 &dl = step.landmarks[l];
    dec -= lb.g.dot(dl) + 0.5 * dl.dot(lb.H * dl);
    for (const auto &[a, Ha] : lb.coupling) dec -= pose_rows(step.states, a).dot(Ha * dl);
  }
  return dec;
}

double gradient_norm(const Linearization &lin) {
  double m = 0.0;
  for (int i = 0; i < lin.g.size(); ++i)
    if (!is_fixed(i)) m = std::max(m, std::abs(lin.g(i)));
  for (const auto &lb : lin.landmarks) m = std::max(m, lb.g.cwiseAbs().maxCoeff());
  return m;
}

double step_norm(const Step &step) {
  double s = step.states.squaredNorm();
  for (const auto &d : step.landmarks) s += d.squaredNorm();
  return std::sqrt(s);
}

void apply_step(const std::vector<NavState> &xs, const std::vector<Vec3> &ls, const Step &step,
                std::vector<NavState> &xs_out, std::vector<Vec3> &ls_out) {
  xs_out = xs;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Vec15 d = step.states.segment<15>(kStateDim * static_cast<int>(i));
    if (i == 0) {
      xs_out[0].velocity += d.segment<3>(3);
    } else {
      xs_out[i] = retract(xs[i], d);
    }
  }
  ls_out = ls;
  for (std::size_t l = 0; l < ls.size(); ++l) ls_out[l] += step.landmarks[l];
}

}  // namespace

FamilyCosts window_cost(const SlidingWindow &window, Mode mode) {
  const WindowProblem problem(window, mode);
  WindowProblem &p = const_cast<WindowProblem &>(problem);
  return problem.cost(p.states(), p.points());
}

ResidualMaxima window_residual_maxima(const SlidingWindow &window, Mode mode) {
  return WindowProblem(window, mode).maxima();
}

SolveReport solve_window(SlidingWindow &window, Mode mode) {
  SolveReport report;
  if (window.size() < 2) {
    report.termination = "window has fewer than 2 states";
    return report;
  }
  const EstimatorConfig &cfg = window.config();

  auto &frames = window.frames();
  for (std::size_t i = 1; i < frames.size(); ++i) {
    auto &imu = frames[i].imu;
    if (imu && imu->bias_deviation(frames[i - 1].state.bias) > cfg.bias_relinearize_threshold)
      imu = imu->relinearized(frames[i - 1].state.bias);
  }

  WindowProblem problem(window, mode);
  report.landmarks = problem.ids().size();

  Linearization lin;
  FamilyCosts costs = problem.linearize(lin);
  double cost = costs.total();
  report.initial_cost = cost;

  double lambda = cfg.initial_damping;
  double nu = 2.0;
  std::vector<NavState> xs_new;
  std::vector<Vec3> ls_new;
  report.termination = "max iterations";
  while (report.evaluations < cfg.max_iterations) {
    if (gradient_norm(lin) < cfg.gradient_tolerance) {
      report.converged = true;
      report.termination = "gradient tolerance";
      break;
    }
    const Step step = solve_damped(lin, lambda);
    if (step.ok && step_norm(step) < cfg.step_tolerance) {
      report.converged = true;
      report.termination = "step tolerance";
      break;
    }
    const double predicted = step.ok ? model_decrease(lin, step) : 0.0;
    // Only trusted for a nearly undamped step; heavy damping also shrinks it.
    if (step.ok && lambda <= 1e-3 && predicted >= 0.0 &&
        predicted <= cfg.cost_tolerance * cost) {
      report.converged = true;
      report.termination = "cost tolerance";
      break;
    }
    ++report.evaluations;
    bool accepted = false;
    if (step.ok) {
      apply_step(problem.states(), problem.points(), step, xs_new, ls_new);
      const FamilyCosts c_new = problem.cost(xs_new, ls_new);
      const double cost_new = c_new.total();
      if (std::isfinite(cost_new) && cost_new < cost) {
        accepted = true;
        const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : 1.0;
        lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        lambda = std::max(lambda, 1e-12);
        nu = 2.0;
        problem.states() = xs_new;
        problem.points() = ls_new;
        costs = problem.linearize(lin);
        cost = costs.total();
        ++report.iterations;
      }
    }
    if (!accepted) {
      lambda *= nu;
      nu *= 2.0;
      if (lambda > 1e16) {
        report.diverged = true;
        report.termination = "cost increase at maximum damping";
        break;
      }
    }
  }

  report.final_cost = cost;
  report.final_family_costs = costs;

  for (std::size_t i = 0; i < frames.size(); ++i) frames[i].state = problem.states()[i];
  const auto &ids = problem.ids();
  for (std::size_t l = 0; l < ids.size(); ++l)
    window.landmarks().at(ids[l]).position = problem.points()[l];
  return report;
}

}  // namespace rio
