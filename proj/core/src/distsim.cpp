#include "uwmmse/distsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uwmmse::distsim {

namespace {

constexpr std::size_t kScalarBytes = sizeof(double);

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// State held by transceiver pair i. It only ever sees row i (what receiver
// r(i) hears) and column i (what transmitter i emits) of the gain matrix.
struct NodeAgent {
  Eigen::Index id = 0;
  Vec row;
  Vec col;
  model::ModelParams theta;

  // Per-layer GCN hidden rows (1 x F) or REGNN shift values.
  Eigen::RowVectorXd za;
  Eigen::RowVectorXd zb;
  double shift_a = 0.0;
  double shift_b = 0.0;
  double acc_a = 0.0;
  double acc_b = 0.0;

  double a = 0.0;
  double b = 0.0;
  double u = 0.0;
  double w = 0.0;
  double v = 0.0;

  [[nodiscard]] double direct() const { return row(id); }
};

class Simulator {
 public:
  Simulator(const ChannelState& h, const Mat& q, const model::ModelParams& theta, const ProblemConfig& cfg)
      : probe_(h), q_(q), cfg_(cfg), kind_(cfg.update_utility()), m_(h.m()) {
    agents_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) {
      NodeAgent& agent = agents_[static_cast<std::size_t>(i)];
      agent.id = i;
      agent.theta = theta;
      agent.row.resize(m_);
      agent.col.resize(m_);
      for (Eigen::Index j = 0; j < m_; ++j) {
        agent.row(j) = probe_.read(i, i, j);
        agent.col(j) = probe_.read(i, j, i);
      }
      agent.v = std::sqrt(cfg.p_max);
    }
  }

  DistributedResult run() {
    const int depth = agents_.front().theta.depth();
    for (int k = 0; k < depth; ++k) {
      feature_phase(k);
      transmitter_phase(k);
      receiver_phase(k);
    }
    DistributedResult out;
    out.p.resize(m_);
    for (const auto& agent : agents_) out.p(agent.id) = agent.v * agent.v;
    out.log = std::move(log_);
    out.gain_reads = probe_.reads();
    out.locality_violations = probe_.violations();
    return out;
  }

 private:
  void broadcast(int layer, Phase phase, Eigen::Index sender, std::string kind, std::size_t scalars) {
    log_.records.push_back({layer, phase, static_cast<int>(sender), std::move(kind), scalars * kScalarBytes});
  }

  void feature_phase(int k) {
    const auto& shape = agents_.front().theta;
    if (shape.variant == model::PsiVariant::Gcn) {
      gcn_features(k);
    } else {
      regnn_features(k);
    }
  }

  void gcn_features(int k) {
    const auto lk = static_cast<std::size_t>(k);
    // Hidden rows need only the agent's own row (and the globally known Q).
    for (auto& agent : agents_) {
      const auto& ta = std::get<model::GcnParams>(agent.theta.layers[lk].theta_a);
      const auto& tb = std::get<model::GcnParams>(agent.theta.layers[lk].theta_b);
      const Eigen::RowVectorXd hq = agent.row.transpose() * q_;
      const Eigen::RowVectorXd dq = agent.direct() * q_.row(agent.id);
      agent.za = (dq * ta.w11 + hq * ta.w12).cwiseMax(0.0);
      agent.zb = (dq * tb.w11 + hq * tb.w12).cwiseMax(0.0);
      broadcast(k, Phase::Features, agent.id, "hidden_features", 2 * static_cast<std::size_t>(ta.w11.cols()));
    }
    // Every agent now holds all hidden rows.
    std::vector<double> za2(static_cast<std::size_t>(m_));
    std::vector<double> zb2(static_cast<std::size_t>(m_));
    std::vector<double> za1(static_cast<std::size_t>(m_));
    std::vector<double> zb1(static_cast<std::size_t>(m_));
    for (const auto& agent : agents_) {
      const auto& ta = std::get<model::GcnParams>(agent.theta.layers[lk].theta_a);
      const auto& tb = std::get<model::GcnParams>(agent.theta.layers[lk].theta_b);
      const auto j = static_cast<std::size_t>(agent.id);
      za1[j] = (agent.za * ta.w21)(0);
      za2[j] = (agent.za * ta.w22)(0);
      zb1[j] = (agent.zb * tb.w21)(0);
      zb2[j] = (agent.zb * tb.w22)(0);
    }
    for (auto& agent : agents_) {
      const auto i = static_cast<std::size_t>(agent.id);
      double agg_a = 0.0;
      double agg_b = 0.0;
      for (Eigen::Index j = 0; j < m_; ++j) {
        agg_a += agent.row(j) * za2[static_cast<std::size_t>(j)];
        agg_b += agent.row(j) * zb2[static_cast<std::size_t>(j)];
      }
      agent.a = sigmoid(agent.direct() * za1[i] + agg_a);
      agent.b = sigmoid(agent.direct() * zb1[i] + agg_b);
    }
  }

  void regnn_features(int k) {
    const auto lk = static_cast<std::size_t>(k);
    const auto& shape = agents_.front().theta;
    for (auto& agent : agents_) {
      agent.acc_a = q_(agent.id, 0);
      agent.acc_b = q_(agent.id, 0);
    }
    for (int l = 0; l < shape.regnn_layers; ++l) {
      const auto ll = static_cast<std::size_t>(l);
      for (auto& agent : agents_) {
        const auto& nu_a = std::get<model::RegnnParams>(agent.theta.layers[lk].theta_a).taps[ll];
        const auto& nu_b = std::get<model::RegnnParams>(agent.theta.layers[lk].theta_b).taps[ll];
        agent.shift_a = agent.acc_a;
        agent.shift_b = agent.acc_b;
        agent.acc_a = nu_a(0) * agent.shift_a;
        agent.acc_b = nu_b(0) * agent.shift_b;
      }
      for (int tap = 1; tap <= shape.regnn_taps; ++tap) {
        std::vector<double> sa(static_cast<std::size_t>(m_));
        std::vector<double> sb(static_cast<std::size_t>(m_));
        for (const auto& agent : agents_) {
          sa[static_cast<std::size_t>(agent.id)] = agent.shift_a;
          sb[static_cast<std::size_t>(agent.id)] = agent.shift_b;
          broadcast(k, Phase::Features, agent.id, "graph_shift", 2);
        }
        for (auto& agent : agents_) {
          double ya = 0.0;
          double yb = 0.0;
          for (Eigen::Index j = 0; j < m_; ++j) {
            ya += agent.row(j) * sa[static_cast<std::size_t>(j)];
            yb += agent.row(j) * sb[static_cast<std::size_t>(j)];
          }
          const auto& nu_a = std::get<model::RegnnParams>(agent.theta.layers[lk].theta_a).taps[ll];
          const auto& nu_b = std::get<model::RegnnParams>(agent.theta.layers[lk].theta_b).taps[ll];
          agent.shift_a = ya;
          agent.shift_b = yb;
          agent.acc_a += nu_a(tap) * ya;
          agent.acc_b += nu_b(tap) * yb;
        }
      }
      const bool last = l + 1 == shape.regnn_layers;
      for (auto& agent : agents_) {
        agent.acc_a = last ? sigmoid(agent.acc_a) : std::max(agent.acc_a, 0.0);
        agent.acc_b = last ? sigmoid(agent.acc_b) : std::max(agent.acc_b, 0.0);
      }
    }
    for (auto& agent : agents_) {
      agent.a = agent.acc_a;
      agent.b = agent.acc_b;
    }
  }

  void transmitter_phase(int k) {
    std::vector<double> v(static_cast<std::size_t>(m_));
    for (const auto& agent : agents_) {
      v[static_cast<std::size_t>(agent.id)] = agent.v;
      broadcast(k, Phase::Transmitter, agent.id, "v", 1);
    }
    const double noise = cfg_.noise_std * cfg_.noise_std;
    for (auto& agent : agents_) {
      double received = 0.0;
      double interference = 0.0;
      for (Eigen::Index j = 0; j < m_; ++j) {
        const double vj = v[static_cast<std::size_t>(j)];
        const double term = agent.row(j) * agent.row(j) * vj * vj;
        received += term;
        if (j != agent.id) interference += term;
      }
      agent.u = agent.direct() * agent.v / (noise + received);
      // 1 - u_i h_ii v_i without the cancellation at high SINR
      const double z = std::max((noise + interference) / (noise + received), kDivisionGuard);
      agent.w = kind_.gamma_prime(agent.id, z) * agent.a + agent.b;
    }
  }

  void receiver_phase(int k) {
    std::vector<double> uuw(static_cast<std::size_t>(m_));
    for (const auto& agent : agents_) {
      uuw[static_cast<std::size_t>(agent.id)] = agent.u * agent.u * agent.w;
      broadcast(k, Phase::Receiver, agent.id, "u_w", 2);
    }
    const double v_max = std::sqrt(cfg_.p_max);
    for (auto& agent : agents_) {
      double den = 0.0;
      for (Eigen::Index j = 0; j < m_; ++j) den += agent.col(j) * agent.col(j) * uuw[static_cast<std::size_t>(j)];
      const double raw = agent.u * agent.direct() * agent.w / std::max(den, kDivisionGuard);
      agent.v = std::clamp(raw, 0.0, v_max);
    }
  }

  GainProbe probe_;
  const Mat& q_;
  ProblemConfig cfg_;
  UtilityKind kind_;
  Eigen::Index m_;
  std::vector<NodeAgent> agents_;
  MessageLog log_;
};

}  // namespace

std::size_t MessageLog::total_bytes() const noexcept {
  std::size_t total = 0;
  for (const auto& r : records) total += r.bytes;
  return total;
}

double GainProbe::read(Eigen::Index agent, Eigen::Index i, Eigen::Index j) {
  ++reads_;
  if (i != agent && j != agent) {
    ++violations_;
    throw LocalityViolation("agent " + std::to_string(agent) + " read gain (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") outside its row and column");
  }
  return h_->gain(i, j);
}

MessageCount message_count(std::size_t m, std::size_t depth) {
  if (m < 1 || depth < 1) throw InvalidArgument("message_count: m and K must be >= 1");
  return {3 * m * depth, 3 * m * (m - 1) * depth};
}

MessageCount message_count(std::size_t m, const model::ModelParams& theta) {
  if (m < 1 || theta.depth() < 1) throw InvalidArgument("message_count: m and K must be >= 1");
  const auto depth = static_cast<std::size_t>(theta.depth());
  const std::size_t feature_rounds =
      theta.variant == model::PsiVariant::Gcn
          ? 1
          : static_cast<std::size_t>(theta.regnn_layers) * static_cast<std::size_t>(theta.regnn_taps);
  const std::size_t per_node = (feature_rounds + 2) * depth;
  return {per_node * m, per_node * m * (m - 1)};
}

DistributedResult run_distributed(const ChannelState& h, const Mat& q, const model::ModelParams& theta,
                                  const ProblemConfig& cfg) {
  cfg.validate();
  cfg.update_utility().require_solver_support(h.m());
  if (theta.depth() < 1) throw InvalidArgument("model has no layers");
  if (q.rows() != h.m()) throw ShapeError("node features must have one row per node");
  Simulator sim(h, q, theta, cfg);
  return sim.run();
}

}  // namespace uwmmse::distsim
