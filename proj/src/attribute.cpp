#include "gazenet/attribute.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gazenet/stats.hpp"

namespace gazenet {

double Attribution::total() const {
  return std::accumulate(neg.begin(), neg.end(), 0.0) + std::accumulate(pos.begin(), pos.end(), 0.0);
}

Attribution integrated_gradients(const nnet::Network<double>& net, const double* neg, const double* pos,
                                 std::size_t rows, std::size_t steps) {
  if (steps == 0) throw ConfigError("integrated gradients needs at least one step");
  const std::size_t n = 2 * rows * net.config().length;
  nnet::Workspace<double> ws;
  std::vector<double> xn(n), xp(n), gn(n), gp(n);
  std::vector<double> sum_n(n, 0.0), sum_p(n, 0.0);
  Attribution out;
  for (std::size_t k = 0; k < steps; ++k) {
    const double alpha = (static_cast<double>(k) + 0.5) / static_cast<double>(steps);
    for (std::size_t i = 0; i < n; ++i) {
      xn[i] = alpha * neg[i];
      xp[i] = alpha * pos[i];
    }
    const double p = net.forward(xn.data(), xp.data(), rows, ws);
    net.backward(ws, p * (1.0 - p), {}, gn.data(), gp.data());
    for (std::size_t i = 0; i < n; ++i) {
      sum_n[i] += gn[i];
      sum_p[i] += gp[i];
    }
  }
  out.neg.resize(n);
  out.pos.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.neg[i] = neg[i] * sum_n[i] / static_cast<double>(steps);
    out.pos[i] = pos[i] * sum_p[i] / static_cast<double>(steps);
    if (!std::isfinite(out.neg[i]) || !std::isfinite(out.pos[i])) {
      throw ModelFault("integrated gradients: non-finite attribution");
    }
  }
  out.prob = net.forward(neg, pos, rows, ws);
  std::fill(xn.begin(), xn.end(), 0.0);
  out.baseline_prob = net.forward(xn.data(), xn.data(), rows, ws);
  return out;
}

std::array<std::vector<double>, 4> trial_mean_series(const Attribution& a, std::size_t rows, std::size_t length) {
  std::array<std::vector<double>, 4> out;
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& src = c < 2 ? a.neg : a.pos;
    const double* base = src.data() + (c % 2) * rows * length;
    out[c].assign(length, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t t = 0; t < length; ++t) out[c][t] += base[r * length + t];
    }
    for (auto& v : out[c]) v /= static_cast<double>(rows);
  }
  return out;
}

SubjectAttribution attribute_subject(const nnet::Network<double>& net, const SampleSource& data,
                                     std::size_t participant, const Participant& who, std::size_t steps,
                                     std::size_t max_samples) {
  const std::size_t rows = data.set_size(), T = data.length();
  SubjectAttribution out;
  out.participant_id = who.id;
  out.group = who.group;
  for (auto& s : out.series) s.assign(T, 0.0);
  std::size_t n = data.sets_of(participant);
  if (max_samples > 0) n = std::min(n, max_samples);
  const std::size_t half = 2 * rows * T;
  std::vector<float> nf(half), pf(half);
  std::vector<double> nd(half), pd(half);
  for (std::size_t i = 0; i < n; ++i) {
    data.fill(participant, i, nf.data(), pf.data());
    std::copy(nf.begin(), nf.end(), nd.begin());
    std::copy(pf.begin(), pf.end(), pd.begin());
    const auto series = trial_mean_series(integrated_gradients(net, nd.data(), pd.data(), rows, steps), rows, T);
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t t = 0; t < T; ++t) out.series[c][t] += series[c][t];
    }
  }
  if (n > 0) {
    for (auto& s : out.series) {
      for (auto& v : s) v /= static_cast<double>(n);
    }
  }
  out.n_samples = n;
  return out;
}

std::vector<AttributionMap> aggregate_attributions(const std::vector<SubjectAttribution>& subjects) {
  std::vector<AttributionMap> out;
  for (Group g : kGroups) {
    std::vector<const SubjectAttribution*> members;
    for (const auto& s : subjects) {
      if (s.group == g && s.n_samples > 0) members.push_back(&s);
    }
    if (members.empty()) continue;
    const std::size_t T = members.front()->series[0].size();
    for (std::size_t c = 0; c < 4; ++c) {
      AttributionMap m;
      m.group = g;
      m.condition = c < 2 ? Sentiment::Negative : Sentiment::PositiveNeutral;
      m.direction = c % 2 == 0 ? Direction::X : Direction::Y;
      m.values.assign(T, 0.0);
      m.se.assign(T, 0.0);
      m.n_subjects = members.size();
      for (const auto* s : members) {
        if (s->series[c].size() != T) throw MetricError("attribution series lengths differ");
        m.n_samples += s->n_samples;
        for (std::size_t t = 0; t < T; ++t) m.values[t] += s->series[c][t] / static_cast<double>(members.size());
      }
      if (members.size() > 1) {
        const double k = static_cast<double>(members.size());
        for (std::size_t t = 0; t < T; ++t) {
          double ss = 0.0;
          for (const auto* s : members) ss += (s->series[c][t] - m.values[t]) * (s->series[c][t] - m.values[t]);
          m.se[t] = std::sqrt(ss / (k - 1.0) / k);
        }
      }
      out.push_back(std::move(m));
    }
  }
  if (out.empty()) throw MetricError("no subject attributions to aggregate");
  return out;
}

std::string attribution_csv(const std::vector<AttributionMap>& maps) {
  std::string out = "group,condition,direction,t,value,se,n_subjects,n_samples\n";
  for (const auto& m : maps) {
    const std::string prefix = std::string(to_string(m.group)) + "," + std::string(to_string(m.condition)) + "," +
                               std::string(to_string(m.direction)) + ",";
    for (std::size_t t = 0; t < m.values.size(); ++t) {
      out += prefix + std::to_string(t) + "," + format_double(m.values[t]) + "," + format_double(m.se[t]) + "," +
             std::to_string(m.n_subjects) + "," + std::to_string(m.n_samples) + "\n";
    }
  }
  return out;
}

std::array<std::vector<double>, 4> fc_weight_readout(const nnet::Network<float>& net) {
  const auto& cfg = net.config();
  const std::size_t T = cfg.length, nf = cfg.features();
  const float* w = net.params().data() + net.layout().fc1_w;
  std::vector<double> mean_abs(nf, 0.0);
  for (std::size_t j = 0; j < cfg.hidden; ++j) {
    for (std::size_t i = 0; i < nf; ++i) mean_abs[i] += std::fabs(static_cast<double>(w[j * nf + i]));
  }
  std::array<std::vector<double>, 4> out;
  for (std::size_t c = 0; c < 4; ++c) {
    out[c].resize(T);
    for (std::size_t t = 0; t < T; ++t) out[c][t] = mean_abs[c * T + t] / static_cast<double>(cfg.hidden);
  }
  return out;
}

std::string readout_csv(const std::array<std::vector<double>, 4>& series) {
  std::string out = "t,neg_x,neg_y,pos_x,pos_y\n";
  for (std::size_t t = 0; t < series[0].size(); ++t) {
    out += std::to_string(t);
    for (const auto& s : series) out += "," + format_double(s[t]);
    out += "\n";
  }
  return out;
}

std::vector<DensityMap> fixation_density(const Cohort& cohort, const std::vector<CleanRecording>& cleans,
                                         const DensityConfig& cfg) {
  if (cfg.nx == 0 || cfg.ny == 0) throw ConfigError("density grid needs at least one bin per axis");
  if (!(cfg.window_ms > 0.0)) throw ConfigError("density window must be positive");
  if (!(cfg.zoom >= 1.0)) throw ConfigError("density zoom must be >= 1");
  const double half = 1.0 / cfg.zoom;
  const std::size_t cells = cfg.nx * cfg.ny;

  // Sorted by id so the floating-point sums do not depend on roster order.
  std::vector<const ParticipantData*> order;
  for (const auto& p : cohort.participants) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->info.id < b->info.id; });

  std::vector<DensityMap> out;
  for (Group g : kGroups) {
    DensityMap m;
    m.group = g;
    m.nx = cfg.nx;
    m.ny = cfg.ny;
    m.values.assign(cells, 0.0);
    for (const auto* p : order) {
      if (p->info.group != g) continue;
      const CleanRecording* rec = nullptr;
      for (const auto& c : cleans) {
        if (c.participant_id == p->info.id) rec = &c;
      }
      if (!rec) throw DependencyError("no clean recording for " + p->info.id);
      std::vector<double> hist(cells, 0.0);
      double count = 0.0;
      for (const auto& t : p->trials) {
        if (t.excluded || !t.response_time_ms || t.sentiment != cfg.condition) continue;
        const double end = *t.response_time_ms;
        auto i = std::lower_bound(rec->t_ms.begin(), rec->t_ms.end(), end - cfg.window_ms) - rec->t_ms.begin();
        const auto hi = std::lower_bound(rec->t_ms.begin(), rec->t_ms.end(), end) - rec->t_ms.begin();
        for (; i < hi; ++i) {
          const double x = rec->x[static_cast<std::size_t>(i)], y = rec->y[static_cast<std::size_t>(i)];
          if (x < -half || x > half || y < -half || y > half) continue;
          const auto ix = std::min(cfg.nx - 1, static_cast<std::size_t>((x + half) / (2.0 * half) * cfg.nx));
          const auto iy = std::min(cfg.ny - 1, static_cast<std::size_t>((y + half) / (2.0 * half) * cfg.ny));
          hist[iy * cfg.nx + ix] += 1.0;
          count += 1.0;
        }
      }
      if (count == 0.0) continue;
      for (std::size_t c = 0; c < cells; ++c) m.values[c] += hist[c] / count;
      ++m.n_subjects;
    }
    if (m.n_subjects == 0) continue;
    const double total = std::accumulate(m.values.begin(), m.values.end(), 0.0);
    for (auto& v : m.values) v /= total;
    out.push_back(std::move(m));
  }
  return out;
}

std::string density_csv(const DensityMap& map) {
  std::string out;
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      if (ix) out += ",";
      out += format_double(map.at(ix, iy));
    }
    out += "\n";
  }
  return out;
}

}  // namespace gazenet
