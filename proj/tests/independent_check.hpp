// Copyright 2026 The OptiLoop Authors
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

// A second, straight-line evaluator of the model constraints, written
// against dense arrays. Used to cross-check validate_configuration().

#ifndef OPTILOOP_TESTS_INDEPENDENT_CHECK_HPP
#define OPTILOOP_TESTS_INDEPENDENT_CHECK_HPP

#include <cmath>
#include <map>
#include <vector>

#include "optiloop/model.hpp"

namespace check {

using optiloop::Index;

// Number of violated rows per equation number (1..9).
inline std::map<int, int> violations(const optiloop::Scenario& s,
                                     const optiloop::NetworkConfiguration& cfg,
                                     double tol) {
  const std::size_t C = s.num_nodes(), E = s.num_endpoints(),
                    V = s.num_vnfs(), L = s.num_links();
  double S = 0.0;
  for (const auto& [k, r] : s.logical.ingress_demand) S = std::max(S, r);
  if (S <= 0.0) S = 1.0;
  auto at = [&](Index a, Index e, Index v1, Index v2) {
    return ((a * E + e) * V + v1) * V + v2;
  };
  std::vector<double> tau(L * E * V * V, 0.0), t(C * E * V * V, 0.0),
      p(C * E * V * V, 0.0);
  for (const auto& [k, v] : cfg.tau) tau[at(k.element, k.endpoint, k.prev, k.next)] += v;
  for (const auto& [k, v] : cfg.transit) t[at(k.element, k.endpoint, k.prev, k.next)] += v;
  for (const auto& [k, v] : cfg.processed) p[at(k.element, k.endpoint, k.prev, k.next)] += v;

  auto chi = [&](Index e, Index v0, Index v1, Index v2) {
    optiloop::ChiKey key = v0 == v1 ? optiloop::ChiKey{true, e, v1, v2}
                                    : optiloop::ChiKey{false, v0, v1, v2};
    auto it = s.logical.chi.find(key);
    return it == s.logical.chi.end() ? 0.0 : it->second;
  };

  std::map<int, int> out;
  for (Index c = 0; c < C; ++c) {
    for (Index e = 0; e < E; ++e) {
      for (Index a = 0; a < V; ++a) {
        for (Index b = 0; b < V; ++b) {
          double in = 0.0, outgoing = 0.0;
          for (Index l = 0; l < L; ++l) {
            const auto& link = s.physical.links[l];
            if (link.to.is_node() && link.to.index == c) in += tau[at(l, e, a, b)];
            if (link.from.is_node() && link.from.index == c)
              outgoing += tau[at(l, e, a, b)];
          }
          if (std::abs(in - t[at(c, e, a, b)] - p[at(c, e, a, b)]) > tol * S)
            ++out[1];
          double made = 0.0;
          for (Index z = 0; z < V; ++z) made += p[at(c, e, z, a)] * chi(e, z, a, b);
          if (std::abs(outgoing - t[at(c, e, a, b)] - made) > tol * S) ++out[2];
          const double cap =
              cfg.delta[c * V + b] ? s.physical.nodes[c].compute_capacity : 0.0;
          if (p[at(c, e, a, b)] - cap > tol * S) ++out[6];
        }
      }
    }
  }
  for (Index l = 0; l < L; ++l) {
    const auto& link = s.physical.links[l];
    if (link.from.is_node() && cfg.x[l] && !cfg.y[link.from.index]) ++out[3];
    if (link.to.is_node() && cfg.x[l] && !cfg.y[link.to.index]) ++out[3];
    double sum = 0.0;
    for (Index i = 0; i < E * V * V; ++i) sum += tau[l * E * V * V + i];
    if (sum - (cfg.x[l] ? link.capacity : 0.0) > tol * S) ++out[4];
  }
  for (Index c = 0; c < C; ++c) {
    for (Index v = 0; v < V; ++v)
      if (cfg.delta[c * V + v] && !cfg.y[c]) ++out[5];
    double load = 0.0;
    for (Index e = 0; e < E; ++e)
      for (Index a = 0; a < V; ++a)
        for (Index b = 0; b < V; ++b) {
          load += s.logical.vnfs[b].compute_per_bit * p[at(c, e, a, b)];
          for (Index l = 0; l < L; ++l) {
            const auto& link = s.physical.links[l];
            if (link.from.is_node() && link.from.index == c)
              load += s.physical.nodes[c].switch_compute_per_bit * tau[at(l, e, a, b)];
          }
        }
    if (load - s.physical.nodes[c].compute_capacity > tol * S) ++out[7];
  }
  if (s.delays_enabled) {
    for (Index e = 0; e < E; ++e) {
      if (!s.max_delay[e]) continue;
      double demand = 0.0;
      for (Index v = 0; v < V; ++v) demand += s.logical.demand(e, v);
      if (demand <= 0.0) continue;
      double d = 0.0;
      for (Index a = 0; a < V; ++a)
        for (Index b = 0; b < V; ++b) {
          for (Index l = 0; l < L; ++l)
            d += s.physical.links[l].delay * tau[at(l, e, a, b)];
          for (Index c = 0; c < C; ++c)
            d += s.logical.vnfs[b].delay * p[at(c, e, a, b)];
        }
      if (d - *s.max_delay[e] * demand > tol * S) ++out[8];
    }
  }
  for (Index e = 0; e < E; ++e) {
    for (Index v = 0; v < V; ++v) {
      const double want = s.logical.demand(e, v);
      if (want <= 0.0) continue;
      double got = 0.0;
      for (Index l = 0; l < L; ++l) {
        const auto& link = s.physical.links[l];
        if (link.from.is_endpoint() && link.from.index == e) got += tau[at(l, e, v, v)];
      }
      if (std::abs(got - want) > tol * S) ++out[9];
    }
  }
  return out;
}

}  // namespace check

#endif  // OPTILOOP_TESTS_INDEPENDENT_CHECK_HPP
