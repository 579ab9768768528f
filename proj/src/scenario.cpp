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

#include "optiloop/scenario.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "optiloop/errors.hpp"
#include "optiloop/optiloop.hpp"

namespace optiloop {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void semantic_error(const std::string& where,
                                 const std::string& what) {
  throw ParseError(where + ": " + what, 0, 0);
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    const std::size_t offset =
        std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
}

void check_keys(const Json& j, const std::string& where,
                std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required = {}) {
  if (!j.is_object()) semantic_error(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) semantic_error(where, "unknown key \"" + key + "\"");
  }
  for (const char* r : required)
    if (!j.contains(r))
      semantic_error(where, std::string("missing key \"") + r + "\"");
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) semantic_error(where, "expected a number");
  return j.get<double>();
}

double number_or(const Json& j, const char* key, double fallback,
                 const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) semantic_error(where, "expected a string");
  return j.get<std::string>();
}

const Json& array(const Json& j, const char* key) {
  if (!j.contains(key)) semantic_error(key, "missing");
  const Json& a = j.at(key);
  if (!a.is_array()) semantic_error(key, "expected an array");
  return a;
}

Index lookup(const std::map<std::string, Index>& m, const std::string& name,
             const std::string& where, const char* kind) {
  auto it = m.find(name);
  if (it == m.end())
    semantic_error(where, std::string("unknown ") + kind + " \"" + name + "\"");
  return it->second;
}

}  // namespace

Scenario parse_scenario(const std::string& text_in) {
  const Json j = parse_json(text_in);
  check_keys(j, "scenario",
             {"endpoints", "vnfs", "chi", "demand", "nodes", "links", "energy",
              "max_delay", "delays_enabled", "generator"},
             {"endpoints", "vnfs", "nodes", "links"});
  Scenario s;
  LogicalGraph& lg = s.logical;

  for (const Json& e : array(j, "endpoints")) lg.endpoints.push_back(text(e, "endpoints"));
  const Json& vnfs = array(j, "vnfs");
  for (std::size_t i = 0; i < vnfs.size(); ++i) {
    const std::string where = "vnfs[" + std::to_string(i) + "]";
    check_keys(vnfs[i], where, {"name", "compute_per_bit", "delay"}, {"name"});
    lg.vnfs.push_back({text(vnfs[i].at("name"), where + ".name"),
                       number_or(vnfs[i], "compute_per_bit", 1.0, where),
                       number_or(vnfs[i], "delay", 0.0, where)});
  }
  std::map<std::string, Index> endpoint_ix, vnf_ix, node_ix;
  for (Index i = 0; i < lg.endpoints.size(); ++i) endpoint_ix.emplace(lg.endpoints[i], i);
  for (Index i = 0; i < lg.vnfs.size(); ++i) vnf_ix.emplace(lg.vnfs[i].name, i);

  if (j.contains("chi")) {
    const Json& chi = array(j, "chi");
    for (std::size_t i = 0; i < chi.size(); ++i) {
      const std::string where = "chi[" + std::to_string(i) + "]";
      check_keys(chi[i], where, {"prev", "at", "next", "ratio"},
                 {"prev", "at", "next", "ratio"});
      const std::string prev = text(chi[i].at("prev"), where + ".prev");
      ChiKey key;
      const bool is_endpoint = endpoint_ix.count(prev) != 0;
      const bool is_vnf = vnf_ix.count(prev) != 0;
      if (is_endpoint && is_vnf)
        semantic_error(where, "\"" + prev + "\" names both an endpoint and a VNF");
      key.prev_is_endpoint = is_endpoint;
      key.prev = is_endpoint ? endpoint_ix.at(prev)
                             : lookup(vnf_ix, prev, where + ".prev", "vertex");
      key.at = lookup(vnf_ix, text(chi[i].at("at"), where + ".at"), where + ".at", "VNF");
      key.next = lookup(vnf_ix, text(chi[i].at("next"), where + ".next"), where + ".next", "VNF");
      lg.chi[key] = number(chi[i].at("ratio"), where + ".ratio");
    }
  }
  if (j.contains("demand")) {
    const Json& demand = array(j, "demand");
    for (std::size_t i = 0; i < demand.size(); ++i) {
      const std::string where = "demand[" + std::to_string(i) + "]";
      check_keys(demand[i], where, {"endpoint", "vnf", "rate"},
                 {"endpoint", "vnf", "rate"});
      const Index e = lookup(endpoint_ix, text(demand[i].at("endpoint"), where),
                             where + ".endpoint", "endpoint");
      const Index v = lookup(vnf_ix, text(demand[i].at("vnf"), where),
                             where + ".vnf", "VNF");
      lg.ingress_demand[{e, v}] = number(demand[i].at("rate"), where + ".rate");
    }
  }

  const Json& nodes = array(j, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    check_keys(nodes[i], where, {"name", "k", "rho"}, {"name"});
    s.physical.nodes.push_back({text(nodes[i].at("name"), where + ".name"),
                                number_or(nodes[i], "k", 0.0, where),
                                number_or(nodes[i], "rho", 0.0, where)});
    node_ix.emplace(s.physical.nodes.back().name, i);
  }
  auto vertex = [&](const Json& v, const std::string& where) {
    const std::string name = text(v, where);
    if (endpoint_ix.count(name)) return Vertex::endpoint(endpoint_ix.at(name));
    return Vertex::node(lookup(node_ix, name, where, "vertex"));
  };
  const Json& links = array(j, "links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string where = "links[" + std::to_string(i) + "]";
    check_keys(links[i], where, {"from", "to", "capacity", "delay"},
               {"from", "to", "capacity"});
    s.physical.links.push_back({vertex(links[i].at("from"), where + ".from"),
                                vertex(links[i].at("to"), where + ".to"),
                                number(links[i].at("capacity"), where + ".capacity"),
                                number_or(links[i], "delay", 0.0, where)});
  }

  if (j.contains("energy")) {
    const Json& en = j.at("energy");
    check_keys(en, "energy",
               {"idle_power", "placement_power", "proc_power_per_unit",
                "switch_energy_per_bit", "link_energy_per_bit"});
    s.energy = {number_or(en, "idle_power", 0.0, "energy"),
                number_or(en, "placement_power", 0.0, "energy"),
                number_or(en, "proc_power_per_unit", 0.0, "energy"),
                number_or(en, "switch_energy_per_bit", 0.0, "energy"),
                number_or(en, "link_energy_per_bit", 0.0, "energy")};
  }
  s.max_delay.assign(lg.endpoints.size(), std::nullopt);
  if (j.contains("max_delay")) {
    const Json& md = j.at("max_delay");
    if (!md.is_object()) semantic_error("max_delay", "expected an object");
    for (const auto& [name, value] : md.items()) {
      const Index e = lookup(endpoint_ix, name, "max_delay", "endpoint");
      if (!value.is_null()) s.max_delay[e] = number(value, "max_delay." + name);
    }
  }
  if (j.contains("delays_enabled")) {
    if (!j.at("delays_enabled").is_boolean())
      semantic_error("delays_enabled", "expected true or false");
    s.delays_enabled = j.at("delays_enabled").get<bool>();
  }
  if (j.contains("generator")) {
    const Json& g = j.at("generator");
    if (!g.is_object()) semantic_error("generator", "expected an object");
    for (const auto& [name, value] : g.items())
      s.generator.emplace_back(name, number(value, "generator." + name));
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path, 0, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  const LogicalGraph& lg = s.logical;
  Json j;
  j["endpoints"] = lg.endpoints;
  j["vnfs"] = Json::array();
  for (const Vnf& v : lg.vnfs)
    j["vnfs"].push_back(
        {{"name", v.name}, {"compute_per_bit", v.compute_per_bit}, {"delay", v.delay}});
  j["chi"] = Json::array();
  for (const auto& [k, ratio] : lg.chi)
    j["chi"].push_back({{"prev", k.prev_is_endpoint ? lg.endpoints[k.prev]
                                                    : lg.vnfs[k.prev].name},
                        {"at", lg.vnfs[k.at].name},
                        {"next", lg.vnfs[k.next].name},
                        {"ratio", ratio}});
  j["demand"] = Json::array();
  for (const auto& [k, rate] : lg.ingress_demand)
    j["demand"].push_back({{"endpoint", lg.endpoints[k.first]},
                           {"vnf", lg.vnfs[k.second].name},
                           {"rate", rate}});
  j["nodes"] = Json::array();
  for (const Node& n : s.physical.nodes)
    j["nodes"].push_back(
        {{"name", n.name}, {"k", n.compute_capacity}, {"rho", n.switch_compute_per_bit}});
  j["links"] = Json::array();
  for (const Link& l : s.physical.links)
    j["links"].push_back({{"from", s.vertex_name(l.from)},
                          {"to", s.vertex_name(l.to)},
                          {"capacity", l.capacity},
                          {"delay", l.delay}});
  j["energy"] = {{"idle_power", s.energy.idle_power},
                 {"placement_power", s.energy.placement_power},
                 {"proc_power_per_unit", s.energy.proc_power_per_unit},
                 {"switch_energy_per_bit", s.energy.switch_energy_per_bit},
                 {"link_energy_per_bit", s.energy.link_energy_per_bit}};
  j["max_delay"] = Json::object();
  for (Index e = 0; e < lg.endpoints.size(); ++e) {
    const auto& d = e < s.max_delay.size() ? s.max_delay[e] : std::nullopt;
    j["max_delay"][lg.endpoints[e]] = d ? Json(*d) : Json(nullptr);
  }
  j["delays_enabled"] = s.delays_enabled;
  if (!s.generator.empty()) {
    j["generator"] = Json::object();
    for (const auto& [name, value] : s.generator) j["generator"][name] = value;
  }
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << scenario_to_json(s);
}

std::string result_to_json(const Scenario& s, const StrategyResult& r) {
  const NetworkConfiguration& cfg = r.configuration;
  const LogicalGraph& lg = s.logical;
  Json j;
  j["strategy"] = r.name;
  j["exact"] = r.exact;
  j["energy"] = {{"total", r.energy.total()},
                 {"idle", r.energy.idle},
                 {"placement", r.energy.placement},
                 {"processing", r.energy.processing},
                 {"switching", r.energy.switching},
                 {"link", r.energy.link}};
  j["active_links"] = Json::array();
  for (Index l = 0; l < s.num_links(); ++l)
    if (cfg.x[l]) j["active_links"].push_back(s.link_name(l));
  j["active_nodes"] = Json::array();
  for (Index c = 0; c < s.num_nodes(); ++c)
    if (cfg.y[c]) j["active_nodes"].push_back(s.physical.nodes[c].name);
  j["placements"] = Json::array();
  for (Index c = 0; c < s.num_nodes(); ++c)
    for (Index v = 0; v < s.num_vnfs(); ++v)
      if (cfg.placed(c, v, s.num_vnfs()))
        j["placements"].push_back(
            {{"node", s.physical.nodes[c].name}, {"vnf", lg.vnfs[v].name}});
  auto flows = [&](const FlowMap& m, const char* element, bool link) {
    Json a = Json::array();
    for (const auto& [k, v] : m)
      a.push_back({{element, link ? s.link_name(k.element)
                                  : s.physical.nodes[k.element].name},
                   {"endpoint", lg.endpoints[k.endpoint]},
                   {"prev", lg.vnfs[k.prev].name},
                   {"next", lg.vnfs[k.next].name},
                   {"rate", v}});
    return a;
  };
  j["tau"] = flows(cfg.tau, "link", true);
  j["transit"] = flows(cfg.transit, "node", false);
  j["processed"] = flows(cfg.processed, "node", false);
  return j.dump(2) + "\n";
}

StrategyResult parse_result(const Scenario& s, const std::string& text_in) {
  const Json j = parse_json(text_in);
  check_keys(j, "result",
             {"strategy", "exact", "energy", "active_links", "active_nodes",
              "placements", "tau", "transit", "processed"},
             {"strategy", "active_links", "active_nodes", "placements"});
  const LogicalGraph& lg = s.logical;
  std::map<std::string, Index> link_ix, node_ix, endpoint_ix, vnf_ix;
  for (Index l = 0; l < s.num_links(); ++l) link_ix.emplace(s.link_name(l), l);
  for (Index c = 0; c < s.num_nodes(); ++c) node_ix.emplace(s.physical.nodes[c].name, c);
  for (Index e = 0; e < lg.endpoints.size(); ++e) endpoint_ix.emplace(lg.endpoints[e], e);
  for (Index v = 0; v < lg.vnfs.size(); ++v) vnf_ix.emplace(lg.vnfs[v].name, v);

  StrategyResult r;
  r.name = text(j.at("strategy"), "strategy");
  if (j.contains("exact")) r.exact = j.at("exact").get<bool>();
  NetworkConfiguration& cfg = r.configuration;
  cfg = NetworkConfiguration::all_off(s);
  for (const Json& l : j.at("active_links"))
    cfg.x[lookup(link_ix, text(l, "active_links"), "active_links", "link")] = 1;
  for (const Json& c : j.at("active_nodes"))
    cfg.y[lookup(node_ix, text(c, "active_nodes"), "active_nodes", "node")] = 1;
  for (const Json& p : j.at("placements")) {
    check_keys(p, "placements", {"node", "vnf"}, {"node", "vnf"});
    cfg.set_placed(lookup(node_ix, text(p.at("node"), "placements"), "placements", "node"),
                   lookup(vnf_ix, text(p.at("vnf"), "placements"), "placements", "VNF"),
                   s.num_vnfs(), true);
  }
  auto read_flows = [&](const char* key, const char* element, bool link,
                        FlowMap& out) {
    if (!j.contains(key)) return;
    for (const Json& f : j.at(key)) {
      check_keys(f, key, {element, "endpoint", "prev", "next", "rate"},
                 {element, "endpoint", "prev", "next", "rate"});
      const std::string el = text(f.at(element), key);
      const FlowKey k{link ? lookup(link_ix, el, key, "link")
                           : lookup(node_ix, el, key, "node"),
                      lookup(endpoint_ix, text(f.at("endpoint"), key), key, "endpoint"),
                      lookup(vnf_ix, text(f.at("prev"), key), key, "VNF"),
                      lookup(vnf_ix, text(f.at("next"), key), key, "VNF")};
      out[k] = number(f.at("rate"), key);
    }
  };
  read_flows("tau", "link", true, cfg.tau);
  read_flows("transit", "node", false, cfg.transit);
  read_flows("processed", "node", false, cfg.processed);
  r.energy = energy_of(s, cfg);
  return r;
}

// ---------------------------------------------------------------------------

void attach_vepc(LogicalGraph& lg, ChiPreset preset) {
  const Index base = lg.vnfs.size();
  lg.vnfs.push_back({"eNB", 1.0, 0.0});
  lg.vnfs.push_back({"P/S-GW", 1.0, 0.0});
  lg.vnfs.push_back({"MME", 1.0, 0.0});
  lg.vnfs.push_back({"HSS", 1.0, 0.0});
  const Index enb = base, gw = base + 1, mme = base + 2, hss = base + 3;
  const double gw_to_mme = preset == ChiPreset::kStandard ? 0.32 : 0.2;
  for (Index e = 0; e < lg.endpoints.size(); ++e) {
    lg.chi[{true, e, enb, gw}] = 1.0;
    lg.chi[{true, e, enb, mme}] = 0.3;
  }
  lg.chi[{false, enb, gw, mme}] = gw_to_mme;
  lg.chi[{false, enb, mme, hss}] = 1.0;
  lg.chi[{false, gw, mme, hss}] = 1.0;
}

namespace {

bool core_connected(const Scenario& s) {
  const std::size_t n = s.num_nodes();
  if (n == 0) return false;
  const Adjacency adj = adjacency(s);
  // Strong connectivity: every node reachable from node 0 both ways.
  for (bool forward : {true, false}) {
    std::vector<bool> seen(n, false);
    std::deque<Index> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      const Index c = queue.front();
      queue.pop_front();
      for (Index l : forward ? adj.node_out[c] : adj.node_in[c]) {
        const Link& link = s.physical.links[l];
        const Vertex& other = forward ? link.to : link.from;
        if (other.is_node() && !seen[other.index]) {
          seen[other.index] = true;
          queue.push_back(other.index);
        }
      }
    }
    if (std::count(seen.begin(), seen.end(), true) != static_cast<long>(n))
      return false;
  }
  return true;
}

// Cheap necessary condition used when the instance is too large for the
// all-active LP: compute for processing and at least one switching hop,
// and attachment capacity per endpoint.
bool aggregate_feasible(const Scenario& s) {
  double work = 0.0, traffic = 0.0;
  for (const auto& [k, rate] : s.logical.ingress_demand) {
    work += rate * s.logical.vnfs[k.second].compute_per_bit;
    traffic += rate;
  }
  for (const auto& [cls, rate] : derive_logical_flows(s.logical)) {
    work += rate * s.logical.vnfs[cls.next].compute_per_bit;
    traffic += rate;
  }
  double compute = 0.0, rho = 0.0;
  for (const Node& n : s.physical.nodes) {
    compute += n.compute_capacity;
    rho = std::max(rho, n.switch_compute_per_bit);
  }
  if (work + rho * traffic > compute) return false;
  const Adjacency adj = adjacency(s);
  for (Index e = 0; e < s.num_endpoints(); ++e) {
    double demand = 0.0, cap = 0.0;
    for (Index v = 0; v < s.num_vnfs(); ++v) demand += s.logical.demand(e, v);
    for (Index l : adj.endpoint_out[e]) cap += s.physical.links[l].capacity;
    if (demand > cap) return false;
  }
  return true;
}

bool small_enough_for_lp(const Scenario& s) {
  const double commodities = 6.0 * s.num_endpoints();
  const double cols = commodities * (s.num_links() + 2.0 * s.num_nodes());
  const double rows = commodities * 3.0 * s.num_nodes() + s.num_links();
  return cols * rows <= 4e6;
}

}  // namespace

Scenario generate(const GeneratorParams& p) {
  if (p.n_nodes == 0 || p.n_endpoints == 0 || p.attachments_per_endpoint == 0 ||
      p.attachments_per_endpoint > p.n_nodes || p.demand_min <= 0.0 ||
      p.demand_max < p.demand_min || p.downlink_fraction < 0.0 ||
      p.downlink_fraction > 1.0 || p.endpoint_link_capacity <= 0.0 ||
      p.core_link_capacity <= 0.0 || p.node_processing_capacity <= 0.0 ||
      p.full_switching_rate <= 0.0)
    throw GenerationFailed("invalid generator parameters");

  std::mt19937_64 rng(p.rng_seed);
  for (std::size_t attempt = 0; attempt <= p.max_retries; ++attempt) {
    Scenario s;
    const double rho = p.node_processing_capacity / p.full_switching_rate;
    for (std::size_t c = 0; c < p.n_nodes; ++c)
      s.physical.nodes.push_back(
          {"n" + std::to_string(c + 1), p.node_processing_capacity, rho});

    // Core: bidirectional ring plus random chords.
    std::set<std::pair<Index, Index>> pairs;
    auto add_pair = [&](Index a, Index b) {
      if (a == b || pairs.count({std::min(a, b), std::max(a, b)})) return false;
      pairs.insert({std::min(a, b), std::max(a, b)});
      s.physical.links.push_back(
          {Vertex::node(a), Vertex::node(b), p.core_link_capacity, 0.0});
      s.physical.links.push_back(
          {Vertex::node(b), Vertex::node(a), p.core_link_capacity, 0.0});
      return true;
    };
    for (Index c = 0; c + 1 < p.n_nodes; ++c) add_pair(c, c + 1);
    if (p.n_nodes > 2) add_pair(p.n_nodes - 1, 0);
    const std::size_t chords = p.chords ? p.chords : p.n_nodes / 2;
    const std::size_t max_pairs = p.n_nodes * (p.n_nodes - 1) / 2;
    std::uniform_int_distribution<Index> any_node(0, p.n_nodes - 1);
    for (std::size_t k = 0, tries = 0;
         k < chords && pairs.size() < max_pairs && tries < 100 * (chords + 1);
         ++tries)
      if (add_pair(any_node(rng), any_node(rng))) ++k;

    // Endpoints, attachments and demand.
    std::uniform_real_distribution<double> demand(p.demand_min, p.demand_max);
    std::vector<Index> order(p.n_nodes);
    for (std::size_t site = 0; site < p.n_endpoints; ++site) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      const double rate = demand(rng);
      const std::string base = "s" + std::to_string(site + 1);
      std::vector<std::pair<std::string, double>> logical;
      if (p.split_directions) {
        logical.emplace_back(base + ".dl", rate * p.downlink_fraction);
        logical.emplace_back(base + ".ul", rate * (1.0 - p.downlink_fraction));
      } else {
        logical.emplace_back(base, rate);
      }
      for (const auto& [name, r] : logical) {
        const Index e = s.logical.endpoints.size();
        s.logical.endpoints.push_back(name);
        for (std::size_t a = 0; a < p.attachments_per_endpoint; ++a)
          s.physical.links.push_back({Vertex::endpoint(e), Vertex::node(order[a]),
                                      p.endpoint_link_capacity, 0.0});
        s.logical.ingress_demand[{e, 0}] = r;  // enters at the eNB
      }
    }
    attach_vepc(s.logical, p.chi);
    s.energy = {65.0, 0.0, 48e-9, 3.25e-9, 0.0};
    s.max_delay.assign(s.num_endpoints(), std::nullopt);
    s.generator = {
        {"n_endpoints", static_cast<double>(p.n_endpoints)},
        {"n_nodes", static_cast<double>(p.n_nodes)},
        {"attachments_per_endpoint", static_cast<double>(p.attachments_per_endpoint)},
        {"demand_min", p.demand_min},
        {"demand_max", p.demand_max},
        {"downlink_fraction", p.downlink_fraction},
        {"endpoint_link_capacity", p.endpoint_link_capacity},
        {"core_link_capacity", p.core_link_capacity},
        {"node_processing_capacity", p.node_processing_capacity},
        {"full_switching_rate", p.full_switching_rate},
        {"chords", static_cast<double>(chords)},
        {"split_directions", p.split_directions ? 1.0 : 0.0},
        {"chi_preset", p.chi == ChiPreset::kStandard ? 0.0 : 1.0},
        {"rng_seed", static_cast<double>(p.rng_seed)},
        {"attempt", static_cast<double>(attempt)}};

    validate_scenario(s);
    if (!core_connected(s)) continue;
    if (small_enough_for_lp(s)) {
      try {
        initial_solution(s);
      } catch (const InstanceInfeasible&) {
        continue;
      }
    } else if (!aggregate_feasible(s)) {
      continue;
    }
    return s;
  }
  throw GenerationFailed("no feasible connected scenario after " +
                         std::to_string(p.max_retries + 1) + " attempts");
}

Scenario generate_toy(const ToyParams& p) {
  if (p.max_nodes < 2 || p.max_links < 3 || p.max_vnfs < 1)
    throw GenerationFailed("toy instances need two nodes and three links");
  std::mt19937_64 rng(p.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  for (int attempt = 0; attempt < 200; ++attempt) {
    Scenario s;
    LogicalGraph& lg = s.logical;
    lg.endpoints = {"e"};
    const std::size_t nv = pick(1, p.max_vnfs);
    for (std::size_t v = 0; v < nv; ++v)
      lg.vnfs.push_back({"f" + std::to_string(v + 1),
                         std::round(uniform(0.5, 1.5) * 4.0) / 4.0, 0.0});
    // A chain f1 -> f2 -> ... with an optional skip edge f1 -> f3.
    if (nv >= 2) lg.chi[{true, 0, 0, 1}] = std::round(uniform(0.3, 1.0) * 10) / 10;
    if (nv >= 3) {
      lg.chi[{false, 0, 1, 2}] = std::round(uniform(0.2, 1.0) * 10) / 10;
      if (unit(rng) < 0.5) lg.chi[{true, 0, 0, 2}] = std::round(uniform(0.1, 0.4) * 10) / 10;
    }
    const double demand = std::round(uniform(1.0, 4.0) * 10) / 10 * 1e9;
    lg.ingress_demand[{0, 0}] = demand;

    // Nodes along a bidirectional path, plus endpoint links and, budget
    // permitting, one extra core pair.
    const std::size_t attachments = pick(1, 2);
    const std::size_t max_nodes =
        std::min(p.max_nodes, (p.max_links - attachments) / 2 + 1);
    const std::size_t nc = pick(2, std::max<std::size_t>(2, max_nodes));
    double work = demand * lg.vnfs[0].compute_per_bit;
    for (const auto& [cls, rate] : derive_logical_flows(lg))
      work += rate * lg.vnfs[cls.next].compute_per_bit;
    // Switch-only nodes forward for free; they have no compute to spend.
    for (std::size_t c = 0; c < nc; ++c) {
      const bool switch_only = c > 0 && unit(rng) < 0.2;
      const double k = std::round(uniform(0.8, 2.5) * 10) / 10 * work;
      const double rho = std::round(uniform(0.0, 0.3) * 20) / 20;
      s.physical.nodes.push_back({"n" + std::to_string(c + 1),
                                  switch_only ? 0.0 : k, switch_only ? 0.0 : rho});
    }
    std::vector<Index> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    auto capacity = [&]() { return std::round(uniform(1.0, 3.0) * 10) / 10 * demand; };
    for (std::size_t c = 0; c + 1 < nc; ++c) {
      s.physical.links.push_back({Vertex::node(order[c]), Vertex::node(order[c + 1]), capacity(), 0.0});
      s.physical.links.push_back({Vertex::node(order[c + 1]), Vertex::node(order[c]), capacity(), 0.0});
    }
    if (nc >= 3 && s.physical.links.size() + attachments + 2 <= p.max_links &&
        unit(rng) < 0.5) {
      s.physical.links.push_back({Vertex::node(order[nc - 1]), Vertex::node(order[0]), capacity(), 0.0});
      s.physical.links.push_back({Vertex::node(order[0]), Vertex::node(order[nc - 1]), capacity(), 0.0});
    }
    std::vector<Index> hosts(nc);
    std::iota(hosts.begin(), hosts.end(), 0);
    std::shuffle(hosts.begin(), hosts.end(), rng);
    for (std::size_t a = 0; a < std::min(attachments, nc); ++a)
      s.physical.links.push_back({Vertex::endpoint(0), Vertex::node(hosts[a]), capacity(), 0.0});

    s.energy = {65.0, 0.0, 48e-9, 3.25e-9, unit(rng) < 0.3 ? 1e-9 : 0.0};
    s.max_delay = {std::nullopt};
    s.generator = {{"toy_seed", static_cast<double>(p.rng_seed)},
                   {"attempt", static_cast<double>(attempt)}};
    validate_scenario(s);
    try {
      initial_solution(s);
    } catch (const InstanceInfeasible&) {
      continue;
    }
    return s;
  }
  throw GenerationFailed("no feasible toy instance after 200 attempts");
}

Scenario scale_demand(const Scenario& s, double factor) {
  if (!(factor > 0.0)) throw ScenarioInvalid("demand factor must be positive");
  Scenario out = s;
  for (auto& [key, rate] : out.logical.ingress_demand) rate *= factor;
  return out;
}

}  // namespace optiloop
