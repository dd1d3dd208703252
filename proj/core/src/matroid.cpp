// Copyright 2026 The pwsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pwsel/matroid.hpp"

#include <sstream>
#include <unordered_set>

namespace pwsel::matroid {

// ---------------------------------------------------------------------------
// DuplicatedLinearMatroid

DuplicatedLinearMatroid::DuplicatedLinearMatroid(std::uint64_t q, std::size_t d, std::size_t copies)
    : q_(0), d_(d), copies_(copies) {
  gf::require_modulus(q);
  q_ = static_cast<gf::Residue>(q);
  if (d == 0) throw PreconditionError("duplicated matroid: dimension must be positive");
  if (copies == 0) throw PreconditionError("duplicated matroid: need at least one copy");
}

void DuplicatedLinearMatroid::check(const Element& e) const {
  if (e.vector.dim() != d_ || e.vector.modulus() != q_) {
    throw PreconditionError("element outside ground set: vector is not in GF(" +
                            std::to_string(q_) + ")^" + std::to_string(d_));
  }
  if (e.label < 1 || e.label > copies_) {
    throw PreconditionError("element outside ground set: label " + std::to_string(e.label) +
                            " not in [1, " + std::to_string(copies_) + "]");
  }
}

std::size_t DuplicatedLinearMatroid::rank(std::span<const Element> s) const {
  gf::LinearBasis basis(d_, q_);
  for (const auto& e : s) {
    check(e);
    if (basis.rank() < d_) basis.insert(e.vector);
  }
  return basis.rank();
}

std::size_t DuplicatedLinearMatroid::rank_with_blocks(std::span<const Element> s,
                                                      std::size_t full_blocks) const {
  if (full_blocks > 0) {
    for (const auto& e : s) check(e);
    return d_;
  }
  return rank(s);
}

bool DuplicatedLinearMatroid::Tracker::can_add(const Element& e) const {
  m_->check(e);
  return !basis_.in_span(e.vector);
}

void DuplicatedLinearMatroid::Tracker::add(const Element& e) {
  m_->check(e);
  if (!basis_.insert(e.vector)) throw PreconditionError("tracker: element would create a circuit");
}

// ---------------------------------------------------------------------------
// SimplePartitionMatroid

SimplePartitionMatroid::SimplePartitionMatroid(std::vector<std::vector<Element>> parts)
    : parts_(std::move(parts)) {
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    for (Element e : parts_[p]) {
      if (e >= part_of_.size()) part_of_.resize(std::size_t{e} + 1, kNone);
      if (part_of_[e] != kNone) {
        throw PreconditionError("partition matroid: element " + std::to_string(e) +
                                " appears in two parts");
      }
      part_of_[e] = static_cast<std::uint32_t>(p);
    }
  }
}

std::size_t SimplePartitionMatroid::part_of(Element e) const {
  if (!contains(e)) {
    throw PreconditionError("element outside ground set: id " + std::to_string(e));
  }
  return part_of_[e];
}

std::size_t SimplePartitionMatroid::full_rank() const {
  return static_cast<std::size_t>(
      std::count_if(parts_.begin(), parts_.end(), [](const auto& p) { return !p.empty(); }));
}

std::size_t SimplePartitionMatroid::rank(std::span<const Element> s) const {
  std::vector<bool> hit(parts_.size(), false);
  std::size_t r = 0;
  for (Element e : s) {
    const auto p = part_of(e);
    if (!hit[p]) {
      hit[p] = true;
      ++r;
    }
  }
  return r;
}

void SimplePartitionMatroid::Tracker::add(Element e) {
  const auto p = m_->part_of(e);
  if (used_[p]) throw PreconditionError("tracker: part already used");
  used_[p] = true;
  ++size_;
}

// ---------------------------------------------------------------------------
// GraphicMatroid

GraphicMatroid::GraphicMatroid(std::size_t vertices,
                               std::vector<std::pair<std::uint32_t, std::uint32_t>> edges)
    : vertices_(vertices), edges_(std::move(edges)) {
  for (const auto& [u, v] : edges_) {
    if (u >= vertices_ || v >= vertices_) {
      throw PreconditionError("graphic matroid: edge (" + std::to_string(u) + ", " +
                              std::to_string(v) + ") outside vertex range");
    }
  }
}

GraphicMatroid GraphicMatroid::complete(std::size_t vertices) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t u = 0; u < vertices; ++u) {
    for (std::uint32_t v = u + 1; v < vertices; ++v) edges.emplace_back(u, v);
  }
  return GraphicMatroid(vertices, std::move(edges));
}

std::size_t GraphicMatroid::full_rank() const {
  std::vector<Element> all(edges_.size());
  std::iota(all.begin(), all.end(), Element{0});
  return rank(all);
}

void GraphicMatroid::check(Element e) const {
  if (e >= edges_.size()) {
    throw PreconditionError("element outside ground set: edge " + std::to_string(e));
  }
}

std::size_t GraphicMatroid::rank(std::span<const Element> s) const {
  Tracker t(*this);
  for (Element e : s) {
    if (t.can_add(e)) t.add(e);
  }
  return t.size();
}

GraphicMatroid::Tracker::Tracker(const GraphicMatroid& m) : m_(&m), parent_(m.vertices()) {
  std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
}

std::uint32_t GraphicMatroid::Tracker::find(std::uint32_t v) const {
  while (parent_[v] != v) {
    parent_[v] = parent_[parent_[v]];
    v = parent_[v];
  }
  return v;
}

bool GraphicMatroid::Tracker::can_add(Element e) const {
  m_->check(e);
  const auto& [u, v] = m_->edges()[e];
  return find(u) != find(v);
}

void GraphicMatroid::Tracker::add(Element e) {
  if (!can_add(e)) throw PreconditionError("tracker: edge closes a cycle");
  const auto& [u, v] = m_->edges()[e];
  parent_[find(u)] = find(v);
  ++size_;
}

// ---------------------------------------------------------------------------
// UniformMatroid

UniformMatroid::UniformMatroid(std::size_t rank, std::size_t size) : rank_(rank), size_(size) {
  if (rank > size) throw PreconditionError("uniform matroid: rank exceeds ground set size");
}

void UniformMatroid::check(Element e) const {
  if (e >= size_) throw PreconditionError("element outside ground set: id " + std::to_string(e));
}

std::size_t UniformMatroid::rank(std::span<const Element> s) const {
  std::unordered_set<Element> distinct;
  for (Element e : s) {
    check(e);
    distinct.insert(e);
  }
  return std::min(distinct.size(), rank_);
}

bool UniformMatroid::Tracker::can_add(Element e) const {
  m_->check(e);
  return count_ < m_->full_rank();
}

void UniformMatroid::Tracker::add(Element e) {
  if (!can_add(e)) throw PreconditionError("tracker: uniform matroid is full");
  ++count_;
}

// ---------------------------------------------------------------------------
// Partition samplers and I/O

SimplePartitionMatroid graphic_partition_from_order(const GraphicMatroid& g,
                                                    std::span<const std::uint32_t> order) {
  if (order.size() != g.vertices()) {
    throw PreconditionError("graphic partition: order must list every vertex once");
  }
  std::vector<std::uint32_t> position(g.vertices(), 0xffffffffU);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= g.vertices() || position[order[k]] != 0xffffffffU) {
      throw PreconditionError("graphic partition: order is not a permutation");
    }
    position[order[k]] = static_cast<std::uint32_t>(k);
  }
  std::vector<std::vector<std::uint32_t>> parts(g.vertices());
  for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
    const auto& [u, v] = g.edges()[e];
    if (u == v) continue;
    parts[position[u] > position[v] ? u : v].push_back(e);
  }
  std::erase_if(parts, [](const auto& p) { return p.empty(); });
  return SimplePartitionMatroid(std::move(parts));
}

SimplePartitionMatroid sample_graphic_partition(const GraphicMatroid& g, Rng& rng) {
  std::vector<std::uint32_t> order(g.vertices());
  std::iota(order.begin(), order.end(), std::uint32_t{0});
  shuffle(order.begin(), order.end(), rng);
  return graphic_partition_from_order(g, order);
}

EdgeList read_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<double> weights;
  std::size_t vertices = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    long long u = 0, v = 0;
    if (!(fields >> u >> v) || u < 0 || v < 0) {
      throw PreconditionError("edge list line " + std::to_string(lineno) +
                              ": expected two non-negative vertex ids");
    }
    double w = 1.0;
    if (!(fields >> w)) w = 1.0;
    std::string extra;
    if (fields.clear(), fields >> extra) {
      throw PreconditionError("edge list line " + std::to_string(lineno) + ": trailing input");
    }
    edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    weights.push_back(w);
    vertices = std::max<std::size_t>(vertices, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  return {GraphicMatroid(vertices, std::move(edges)), std::move(weights)};
}

}  // namespace pwsel::matroid
