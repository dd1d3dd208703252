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


#ifndef PWSEL_MATROID_HPP_
#define PWSEL_MATROID_HPP_

#include <algorithm>
#include <concepts>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pwsel/gf.hpp"
#include "pwsel/rng.hpp"

namespace pwsel::matroid {

struct LabeledVector {
  gf::Vector vector;
  std::uint32_t label = 1;

  friend bool operator==(const LabeledVector&, const LabeledVector&) = default;
  friend std::strong_ordering operator<=>(const LabeledVector& a, const LabeledVector& b) {
    if (auto c = a.label <=> b.label; c != 0) return c;
    return a.vector <=> b.vector;
  }
};

struct LabeledVectorHash {
  std::size_t operator()(const LabeledVector& e) const {
    return static_cast<std::size_t>(mix64(e.vector.hash() ^ (std::uint64_t{e.label} << 1)));
  }
};

// m labeled parallel copies of the linear matroid on GF(q)^d. The ground set is
// never materialized.
class DuplicatedLinearMatroid {
 public:
  using Element = LabeledVector;

  DuplicatedLinearMatroid(std::uint64_t q, std::size_t d, std::size_t copies);

  gf::Residue q() const { return q_; }
  std::size_t d() const { return d_; }
  std::size_t copies() const { return copies_; }
  std::size_t full_rank() const { return d_; }

  void check(const Element& e) const;
  std::size_t rank(std::span<const Element> s) const;
  // Rank of explicit elements together with `full_blocks` whole copy-classes.
  std::size_t rank_with_blocks(std::span<const Element> s, std::size_t full_blocks) const;

  class Tracker {
   public:
    explicit Tracker(const DuplicatedLinearMatroid& m) : m_(&m), basis_(m.d(), m.q()) {}
    bool can_add(const Element& e) const;
    void add(const Element& e);
    std::size_t size() const { return basis_.rank(); }
    void clear() { basis_.clear(); }

   private:
    const DuplicatedLinearMatroid* m_;
    gf::LinearBasis basis_;
  };
  Tracker tracker() const { return Tracker(*this); }

 private:
  gf::Residue q_;
  std::size_t d_;
  std::size_t copies_;
};

// Disjoint union of rank-one matroids on integer element ids.
class SimplePartitionMatroid {
 public:
  using Element = std::uint32_t;

  SimplePartitionMatroid() = default;
  explicit SimplePartitionMatroid(std::vector<std::vector<Element>> parts);

  const std::vector<std::vector<Element>>& parts() const { return parts_; }
  std::size_t num_parts() const { return parts_.size(); }
  bool contains(Element e) const { return e < part_of_.size() && part_of_[e] != kNone; }
  std::size_t part_of(Element e) const;
  std::size_t full_rank() const;

  std::size_t rank(std::span<const Element> s) const;

  class Tracker {
   public:
    explicit Tracker(const SimplePartitionMatroid& m) : m_(&m), used_(m.num_parts(), false) {}
    bool can_add(Element e) const { return !used_[m_->part_of(e)]; }
    void add(Element e);
    std::size_t size() const { return size_; }

   private:
    const SimplePartitionMatroid* m_;
    std::vector<bool> used_;
    std::size_t size_ = 0;
  };
  Tracker tracker() const { return Tracker(*this); }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffU;

  std::vector<std::vector<Element>> parts_;
  std::vector<std::uint32_t> part_of_;
};

// Edges are elements, identified by their index in the edge list.
class GraphicMatroid {
 public:
  using Element = std::uint32_t;

  GraphicMatroid(std::size_t vertices, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

  static GraphicMatroid complete(std::size_t vertices);

  std::size_t vertices() const { return vertices_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }
  std::size_t full_rank() const;

  void check(Element e) const;
  std::size_t rank(std::span<const Element> s) const;

  class Tracker {
   public:
    explicit Tracker(const GraphicMatroid& m);
    bool can_add(Element e) const;
    void add(Element e);
    std::size_t size() const { return size_; }

   private:
    std::uint32_t find(std::uint32_t v) const;

    const GraphicMatroid* m_;
    mutable std::vector<std::uint32_t> parent_;
    std::size_t size_ = 0;
  };
  Tracker tracker() const { return Tracker(*this); }

 private:
  std::size_t vertices_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

// Uniform matroid U(r, n); r = 1 is the rank-one matroid, r = n the free matroid.
class UniformMatroid {
 public:
  using Element = std::uint32_t;

  UniformMatroid(std::size_t rank, std::size_t size);

  std::size_t full_rank() const { return rank_; }
  std::size_t size() const { return size_; }

  void check(Element e) const;
  std::size_t rank(std::span<const Element> s) const;

  class Tracker {
   public:
    explicit Tracker(const UniformMatroid& m) : m_(&m) {}
    bool can_add(Element e) const;
    void add(Element e);
    std::size_t size() const { return count_; }

   private:
    const UniformMatroid* m_;
    std::size_t count_ = 0;
  };
  Tracker tracker() const { return Tracker(*this); }

 private:
  std::size_t rank_;
  std::size_t size_;
};

template <class M>
concept Matroid = requires(const M& m, std::span<const typename M::Element> s,
                           const typename M::Element& e) {
  { m.rank(s) } -> std::convertible_to<std::size_t>;
  { m.full_rank() } -> std::convertible_to<std::size_t>;
  { m.tracker() };
  { m.tracker().can_add(e) } -> std::convertible_to<bool>;
  { m.tracker().size() } -> std::convertible_to<std::size_t>;
};

template <Matroid M>
bool is_independent(const M& m, std::span<const typename M::Element> s) {
  return m.rank(s) == s.size();
}

template <Matroid M>
bool span_contains(const M& m, std::span<const typename M::Element> s,
                   const typename M::Element& e) {
  std::vector<typename M::Element> with(s.begin(), s.end());
  with.push_back(e);
  return m.rank(with) == m.rank(s);
}

struct WeightedRank {
  double value = 0.0;
  std::vector<std::size_t> chosen;  // indices into the input set, in greedy order
};

// Greedy by weight descending, ties by ascending element.
template <Matroid M>
WeightedRank weighted_rank(const M& m, std::span<const typename M::Element> s,
                           std::span<const double> weights) {
  if (weights.size() != s.size()) {
    throw PreconditionError("weighted_rank: " + std::to_string(weights.size()) + " weights for " +
                            std::to_string(s.size()) + " elements");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw PreconditionError("weighted_rank: negative weight");
  }
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (weights[a] != weights[b]) return weights[a] > weights[b];
    return s[a] < s[b];
  });
  WeightedRank out;
  auto tracker = m.tracker();
  for (std::size_t i : order) {
    if (tracker.can_add(s[i])) {
      tracker.add(s[i]);
      out.value += weights[i];
      out.chosen.push_back(i);
    }
  }
  return out;
}

// Vertex order: order[k] is the k-th vertex. Each non-loop edge goes to its later endpoint.
SimplePartitionMatroid graphic_partition_from_order(const GraphicMatroid& g,
                                                    std::span<const std::uint32_t> order);
SimplePartitionMatroid sample_graphic_partition(const GraphicMatroid& g, Rng& rng);

struct EdgeList {
  GraphicMatroid graph;
  std::vector<double> weights;  // 1.0 where the line has no weight column
};

// One "u v [weight]" line per edge, zero-indexed vertices; '#' starts a comment.
EdgeList read_edge_list(std::istream& in);

}  // namespace pwsel::matroid

#endif  // PWSEL_MATROID_HPP_
