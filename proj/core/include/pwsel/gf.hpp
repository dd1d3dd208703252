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

#ifndef PWSEL_GF_HPP_
#define PWSEL_GF_HPP_

// Arithmetic and dense linear algebra over prime fields GF(q), q < 2^31.
//
// Vectors over GF(2) are stored bit-packed (64 coordinates per word) and
// eliminated with XOR; every other modulus stores one residue per word.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "pwsel/rng.hpp"

namespace pwsel {

// Thrown when an operation's documented precondition does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace gf {

using Residue = std::uint32_t;

inline constexpr std::uint64_t kMaxModulus = 1ULL << 31;

// Trial division.
bool is_prime(std::uint64_t n);

// Throws PreconditionError unless q is a prime below 2^31.
void require_modulus(std::uint64_t q);

Residue add_mod(Residue a, Residue b, Residue q);
Residue sub_mod(Residue a, Residue b, Residue q);
Residue mul_mod(Residue a, Residue b, Residue q);
Residue inv_mod(Residue a, Residue q);

// q^e, or nullopt-like 0 on overflow past 2^63.
std::uint64_t checked_pow(std::uint64_t q, std::uint64_t e);

class FieldElement {
 public:
  FieldElement(std::uint64_t value, std::uint64_t modulus);

  Residue value() const { return value_; }
  Residue modulus() const { return modulus_; }

  FieldElement inverse() const;

  friend FieldElement operator+(FieldElement a, FieldElement b);
  friend FieldElement operator-(FieldElement a, FieldElement b);
  friend FieldElement operator*(FieldElement a, FieldElement b);
  friend bool operator==(FieldElement a, FieldElement b) = default;

 private:
  struct Unchecked {};
  FieldElement(Residue value, Residue modulus, Unchecked)
      : value_(value), modulus_(modulus) {}

  Residue value_;
  Residue modulus_;
};

enum class FieldOp { kAdd, kSub, kMul, kInv };

// `b` is ignored for kInv.
FieldElement field_arithmetic(FieldElement a, FieldElement b, FieldOp op);

class Vector {
 public:
  Vector() = default;
  Vector(std::size_t dim, Residue modulus);

  static Vector from_values(std::span<const Residue> values, Residue modulus);
  static Vector from_values(std::initializer_list<Residue> values, Residue modulus) {
    return from_values(std::span<const Residue>(values.begin(), values.size()), modulus);
  }
  static Vector unit(std::size_t dim, std::size_t coord, Residue modulus);
  static Vector random(std::size_t dim, Residue modulus, Rng& rng);
  // Inverse of index(): coordinate 0 is the most significant base-q digit.
  static Vector from_index(std::uint64_t index, std::size_t dim, Residue modulus);

  std::size_t dim() const { return dim_; }
  Residue modulus() const { return modulus_; }
  bool packed() const { return modulus_ == 2; }

  Residue get(std::size_t i) const;
  void set(std::size_t i, Residue value);
  bool is_zero() const;
  std::size_t weight() const;

  // this += factor * other
  void add_scaled(const Vector& other, Residue factor);
  Vector& operator+=(const Vector& other);

  // Base-q integer encoding; throws if q^dim does not fit in 63 bits.
  std::uint64_t index() const;
  std::vector<Residue> values() const;
  std::span<const std::uint64_t> words() const { return {data_.data(), data_.size()}; }
  std::size_t hash() const;

  friend bool operator==(const Vector& a, const Vector& b);
  // Lexicographic by coordinate, then by dimension.
  friend std::strong_ordering operator<=>(const Vector& a, const Vector& b);

 private:
  friend class LinearBasis;

  std::uint32_t dim_ = 0;
  Residue modulus_ = 2;
  boost::container::small_vector<std::uint64_t, 8> data_;
};

struct VectorHash {
  std::size_t operator()(const Vector& v) const { return v.hash(); }
};

class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols, std::uint64_t modulus);

  static FieldMatrix identity(std::size_t n, std::uint64_t modulus);
  static FieldMatrix from_rows(const std::vector<std::vector<Residue>>& rows,
                               std::uint64_t modulus);
  static FieldMatrix from_columns(std::span<const Vector> columns, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Residue modulus() const { return modulus_; }

  Residue at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Residue value);

  Vector row(std::size_t r) const;
  Vector column(std::size_t c) const;
  std::vector<Vector> columns() const;
  std::vector<std::vector<Residue>> to_rows() const;
  std::span<const Residue> entries() const { return entries_; }

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Residue modulus_ = 2;
  std::vector<Residue> entries_;
};

std::size_t matrix_rank(const FieldMatrix& m);
FieldMatrix matrix_multiply(const FieldMatrix& a, const FieldMatrix& b);

// Entries are drawn row-major; for q = 2 each 64-bit draw supplies 64 entries.
FieldMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t q, Rng& rng);

// Incremental row echelon basis of a subspace of GF(q)^dim.
class LinearBasis {
 public:
  LinearBasis(std::size_t dim, Residue modulus);

  // Adds v if it is outside the current span; returns whether it was added.
  bool insert(const Vector& v);
  bool in_span(const Vector& v) const;
  std::size_t rank() const { return rows_.size(); }
  std::size_t dim() const { return dim_; }
  void clear();

 private:
  void reduce(Vector& v) const;
  void check(const Vector& v) const;

  std::size_t dim_;
  Residue modulus_;
  std::vector<Vector> rows_;
  std::vector<std::uint32_t> pivots_;
};

}  // namespace gf
}  // namespace pwsel

#endif  // PWSEL_GF_HPP_
