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

#include "pwsel/gf.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <utility>

namespace pwsel::gf {
namespace {

constexpr std::size_t words_for(std::size_t dim, Residue modulus) {
  return modulus == 2 ? (dim + 63) / 64 : dim;
}

void require_same_modulus(Residue a, Residue b, const char* what) {
  if (a != b) {
    throw PreconditionError(std::string(what) + ": modulus mismatch (" +
                            std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t f = 3; f * f <= n; f += 2) {
    if (n % f == 0) return false;
  }
  return true;
}

void require_modulus(std::uint64_t q) {
  if (q >= kMaxModulus) {
    throw PreconditionError("modulus " + std::to_string(q) + " must be below 2^31");
  }
  if (!is_prime(q)) {
    throw PreconditionError("modulus " + std::to_string(q) + " is not prime");
  }
}

Residue add_mod(Residue a, Residue b, Residue q) {
  const std::uint64_t s = std::uint64_t{a} + b;
  return static_cast<Residue>(s >= q ? s - q : s);
}

Residue sub_mod(Residue a, Residue b, Residue q) {
  return a >= b ? a - b : static_cast<Residue>(std::uint64_t{a} + q - b);
}

Residue mul_mod(Residue a, Residue b, Residue q) {
  return static_cast<Residue>((std::uint64_t{a} * b) % q);
}

Residue inv_mod(Residue a, Residue q) {
  if (a % q == 0) throw PreconditionError("inverse of zero");
  // Extended Euclid on signed 64-bit values.
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = q, new_r = a % q;
  while (new_r != 0) {
    const std::int64_t quotient = r / new_r;
    t = std::exchange(new_t, t - quotient * new_t);
    r = std::exchange(new_r, r - quotient * new_r);
  }
  if (t < 0) t += q;
  return static_cast<Residue>(t);
}

std::uint64_t checked_pow(std::uint64_t q, std::uint64_t e) {
  std::uint64_t result = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (q != 0 && result > (std::uint64_t{1} << 63) / q) return 0;
    result *= q;
  }
  return result;
}

// ---------------------------------------------------------------------------
// FieldElement

FieldElement::FieldElement(std::uint64_t value, std::uint64_t modulus) {
  require_modulus(modulus);
  modulus_ = static_cast<Residue>(modulus);
  value_ = static_cast<Residue>(value % modulus);
}

FieldElement FieldElement::inverse() const {
  return {inv_mod(value_, modulus_), modulus_, Unchecked{}};
}

FieldElement operator+(FieldElement a, FieldElement b) {
  require_same_modulus(a.modulus_, b.modulus_, "add");
  return {add_mod(a.value_, b.value_, a.modulus_), a.modulus_, FieldElement::Unchecked{}};
}

FieldElement operator-(FieldElement a, FieldElement b) {
  require_same_modulus(a.modulus_, b.modulus_, "sub");
  return {sub_mod(a.value_, b.value_, a.modulus_), a.modulus_, FieldElement::Unchecked{}};
}

FieldElement operator*(FieldElement a, FieldElement b) {
  require_same_modulus(a.modulus_, b.modulus_, "mul");
  return {mul_mod(a.value_, b.value_, a.modulus_), a.modulus_, FieldElement::Unchecked{}};
}

FieldElement field_arithmetic(FieldElement a, FieldElement b, FieldOp op) {
  switch (op) {
    case FieldOp::kAdd:
      return a + b;
    case FieldOp::kSub:
      return a - b;
    case FieldOp::kMul:
      return a * b;
    case FieldOp::kInv:
      return a.inverse();
  }
  throw PreconditionError("unknown field operation");
}

// ---------------------------------------------------------------------------
// Vector

Vector::Vector(std::size_t dim, Residue modulus)
    : dim_(static_cast<std::uint32_t>(dim)), modulus_(modulus), data_(words_for(dim, modulus), 0) {}

Vector Vector::from_values(std::span<const Residue> values, Residue modulus) {
  Vector v(values.size(), modulus);
  for (std::size_t i = 0; i < values.size(); ++i) v.set(i, values[i] % modulus);
  return v;
}

Vector Vector::unit(std::size_t dim, std::size_t coord, Residue modulus) {
  Vector v(dim, modulus);
  v.set(coord, 1);
  return v;
}

Vector Vector::random(std::size_t dim, Residue modulus, Rng& rng) {
  Vector v(dim, modulus);
  if (v.packed()) {
    for (auto& w : v.data_) w = rng.next_u64();
    if (dim & 63) v.data_.back() &= (std::uint64_t{1} << (dim & 63)) - 1;
  } else {
    for (auto& x : v.data_) x = rng.uniform_below(modulus);
  }
  return v;
}

Vector Vector::from_index(std::uint64_t index, std::size_t dim, Residue modulus) {
  Vector v(dim, modulus);
  for (std::size_t i = dim; i-- > 0;) {
    v.set(i, static_cast<Residue>(index % modulus));
    index /= modulus;
  }
  return v;
}

Residue Vector::get(std::size_t i) const {
  if (packed()) return static_cast<Residue>((data_[i >> 6] >> (i & 63)) & 1U);
  return static_cast<Residue>(data_[i]);
}

void Vector::set(std::size_t i, Residue value) {
  if (packed()) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (value & 1U) {
      data_[i >> 6] |= bit;
    } else {
      data_[i >> 6] &= ~bit;
    }
  } else {
    data_[i] = value % modulus_;
  }
}

bool Vector::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](std::uint64_t w) { return w == 0; });
}

std::size_t Vector::weight() const {
  std::size_t w = 0;
  if (packed()) {
    for (auto word : data_) w += static_cast<std::size_t>(std::popcount(word));
  } else {
    for (auto x : data_) w += (x != 0);
  }
  return w;
}

void Vector::add_scaled(const Vector& other, Residue factor) {
  require_same_modulus(modulus_, other.modulus_, "add_scaled");
  if (dim_ != other.dim_) throw PreconditionError("add_scaled: dimension mismatch");
  factor %= modulus_;
  if (factor == 0) return;
  if (packed()) {
    for (std::size_t w = 0; w < data_.size(); ++w) data_[w] ^= other.data_[w];
    return;
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (other.data_[i] == 0) continue;
    data_[i] = add_mod(static_cast<Residue>(data_[i]),
                       mul_mod(factor, static_cast<Residue>(other.data_[i]), modulus_), modulus_);
  }
}

Vector& Vector::operator+=(const Vector& other) {
  add_scaled(other, 1);
  return *this;
}

std::uint64_t Vector::index() const {
  if (checked_pow(modulus_, dim_) == 0) {
    throw PreconditionError("vector index: q^d exceeds 63 bits");
  }
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i) idx = idx * modulus_ + get(i);
  return idx;
}

std::vector<Residue> Vector::values() const {
  std::vector<Residue> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = get(i);
  return out;
}

std::size_t Vector::hash() const {
  std::uint64_t h = mix64(dim_ * 0x9e3779b97f4a7c15ULL + modulus_);
  for (auto w : data_) h = mix64(h ^ w);
  return static_cast<std::size_t>(h);
}

bool operator==(const Vector& a, const Vector& b) {
  return a.dim_ == b.dim_ && a.modulus_ == b.modulus_ &&
         std::equal(a.data_.begin(), a.data_.end(), b.data_.begin(), b.data_.end());
}

std::strong_ordering operator<=>(const Vector& a, const Vector& b) {
  if (a.modulus_ != b.modulus_) return a.modulus_ <=> b.modulus_;
  const std::size_t n = std::min(a.data_.size(), b.data_.size());
  for (std::size_t w = 0; w < n; ++w) {
    const std::uint64_t x = a.data_[w], y = b.data_[w];
    if (x == y) continue;
    if (!a.packed()) return x <=> y;
    // First differing coordinate is the lowest differing bit.
    const std::uint64_t bit = (x ^ y) & (~(x ^ y) + 1);
    return (x & bit) ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return a.dim_ <=> b.dim_;
}

// ---------------------------------------------------------------------------
// FieldMatrix

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols, std::uint64_t modulus)
    : rows_(rows), cols_(cols), modulus_(0), entries_(rows * cols, 0) {
  require_modulus(modulus);
  modulus_ = static_cast<Residue>(modulus);
}

FieldMatrix FieldMatrix::identity(std::size_t n, std::uint64_t modulus) {
  FieldMatrix m(n, n, modulus);
  for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = 1;
  return m;
}

FieldMatrix FieldMatrix::from_rows(const std::vector<std::vector<Residue>>& rows,
                                   std::uint64_t modulus) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  FieldMatrix m(rows.size(), cols, modulus);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw PreconditionError("from_rows: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c] % m.modulus_);
  }
  return m;
}

FieldMatrix FieldMatrix::from_columns(std::span<const Vector> columns, std::size_t rows) {
  const Residue q = columns.empty() ? 2 : columns.front().modulus();
  FieldMatrix m(rows, columns.size(), q);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].dim() != rows) throw PreconditionError("from_columns: dimension mismatch");
    require_same_modulus(q, columns[c].modulus(), "from_columns");
    for (std::size_t r = 0; r < rows; ++r) m.entries_[r * m.cols_ + c] = columns[c].get(r);
  }
  return m;
}

void FieldMatrix::set(std::size_t r, std::size_t c, Residue value) {
  if (value >= modulus_) throw PreconditionError("matrix entry out of range");
  entries_[r * cols_ + c] = value;
}

Vector FieldMatrix::row(std::size_t r) const {
  return Vector::from_values(std::span<const Residue>(entries_.data() + r * cols_, cols_),
                             modulus_);
}

Vector FieldMatrix::column(std::size_t c) const {
  Vector v(rows_, modulus_);
  for (std::size_t r = 0; r < rows_; ++r) v.set(r, entries_[r * cols_ + c]);
  return v;
}

std::vector<Vector> FieldMatrix::columns() const {
  std::vector<Vector> out;
  out.reserve(cols_);
  for (std::size_t c = 0; c < cols_; ++c) out.push_back(column(c));
  return out;
}

std::vector<std::vector<Residue>> FieldMatrix::to_rows() const {
  std::vector<std::vector<Residue>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    out[r].assign(entries_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                  entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }
  return out;
}

std::size_t matrix_rank(const FieldMatrix& m) {
  LinearBasis basis(m.cols(), m.modulus());
  for (std::size_t r = 0; r < m.rows() && basis.rank() < m.cols(); ++r) basis.insert(m.row(r));
  return basis.rank();
}

FieldMatrix matrix_multiply(const FieldMatrix& a, const FieldMatrix& b) {
  require_same_modulus(a.modulus(), b.modulus(), "matrix_multiply");
  if (a.cols() != b.rows()) {
    throw PreconditionError("matrix_multiply: dimension mismatch (" + std::to_string(a.rows()) +
                            "x" + std::to_string(a.cols()) + " times " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
  const Residue q = a.modulus();
  FieldMatrix out(a.rows(), b.cols(), q);
  if (q == 2) {
    // Column j of the product is the XOR of the columns of `a` selected by b(:, j).
    const auto a_cols = a.columns();
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Vector acc(a.rows(), 2);
      for (std::size_t t = 0; t < b.rows(); ++t) {
        if (b.at(t, j)) acc += a_cols[t];
      }
      for (std::size_t r = 0; r < a.rows(); ++r) out.set(r, j, acc.get(r));
    }
    return out;
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      std::uint64_t acc = 0;
      for (std::size_t t = 0; t < a.cols(); ++t) {
        acc = (acc + std::uint64_t{a.at(i, t)} * b.at(t, j)) % q;
      }
      out.set(i, j, static_cast<Residue>(acc));
    }
  }
  return out;
}

FieldMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t q, Rng& rng) {
  FieldMatrix m(rows, cols, q);
  const std::size_t n = rows * cols;
  if (q == 2) {
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((i & 63) == 0) word = rng.next_u64();
      m.set(i / cols, i % cols, static_cast<Residue>((word >> (i & 63)) & 1U));
    }
    return m;
  }
  for (std::size_t i = 0; i < n; ++i) {
    m.set(i / cols, i % cols, static_cast<Residue>(rng.uniform_below(q)));
  }
  return m;
}

// ---------------------------------------------------------------------------
// LinearBasis

LinearBasis::LinearBasis(std::size_t dim, Residue modulus) : dim_(dim), modulus_(modulus) {}

void LinearBasis::check(const Vector& v) const {
  if (v.dim() != dim_) throw PreconditionError("LinearBasis: dimension mismatch");
  require_same_modulus(modulus_, v.modulus(), "LinearBasis");
}

void LinearBasis::reduce(Vector& v) const {
  if (modulus_ == 2) {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto p = pivots_[k];
      if ((v.data_[p >> 6] >> (p & 63)) & 1U) {
        const auto& row = rows_[k].data_;
        for (std::size_t w = 0; w < row.size(); ++w) v.data_[w] ^= row[w];
      }
    }
    return;
  }
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const auto c = static_cast<Residue>(v.data_[pivots_[k]]);
    if (c != 0) v.add_scaled(rows_[k], modulus_ - c);
  }
}

bool LinearBasis::in_span(const Vector& v) const {
  check(v);
  Vector w = v;
  reduce(w);
  return w.is_zero();
}

bool LinearBasis::insert(const Vector& v) {
  check(v);
  if (rows_.size() == dim_) return false;
  Vector w = v;
  reduce(w);
  std::uint32_t pivot = 0;
  if (modulus_ == 2) {
    std::size_t word = 0;
    while (word < w.data_.size() && w.data_[word] == 0) ++word;
    if (word == w.data_.size()) return false;
    pivot = static_cast<std::uint32_t>(word * 64 + std::countr_zero(w.data_[word]));
  } else {
    while (pivot < dim_ && w.data_[pivot] == 0) ++pivot;
    if (pivot == dim_) return false;
    const Residue scale = inv_mod(static_cast<Residue>(w.data_[pivot]), modulus_);
    for (auto& x : w.data_) x = mul_mod(static_cast<Residue>(x), scale, modulus_);
  }
  rows_.push_back(std::move(w));
  pivots_.push_back(pivot);
  return true;
}

void LinearBasis::clear() {
  rows_.clear();
  pivots_.clear();
}

}  // namespace pwsel::gf
