// Copyright 2026 The NMWPM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <stdexcept>
#include <set>

#include "doctest.h"
#include "nmwpm/lattice.hpp"

using namespace nmwpm;

namespace {

// Symmetric difference of a list of supports, computed with std::set.
std::set<int> xor_supports(const std::vector<std::vector<int>>& supports) {
  std::set<int> acc;
  for (const auto& s : supports) {
    for (int q : s) {
      if (!acc.erase(q)) acc.insert(q);
    }
  }
  return acc;
}

// GF(2) rank of a set of bit rows.
int gf2_rank(std::vector<std::vector<std::uint8_t>> rows) {
  int rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t pivot = static_cast<std::size_t>(rank);
    while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[static_cast<std::size_t>(rank)]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != static_cast<std::size_t>(rank) && rows[r][c]) {
        for (std::size_t k = 0; k < cols; ++k) rows[r][k] ^= rows[static_cast<std::size_t>(rank)][k];
      }
    }
    ++rank;
  }
  return rank;
}

std::vector<std::uint8_t> indicator(const std::vector<int>& support, int n) {
  std::vector<std::uint8_t> row(static_cast<std::size_t>(n), 0);
  for (int q : support) row[static_cast<std::size_t>(q)] = 1;
  return row;
}

void check_pairwise_commutation(const CodeLattice& lat) {
  for (const auto& a : lat.stabilizers()) {
    for (const auto& b : lat.stabilizers()) REQUIRE(commutes(a, b));
    for (const auto& l : lat.logical_ops()) REQUIRE(commutes(a, l));
  }
}

// A logical is not a product of same-type stabilizers iff appending it
// raises the GF(2) rank.
bool outside_stabilizer_span(const CodeLattice& lat, const LogicalOperator& op) {
  std::vector<std::vector<std::uint8_t>> rows;
  for (const auto& s : lat.stabilizers()) {
    if (s.pauli_type == op.pauli_type) rows.push_back(indicator(s.support, lat.num_qubits()));
  }
  const int base = gf2_rank(rows);
  rows.push_back(indicator(op.support, lat.num_qubits()));
  return gf2_rank(rows) == base + 1;
}

}  // namespace

TEST_CASE("toric sizes") {
  const auto l4 = build_toric(4);
  CHECK(l4.num_qubits() == 32);
  CHECK(l4.num_x_stabilizers() == 16);
  CHECK(l4.num_stabilizers() == 32);
  const auto l2 = build_toric(2);
  CHECK(l2.num_qubits() == 8);
  CHECK(l2.num_stabilizers() == 8);
  CHECK_THROWS_AS(build_toric(1), std::invalid_argument);
  CHECK_THROWS_AS(build_toric(0), std::invalid_argument);
}

TEST_CASE("toric stabilizers have weight four and two dependencies") {
  for (int L = 2; L <= 6; ++L) {
    const auto lat = build_toric(L);
    std::vector<std::vector<std::uint8_t>> xs, zs;
    for (const auto& s : lat.stabilizers()) {
      CHECK(s.support.size() == 4);
      CHECK(std::is_sorted(s.support.begin(), s.support.end()));
      (s.pauli_type == PauliType::X ? xs : zs).push_back(indicator(s.support, lat.num_qubits()));
    }
    CHECK(gf2_rank(xs) + gf2_rank(zs) == 2 * L * L - 2);
  }
}

TEST_CASE("product of all vertex stabilizers is the identity at L=6") {
  const auto lat = build_toric(6);
  std::vector<std::vector<int>> xs, zs;
  for (const auto& s : lat.stabilizers()) (s.pauli_type == PauliType::X ? xs : zs).push_back(s.support);
  CHECK(xor_supports(xs).empty());
  CHECK(xor_supports(zs).empty());
}

TEST_CASE("toric coordinates cover each grid exactly once") {
  for (int L = 2; L <= 6; ++L) {
    const auto lat = build_toric(L);
    std::set<std::pair<int, int>> vx, pz;
    for (const auto& s : lat.stabilizers()) {
      CHECK(s.coord.x >= 0);
      CHECK(s.coord.x < L);
      CHECK(s.coord.y >= 0);
      CHECK(s.coord.y < L);
      auto& grid = s.pauli_type == PauliType::X ? vx : pz;
      CHECK(grid.insert({s.coord.x, s.coord.y}).second);
    }
    CHECK(vx.size() == static_cast<std::size_t>(L * L));
    CHECK(pz.size() == static_cast<std::size_t>(L * L));
  }
}

TEST_CASE("stabilizer indices: X block first, row-major") {
  const auto lat = build_toric(5);
  for (int i = 0; i < lat.num_stabilizers(); ++i) {
    const auto& s = lat.stabilizer(i);
    CHECK(s.index == i);
    CHECK((s.pauli_type == PauliType::X) == (i < lat.num_x_stabilizers()));
    const int local = i % 25;
    CHECK(s.coord.y == local / 5);
    CHECK(s.coord.x == local % 5);
  }
}

TEST_CASE("all stabilizer pairs commute for L up to 6") {
  for (int L = 2; L <= 6; ++L) check_pairwise_commutation(build_toric(L));
  for (int L : {3, 5}) check_pairwise_commutation(build_rotated(L));
}

TEST_CASE("toric logicals pair up and are nontrivial") {
  for (int L = 2; L <= 6; ++L) {
    const auto lat = build_toric(L);
    REQUIRE(lat.logical_ops().size() == 4);
    for (const auto& op : lat.logical_ops()) {
      CHECK(op.support.size() == static_cast<std::size_t>(L));
      CHECK(outside_stabilizer_span(lat, op));
    }
    for (const auto& a : lat.logical_ops()) {
      int partners = 0;
      for (const auto& b : lat.logical_ops()) partners += commutes(a, b) ? 0 : 1;
      CHECK(partners == 1);
    }
  }
}

TEST_CASE("logical X vs conjugate logical Z overlap once") {
  const auto lat = build_toric(4);
  const auto xs = lat.logicals_of(PauliType::X);
  const auto zs = lat.logicals_of(PauliType::Z);
  int anticommuting = 0;
  for (const auto* x : xs) {
    for (const auto* z : zs) {
      std::vector<int> common;
      std::set_intersection(x->support.begin(), x->support.end(), z->support.begin(), z->support.end(),
                            std::back_inserter(common));
      if (common.size() % 2 == 1) {
        CHECK(common.size() == 1);
        CHECK_FALSE(commutes(*x, *z));
        ++anticommuting;
      }
    }
  }
  CHECK(anticommuting == 2);
}

TEST_CASE("commutes on simple operators") {
  CHECK(commutes(PauliType::X, {0, 1}, PauliType::Z, {2, 3}));
  CHECK(commutes(PauliType::X, {0, 1, 2, 3}, PauliType::Z, {1, 2, 7, 9}));
  CHECK_FALSE(commutes(PauliType::X, {0, 1}, PauliType::Z, {1, 5}));
  CHECK(commutes(PauliType::X, {0, 1}, PauliType::X, {1, 5}));
  const auto lat = build_toric(4);
  // Vertex (1,1) and plaquette (0,0) share h(0,1) and v(1,0).
  const auto& vtx = lat.stabilizer(1 * 4 + 1);
  const auto& plq = lat.stabilizer(16);
  std::vector<int> common;
  std::set_intersection(vtx.support.begin(), vtx.support.end(), plq.support.begin(), plq.support.end(),
                        std::back_inserter(common));
  CHECK(common.size() == 2);
  CHECK(commutes(vtx, plq));
}

TEST_CASE("rotated sizes and weights") {
  const auto l3 = build_rotated(3);
  CHECK(l3.num_qubits() == 9);
  CHECK(l3.num_stabilizers() == 8);
  CHECK(l3.num_x_stabilizers() == 4);
  const auto l5 = build_rotated(5);
  CHECK(l5.num_qubits() == 25);
  CHECK(l5.num_stabilizers() == 24);
  CHECK(l5.num_x_stabilizers() == 12);
  CHECK_THROWS_AS(build_rotated(4), std::invalid_argument);
  CHECK_THROWS_AS(build_rotated(1), std::invalid_argument);

  for (int L : {3, 5, 7}) {
    const auto lat = build_rotated(L);
    int weight2 = 0;
    for (const auto& s : lat.stabilizers()) {
      const bool on_edge = s.coord.x == 0 || s.coord.x == 2 * L || s.coord.y == 0 || s.coord.y == 2 * L;
      CHECK(s.support.size() == (on_edge ? 2u : 4u));
      weight2 += on_edge ? 1 : 0;
      CHECK(s.coord.x >= 0);
      CHECK(s.coord.x <= 2 * L);
      CHECK(s.coord.y >= 0);
      CHECK(s.coord.y <= 2 * L);
    }
    CHECK(weight2 == 2 * (L - 1));
  }
}

TEST_CASE("rotated L=3 stabilizer enumeration") {
  // Independent count from the checkerboard rule: interior faces (i, j) in
  // [0, L-2]^2 plus half the edge faces, split by parity of i + j.
  const int L = 3;
  int x_count = 0, z_count = 0;
  for (int i = -1; i < L; ++i) {
    for (int j = -1; j < L; ++j) {
      const bool interior = i >= 0 && i < L - 1 && j >= 0 && j < L - 1;
      const bool x_type = ((i + j) % 2 + 2) % 2 == 0;
      const bool top_bottom = (i == -1 || i == L - 1) && j >= 0 && j < L - 1;
      const bool left_right = (j == -1 || j == L - 1) && i >= 0 && i < L - 1;
      if (interior) {
        (x_type ? x_count : z_count) += 1;
      } else if (top_bottom && x_type) {
        ++x_count;
      } else if (left_right && !x_type) {
        ++z_count;
      }
    }
  }
  CHECK(x_count == 4);
  CHECK(z_count == 4);
  const auto lat = build_rotated(3);
  CHECK(lat.num_x_stabilizers() == x_count);
  CHECK(lat.num_stabilizers() - lat.num_x_stabilizers() == z_count);
  int pairs = 0;
  for (int a = 0; a < lat.num_stabilizers(); ++a) {
    for (int b = a + 1; b < lat.num_stabilizers(); ++b) {
      CHECK(commutes(lat.stabilizer(a), lat.stabilizer(b)));
      ++pairs;
    }
  }
  CHECK(pairs == 28);
}

TEST_CASE("rotated logicals") {
  for (int L : {3, 5, 7}) {
    const auto lat = build_rotated(L);
    REQUIRE(lat.logical_ops().size() == 2);
    const auto& a = lat.logical_ops()[0];
    const auto& b = lat.logical_ops()[1];
    CHECK(a.pauli_type != b.pauli_type);
    CHECK_FALSE(commutes(a, b));
    CHECK(a.support.size() == static_cast<std::size_t>(L));
    CHECK(outside_stabilizer_span(lat, a));
    CHECK(outside_stabilizer_span(lat, b));
    std::vector<std::vector<std::uint8_t>> xs, zs;
    for (const auto& s : lat.stabilizers()) {
      (s.pauli_type == PauliType::X ? xs : zs).push_back(indicator(s.support, lat.num_qubits()));
    }
    CHECK(gf2_rank(xs) + gf2_rank(zs) == L * L - 1);
  }
}

TEST_CASE("qubit incidence tables") {
  const auto lat = build_toric(4);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    CHECK(lat.stabilizers_on_qubit(q, PauliType::X).size() == 2);
    CHECK(lat.stabilizers_on_qubit(q, PauliType::Z).size() == 2);
  }
  const auto rot = build_rotated(5);
  for (int q = 0; q < rot.num_qubits(); ++q) {
    const auto nx = rot.stabilizers_on_qubit(q, PauliType::X).size();
    const auto nz = rot.stabilizers_on_qubit(q, PauliType::Z).size();
    CHECK(nx >= 1);
    CHECK(nx <= 2);
    CHECK(nz >= 1);
    CHECK(nz <= 2);
  }
}

TEST_CASE("center") {
  CHECK(build_toric(6).center()[0] == 3.0);
  CHECK(build_toric(6).center()[1] == 3.0);
  CHECK(build_rotated(5).center()[0] == 5.0);
}
