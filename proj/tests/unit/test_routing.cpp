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
#include <climits>

#include "doctest.h"
#include "nmwpm/routing.hpp"

using namespace nmwpm;

namespace {

Syndrome flip_syndrome(const CodeLattice& lat, PauliType error_type, const std::vector<int>& qubits) {
  PauliFrame f(lat.num_qubits());
  for (int q : qubits) f.bits(error_type)[static_cast<std::size_t>(q)] ^= 1;
  return extract_syndrome(f, lat);
}

int torus_image_min(int x1, int y1, int x2, int y2, int L) {
  int best = INT_MAX;
  for (int ox = -1; ox <= 1; ++ox) {
    for (int oy = -1; oy <= 1; ++oy) best = std::min(best, std::abs(x1 - x2 - ox * L) + std::abs(y1 - y2 - oy * L));
  }
  return best;
}

}  // namespace

TEST_CASE("toric paths join exactly the two endpoints") {
  for (int L : {2, 3, 4, 5, 6}) {
    const auto lat = build_toric(L);
    const PathRouter router(lat);
    for (int a = 0; a < lat.num_stabilizers(); ++a) {
      for (int b = a + 1; b < lat.num_stabilizers(); ++b) {
        if (lat.stabilizer(a).pauli_type != lat.stabilizer(b).pauli_type) continue;
        for (std::uint8_t route = 0; route < 4; ++route) {
          const MatchedPair pair{a, b, route};
          const auto path = router.path(pair);
          const auto& sa = lat.stabilizer(a);
          const auto& sb = lat.stabilizer(b);
          CHECK(static_cast<int>(path.size()) == torus_image_min(sa.coord.x, sa.coord.y, sb.coord.x, sb.coord.y, L));
          CHECK(router.distance(a, b) == static_cast<int>(path.size()));
          const auto err = router.error_type(class_of(sa.pauli_type));
          const auto s = flip_syndrome(lat, err, path);
          CHECK(s.count() == 2);
          CHECK(s.bits[static_cast<std::size_t>(a)] == 1);
          CHECK(s.bits[static_cast<std::size_t>(b)] == 1);
        }
      }
    }
  }
}

TEST_CASE("toric distance is a symmetric metric") {
  const auto lat = build_toric(6);
  const PathRouter router(lat);
  const int n = lat.num_x_stabilizers();
  for (int a = 0; a < n; ++a) {
    CHECK(router.distance(a, a) == 0);
    for (int b = 0; b < n; ++b) {
      CHECK(router.distance(a, b) == router.distance(b, a));
      for (int c = 0; c < n; c += 5) CHECK(router.distance(a, c) <= router.distance(a, b) + router.distance(b, c));
    }
  }
  // (0,0) and (0,5) on L=6 are one step apart through the wrap.
  CHECK(router.distance(0, 5 * 6) == 1);
  CHECK_THROWS_AS(router.distance(0, n), std::invalid_argument);
}

TEST_CASE("tied routes appear only at half-length legs") {
  const auto lat = build_toric(4);
  const PathRouter router(lat);
  CHECK(router.tied_routes({0, 2, 0}) == 1);
  CHECK(router.tied_routes({0, 8, 0}) == 2);
  CHECK(router.tied_routes({0, 10, 0}) == 3);
  CHECK(router.tied_routes({0, 1, 0}) == 0);
  // Reversing a half-length leg changes the homology class of the path.
  CHECK(router.path_parity({0, 2, 0}) != router.path_parity({0, 2, 1}));
  CHECK(router.path_length({0, 2, 0}) == router.path_length({0, 2, 1}));
}

TEST_CASE("path parity equals logical parity of the path") {
  for (auto lat : {build_toric(4), build_toric(5), build_rotated(5)}) {
    const PathRouter router(lat);
    for (int a = 0; a < lat.num_stabilizers(); ++a) {
      for (int b = a + 1; b < lat.num_stabilizers(); ++b) {
        if (lat.stabilizer(a).pauli_type != lat.stabilizer(b).pauli_type) continue;
        const MatchedPair pair{a, b, 0};
        const auto err = router.error_type(class_of(lat.stabilizer(a).pauli_type));
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(lat.num_qubits()), 0);
        for (int q : router.path(pair)) bits[static_cast<std::size_t>(q)] ^= 1;
        CHECK(router.path_parity(pair) == logical_parity(bits, err, lat));
      }
    }
  }
}

TEST_CASE("rotated paths and boundary paths") {
  for (int L : {3, 5, 7}) {
    const auto lat = build_rotated(L);
    const PathRouter router(lat);
    for (int a = 0; a < lat.num_stabilizers(); ++a) {
      const auto err = router.error_type(class_of(lat.stabilizer(a).pauli_type));
      for (std::uint8_t route = 0; route < 2; ++route) {
        const MatchedPair pair{a, kBoundary, route};
        const auto path = router.path(pair);
        const auto s = flip_syndrome(lat, err, path);
        CHECK(s.count() == 1);
        CHECK(s.bits[static_cast<std::size_t>(a)] == 1);
        CHECK(router.path_length(pair) == static_cast<int>(path.size()));
      }
      CHECK(router.boundary_distance(a) <= router.boundary_distance(a, 0));
      CHECK(router.boundary_distance(a) <= router.boundary_distance(a, 1));
      // Opposite boundaries differ by a logical.
      CHECK(router.path_parity({a, kBoundary, 0}) != router.path_parity({a, kBoundary, 1}));
      for (int b = a + 1; b < lat.num_stabilizers(); ++b) {
        if (lat.stabilizer(a).pauli_type != lat.stabilizer(b).pauli_type) continue;
        const auto path = router.path({a, b, 0});
        const auto s = flip_syndrome(lat, err, path);
        CHECK(s.count() == 2);
        CHECK(s.bits[static_cast<std::size_t>(b)] == 1);
        // Each qubit step is a diagonal move of two units per axis.
        const auto& sa = lat.stabilizer(a).coord;
        const auto& sb = lat.stabilizer(b).coord;
        CHECK(router.distance(a, b) * 2 == std::max(std::abs(sa.x - sb.x), std::abs(sa.y - sb.y)));
        CHECK(router.distance(a, b) == router.distance(b, a));
      }
    }
  }
}

TEST_CASE("correction combines both classes") {
  const auto lat = build_toric(4);
  const PathRouter router(lat);
  SyndromeMatching m;
  m.classes[0].push_back({0, 5, 0});
  m.classes[1].push_back({16, 30, 0});
  const auto c = router.correction(m);
  const auto s = extract_syndrome(c, lat);
  CHECK(s.count() == 4);
  CHECK(s.bits[0] == 1);
  CHECK(s.bits[5] == 1);
  CHECK(s.bits[16] == 1);
  CHECK(s.bits[30] == 1);
}

TEST_CASE("canonical pair order") {
  SyndromeMatching m;
  m.classes[0] = {{9, 3, 0}, {4, kBoundary, 1}, {1, 2, 0}};
  m.canonicalize();
  CHECK(m.classes[0][0] == MatchedPair{1, 2, 0});
  CHECK(m.classes[0][1] == MatchedPair{3, 9, 0});
  CHECK(m.classes[0][2] == MatchedPair{4, kBoundary, 1});
}
