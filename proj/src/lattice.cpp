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

#include "nmwpm/lattice.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace nmwpm {

std::string_view to_string(CodeKind kind) {
  return kind == CodeKind::Toric ? "toric" : "rotated";
}

CodeKind parse_code_kind(std::string_view text) {
  if (text == "toric") return CodeKind::Toric;
  if (text == "rotated" || text == "rotated_surface") return CodeKind::RotatedSurface;
  throw std::invalid_argument("unknown code kind: " + std::string(text));
}

std::vector<const LogicalOperator*> CodeLattice::logicals_of(PauliType type) const {
  std::vector<const LogicalOperator*> out;
  for (const auto& op : logical_ops_) {
    if (op.pauli_type == type) out.push_back(&op);
  }
  return out;
}

void CodeLattice::finalize() {
  qubit_x_stabs_.assign(static_cast<std::size_t>(num_qubits_), {});
  qubit_z_stabs_.assign(static_cast<std::size_t>(num_qubits_), {});
  num_x_ = 0;
  for (auto& s : stabilizers_) {
    std::sort(s.support.begin(), s.support.end());
    auto& table = s.pauli_type == PauliType::X ? qubit_x_stabs_ : qubit_z_stabs_;
    for (int q : s.support) table[static_cast<std::size_t>(q)].push_back(s.index);
    if (s.pauli_type == PauliType::X) ++num_x_;
  }
  for (auto& op : logical_ops_) std::sort(op.support.begin(), op.support.end());
}

CodeLattice build_toric(int distance) {
  if (distance < 2) throw std::invalid_argument("toric code distance must be >= 2");
  const int L = distance;
  auto wrap = [L](int v) { return ((v % L) + L) % L; };
  auto h = [&](int x, int y) { return wrap(y) * L + wrap(x); };
  auto v = [&](int x, int y) { return L * L + wrap(y) * L + wrap(x); };

  CodeLattice lat;
  lat.kind_ = CodeKind::Toric;
  lat.distance_ = L;
  lat.num_qubits_ = 2 * L * L;
  lat.center_ = {L / 2.0, L / 2.0};
  lat.stabilizers_.reserve(static_cast<std::size_t>(2 * L * L));

  // Vertex operators: X on the four edges meeting at (x, y).
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      Stabilizer s;
      s.index = static_cast<int>(lat.stabilizers_.size());
      s.pauli_type = PauliType::X;
      s.coord = {x, y};
      s.support = {h(x, y), h(x - 1, y), v(x, y), v(x, y - 1)};
      lat.stabilizers_.push_back(std::move(s));
    }
  }
  // Plaquette operators: Z on the four edges bounding the face at (x, y).
  for (int y = 0; y < L; ++y) {
    for (int x = 0; x < L; ++x) {
      Stabilizer s;
      s.index = static_cast<int>(lat.stabilizers_.size());
      s.pauli_type = PauliType::Z;
      s.coord = {x, y};
      s.support = {h(x, y), h(x, y + 1), v(x, y), v(x + 1, y)};
      lat.stabilizers_.push_back(std::move(s));
    }
  }

  LogicalOperator x1{PauliType::X, {}}, x2{PauliType::X, {}};
  LogicalOperator z1{PauliType::Z, {}}, z2{PauliType::Z, {}};
  for (int i = 0; i < L; ++i) {
    x1.support.push_back(v(i, 0));  // dual loop winding along x
    x2.support.push_back(h(0, i));  // dual loop winding along y
    z1.support.push_back(h(i, 0));  // primal loop winding along x
    z2.support.push_back(v(0, i));  // primal loop winding along y
  }
  lat.logical_ops_ = {x1, x2, z1, z2};
  lat.finalize();
  return lat;
}

CodeLattice build_rotated(int distance) {
  if (distance < 3 || distance % 2 == 0) {
    throw std::invalid_argument("rotated surface code distance must be odd and >= 3");
  }
  const int L = distance;
  CodeLattice lat;
  lat.kind_ = CodeKind::RotatedSurface;
  lat.distance_ = L;
  lat.num_qubits_ = L * L;
  lat.center_ = {static_cast<double>(L), static_cast<double>(L)};
  lat.qubit_coords_.resize(static_cast<std::size_t>(L * L));
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) lat.qubit_coords_[static_cast<std::size_t>(i * L + j)] = {2 * j + 1, 2 * i + 1};
  }

  // Plaquette (i, j) sits between rows i, i+1 and columns j, j+1, for
  // i, j in [-1, L-1]. Checkerboard: X when i + j is even.
  struct Raw {
    PauliType type;
    Coord coord;
    std::vector<int> support;
  };
  std::vector<Raw> raw;
  for (int i = -1; i < L; ++i) {
    for (int j = -1; j < L; ++j) {
      const PauliType type = ((i + j) % 2 == 0) ? PauliType::X : PauliType::Z;
      const bool top = i == -1, bottom = i == L - 1, left = j == -1, right = j == L - 1;
      if ((top || bottom) && (left || right)) continue;
      if ((top || bottom) && type != PauliType::X) continue;
      if ((left || right) && type != PauliType::Z) continue;
      std::vector<int> support;
      for (int di = 0; di <= 1; ++di) {
        for (int dj = 0; dj <= 1; ++dj) {
          const int r = i + di, c = j + dj;
          if (r >= 0 && r < L && c >= 0 && c < L) support.push_back(r * L + c);
        }
      }
      raw.push_back({type, {2 * j + 2, 2 * i + 2}, std::move(support)});
    }
  }
  std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    return std::tie(a.type, a.coord.y, a.coord.x) < std::tie(b.type, b.coord.y, b.coord.x);
  });
  for (auto& r : raw) {
    Stabilizer s;
    s.index = static_cast<int>(lat.stabilizers_.size());
    s.pauli_type = r.type;
    s.coord = r.coord;
    s.support = std::move(r.support);
    lat.stabilizers_.push_back(std::move(s));
  }

  LogicalOperator lx{PauliType::X, {}}, lz{PauliType::Z, {}};
  for (int k = 0; k < L; ++k) {
    lx.support.push_back(k * L);  // column 0, top to bottom
    lz.support.push_back(k);      // row 0, left to right
  }
  lat.logical_ops_ = {lx, lz};
  lat.finalize();
  return lat;
}

CodeLattice build_lattice(CodeKind kind, int distance) {
  return kind == CodeKind::Toric ? build_toric(distance) : build_rotated(distance);
}

bool commutes(PauliType type_a, const std::vector<int>& support_a, PauliType type_b,
              const std::vector<int>& support_b) {
  if (type_a == type_b) return true;
  std::size_t i = 0, j = 0, overlap = 0;
  while (i < support_a.size() && j < support_b.size()) {
    if (support_a[i] < support_b[j]) {
      ++i;
    } else if (support_b[j] < support_a[i]) {
      ++j;
    } else {
      ++overlap;
      ++i;
      ++j;
    }
  }
  return overlap % 2 == 0;
}

}  // namespace nmwpm
