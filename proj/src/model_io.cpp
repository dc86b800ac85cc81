#include "dimers/model_io.hpp"

namespace dimers {

nlohmann::json basis_to_json(const FockBasis& basis) {
  nlohmann::json states = nlohmann::json::array();
  for (const FockState& s : basis.states()) states.push_back(s.n);
  nlohmann::json blocks = nlohmann::json::array();
  for (int nl = 0; nl <= basis.N(); ++nl) {
    const BlockRange& b = basis.block(nl);
    blocks.push_back({{"n_left", nl},
                      {"offset", b.offset},
                      {"size", b.size},
                      {"d_left", b.d_left},
                      {"d_right", b.d_right}});
  }
  return {{"schema", "dimers.basis/1"},
          {"N", basis.N()},
          {"dimension", basis.size()},
          {"modes", {"L+", "L-", "R+", "R-"}},
          {"states", std::move(states)},
          {"blocks", std::move(blocks)}};
}

nlohmann::json hamiltonian_to_json(const HamiltonianMatrix& H) {
  // Row-major traversal of a column-major matrix: transpose is exact for a symmetric H,
  // but traverse explicitly so the dump is correct for any input.
  const Eigen::SparseMatrix<double, Eigen::RowMajor> rows(H.matrix);
  nlohmann::json triplets = nlohmann::json::array();
  for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
      triplets.push_back({it.row(), it.col(), it.value()});
    }
  }
  return {{"schema", "dimers.hamiltonian/1"},
          {"N", H.N},
          {"dimension", H.size()},
          {"nnz", rows.nonZeros()},
          {"triplets", std::move(triplets)}};
}

nlohmann::json params_to_json(const ModelParams& params) {
  return {{"N", params.N()},     {"Omega", params.Omega()}, {"U", params.U()},
          {"omega", params.omega()}, {"w", params.w()},     {"u", params.u()}};
}

}  // namespace dimers
