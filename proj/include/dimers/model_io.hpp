#pragma once

// JSON debug dumps of the Fock basis and of assembled Hamiltonians.
//
// Basis:       {"schema": "dimers.basis/1", "N": N, "dimension": D,
//               "modes": ["L+","L-","R+","R-"], "states": [[nL+, nL-, nR+, nR-], ...],
//               "blocks": [{"n_left": k, "offset": o, "size": s, "d_left": a, "d_right": b}, ...]}
// Hamiltonian: {"schema": "dimers.hamiltonian/1", "N": N, "dimension": D, "nnz": K,
//               "triplets": [[row, col, value], ...]}   (row-major order, both triangles)

#include <json.hpp>

#include "dimers/model.hpp"

namespace dimers {

nlohmann::json basis_to_json(const FockBasis& basis);
nlohmann::json hamiltonian_to_json(const HamiltonianMatrix& H);
nlohmann::json params_to_json(const ModelParams& params);

}  // namespace dimers
