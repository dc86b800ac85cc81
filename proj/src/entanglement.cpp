#include "dimers/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dimers/csv.hpp"
#include "dimers/errors.hpp"

namespace dimers {

namespace {

void check_state(const FockBasis& basis, const Eigen::VectorXd& c) {
  if (static_cast<std::size_t>(c.size()) != basis.size()) {
    throw std::invalid_argument("state dimension does not match the basis");
  }
  const double n2 = c.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-6) {
    throw std::invalid_argument("state not normalized (norm^2 " + std::to_string(n2) + ")");
  }
}

Eigen::Map<const RowMatrix> rectangle(const FockBasis& basis, const Eigen::VectorXd& c, int nl) {
  const BlockRange& b = basis.block(nl);
  return Eigen::Map<const RowMatrix>(c.data() + b.offset, b.d_left, b.d_right);
}

ReducedDensityBlocks make_blocks(const FockBasis& basis, const Eigen::VectorXd& c, bool left) {
  check_state(basis, c);
  ReducedDensityBlocks out;
  out.N = basis.N();
  out.blocks.resize(basis.N() + 1);
  out.weights.resize(basis.N() + 1);
  for (int nl = 0; nl <= basis.N(); ++nl) {
    const auto C = rectangle(basis, c, nl);
    Eigen::MatrixXd rho = left ? Eigen::MatrixXd(C * C.transpose()) : Eigen::MatrixXd(C.transpose() * C);
    rho = 0.5 * (rho + rho.transpose()).eval();
    out.weights[nl] = rho.trace();
    out.blocks[nl] = std::move(rho);
  }
  return out;
}

EntanglementBlock finish_block(int nl, double p, std::vector<double> eigenvalues, double cutoff) {
  EntanglementBlock b;
  b.n_left = nl;
  b.p = p;
  std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
  for (double x : eigenvalues) {
    if (x < -1e-10) {
      throw NumericError("reduced density block n_L=" + std::to_string(nl) + " has eigenvalue " + std::to_string(x));
    }
    if (x <= cutoff) continue;
    b.lambda.push_back(x);
    b.xi.push_back(-std::log(x));
    b.xi_tilde.push_back(-std::log(x) + std::log(p));
    b.S -= x * std::log(x);
    const double q = x / p;
    b.S_tilde -= q * std::log(q);
  }
  return b;
}

}  // namespace

ReducedDensityBlocks reduced_density_blocks(const FockBasis& basis, const Eigen::VectorXd& coefficients) {
  return make_blocks(basis, coefficients, true);
}

ReducedDensityBlocks reduced_density_blocks_right(const FockBasis& basis, const Eigen::VectorXd& coefficients) {
  return make_blocks(basis, coefficients, false);
}

EntanglementSpectrum entanglement_spectrum(const ReducedDensityBlocks& blocks, double cutoff) {
  EntanglementSpectrum out;
  out.N = blocks.N;
  out.blocks.reserve(blocks.blocks.size());
  for (std::size_t nl = 0; nl < blocks.blocks.size(); ++nl) {
    const Eigen::MatrixXd& rho = blocks.blocks[nl];
    std::vector<double> ev;
    if (rho.size() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on a reduced density block");
      ev.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    }
    out.blocks.push_back(finish_block(static_cast<int>(nl), blocks.weights[nl], std::move(ev), cutoff));
  }
  return out;
}

EntanglementSpectrum entanglement_spectrum_svd(const FockBasis& basis, const Eigen::VectorXd& coefficients,
                                               double cutoff) {
  check_state(basis, coefficients);
  EntanglementSpectrum out;
  out.N = basis.N();
  for (int nl = 0; nl <= basis.N(); ++nl) {
    const Eigen::MatrixXd C = rectangle(basis, coefficients, nl);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
    std::vector<double> ev;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) ev.push_back(std::pow(svd.singularValues()[k], 2));
    out.blocks.push_back(finish_block(nl, C.squaredNorm(), std::move(ev), cutoff));
  }
  return out;
}

EntropySummary total_entropy(const EntanglementSpectrum& spectrum) {
  EntropySummary s;
  s.S_max = std::log(static_cast<double>(schmidt_capacity(spectrum.N)));
  for (const auto& b : spectrum.blocks) {
    s.p.push_back(b.p);
    s.S_block.push_back(b.S);
    s.S_tilde.push_back(b.S_tilde);
    s.S += b.S;
  }
  return s;
}

double purity(const EntanglementSpectrum& spectrum) {
  double sum = 0.0;
  for (const auto& b : spectrum.blocks)
    for (double x : b.lambda) sum += x * x;
  return sum;
}

void write_spectrum_csv(std::ostream& os, const std::vector<std::pair<std::size_t, EntanglementSpectrum>>& spectra) {
  CsvWriter w(os, "entanglement_spectrum", 1, {"state", "n_L", "i", "lambda", "xi", "xi_tilde"});
  for (const auto& [state, spec] : spectra)
    for (const auto& b : spec.blocks)
      for (std::size_t i = 0; i < b.lambda.size(); ++i) {
        w << state << b.n_left << i << b.lambda[i] << b.xi[i] << b.xi_tilde[i];
        w.end_row();
      }
}

void write_entropy_blocks_csv(std::ostream& os, const std::vector<std::pair<std::size_t, EntropySummary>>& rows) {
  CsvWriter w(os, "entropy_blocks", 1, {"state", "n_L", "p", "S_nL", "S_tilde_nL"});
  for (const auto& [state, s] : rows)
    for (std::size_t nl = 0; nl < s.p.size(); ++nl) {
      w << state << nl << s.p[nl] << s.S_block[nl] << s.S_tilde[nl];
      w.end_row();
    }
}

}  // namespace dimers
