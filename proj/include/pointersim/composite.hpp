#pragma once

#include <complex>
#include <cstddef>

#include "pointersim/propagator.hpp"
#include "pointersim/types.hpp"

namespace psim {

// Spin-block structure of the composite density matrix. The four apparatus
// blocks are outer products of the two branch wavefunctions; they are kept in
// factored form and evaluated on demand, which makes the Hermiticity relations
// between blocks hold by construction.
struct CompositeDensity {
  SpinAmplitudes amplitudes;
  GridSpec grid;
  std::vector<cplx> up, down;

  static CompositeDensity from_spinor(const SpinorField& f, const SpinAmplitudes& amps) {
    amps.validate();
    return {amps, f.grid, f.up, f.down};
  }

  const std::vector<cplx>& branch(Spin s) const { return s == Spin::Up ? up : down; }

  // Amplitude-stripped block entry rho_{s s'}(z_i, z_j).
  cplx block(Spin s, Spin sp, std::size_t i, std::size_t j) const {
    return branch(s)[i] * std::conj(branch(sp)[j]);
  }

  // Spin weight multiplying a block: |a|^2, |b|^2, a b* or a* b.
  cplx spin_weight(Spin s, Spin sp) const {
    const cplx wa = (s == Spin::Up) ? amplitudes.a : amplitudes.b;
    const cplx wb = (sp == Spin::Up) ? amplitudes.a : amplitudes.b;
    return wa * std::conj(wb);
  }

  cplx weighted_block(Spin s, Spin sp, std::size_t i, std::size_t j) const {
    return spin_weight(s, sp) * block(s, sp, i, j);
  }

  // Trace of a weighted diagonal block; constant in time under the flows.
  double block_trace(Spin s) const {
    double acc = 0.0;
    for (const cplx& v : branch(s)) acc += std::norm(v);
    return std::norm(s == Spin::Up ? amplitudes.a : amplitudes.b) * acc * grid.dz();
  }
};

}  // namespace psim
