#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "rmspt/hamiltonian.hpp"
#include "rmspt/spin_core.hpp"

namespace rmspt {

struct EigenResult {
    double energy = 0.0;
    StateVector state{1};
    double residual_norm = 0.0;
    int iterations = 0;  ///< total matvecs
    int restarts = 0;
};

struct LanczosOptions {
    double tol = 1e-10;
    int max_iter = 5000;
    int krylov_dim = 200;
    std::uint64_t seed = 1;
};

/// Thrown when max_iter matvecs pass without reaching the residual tolerance.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

  private:
    double residual_;
};

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
/// Deterministic for a given seed and independent of the thread count.
EigenResult ground_state(const HamiltonianSpec& spec, const LanczosOptions& options = {});
EigenResult ground_state(const HamiltonianOperator& op, const LanczosOptions& options = {});

/// ||H psi - E psi||
double residual_norm(const HamiltonianOperator& op, const StateVector& state, double energy);

} // namespace rmspt
