#include "rmspt/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rmspt/rng.hpp"

namespace rmspt {
namespace {

using Vec = VectorXc;

Vec multiply(const HamiltonianOperator& op, const Vec& v) {
    Vec out(v.size());
    op.apply(std::span<const Complex>(v.data(), v.size()), std::span<Complex>(out.data(), out.size()));
    return out;
}

struct RitzPair {
    double value;
    Eigen::VectorXd vector;
};

RitzPair lowest_ritz(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub(i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

} // namespace

double residual_norm(const HamiltonianOperator& op, const StateVector& state, double energy) {
    std::vector<Complex> hv(state.dimension());
    op.apply(state.amplitudes(), hv);
    double sum = 0.0;
    for (std::size_t s = 0; s < hv.size(); ++s) sum += std::norm(hv[s] - energy * state[s]);
    return std::sqrt(sum);
}

EigenResult ground_state(const HamiltonianSpec& spec, const LanczosOptions& options) {
    spec.validate();
    return ground_state(HamiltonianOperator(spec), options);
}

EigenResult ground_state(const HamiltonianOperator& op, const LanczosOptions& options) {
    if (op.num_sites() > kMaxHamiltonianSites) throw std::invalid_argument("ground_state: N too large");
    if (!(options.tol > 0.0)) throw std::invalid_argument("ground_state: tol must be positive");
    if (options.max_iter < 1 || options.krylov_dim < 2) throw std::invalid_argument("ground_state: bad iteration limits");

    const auto dim = static_cast<Eigen::Index>(op.dimension());
    const int m_max = static_cast<int>(std::min<Eigen::Index>(options.krylov_dim, dim));

    Rng rng = make_stream(options.seed, StreamTag::Lanczos);
    const StateVector start = StateVector::random(op.num_sites(), rng);
    Vec x = Eigen::Map<const Vec>(start.amplitudes().data(), dim);

    int matvecs = 0;
    int restarts = 0;
    double last_residual = INFINITY;
    std::vector<Vec> basis;
    basis.reserve(m_max);

    while (true) {
        basis.clear();
        basis.push_back(x);
        std::vector<double> alpha;
        std::vector<double> beta;
        RitzPair ritz{0.0, {}};

        for (int j = 0; j < m_max; ++j) {
            Vec w = multiply(op, basis[j]);
            ++matvecs;
            alpha.push_back(basis[j].dot(w).real());
            // Classical Gram-Schmidt against the whole basis, done twice.
            for (int pass = 0; pass < 2; ++pass) {
                for (const Vec& v : basis) w -= v.dot(w) * v;
            }
            const double b = w.norm();
            ritz = lowest_ritz(alpha, beta);
            const double estimate = b * std::abs(ritz.vector(j));
            const bool invariant = b < 1e-13 * std::max(1.0, std::abs(ritz.value));
            if (invariant || estimate < 0.1 * options.tol || j + 1 == m_max || matvecs >= options.max_iter) break;
            beta.push_back(b);
            basis.push_back(w / b);
        }

        Vec next = Vec::Zero(dim);
        for (std::size_t i = 0; i < basis.size(); ++i) next += ritz.vector(static_cast<Eigen::Index>(i)) * basis[i];
        next.normalize();
        x = next;

        const Vec hx = multiply(op, x);
        ++matvecs;
        const double energy = x.dot(hx).real();
        last_residual = (hx - energy * x).norm();
        if (last_residual <= options.tol) {
            std::vector<Complex> amps(x.data(), x.data() + dim);
            return EigenResult{energy, StateVector(op.num_sites(), std::move(amps)), last_residual, matvecs, restarts};
        }
        if (matvecs >= options.max_iter) {
            throw ConvergenceError("Lanczos did not converge: residual " + std::to_string(last_residual) + " after " +
                                       std::to_string(matvecs) + " matvecs",
                                   last_residual);
        }
        ++restarts;
    }
}

} // namespace rmspt
