#include "rmspt/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace rmspt {
namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

double bond_coupling(const HamiltonianSpec& spec, int bond) {
    return bond % 2 == 0 ? spec.exchange : spec.exchange_prime;
}

/// Kronecker product over all sites, site N-1 leftmost (highest bit).
MatrixXc kron_chain(const std::vector<Matrix2c>& per_site) {
    MatrixXc out = MatrixXc::Identity(1, 1);
    for (int k = static_cast<int>(per_site.size()) - 1; k >= 0; --k) {
        MatrixXc next = Eigen::kroneckerProduct(out, per_site[k]).eval();
        out.swap(next);
    }
    return out;
}

MatrixXc site_product(int n, std::initializer_list<std::pair<int, Matrix2c>> ops) {
    std::vector<Matrix2c> per_site(n, Matrix2c::Identity());
    for (const auto& [site, op] : ops) per_site[site] = op;
    return kron_chain(per_site);
}

} // namespace

void HamiltonianSpec::validate() const {
    if (num_sites < 2 || num_sites % 2 != 0) {
        throw std::invalid_argument("N must be an even integer >= 2 (got " + std::to_string(num_sites) + ")");
    }
    if (num_sites > kMaxHamiltonianSites) {
        throw std::invalid_argument("N must be <= " + std::to_string(kMaxHamiltonianSites));
    }
    require_finite(exchange, "J");
    require_finite(exchange_prime, "J_prime");
    require_finite(anisotropy, "delta");
    require_finite(breaking, "B");
    require_finite(neel_field, "Delta");
    require_finite(pinning, "delta_p");
    require_finite(neel_weight, "neel_weight");
    if (neel_weight < 0.0 || neel_weight > 1.0) throw std::invalid_argument("neel_weight must lie in [0, 1]");
}

std::vector<double> field_coefficients(const HamiltonianSpec& spec) {
    std::vector<double> field(spec.num_sites, 0.0);
    for (int k = 0; k < spec.num_sites; ++k) {
        field[k] = spec.neel_weight * spec.neel_field * (k % 2 == 0 ? 1.0 : -1.0);
    }
    field[0] += spec.pinning;
    return field;
}

kernels::ChainTerms compile_terms(const HamiltonianSpec& spec) {
    spec.validate();
    kernels::ChainTerms t;
    t.num_sites = spec.num_sites;
    const int bonds = spec.num_sites - 1;
    t.flip.resize(bonds);
    t.zz.resize(bonds);
    t.twist.assign(bonds, spec.breaking);
    for (int j = 0; j < bonds; ++j) {
        const double c = bond_coupling(spec, j);
        // (c/2)(sx sx + sy sy) = c (s+ s- + s- s+): amplitude c between |01> and |10>.
        t.flip[j] = c;
        t.zz[j] = 0.5 * c * spec.anisotropy;
    }
    t.field = field_coefficients(spec);
    return t;
}

HamiltonianOperator::HamiltonianOperator(const HamiltonianSpec& spec) : terms_(compile_terms(spec)) {}

void HamiltonianOperator::apply(std::span<const Complex> in, std::span<Complex> out) const {
    kernels::parallel::chain_matvec(terms_, in, out);
}

StateVector HamiltonianOperator::apply(const StateVector& state) const {
    if (state.num_sites() != terms_.num_sites) throw std::invalid_argument("state dimension does not match 2^N");
    std::vector<Complex> out(state.dimension());
    apply(state.amplitudes(), out);
    return StateVector(state.num_sites(), std::move(out));
}

double HamiltonianOperator::expectation(const StateVector& state) const {
    return inner_product(state, apply(state)).real();
}

StateVector matvec(const HamiltonianSpec& spec, const StateVector& state) {
    return HamiltonianOperator(spec).apply(state);
}

Matrix4c bond_matrix(const HamiltonianSpec& spec, int bond) {
    const double c = bond_coupling(spec, bond);
    // kron(A, B) puts A on the high bit, i.e. site j+1.
    auto two = [](const Matrix2c& on_j, const Matrix2c& on_k) -> Matrix4c {
        return Eigen::kroneckerProduct(on_k, on_j).eval();
    };
    Matrix4c h = 0.5 * c *
                 (two(pauli::x(), pauli::x()) + two(pauli::y(), pauli::y()) +
                  spec.anisotropy * two(pauli::z(), pauli::z()));
    h += spec.breaking * (two(pauli::x(), pauli::z()) - two(pauli::z(), pauli::x()));
    return h;
}

MatrixXc dense_matrix(const HamiltonianSpec& spec) {
    spec.validate();
    const int n = spec.num_sites;
    if (n > kMaxDenseSites) throw std::invalid_argument("dense_matrix: N must be <= " + std::to_string(kMaxDenseSites));
    const std::size_t dim = std::size_t{1} << n;
    MatrixXc h = MatrixXc::Zero(dim, dim);
    for (int j = 0; j + 1 < n; ++j) {
        const double c = bond_coupling(spec, j);
        h += 0.5 * c * site_product(n, {{j, pauli::x()}, {j + 1, pauli::x()}});
        h += 0.5 * c * site_product(n, {{j, pauli::y()}, {j + 1, pauli::y()}});
        h += 0.5 * c * spec.anisotropy * site_product(n, {{j, pauli::z()}, {j + 1, pauli::z()}});
        if (spec.breaking != 0.0) {
            h += spec.breaking * site_product(n, {{j, pauli::x()}, {j + 1, pauli::z()}});
            h -= spec.breaking * site_product(n, {{j, pauli::z()}, {j + 1, pauli::x()}});
        }
    }
    for (int k = 0; k < n; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        h += spec.neel_weight * spec.neel_field * sign * site_product(n, {{k, pauli::z()}});
    }
    h += spec.pinning * site_product(n, {{0, pauli::z()}});
    return h;
}

StateVector neel_state(int num_sites) {
    BasisIndex index = 0;
    for (int k = 0; k < num_sites; k += 2) index |= BasisIndex{1} << k;
    return StateVector::basis_state(num_sites, index);
}

StateVector reflect_chain(const StateVector& state) {
    std::vector<Complex> amps(state.dimension());
    for (std::size_t s = 0; s < state.dimension(); ++s) {
        amps[reverse_bits(s, state.num_sites())] = state[s];
    }
    return StateVector(state.num_sites(), std::move(amps));
}

StateVector total_sz(const StateVector& state) {
    std::vector<Complex> amps(state.dimension());
    for (std::size_t s = 0; s < state.dimension(); ++s) {
        int m = 0;
        for (int k = 0; k < state.num_sites(); ++k) m += spin_z((s >> k) & 1U);
        amps[s] = static_cast<double>(m) * state[s];
    }
    return StateVector(state.num_sites(), std::move(amps));
}

} // namespace rmspt
