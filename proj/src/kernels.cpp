#include "rmspt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rmspt::kernels {
namespace {

// Work unit for reductions; fixed so partial sums never depend on threads.
constexpr std::int64_t kChunk = std::int64_t{1} << 12;

void check_terms(const ChainTerms& terms, std::size_t dim) {
    if (terms.num_sites < 1) throw std::invalid_argument("chain needs at least one site");
    const auto bonds = static_cast<std::size_t>(std::max(terms.num_sites - 1, 0));
    if (terms.flip.size() != bonds || terms.zz.size() != bonds || terms.twist.size() != bonds ||
        terms.field.size() != static_cast<std::size_t>(terms.num_sites)) {
        throw std::invalid_argument("chain terms have inconsistent lengths");
    }
    if (dim != (std::size_t{1} << terms.num_sites)) {
        throw std::invalid_argument("state dimension does not match chain length");
    }
}

} // namespace

// ---------------------------------------------------------------- serial --

namespace serial {

void chain_matvec(const ChainTerms& terms, ConstAmplitudes in, Amplitudes out) {
    check_terms(terms, in.size());
    if (out.size() != in.size()) throw std::invalid_argument("output size mismatch");
    std::fill(out.begin(), out.end(), Complex{});
    const BasisIndex dim = in.size();
    // Term by term: every operator scatters its image into `out`.
    for (int j = 0; j + 1 < terms.num_sites; ++j) {
        const BasisIndex bj = BasisIndex{1} << j;
        const BasisIndex bk = BasisIndex{1} << (j + 1);
        for (BasisIndex s = 0; s < dim; ++s) {
            const int zj = spin_z(s & bj ? 1 : 0);
            const int zk = spin_z(s & bk ? 1 : 0);
            if (zj != zk) out[s ^ (bj | bk)] += terms.flip[j] * in[s];
            out[s] += terms.zz[j] * zj * zk * in[s];
            if (terms.twist[j] != 0.0) {
                out[s ^ bj] += terms.twist[j] * zk * in[s];
                out[s ^ bk] -= terms.twist[j] * zj * in[s];
            }
        }
    }
    for (int k = 0; k < terms.num_sites; ++k) {
        for (BasisIndex s = 0; s < dim; ++s) {
            out[s] += terms.field[k] * spin_z((s >> k) & 1U) * in[s];
        }
    }
}

void apply_one_site(Amplitudes amps, int site, const Matrix2c& u) {
    const BasisIndex bit = BasisIndex{1} << site;
    for (BasisIndex s = 0; s < amps.size(); ++s) {
        if (s & bit) continue;
        const Complex a0 = amps[s];
        const Complex a1 = amps[s | bit];
        amps[s] = u(0, 0) * a0 + u(0, 1) * a1;
        amps[s | bit] = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void apply_two_site(Amplitudes amps, int site, const Matrix4c& u) {
    const BasisIndex b0 = BasisIndex{1} << site;
    const BasisIndex b1 = BasisIndex{1} << (site + 1);
    for (BasisIndex s = 0; s < amps.size(); ++s) {
        if (s & (b0 | b1)) continue;
        const BasisIndex idx[4] = {s, s | b0, s | b1, s | b0 | b1};
        Complex a[4];
        for (int r = 0; r < 4; ++r) a[r] = amps[idx[r]];
        for (int r = 0; r < 4; ++r) {
            Complex acc{};
            for (int c = 0; c < 4; ++c) acc += u(r, c) * a[c];
            amps[idx[r]] = acc;
        }
    }
}

void diagonal_phase(Amplitudes amps, std::span<const double> diag, double scale) {
    if (diag.size() != amps.size()) throw std::invalid_argument("diagonal size mismatch");
    for (std::size_t s = 0; s < amps.size(); ++s) {
        amps[s] *= std::polar(1.0, -scale * diag[s]);
    }
}

std::vector<double> marginal_probabilities(ConstAmplitudes amps, std::span<const int> sites) {
    std::vector<double> probs(std::size_t{1} << sites.size(), 0.0);
    for (BasisIndex s = 0; s < amps.size(); ++s) {
        probs[extract_bits(s, sites)] += std::norm(amps[s]);
    }
    return probs;
}

double factorized_form(std::span<const double> p, std::span<const Eigen::Matrix2d> weights,
                       std::span<const double> q) {
    const std::size_t dim = std::size_t{1} << weights.size();
    if (p.size() != dim || q.size() != dim) throw std::invalid_argument("weight/vector size mismatch");
    double total = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        if (p[s] == 0.0) continue;
        for (std::size_t t = 0; t < dim; ++t) {
            double w = 1.0;
            for (std::size_t k = 0; k < weights.size(); ++k) {
                w *= weights[k]((s >> k) & 1U, (t >> k) & 1U);
            }
            total += p[s] * w * q[t];
        }
    }
    return total;
}

} // namespace serial

// -------------------------------------------------------------- parallel --

namespace parallel {

void chain_matvec(const ChainTerms& terms, ConstAmplitudes in, Amplitudes out) {
    check_terms(terms, in.size());
    if (out.size() != in.size()) throw std::invalid_argument("output size mismatch");
    const auto dim = static_cast<std::int64_t>(in.size());
    const int n = terms.num_sites;
    const Complex* x = in.data();
    Complex* y = out.data();
    // One gather pass per bond, each also adding the diagonal terms of its
    // left site. Every output amplitude is owned by one iteration and sums
    // its terms in a fixed order, so the result ignores the thread count.
#pragma omp parallel
    {
        const double last_field = terms.field[n - 1];
        const BasisIndex last_bit = BasisIndex{1} << (n - 1);
#pragma omp for schedule(static)
        for (std::int64_t row = 0; row < dim; ++row) {
            const auto s = static_cast<BasisIndex>(row);
            y[s] = last_field * spin_z(s & last_bit ? 1 : 0) * x[s];
        }
        for (int j = 0; j + 1 < n; ++j) {
            const BasisIndex bj = BasisIndex{1} << j;
            const BasisIndex bk = BasisIndex{1} << (j + 1);
            const double flip = terms.flip[j];
            const double zz = terms.zz[j];
            const double field = terms.field[j];
            const double twist = terms.twist[j];
#pragma omp for schedule(static)
            for (std::int64_t row = 0; row < dim; ++row) {
                const auto s = static_cast<BasisIndex>(row);
                const int zj = spin_z(s & bj ? 1 : 0);
                const int zk = spin_z(s & bk ? 1 : 0);
                Complex acc = (zz * zj * zk + field * zj) * x[s];
                if (zj != zk) acc += flip * x[s ^ (bj | bk)];
                if (twist != 0.0) {
                    acc += twist * zk * x[s ^ bj];
                    acc -= twist * zj * x[s ^ bk];
                }
                y[s] += acc;
            }
        }
    }
}

void apply_one_site(Amplitudes amps, int site, const Matrix2c& u) {
    const BasisIndex bit = BasisIndex{1} << site;
    const auto half = static_cast<std::int64_t>(amps.size() / 2);
    const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < half; ++r) {
        const BasisIndex s0 = insert_zero_bit(static_cast<BasisIndex>(r), site);
        const BasisIndex s1 = s0 | bit;
        const Complex a0 = amps[s0];
        const Complex a1 = amps[s1];
        amps[s0] = u00 * a0 + u01 * a1;
        amps[s1] = u10 * a0 + u11 * a1;
    }
}

void apply_two_site(Amplitudes amps, int site, const Matrix4c& u) {
    const BasisIndex b0 = BasisIndex{1} << site;
    const BasisIndex b1 = BasisIndex{1} << (site + 1);
    const auto quarter = static_cast<std::int64_t>(amps.size() / 4);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < quarter; ++r) {
        const BasisIndex s = insert_zero_bit(insert_zero_bit(static_cast<BasisIndex>(r), site), site + 1);
        const BasisIndex idx[4] = {s, s | b0, s | b1, s | b0 | b1};
        Complex a[4];
        for (int k = 0; k < 4; ++k) a[k] = amps[idx[k]];
        for (int k = 0; k < 4; ++k) {
            amps[idx[k]] = u(k, 0) * a[0] + u(k, 1) * a[1] + u(k, 2) * a[2] + u(k, 3) * a[3];
        }
    }
}

void diagonal_phase(Amplitudes amps, std::span<const double> diag, double scale) {
    if (diag.size() != amps.size()) throw std::invalid_argument("diagonal size mismatch");
    const auto dim = static_cast<std::int64_t>(amps.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < dim; ++s) {
        amps[s] *= std::polar(1.0, -scale * diag[s]);
    }
}

std::vector<double> marginal_probabilities(ConstAmplitudes amps, std::span<const int> sites) {
    const std::size_t out_dim = std::size_t{1} << sites.size();
    const auto dim = static_cast<std::int64_t>(amps.size());
    const std::int64_t n_chunks = (dim + kChunk - 1) / kChunk;
    std::vector<double> partial(static_cast<std::size_t>(n_chunks) * out_dim, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        double* hist = partial.data() + static_cast<std::size_t>(c) * out_dim;
        const std::int64_t end = std::min(dim, (c + 1) * kChunk);
        for (std::int64_t s = c * kChunk; s < end; ++s) {
            hist[extract_bits(static_cast<BasisIndex>(s), sites)] += std::norm(amps[s]);
        }
    }
    std::vector<double> probs(out_dim, 0.0);
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        const double* hist = partial.data() + static_cast<std::size_t>(c) * out_dim;
        for (std::size_t k = 0; k < out_dim; ++k) probs[k] += hist[k];
    }
    return probs;
}

double factorized_form(std::span<const double> p, std::span<const Eigen::Matrix2d> weights,
                       std::span<const double> q) {
    const std::size_t dim = std::size_t{1} << weights.size();
    if (p.size() != dim || q.size() != dim) throw std::invalid_argument("weight/vector size mismatch");
    std::vector<double> t(q.begin(), q.end());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const Eigen::Matrix2d& w = weights[k];
        const auto half = static_cast<std::int64_t>(dim / 2);
#pragma omp parallel for schedule(static) if (dim > 4096)
        for (std::int64_t r = 0; r < half; ++r) {
            const BasisIndex s0 = insert_zero_bit(static_cast<BasisIndex>(r), static_cast<int>(k));
            const BasisIndex s1 = s0 | (BasisIndex{1} << k);
            const double t0 = t[s0];
            const double t1 = t[s1];
            t[s0] = w(0, 0) * t0 + w(0, 1) * t1;
            t[s1] = w(1, 0) * t0 + w(1, 1) * t1;
        }
    }
    double total = 0.0;
    for (std::size_t s = 0; s < dim; ++s) total += p[s] * t[s];
    return total;
}

} // namespace parallel
} // namespace rmspt::kernels
