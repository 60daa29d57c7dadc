#include "rmspt/rdm.hpp"

#include <cmath>
#include <stdexcept>

#include "rmspt/kernels.hpp"

namespace rmspt {
namespace {

void require_segments(const PartitionSpec& p, int count, const char* what) {
    if (p.num_segments() != count) {
        throw std::invalid_argument(std::string(what) + ": partition needs exactly " + std::to_string(count) +
                                    " segments, got " + std::to_string(p.num_segments()));
    }
}

void require_equal_pair(const PartitionSpec& p, const char* what) {
    require_segments(p, 2, what);
    if (p.segments[0].length != p.segments[1].length) {
        throw std::invalid_argument(std::string(what) + ": segments I1 and I2 must have equal length");
    }
}

std::vector<int> bit_range(int offset, int count) {
    std::vector<int> out(count);
    for (int k = 0; k < count; ++k) out[k] = offset + k;
    return out;
}

/// Applies u to local bit `bit` of every column of m (left multiplication).
void left_apply(MatrixXc& m, int bit, const Matrix2c& u) {
    const Eigen::Index dim = m.rows();
    const Eigen::Index mask = Eigen::Index{1} << bit;
    for (Eigen::Index i0 = 0; i0 < dim; ++i0) {
        if (i0 & mask) continue;
        const Eigen::Index i1 = i0 | mask;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const Complex v0 = m(i0, c);
            const Complex v1 = m(i1, c);
            m(i0, c) = u(0, 0) * v0 + u(0, 1) * v1;
            m(i1, c) = u(1, 0) * v0 + u(1, 1) * v1;
        }
    }
}

std::vector<double> all_segment_purities(const ReducedDensityMatrix& rdm) {
    std::vector<double> out;
    for (int k = 0; k < rdm.partition.num_segments(); ++k) out.push_back(purity(segment_rdm(rdm, k)));
    return out;
}

InvariantValue finish(InvariantKind kind, Complex trace, std::vector<double> purities, double norm_purity,
                      double exponent) {
    InvariantValue v;
    v.kind = kind;
    v.raw = trace.real();
    v.imaginary_residual = std::abs(trace.imag());
    v.segment_purities = std::move(purities);
    v.normalizing_purity = norm_purity;
    v.normalized = v.raw / std::pow(norm_purity, exponent);
    return v;
}

struct PairPattern {
    int a, b, ap, bp;
    double w;
};

std::array<PairPattern, 4> pair_patterns(PairOp op) {
    switch (op) {
    case PairOp::Identity:
        return {{{0, 0, 0, 0, 1}, {0, 1, 0, 1, 1}, {1, 0, 1, 0, 1}, {1, 1, 1, 1, 1}}};
    case PairOp::ZZ:
        return {{{0, 0, 0, 0, 1}, {0, 1, 0, 1, -1}, {1, 0, 1, 0, -1}, {1, 1, 1, 1, 1}}};
    case PairOp::Swap:
        return {{{0, 0, 0, 0, 1}, {0, 1, 1, 0, 1}, {1, 0, 0, 1, 1}, {1, 1, 1, 1, 1}}};
    case PairOp::Transpose:
        return {{{0, 0, 0, 0, 1}, {0, 0, 1, 1, 1}, {1, 1, 0, 0, 1}, {1, 1, 1, 1, 1}}};
    }
    throw std::logic_error("unknown PairOp");
}

struct TwoCopy {
    const MatrixXc& a;
    const MatrixXc& b;
    std::vector<std::array<PairPattern, 4>> patterns;

    Complex sum(std::size_t site, Eigen::Index ia, Eigen::Index ib, Eigen::Index iap, Eigen::Index ibp,
                double w) const {
        if (site == patterns.size()) return w * a(iap, ia) * b(ibp, ib);
        Complex acc{};
        for (const auto& p : patterns[site]) {
            acc += sum(site + 1, ia | (Eigen::Index{p.a} << site), ib | (Eigen::Index{p.b} << site),
                       iap | (Eigen::Index{p.ap} << site), ibp | (Eigen::Index{p.bp} << site), w * p.w);
        }
        return acc;
    }
};

} // namespace

std::string to_string(InvariantKind kind) {
    switch (kind) {
    case InvariantKind::R: return "R";
    case InvariantKind::T: return "T";
    case InvariantKind::D2: return "D2";
    case InvariantKind::KB: return "KB";
    }
    return "?";
}

InvariantKind parse_invariant_kind(const std::string& text) {
    if (text == "R") return InvariantKind::R;
    if (text == "T") return InvariantKind::T;
    if (text == "D2") return InvariantKind::D2;
    if (text == "KB") return InvariantKind::KB;
    throw std::invalid_argument("unknown invariant kind '" + text + "' (expected R, T, D2 or KB)");
}

ReducedDensityMatrix reduced_density_matrix(const StateVector& state, const PartitionSpec& partition) {
    partition.validate();
    if (partition.num_sites != state.num_sites()) throw std::invalid_argument("partition/state size mismatch");
    const auto inside = partition.sites();
    if (static_cast<int>(inside.size()) > kMaxRdmSites) {
        throw std::invalid_argument("interval too large for a dense RDM (|I| <= " + std::to_string(kMaxRdmSites) + ")");
    }
    std::vector<int> outside;
    for (int s = 0, k = 0; s < state.num_sites(); ++s) {
        if (k < static_cast<int>(inside.size()) && inside[k] == s) {
            ++k;
        } else {
            outside.push_back(s);
        }
    }
    const Eigen::Index dim_in = Eigen::Index{1} << inside.size();
    const Eigen::Index dim_out = Eigen::Index{1} << outside.size();
    MatrixXc psi(dim_in, dim_out);
    for (BasisIndex s = 0; s < state.dimension(); ++s) {
        psi(kernels::extract_bits(s, inside), kernels::extract_bits(s, outside)) = state[s];
    }
    return ReducedDensityMatrix{partition, psi * psi.adjoint()};
}

double purity(const MatrixXc& rho) { return rho.cwiseAbs2().sum(); }
double purity(const ReducedDensityMatrix& rdm) { return purity(rdm.matrix); }

MatrixXc partial_trace_keep(const MatrixXc& rho, int num_bits, std::span<const int> keep) {
    std::vector<int> rest;
    for (int k = 0; k < num_bits; ++k) {
        bool kept = false;
        for (int q : keep) kept = kept || q == k;
        if (!kept) rest.push_back(k);
    }
    const Eigen::Index dk = Eigen::Index{1} << keep.size();
    const Eigen::Index dr = Eigen::Index{1} << rest.size();
    auto compose = [&](Eigen::Index x, Eigen::Index r) {
        Eigen::Index i = 0;
        for (std::size_t k = 0; k < keep.size(); ++k) i |= ((x >> k) & 1) << keep[k];
        for (std::size_t k = 0; k < rest.size(); ++k) i |= ((r >> k) & 1) << rest[k];
        return i;
    };
    MatrixXc out = MatrixXc::Zero(dk, dk);
    for (Eigen::Index r = 0; r < dr; ++r) {
        for (Eigen::Index x = 0; x < dk; ++x) {
            const Eigen::Index ix = compose(x, r);
            for (Eigen::Index y = 0; y < dk; ++y) out(x, y) += rho(ix, compose(y, r));
        }
    }
    return out;
}

MatrixXc segment_rdm(const ReducedDensityMatrix& rdm, int segment) {
    const auto bits = bit_range(rdm.partition.local_offset(segment), rdm.partition.segments.at(segment).length);
    return partial_trace_keep(rdm.matrix, rdm.num_bits(), bits);
}

MatrixXc partial_transpose_low(const MatrixXc& rho, int num_bits, int low_bits) {
    const Eigen::Index dim = Eigen::Index{1} << num_bits;
    const Eigen::Index low_mask = (Eigen::Index{1} << low_bits) - 1;
    MatrixXc out(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const Eigen::Index a = i & low_mask;
            const Eigen::Index ap = j & low_mask;
            out(i, j) = rho((i & ~low_mask) | ap, (j & ~low_mask) | a);
        }
    }
    return out;
}

MatrixXc conjugate_by_pauli(const MatrixXc& rho, int /*num_bits*/, std::span<const int> bits, const Matrix2c& pauli) {
    MatrixXc m = rho;
    for (int b : bits) left_apply(m, b, pauli);
    MatrixXc adj = m.adjoint();
    for (int b : bits) left_apply(adj, b, pauli);
    return adj.adjoint();
}

Complex two_copy_trace(const MatrixXc& a, const MatrixXc& b, std::span<const PairOp> ops) {
    const Eigen::Index dim = Eigen::Index{1} << ops.size();
    if (a.rows() != dim || a.cols() != dim || b.rows() != dim || b.cols() != dim) {
        throw std::invalid_argument("two_copy_trace: operand size does not match the operator list");
    }
    TwoCopy tc{a, b, {}};
    for (PairOp op : ops) tc.patterns.push_back(pair_patterns(op));
    return tc.sum(0, 0, 0, 0, 0, 1.0);
}

InvariantValue exact_zr(const ReducedDensityMatrix& rdm) {
    require_equal_pair(rdm.partition, "exact_zr");
    const int bits = rdm.num_bits();
    Complex trace{};
    for (Eigen::Index s = 0; s < rdm.matrix.rows(); ++s) {
        trace += rdm.matrix(s, static_cast<Eigen::Index>(reverse_bits(static_cast<BasisIndex>(s), bits)));
    }
    auto pur = all_segment_purities(rdm);
    const double mean = 0.5 * (pur[0] + pur[1]);
    return finish(InvariantKind::R, trace, std::move(pur), mean, 0.5);
}

InvariantValue exact_zt(const ReducedDensityMatrix& rdm) {
    require_equal_pair(rdm.partition, "exact_zt");
    const int bits = rdm.num_bits();
    const int n1 = rdm.partition.segments[0].length;
    const auto i1 = bit_range(0, n1);
    const MatrixXc twisted = conjugate_by_pauli(partial_transpose_low(rdm.matrix, bits, n1), bits, i1, pauli::y());
    const Complex trace = rdm.matrix.cwiseProduct(twisted.transpose()).sum();
    auto pur = all_segment_purities(rdm);
    const double mean = 0.5 * (pur[0] + pur[1]);
    return finish(InvariantKind::T, trace, std::move(pur), mean, 1.5);
}

namespace {

std::vector<PairOp> swap_z_swap(const PartitionSpec& p) {
    std::vector<PairOp> ops;
    ops.insert(ops.end(), p.segments[0].length, PairOp::Swap);
    ops.insert(ops.end(), p.segments[1].length, PairOp::ZZ);
    ops.insert(ops.end(), p.segments[2].length, PairOp::Swap);
    return ops;
}

InvariantValue finish_triple(InvariantKind kind, const ReducedDensityMatrix& rdm, Complex trace) {
    auto pur = all_segment_purities(rdm);
    const double mean = 0.5 * (pur[0] + pur[2]);
    return finish(kind, trace, std::move(pur), mean, 1.5);
}

} // namespace

InvariantValue exact_zd2(const ReducedDensityMatrix& rdm) {
    require_segments(rdm.partition, 3, "exact_zd2");
    const int bits = rdm.num_bits();
    const auto i1 = bit_range(0, rdm.partition.segments[0].length);
    const MatrixXc flipped = conjugate_by_pauli(rdm.matrix, bits, i1, pauli::x());
    const auto ops = swap_z_swap(rdm.partition);
    return finish_triple(InvariantKind::D2, rdm, two_copy_trace(flipped, rdm.matrix, ops));
}

InvariantValue exact_zkb(const ReducedDensityMatrix& rdm) {
    require_segments(rdm.partition, 3, "exact_zkb");
    const int bits = rdm.num_bits();
    const int n1 = rdm.partition.segments[0].length;
    const auto i1 = bit_range(0, n1);
    const MatrixXc twisted = conjugate_by_pauli(partial_transpose_low(rdm.matrix, bits, n1), bits, i1, pauli::y());
    const auto ops = swap_z_swap(rdm.partition);
    return finish_triple(InvariantKind::KB, rdm, two_copy_trace(twisted, rdm.matrix, ops));
}

InvariantValue exact_zd2(const StateVector& state, const PartitionSpec& partition) {
    return exact_zd2(reduced_density_matrix(state, partition));
}

InvariantValue exact_zkb(const StateVector& state, const PartitionSpec& partition) {
    return exact_zkb(reduced_density_matrix(state, partition));
}

InvariantValue exact_invariant(InvariantKind kind, const ReducedDensityMatrix& rdm) {
    switch (kind) {
    case InvariantKind::R: return exact_zr(rdm);
    case InvariantKind::T: return exact_zt(rdm);
    case InvariantKind::D2: return exact_zd2(rdm);
    case InvariantKind::KB: return exact_zkb(rdm);
    }
    throw std::logic_error("unknown invariant kind");
}

InvariantValue exact_invariant(InvariantKind kind, const StateVector& state, const PartitionSpec& partition) {
    return exact_invariant(kind, reduced_density_matrix(state, partition));
}

} // namespace rmspt
