#include "rmspt/partition.hpp"

#include <stdexcept>

namespace rmspt {

PartitionSpec PartitionSpec::reflection_pair(int num_sites, int n) {
    if (n < 1 || 2 * n > num_sites) {
        throw std::invalid_argument("partition: need 1 <= n <= N/2 (n=" + std::to_string(n) +
                                    ", N=" + std::to_string(num_sites) + ")");
    }
    PartitionSpec p{num_sites, {{num_sites / 2 - n, n}, {num_sites / 2, n}}};
    p.validate();
    return p;
}

PartitionSpec PartitionSpec::centered_triple(int num_sites, int m) {
    if (m < 1 || 3 * m > num_sites) {
        throw std::invalid_argument("partition: need 1 <= n <= N/3 (n=" + std::to_string(m) +
                                    ", N=" + std::to_string(num_sites) + ")");
    }
    const int start = (num_sites - 3 * m) / 2;
    PartitionSpec p{num_sites, {{start, m}, {start + m, m}, {start + 2 * m, m}}};
    p.validate();
    return p;
}

void PartitionSpec::validate() const {
    if (segments.empty()) throw std::invalid_argument("partition has no segments");
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& seg = segments[k];
        if (seg.length < 1) throw std::invalid_argument("partition segment is empty");
        if (seg.begin < 0 || seg.end() > num_sites) throw std::invalid_argument("partition segment outside the chain");
        if (k > 0 && seg.begin != segments[k - 1].end()) {
            throw std::invalid_argument("partition segments must be adjacent and ascending");
        }
    }
}

int PartitionSpec::interval_size() const {
    int total = 0;
    for (const auto& seg : segments) total += seg.length;
    return total;
}

std::vector<int> PartitionSpec::sites() const {
    std::vector<int> out;
    for (const auto& seg : segments) {
        for (int s = seg.begin; s < seg.end(); ++s) out.push_back(s);
    }
    return out;
}

std::vector<int> PartitionSpec::segment_sites(int k) const {
    const auto& seg = segments.at(k);
    std::vector<int> out;
    for (int s = seg.begin; s < seg.end(); ++s) out.push_back(s);
    return out;
}

int PartitionSpec::local_offset(int k) const {
    int offset = 0;
    for (int i = 0; i < k; ++i) offset += segments.at(i).length;
    return offset;
}

int PartitionSpec::segment_length() const {
    const int len = segments.at(0).length;
    for (const auto& seg : segments) {
        if (seg.length != len) throw std::invalid_argument("partition segments have unequal lengths");
    }
    return len;
}

std::string PartitionSpec::describe() const {
    std::string out;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (k) out += ' ';
        out += "I" + std::to_string(k + 1) + "=[" + std::to_string(segments[k].begin) + "," +
               std::to_string(segments[k].end()) + ")";
    }
    return out;
}

} // namespace rmspt
