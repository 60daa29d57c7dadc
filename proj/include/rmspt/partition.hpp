#pragma once

// The measured interval I and its contiguous segments. Sites are 0-based and
// the interval lists them in ascending order, so in region-local bitstrings
// I1 occupies the lowest bits, then I2, then I3.

#include <string>
#include <vector>

namespace rmspt {

struct SiteRange {
    int begin = 0;
    int length = 0;
    int end() const { return begin + length; }
    friend bool operator==(const SiteRange&, const SiteRange&) = default;
};

struct PartitionSpec {
    int num_sites = 0;
    std::vector<SiteRange> segments;

    /// I1 = [N/2-n, N/2), I2 = [N/2, N/2+n): centred on the middle bond.
    static PartitionSpec reflection_pair(int num_sites, int n);
    /// Three adjacent segments of m sites starting at (N-3m)/2.
    static PartitionSpec centered_triple(int num_sites, int m);

    /// Throws std::invalid_argument unless segments are non-empty, contiguous,
    /// adjacent, in ascending order and inside the chain.
    void validate() const;

    int num_segments() const { return static_cast<int>(segments.size()); }
    int interval_size() const;
    /// Sites of the whole interval, ascending.
    std::vector<int> sites() const;
    std::vector<int> segment_sites(int k) const;
    /// Local bit offset of segment k within the interval bitstring.
    int local_offset(int k) const;
    /// Sites per segment when all are equal, else throws.
    int segment_length() const;
    std::string describe() const;

    friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;
};

} // namespace rmspt
